//! Reader for the subset of GML used by network-science datasets:
//!
//! ```text
//! graph [
//!   node [ id 0 label "A" ]
//!   edge [ source 0 target 1 ]
//! ]
//! ```
//!
//! Unknown keys and nested attribute lists (`graphics [ ... ]`, `value 2.5`)
//! are skipped.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::SocialGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Key(String),
    Int(i64),
    Real(f64),
    Str(String),
    Open,
    Close,
}

#[derive(Debug)]
enum Value {
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<(String, Value, Pos)>),
}

impl Value {
    fn as_id(&self) -> Option<String> {
        match self {
            Value::Int(i) => Some(i.to_string()),
            Value::Real(r) if r.fract() == 0.0 => Some((*r as i64).to_string()),
            Value::Str(s) => Some(s.clone()),
            _ => None,
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> ParseResult<Vec<(Token, Pos)>> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let start = self.pos;
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                '[' => {
                    self.bump();
                    out.push((Token::Open, start));
                }
                ']' => {
                    self.bump();
                    out.push((Token::Close, start));
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('"') => break,
                            Some(c) => s.push(c),
                            None => return Err((start, "unterminated string".into())),
                        }
                    }
                    out.push((Token::Str(s), start));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    out.push((Token::Key(s), start));
                }
                c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | 'e' | 'E') {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let tok = if let Ok(i) = s.parse::<i64>() {
                        Token::Int(i)
                    } else if let Ok(r) = s.parse::<f64>() {
                        Token::Real(r)
                    } else {
                        return Err((start, format!("bad number `{s}`")));
                    };
                    out.push((tok, start));
                }
                other => return Err((start, format!("unexpected character `{other}`"))),
            }
        }
        Ok(out)
    }
}

type Items = Vec<(String, Value, Pos)>;
type ParseResult<T> = std::result::Result<T, (Pos, String)>;

struct Parser {
    tokens: Vec<(Token, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn list(&mut self, nested: bool) -> ParseResult<Items> {
        let mut items = Vec::new();
        loop {
            let Some((tok, pos)) = self.tokens.get(self.at).cloned() else {
                if nested {
                    return Err((self.end, "missing `]`".into()));
                }
                return Ok(items);
            };
            self.at += 1;
            let key = match tok {
                Token::Close if nested => return Ok(items),
                Token::Key(k) => k,
                other => return Err((pos, format!("expected a key, found {}", describe(&other)))),
            };
            let Some((tok, vpos)) = self.tokens.get(self.at).cloned() else {
                return Err((self.end, format!("key `{key}` has no value")));
            };
            self.at += 1;
            let value = match tok {
                Token::Int(i) => Value::Int(i),
                Token::Real(r) => Value::Real(r),
                Token::Str(s) => Value::Str(s),
                Token::Open => Value::List(self.list(true)?),
                other => {
                    return Err((
                        vpos,
                        format!("expected a value for `{key}`, found {}", describe(&other)),
                    ))
                }
            };
            items.push((key, value, pos));
        }
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Key(k) => format!("key `{k}`"),
        Token::Int(i) => format!("number {i}"),
        Token::Real(r) => format!("number {r}"),
        Token::Str(s) => format!("string \"{s}\""),
        Token::Open => "`[`".into(),
        Token::Close => "`]`".into(),
    }
}

/// Parses GML text. `source` names the input in error messages.
pub fn parse_gml(text: &str, source: &str) -> Result<SocialGraph> {
    let err = |(pos, message): (Pos, String)| Error::Gml {
        path: source.to_string(),
        line: pos.line,
        column: pos.column,
        message,
    };
    let tokens = Lexer::new(text).tokens().map_err(err)?;
    let end = {
        let lines = text.split('\n').count();
        Pos {
            line: lines,
            column: text.rsplit('\n').next().map_or(1, |l| l.chars().count() + 1),
        }
    };
    let mut parser = Parser { tokens, at: 0, end };
    let top = parser.list(false).map_err(err)?;

    let (graph_items, _) = top
        .into_iter()
        .find_map(|(k, v, p)| match (k.as_str(), v) {
            ("graph", Value::List(items)) => Some((items, p)),
            _ => None,
        })
        .ok_or_else(|| err((Pos { line: 1, column: 1 }, "no `graph [ ... ]` block".into())))?;

    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut raw_edges = Vec::new();
    for (key, value, pos) in graph_items {
        match (key.as_str(), value) {
            ("node", Value::List(attrs)) => {
                let mut id = None;
                let mut label = None;
                for (k, v, _) in &attrs {
                    match k.as_str() {
                        "id" => id = v.as_id(),
                        "label" => label = v.as_id(),
                        _ => {}
                    }
                }
                let id = id.ok_or_else(|| err((pos, "node without `id`".into())))?;
                let dense = labels.len();
                if ids.insert(id.clone(), dense).is_some() {
                    return Err(err((pos, format!("duplicate node id {id}"))));
                }
                labels.push(label.unwrap_or(id));
            }
            ("edge", Value::List(attrs)) => {
                let mut source = None;
                let mut target = None;
                for (k, v, _) in &attrs {
                    match k.as_str() {
                        "source" => source = v.as_id(),
                        "target" => target = v.as_id(),
                        _ => {}
                    }
                }
                match (source, target) {
                    (Some(s), Some(t)) => raw_edges.push((s, t)),
                    _ => return Err(err((pos, "edge without `source` and `target`".into()))),
                }
            }
            ("node" | "edge", _) => return Err(err((pos, format!("`{key}` must be a list")))),
            _ => {}
        }
    }

    let mut edges = Vec::with_capacity(raw_edges.len());
    for (s, t) in raw_edges {
        let lookup = |id: &String| {
            ids.get(id).copied().ok_or_else(|| Error::DanglingEndpoint {
                path: source.to_string(),
                id: id.clone(),
            })
        };
        edges.push((lookup(&s)?, lookup(&t)?));
    }
    SocialGraph::from_edges(labels.len(), edges)?.with_labels(labels)
}

pub fn load_gml(path: impl AsRef<Path>) -> Result<SocialGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gml(&text, &path.display().to_string())
}

/// Serializes to GML with ids `0..n` and labels when present.
pub fn write_gml(g: &SocialGraph) -> String {
    let mut s = String::from("graph [\n");
    for v in 0..g.node_count() {
        match g.label(v) {
            Some(l) => {
                let _ = writeln!(s, "  node [ id {v} label \"{}\" ]", l.replace('"', "'"));
            }
            None => {
                let _ = writeln!(s, "  node [ id {v} ]");
            }
        }
    }
    for (u, v) in g.edges() {
        let _ = writeln!(s, "  edge [ source {u} target {v} ]");
    }
    s.push_str("]\n");
    s
}
