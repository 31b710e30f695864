//! Whitespace-separated `u v` edge lists.
//!
//! When every endpoint is a non-negative integer the integers are the node
//! ids and the node count is `max id + 1`; a `# nodes: N` comment raises it
//! to `N` so isolated trailing nodes survive a round trip. Otherwise ids are
//! labels, numbered in order of first appearance. Other `#` lines are
//! comments; columns after the second are ignored.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use super::SocialGraph;
use crate::error::{Error, Result};

pub fn parse_edge_list(text: &str, source: &str) -> Result<SocialGraph> {
    let mut declared_nodes = None;
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("nodes:") {
                let n = n.trim().parse::<usize>().map_err(|_| Error::EdgeList {
                    path: source.to_string(),
                    line: i + 1,
                    message: format!("bad node count `{}`", n.trim()),
                })?;
                declared_nodes = Some(n);
            }
            continue;
        }
        let mut cols = line.split_whitespace();
        match (cols.next(), cols.next()) {
            (Some(u), Some(v)) => pairs.push((u, v)),
            _ => {
                return Err(Error::EdgeList {
                    path: source.to_string(),
                    line: i + 1,
                    message: "expected two endpoints".into(),
                })
            }
        }
    }
    if pairs.is_empty() && declared_nodes.unwrap_or(0) == 0 {
        return Err(Error::EdgeList {
            path: source.to_string(),
            line: 0,
            message: "empty graph".into(),
        });
    }

    let numeric: Option<Vec<(usize, usize)>> = pairs
        .iter()
        .map(|(u, v)| Some((u.parse().ok()?, v.parse().ok()?)))
        .collect();
    match numeric {
        Some(edges) => {
            let max = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
            SocialGraph::from_edges(max.max(declared_nodes.unwrap_or(0)), edges)
        }
        None => {
            let mut ids: HashMap<&str, usize> = HashMap::new();
            let mut labels = Vec::new();
            let mut edges = Vec::with_capacity(pairs.len());
            for &(u, v) in &pairs {
                let mut ends = [0usize; 2];
                for (end, name) in ends.iter_mut().zip([u, v]) {
                    *end = *ids.entry(name).or_insert_with(|| {
                        labels.push(name.to_string());
                        labels.len() - 1
                    });
                }
                edges.push((ends[0], ends[1]));
            }
            SocialGraph::from_edges(labels.len(), edges)?.with_labels(labels)
        }
    }
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<SocialGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, &path.display().to_string())
}

pub fn write_edge_list<W: Write>(g: &SocialGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nodes: {}", g.node_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}
