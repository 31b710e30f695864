//! File formats. CSV columns and JSON fields are part of the public
//! contract; every JSON document carries `format_version`.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::dynamics::{MarketSharePath, RunConfig};
use crate::error::{Error, Result};
use crate::estimation::{AgeBracket, CvTable, Demographics, Education, Gender, Observation};
use crate::montecarlo::{EnsembleResult, Histogram};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

pub const OBSERVATION_COLUMNS: [&str; 4] = ["question_id", "delta_stars", "delta_friends", "chose_1"];
pub const DEMOGRAPHIC_COLUMNS: [&str; 3] = ["gender", "age", "edu"];

#[derive(Serialize)]
struct Versioned<'a, P: Serialize> {
    format_version: u32,
    kind: &'a str,
    #[serde(flatten)]
    payload: &'a P,
}

/// Pretty JSON with `format_version` and `kind` ahead of the payload's own
/// fields. `payload` must serialize as a map.
pub fn versioned_json<P: Serialize>(kind: &str, payload: &P) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Versioned {
        format_version: FORMAT_VERSION,
        kind,
        payload,
    })?;
    s.push('\n');
    Ok(s)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

/// Reads choice observations. The demographic columns are optional but must
/// appear together; an empty demographic cell leaves that row without
/// demographics.
pub fn read_observations<T: Scalar, R: Read>(input: R, source: &str) -> Result<Vec<Observation<T>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(OBSERVATION_COLUMNS) {
        *slot = find(name).ok_or_else(|| Error::Schema(format!("{source}: missing column `{name}`")))?;
    }
    let demo: Vec<Option<usize>> = DEMOGRAPHIC_COLUMNS.iter().map(|c| find(c)).collect();
    let demo = match demo.as_slice() {
        [Some(g), Some(a), Some(e)] => Some([*g, *a, *e]),
        [None, None, None] => None,
        _ => {
            return Err(Error::Schema(format!(
                "{source}: demographic columns gender, age, edu must appear together"
            )))
        }
    };

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let cell = |j: usize| record.get(j).unwrap_or("");
        let number = |j: usize, name: &str| -> Result<T> {
            cell(j)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(T::lit)
                .ok_or_else(|| {
                    Error::Schema(format!(
                        "{source}:{row}: `{name}` is not a finite number: `{}`",
                        cell(j)
                    ))
                })
        };
        let chose = parse_bool(cell(idx[3])).ok_or_else(|| {
            Error::Schema(format!(
                "{source}:{row}: `chose_1` must be 0 or 1, got `{}`",
                cell(idx[3])
            ))
        })?;
        let mut obs = Observation::new(
            cell(idx[0]),
            number(idx[1], "delta_stars")?,
            number(idx[2], "delta_friends")?,
            chose,
        );
        if let Some([g, a, e]) = demo {
            if [g, a, e].iter().any(|&j| !cell(j).is_empty()) {
                let level = |j: usize, variable: &'static str| -> Result<()> {
                    if cell(j).is_empty() {
                        return Err(Error::Schema(format!("{source}:{row}: `{variable}` is empty")));
                    }
                    Ok(())
                };
                level(g, "gender")?;
                level(a, "age")?;
                level(e, "edu")?;
                obs = obs.with_demographics(Demographics::new(
                    cell(g).parse::<Gender>()?,
                    cell(a).parse::<AgeBracket>()?,
                    cell(e).parse::<Education>()?,
                ));
            }
        }
        out.push(obs);
    }
    Ok(out)
}

pub fn load_observations<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<Observation<T>>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_observations(file, &path.display().to_string())
}

pub fn write_observations<T: Scalar, W: Write>(data: &[Observation<T>], out: W) -> Result<()> {
    let with_demo = data.iter().any(|o| o.demographics.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = OBSERVATION_COLUMNS.to_vec();
    if with_demo {
        header.extend(DEMOGRAPHIC_COLUMNS);
    }
    w.write_record(&header)?;
    for o in data {
        let mut rec = vec![
            o.question_id.clone(),
            o.delta_stars.to_string(),
            o.delta_friends.to_string(),
            u8::from(o.chose_1).to_string(),
        ];
        if with_demo {
            match o.demographics {
                Some(d) => rec.extend([d.gender.to_string(), d.age.to_string(), d.education.to_string()]),
                None => rec.extend([String::new(), String::new(), String::new()]),
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// Cross-validation table; the last row holds the mean absolute difference.
pub fn write_cv_csv<T: Scalar, W: Write>(table: &CvTable<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["left_out_question", "actual", "predicted", "abs_difference"])?;
    for r in &table.rows {
        w.write_record([
            r.question_id.clone(),
            r.actual.to_string(),
            r.predicted.to_string(),
            r.abs_difference.to_string(),
        ])?;
    }
    w.write_record(["mean", "", "", &table.mean_abs_difference.to_string()])?;
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn write_path_csv<T: Scalar, W: Write>(path: &MarketSharePath<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "share_1", "s1", "s2"])?;
    for p in &path.points {
        w.write_record([
            p.t.to_string(),
            p.share_1.to_string(),
            p.s1.to_string(),
            p.s2.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata<'a, T> {
    pub config: &'a RunConfig<T>,
    pub seed: u64,
    pub steps: usize,
    pub final_share_1: T,
}

pub fn run_metadata_json<T: Scalar>(config: &RunConfig<T>, path: &MarketSharePath<T>) -> Result<String> {
    versioned_json(
        "run",
        &RunMetadata {
            config,
            seed: path.seed,
            steps: path.points.last().map_or(0, |p| p.t),
            final_share_1: path.final_share_1,
        },
    )
}

pub fn write_ensemble_csv<T: Scalar, W: Write>(result: &EnsembleResult<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["run_index", "final_share_1"])?;
    for (i, s) in result.final_shares.iter().enumerate() {
        w.write_record([i.to_string(), s.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn write_histogram_csv<T: Scalar, W: Write>(h: &Histogram<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin_low", "bin_high", "count"])?;
    for (i, c) in h.counts.iter().enumerate() {
        w.write_record([h.edges[i].to_string(), h.edges[i + 1].to_string(), c.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
