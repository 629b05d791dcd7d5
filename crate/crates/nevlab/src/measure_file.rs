//! Text file format for measures.
//!
//! A measure file is UTF-8 plain text. Lines starting with `#` and blank
//! lines are ignored. The remaining lines are key/value records:
//!
//! ```text
//! a 1.5
//! atoms -1 1
//! weights 0.5 0.5
//! ```
//!
//! `atoms` and `weights` are whitespace-separated decimal literals of equal
//! count; `a` is an optional constant that upgrades the measure to Nevanlinna
//! transform data. Floats are written in the shortest form that parses back
//! to the same bit pattern, so write ∘ read is the identity on files the
//! crate produced itself.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, NevanlinnaData};

/// Parsed contents of a measure file: the measure and the optional constant.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureFile {
    pub a: Option<f64>,
    pub measure: DiscreteMeasure,
}

impl MeasureFile {
    pub fn from_measure(measure: DiscreteMeasure) -> Self {
        MeasureFile { a: None, measure }
    }

    pub fn from_nevanlinna(data: &NevanlinnaData) -> Self {
        MeasureFile {
            a: Some(data.a),
            measure: data.rho.clone(),
        }
    }

    /// The Nevanlinna data, defaulting the constant to 0 when absent.
    pub fn nevanlinna_data(&self) -> NevanlinnaData {
        NevanlinnaData::new(self.a.unwrap_or(0.0), self.measure.clone())
    }
}

fn parse_floats(rest: &str, line_no: usize) -> Result<Vec<f64>> {
    rest.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {line_no}: bad number '{tok}'")))
        })
        .collect()
}

pub fn parse(text: &str) -> Result<MeasureFile> {
    let mut a = None;
    let mut atoms: Option<Vec<f64>> = None;
    let mut weights: Option<Vec<f64>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let (key, rest) = line.split_once(char::is_whitespace).ok_or_else(|| {
            Error::Parse(format!("line {line_no}: expected 'key values...'"))
        })?;
        match key {
            "a" => {
                let vals = parse_floats(rest, line_no)?;
                if vals.len() != 1 {
                    return Err(Error::Parse(format!(
                        "line {line_no}: 'a' takes exactly one value"
                    )));
                }
                a = Some(vals[0]);
            }
            "atoms" => atoms = Some(parse_floats(rest, line_no)?),
            "weights" => weights = Some(parse_floats(rest, line_no)?),
            other => {
                return Err(Error::Parse(format!("line {line_no}: unknown key '{other}'")));
            }
        }
    }
    let atoms = atoms.ok_or_else(|| Error::Parse("missing 'atoms' line".into()))?;
    let weights = weights.ok_or_else(|| Error::Parse("missing 'weights' line".into()))?;
    let measure = DiscreteMeasure::new(atoms, weights)?;
    Ok(MeasureFile { a, measure })
}

fn push_floats(out: &mut String, values: &[f64]) {
    for v in values {
        // {:?} on f64 is the shortest representation that round-trips
        let _ = write!(out, " {v:?}");
    }
    out.push('\n');
}

pub fn render(file: &MeasureFile) -> String {
    let mut out = String::new();
    if let Some(a) = file.a {
        let _ = write!(out, "a {a:?}");
        out.push('\n');
    }
    out.push_str("atoms");
    push_floats(&mut out, file.measure.atoms());
    out.push_str("weights");
    push_floats(&mut out, file.measure.weights());
    out
}

pub fn read(path: &Path) -> Result<MeasureFile> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn write(path: &Path, file: &MeasureFile) -> Result<()> {
    std::fs::write(path, render(file))?;
    Ok(())
}
