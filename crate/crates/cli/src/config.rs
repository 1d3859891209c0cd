//! Run configuration: an optional JSON document overlaid by command-line flags.

use std::path::{Path, PathBuf};

use plankton_qso::{Parameters, SimplexPoint};
use serde::Deserialize;

use crate::Failure;

/// A number given either as a JSON number or as decimal text.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Value(f64),
    Text(String),
}

impl Num {
    fn value(&self, key: &str) -> Result<f64, Failure> {
        match self {
            Num::Value(v) => Ok(*v),
            Num::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{key}: cannot parse {s:?} as a number"))),
        }
    }
}

/// Initial point as a list of six numbers or as `"v1,...,v6"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PointText {
    List(Vec<Num>),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub a1: Option<Num>,
    pub a2: Option<Num>,
    pub a3: Option<Num>,
    pub a4: Option<Num>,
    pub a5: Option<Num>,
    pub a6: Option<Num>,
    pub a7: Option<Num>,
    pub a8: Option<Num>,
    pub a9: Option<Num>,
    pub a10: Option<Num>,
    pub a11: Option<Num>,
    pub a12: Option<Num>,
    pub x0: Option<PointText>,
    pub max_iter: Option<u64>,
    pub step_tol: Option<f64>,
    pub stride: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub target: Option<String>,
    pub draws: Option<usize>,
    pub points: Option<usize>,
    pub grid: Option<Vec<f64>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        // serde_json reports "line L column C" in its messages.
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    fn rate_slot(&self, k: usize) -> Option<&Num> {
        [
            &self.a1, &self.a2, &self.a3, &self.a4, &self.a5, &self.a6, &self.a7, &self.a8,
            &self.a9, &self.a10, &self.a11, &self.a12,
        ][k - 1]
            .as_ref()
    }
}

/// Rates from flags (which win) and the config file; every key is required.
pub fn parameters(flags: &[Option<f64>; 12], file: &ConfigFile) -> Result<Parameters, Failure> {
    let mut rates = [0.0; 12];
    let mut missing = Vec::new();
    for (i, rate) in rates.iter_mut().enumerate() {
        let key = format!("a{}", i + 1);
        match (flags[i], file.rate_slot(i + 1)) {
            (Some(v), _) => *rate = v,
            (None, Some(n)) => *rate = n.value(&key)?,
            (None, None) => missing.push(key),
        }
    }
    if !missing.is_empty() {
        return Err(Failure::Usage(format!(
            "missing key(s): {}",
            missing.join(", ")
        )));
    }
    Parameters::new(rates).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn parse_point_text(s: &str) -> Result<[f64; 6], Failure> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            Failure::Usage(format!(
                "x0: cannot parse {s:?} as six comma-separated numbers"
            ))
        })?;
    values.try_into().map_err(|v: Vec<f64>| {
        Failure::Usage(format!("x0: expected 6 coordinates, got {}", v.len()))
    })
}

/// Raw initial coordinates, if given anywhere. Simplex membership is a domain
/// check left to the caller.
pub fn initial_coords(flag: Option<&str>, file: &ConfigFile) -> Result<Option<[f64; 6]>, Failure> {
    if let Some(s) = flag {
        return parse_point_text(s).map(Some);
    }
    match &file.x0 {
        None => Ok(None),
        Some(PointText::Text(s)) => parse_point_text(s).map(Some),
        Some(PointText::List(items)) => {
            let values = items
                .iter()
                .map(|n| n.value("x0"))
                .collect::<Result<Vec<_>, _>>()?;
            let len = values.len();
            values
                .try_into()
                .map(Some)
                .map_err(|_| Failure::Usage(format!("x0: expected 6 coordinates, got {len}")))
        }
    }
}

pub fn initial_point(flag: Option<&str>, file: &ConfigFile) -> Result<SimplexPoint, Failure> {
    let coords =
        initial_coords(flag, file)?.ok_or_else(|| Failure::Usage("missing key: x0".into()))?;
    SimplexPoint::new(coords).map_err(|e| Failure::Domain(e.to_string()))
}
