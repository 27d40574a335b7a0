//! Open polygonal curves in 3-space, their projections, and Monte Carlo
//! estimates of closure invariants averaged over projection directions.

mod measure;
mod project;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::involution::{Involution, InvolutionError};

pub use measure::{
    MAX_CURVES, RESAMPLE_BUDGET,
    measure, sample_directions, spectral_measure, weighted_spectrum, MeasureError, MeasureEstimate,
    Observable, SamplingConfig, WeightedEntry, WeightedSpectrum,
};
pub use project::{project, Irregularity, Tolerances};

pub type Point = [f64; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("parse error at {locus}: {message}")]
    Parse { locus: String, message: String },
    #[error("curve {0} has fewer than two points")]
    TooFewPoints(usize),
    #[error("curve {curve} repeats point {index}")]
    RepeatedPoint { curve: usize, index: usize },
    #[error("bad labels: {0}")]
    BadLabels(String),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
}

/// `n` open polygonal curves; curve `i` runs from label `labels[i].0` to `labels[i].1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurveSet {
    curves: Vec<Vec<Point>>,
    labels: Vec<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct RawCurves {
    curves: Vec<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<(u32, u32)>>,
}

impl PolyCurveSet {
    /// Labels default to `(1, 2), (3, 4), ...`.
    pub fn new(curves: Vec<Vec<Point>>, labels: Option<Vec<(u32, u32)>>) -> Result<Self, CurveError> {
        for (i, c) in curves.iter().enumerate() {
            if c.len() < 2 {
                return Err(CurveError::TooFewPoints(i));
            }
            if let Some(k) = c.windows(2).position(|w| w[0] == w[1]) {
                return Err(CurveError::RepeatedPoint { curve: i, index: k + 1 });
            }
            if c.iter().flatten().any(|x| !x.is_finite()) {
                return Err(CurveError::Parse { locus: format!("curves[{i}]"), message: "non-finite coordinate".into() });
            }
        }
        let n = curves.len() as u32;
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| (2 * i + 1, 2 * i + 2)).collect());
        if labels.len() != curves.len() {
            return Err(CurveError::BadLabels(format!("{} label pairs for {} curves", labels.len(), curves.len())));
        }
        let set: BTreeSet<u32> = labels.iter().flat_map(|&(a, b)| [a, b]).collect();
        if set != (1..=2 * n).collect() {
            return Err(CurveError::BadLabels(format!("labels must be exactly 1..{}", 2 * n)));
        }
        Ok(PolyCurveSet { curves, labels })
    }

    pub fn curves(&self) -> &[Vec<Point>] {
        &self.curves
    }

    pub fn labels(&self) -> &[(u32, u32)] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.curves.len()
    }

    /// The strand permutation.
    pub fn tau(&self) -> Involution {
        Involution::from_pairs(&self.labels).expect("labels validated")
    }

    /// Position of endpoint `label`.
    pub fn endpoint(&self, label: u32) -> Option<Point> {
        self.labels.iter().zip(&self.curves).find_map(|(&(a, b), c)| {
            if a == label {
                Some(c[0])
            } else if b == label {
                Some(c[c.len() - 1])
            } else {
                None
            }
        })
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<&Point> = self.curves.iter().flatten().collect();
        let mut d: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                d = d.max(dist(p, q));
            }
        }
        d
    }

    /// The same curves with every point multiplied by `m`.
    pub fn transformed(&self, m: &[[f64; 3]; 3]) -> PolyCurveSet {
        let apply = |p: &Point| -> Point {
            [0, 1, 2].map(|r| m[r][0] * p[0] + m[r][1] * p[1] + m[r][2] * p[2])
        };
        PolyCurveSet {
            curves: self.curves.iter().map(|c| c.iter().map(apply).collect()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CurveError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CurveError::Parse {
            locus: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if value.get("curves").is_none() {
            return Err(CurveError::Parse { locus: "curves".into(), message: "missing field \"curves\"".into() });
        }
        let raw: RawCurves = serde_json::from_value(value)
            .map_err(|e| CurveError::Parse { locus: "curves".into(), message: e.to_string() })?;
        PolyCurveSet::new(raw.curves, raw.labels)
    }

    pub fn to_json(&self) -> String {
        let raw = RawCurves { curves: self.curves.clone(), labels: Some(self.labels.clone()) };
        serde_json::to_string_pretty(&raw).unwrap()
    }

    /// Rows `curve,x,y,z`, grouped by curve id in order of first appearance.
    /// A header row is optional. Labels take their default values.
    pub fn from_csv(text: &str) -> Result<Self, CurveError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut ids: Vec<String> = Vec::new();
        let mut curves: Vec<Vec<Point>> = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| CurveError::Parse { locus: format!("line {}", line + 1), message: e.to_string() })?;
            let bad = |m: String| CurveError::Parse { locus: format!("line {}", line + 1), message: m };
            if rec.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", rec.len())));
            }
            let coords: Result<Vec<f64>, _> = (1..4).map(|i| rec[i].parse::<f64>()).collect();
            let coords = match coords {
                Ok(c) => c,
                Err(_) if line == 0 => continue,
                Err(e) => return Err(bad(e.to_string())),
            };
            let id = rec[0].to_string();
            let k = match ids.iter().position(|x| *x == id) {
                Some(k) => k,
                None => {
                    ids.push(id);
                    curves.push(Vec::new());
                    curves.len() - 1
                }
            };
            curves[k].push([coords[0], coords[1], coords[2]]);
        }
        PolyCurveSet::new(curves, None)
    }
}

pub(crate) fn dist(p: &Point, q: &Point) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert_eq!(PolyCurveSet::new(vec![vec![[0.0; 3]]], None), Err(CurveError::TooFewPoints(0)));
        assert_eq!(
            PolyCurveSet::new(vec![vec![[0.0; 3], [0.0; 3]]], None),
            Err(CurveError::RepeatedPoint { curve: 0, index: 1 })
        );
        let c = vec![vec![[0.0; 3], [1.0, 0.0, 0.0]]];
        assert!(matches!(PolyCurveSet::new(c.clone(), Some(vec![(1, 3)])), Err(CurveError::BadLabels(_))));
        let s = PolyCurveSet::new(c, Some(vec![(2, 1)])).unwrap();
        assert_eq!(s.tau().to_string(), "(1 2)");
        assert_eq!(s.endpoint(1), Some([1.0, 0.0, 0.0]));
    }

    #[test]
    fn json_and_csv_agree() {
        let csv = "curve,x,y,z\na,0,0,0\na,1,0,0\nb,0,1,1\nb,1,1,1\nb,2,0,1\n";
        let s = PolyCurveSet::from_csv(csv).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.curves()[1].len(), 3);
        let back = PolyCurveSet::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(matches!(PolyCurveSet::from_json("{}"), Err(CurveError::Parse { locus, .. }) if locus == "curves"));
    }
}
