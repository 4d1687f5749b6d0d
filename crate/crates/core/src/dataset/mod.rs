//! Interval data container, CSV ingestion, splitting and simulation.

mod csv_io;
mod simulate;
mod split;

pub use csv_io::{load_csv, read_csv, write_csv, write_csv_to, LoadOptions};
pub use simulate::{simulate, SimSetting, GAMMA_PARAMETERIZATION};
pub use split::{split, train_size, SplitMode, SplitSpec};

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::interval::{CenterRadius, Interval};

/// `n` observations of `p` predictor intervals and one response interval.
///
/// Cells are stored as raw center/radius pairs. Frames loaded from CSV in
/// strict mode only ever hold coherent intervals; simulated frames may hold
/// negative radii, which [`IntervalFrame::coherence_report`] surfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalFrame {
    predictor_names: Vec<String>,
    predictors: Vec<Vec<CenterRadius>>,
    response_name: String,
    response: Vec<CenterRadius>,
}

impl IntervalFrame {
    pub fn new(
        predictor_names: Vec<String>,
        predictors: Vec<Vec<CenterRadius>>,
        response_name: String,
        response: Vec<CenterRadius>,
    ) -> Result<Self> {
        if predictors.is_empty() {
            return Err(Error::Config("a frame needs at least one predictor".into()));
        }
        if predictor_names.len() != predictors.len() {
            return Err(Error::Dimension {
                expected: predictors.len(),
                got: predictor_names.len(),
            });
        }
        if response.is_empty() {
            return Err(Error::EmptySample("frame has no rows".into()));
        }
        let n = response.len();
        for col in &predictors {
            if col.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: col.len(),
                });
            }
        }
        let mut seen = HashSet::new();
        for name in predictor_names.iter().chain(std::iter::once(&response_name)) {
            if !seen.insert(name.as_str()) {
                return Err(Error::Config(format!("duplicate column name `{name}`")));
            }
        }
        let finite = |c: &CenterRadius| c.center.is_finite() && c.radius.is_finite();
        if !response.iter().all(finite) || !predictors.iter().flatten().all(finite) {
            return Err(Error::Numeric("frame contains non-finite values".into()));
        }
        Ok(Self {
            predictor_names,
            predictors,
            response_name,
            response,
        })
    }

    /// Build a frame from row-major data with default names `x1..xp`, `y`.
    pub fn from_rows(rows: &[Vec<CenterRadius>], response: Vec<CenterRadius>) -> Result<Self> {
        let p = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Config("ragged predictor rows".into()));
        }
        let predictors = (0..p)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Self::new(default_names(p), predictors, "y".into(), response)
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn p(&self) -> usize {
        self.predictors.len()
    }

    pub fn predictor_names(&self) -> &[String] {
        &self.predictor_names
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn predictor(&self, j: usize) -> &[CenterRadius] {
        &self.predictors[j]
    }

    pub fn response(&self) -> &[CenterRadius] {
        &self.response
    }

    pub fn row(&self, i: usize) -> Vec<CenterRadius> {
        self.predictors.iter().map(|col| col[i]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<CenterRadius>> {
        (0..self.n()).map(|i| self.row(i)).collect()
    }

    /// Sub-frame with the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::EmptySample("row selection is empty".into()));
        }
        Ok(Self {
            predictor_names: self.predictor_names.clone(),
            predictors: self
                .predictors
                .iter()
                .map(|col| idx.iter().map(|&i| col[i]).collect())
                .collect(),
            response_name: self.response_name.clone(),
            response: idx.iter().map(|&i| self.response[i]).collect(),
        })
    }

    pub fn response_centers(&self) -> Vec<f64> {
        self.response.iter().map(|c| c.center).collect()
    }

    pub fn response_radii(&self) -> Vec<f64> {
        self.response.iter().map(|c| c.radius).collect()
    }

    /// Response as validated intervals; rejects negative radii.
    pub fn response_intervals(&self) -> Result<Vec<Interval>> {
        self.response
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.to_interval().map_err(|e| Error::Parse {
                    row: i + 1,
                    column: self.response_name.clone(),
                    message: e.to_string(),
                })
            })
            .collect()
    }

    pub fn coherence_report(&self) -> CoherenceReport {
        let mut report = coherence_report(&self.response).expect("frames are non-empty");
        report.negative_predictor_cells = self
            .predictors
            .iter()
            .flatten()
            .filter(|c| c.radius < 0.0)
            .count();
        report
    }
}

pub(crate) fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("x{j}")).collect()
}

/// Rows whose response radius is negative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub n_rows: usize,
    pub negative_response_rows: Vec<usize>,
    /// Predictor cells with a negative radius (generators only).
    pub negative_predictor_cells: usize,
}

impl CoherenceReport {
    pub fn count(&self) -> usize {
        self.negative_response_rows.len()
    }
}

/// Count rows of a center/radius table with negative radius.
pub fn coherence_report(response: &[CenterRadius]) -> Result<CoherenceReport> {
    if response.is_empty() {
        return Err(Error::EmptySample("coherence report of an empty table".into()));
    }
    Ok(CoherenceReport {
        n_rows: response.len(),
        negative_response_rows: response
            .iter()
            .enumerate()
            .filter(|(_, c)| c.radius < 0.0)
            .map(|(i, _)| i)
            .collect(),
        negative_predictor_cells: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cr(c: f64, r: f64) -> CenterRadius {
        CenterRadius::new(c, r)
    }

    #[test]
    fn coherence_counts() {
        let f = IntervalFrame::from_rows(
            &[vec![cr(0.0, 1.0)], vec![cr(1.0, 0.5)]],
            vec![cr(0.0, 1.0), cr(2.0, 0.0)],
        )
        .unwrap();
        assert_eq!(f.coherence_report().count(), 0);
        let r = coherence_report(&[cr(0.0, 1.0), cr(0.0, -0.1), cr(1.0, 2.0)]).unwrap();
        assert_eq!(r.count(), 1);
        assert_eq!(r.negative_response_rows, vec![1]);
        assert!(matches!(coherence_report(&[]), Err(Error::EmptySample(_))));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(IntervalFrame::from_rows(&[], vec![]).is_err());
        let dup = IntervalFrame::new(
            vec!["y".into()],
            vec![vec![cr(0.0, 1.0)]],
            "y".into(),
            vec![cr(0.0, 1.0)],
        );
        assert!(matches!(dup, Err(Error::Config(_))));
        let ragged = IntervalFrame::new(
            vec!["a".into()],
            vec![vec![cr(0.0, 1.0)]],
            "y".into(),
            vec![cr(0.0, 1.0), cr(1.0, 1.0)],
        );
        assert!(matches!(ragged, Err(Error::Dimension { .. })));
    }

    #[test]
    fn select_rows_keeps_order() {
        let f = IntervalFrame::from_rows(
            &[vec![cr(0.0, 1.0)], vec![cr(1.0, 1.0)], vec![cr(2.0, 1.0)]],
            vec![cr(0.0, 1.0), cr(1.0, 1.0), cr(2.0, 1.0)],
        )
        .unwrap();
        let s = f.select_rows(&[2, 0]).unwrap();
        assert_eq!(s.response_centers(), vec![2.0, 0.0]);
        assert!(f.response_intervals().is_ok());
    }
}
