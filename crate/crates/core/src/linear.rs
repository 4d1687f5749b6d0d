//! Linear baselines: CCRM, CRM and MinMax.
//!
//! Each variant fits two independent least-squares equations. CCRM solves
//! its radius equation by nonnegative least squares (intercept included),
//! CRM and MinMax are unconstrained and may predict incoherent intervals,
//! which are flagged and never repaired.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::IntervalFrame;
use crate::error::{Error, Result};
use crate::interval::CenterRadius;
use crate::model::Prediction;

/// Row-major design matrix whose first column is the intercept.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    m: DMatrix<f64>,
}

impl DesignMatrix {
    /// Prepend an intercept column to column-major features.
    pub fn with_intercept(features: &[Vec<f64>]) -> Result<Self> {
        let n = features.first().map(Vec::len).unwrap_or(0);
        if features.iter().any(|f| f.len() != n) {
            return Err(Error::Config("feature columns differ in length".into()));
        }
        let m = DMatrix::from_fn(n, features.len() + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                features[j - 1][i]
            }
        });
        Self::from_matrix(m)
    }

    /// Use the given rows verbatim (no intercept added).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Config("design rows differ in length".into()));
        }
        Self::from_matrix(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("design matrix has non-finite entries".into()));
        }
        Ok(Self { m })
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn apply(&self, beta: &[f64]) -> Vec<f64> {
        (&self.m * DVector::from_column_slice(beta)).data.into()
    }

    pub fn rss(&self, beta: &[f64], y: &[f64]) -> f64 {
        self.apply(beta)
            .iter()
            .zip(y)
            .map(|(f, y)| (y - f) * (y - f))
            .sum()
    }

    /// `Xᵀ(Xβ − y)`, the gradient of `½‖Xβ − y‖²`.
    pub fn gradient(&self, beta: &[f64], y: &[f64]) -> Vec<f64> {
        let r = DVector::from_iterator(
            y.len(),
            self.apply(beta).iter().zip(y).map(|(f, y)| f - y),
        );
        (self.m.transpose() * r).data.into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub rank: usize,
    /// Set when the design is rank deficient; coefficients are then the
    /// minimum-norm least-squares solution.
    pub rank_deficient: bool,
    pub rss: f64,
}

fn check_y(x: &DesignMatrix, y: &[f64]) -> Result<()> {
    if y.len() != x.rows() {
        return Err(Error::Dimension {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("response has non-finite entries".into()));
    }
    Ok(())
}

/// Minimum-norm least squares through the SVD.
fn lstsq(m: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, usize)> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = smax * (m.nrows().max(m.ncols()) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let beta = svd
        .solve(y, eps)
        .map_err(|e| Error::Numeric(format!("SVD solve failed: {e}")))?;
    Ok((beta, rank))
}

/// Ordinary least squares; requires `n >= p + 1`.
pub fn ols(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    check_y(x, y)?;
    if x.rows() < x.cols() {
        return Err(Error::Underdetermined {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    let (beta, rank) = lstsq(x.matrix(), &DVector::from_column_slice(y))?;
    let coefficients: Vec<f64> = beta.data.into();
    let rss = x.rss(&coefficients, y);
    Ok(OlsFit {
        coefficients,
        rank,
        rank_deficient: rank < x.cols(),
        rss,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnlsFit {
    pub coefficients: Vec<f64>,
    /// Indices of coefficients held at zero by the constraint.
    pub active: Vec<usize>,
    pub rss: f64,
    pub iterations: usize,
}

/// Nonnegative least squares by the Lawson–Hanson active-set method.
pub fn nnls(x: &DesignMatrix, y: &[f64]) -> Result<NnlsFit> {
    check_y(x, y)?;
    if x.rows() == 0 {
        return Err(Error::EmptySample("nnls needs at least one row".into()));
    }
    let a = x.matrix();
    let k = x.cols();
    let b = DVector::from_column_slice(y);
    let scale = a.amax().max(1.0) * b.amax().max(1.0) * x.rows() as f64;
    let tol = 1e-13 * scale;

    let mut beta = DVector::<f64>::zeros(k);
    let mut passive = vec![false; k];
    let max_outer = 10 * k;
    let mut iterations = 0;

    while iterations < max_outer {
        let w = a.transpose() * (&b - a * &beta);
        let candidate = (0..k)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate.filter(|&j| w[j] > tol) else {
            break;
        };
        iterations += 1;
        passive[j] = true;

        // Inner loop: keep the free-set solution feasible.
        for _ in 0..=k {
            let cols: Vec<usize> = (0..k).filter(|&c| passive[c]).collect();
            let sub = a.select_columns(&cols);
            let (z_sub, _) = lstsq(&sub, &b)?;
            let mut z = DVector::<f64>::zeros(k);
            for (slot, &c) in cols.iter().enumerate() {
                z[c] = z_sub[slot];
            }
            if cols.iter().all(|&c| z[c] > 0.0) {
                beta = z;
                break;
            }
            let (blocking, alpha) = cols
                .iter()
                .filter(|&&c| z[c] <= 0.0)
                .map(|&c| (c, beta[c] / (beta[c] - z[c])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("some coordinate is infeasible");
            beta += alpha * (&z - &beta);
            beta[blocking] = 0.0;
            for &c in &cols {
                if beta[c] <= 0.0 {
                    passive[c] = false;
                    beta[c] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }

    let coefficients: Vec<f64> = beta.iter().map(|v| v.max(0.0)).collect();
    let rss = x.rss(&coefficients, y);
    Ok(NnlsFit {
        active: (0..k).filter(|&j| coefficients[j] == 0.0).collect(),
        coefficients,
        rss,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearVariant {
    Ccrm,
    Crm,
    MinMax,
}

impl LinearVariant {
    pub fn name(&self) -> &'static str {
        match self {
            LinearVariant::Ccrm => "ccrm",
            LinearVariant::Crm => "crm",
            LinearVariant::MinMax => "minmax",
        }
    }
}

/// One fitted equation: intercept followed by `p` slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationFit {
    pub target: String,
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub active_constraints: Vec<usize>,
    pub rank_deficient: bool,
}

impl EquationFit {
    fn eval(&self, features: impl Iterator<Item = f64>) -> f64 {
        self.coefficients[0]
            + self.coefficients[1..]
                .iter()
                .zip(features)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub variant: LinearVariant,
    pub predictor_names: Vec<String>,
    /// Center (CCRM, CRM) or lower-bound (MinMax) equation.
    pub first: EquationFit,
    /// Radius (CCRM, CRM) or upper-bound (MinMax) equation.
    pub second: EquationFit,
}

fn fit_ols(target: &str, features: &[Vec<f64>], y: &[f64]) -> Result<EquationFit> {
    let x = DesignMatrix::with_intercept(features)?;
    let fit = ols(&x, y)?;
    Ok(EquationFit {
        target: target.into(),
        coefficients: fit.coefficients,
        rss: fit.rss,
        active_constraints: Vec::new(),
        rank_deficient: fit.rank_deficient,
    })
}

fn fit_nnls(target: &str, features: &[Vec<f64>], y: &[f64]) -> Result<EquationFit> {
    let x = DesignMatrix::with_intercept(features)?;
    let fit = nnls(&x, y)?;
    Ok(EquationFit {
        target: target.into(),
        coefficients: fit.coefficients,
        rss: fit.rss,
        active_constraints: fit.active,
        rank_deficient: false,
    })
}

pub fn fit_linear(variant: LinearVariant, train: &IntervalFrame) -> Result<LinearFit> {
    let p = train.p();
    if train.n() < p + 2 {
        return Err(Error::Underdetermined {
            rows: train.n(),
            cols: p + 2,
        });
    }
    let column = |f: fn(&CenterRadius) -> f64| -> Vec<Vec<f64>> {
        (0..p).map(|j| train.predictor(j).iter().map(f).collect()).collect()
    };
    let centers = column(|c| c.center);
    let radii = column(|c| c.radius);
    let yc = train.response_centers();
    let yr = train.response_radii();

    let (first, second) = match variant {
        LinearVariant::Ccrm => (
            fit_ols("center", &centers, &yc)?,
            fit_nnls("radius", &radii, &yr)?,
        ),
        LinearVariant::Crm => (
            fit_ols("center", &centers, &yc)?,
            fit_ols("radius", &radii, &yr)?,
        ),
        LinearVariant::MinMax => {
            let lowers = column(CenterRadius::lower);
            let uppers = column(CenterRadius::upper);
            let yl: Vec<f64> = train.response().iter().map(CenterRadius::lower).collect();
            let yu: Vec<f64> = train.response().iter().map(CenterRadius::upper).collect();
            (fit_ols("lower", &lowers, &yl)?, fit_ols("upper", &uppers, &yu)?)
        }
    };
    Ok(LinearFit {
        variant,
        predictor_names: train.predictor_names().to_vec(),
        first,
        second,
    })
}

impl LinearFit {
    pub fn p(&self) -> usize {
        self.predictor_names.len()
    }

    pub fn predict_one(&self, x: &[CenterRadius]) -> Result<Prediction> {
        if x.len() != self.p() {
            return Err(Error::Dimension {
                expected: self.p(),
                got: x.len(),
            });
        }
        let value = match self.variant {
            LinearVariant::Ccrm | LinearVariant::Crm => CenterRadius::new(
                self.first.eval(x.iter().map(|c| c.center)),
                self.second.eval(x.iter().map(|c| c.radius)),
            ),
            LinearVariant::MinMax => CenterRadius::from_bounds(
                self.first.eval(x.iter().map(CenterRadius::lower)),
                self.second.eval(x.iter().map(CenterRadius::upper)),
            ),
        };
        Ok(Prediction::new(value))
    }
}

/// Predict every row; incoherent rows carry `incoherent = true`.
pub fn predict_linear(fit: &LinearFit, rows: &[Vec<CenterRadius>]) -> Result<Vec<Prediction>> {
    rows.iter().map(|r| fit.predict_one(r)).collect()
}
