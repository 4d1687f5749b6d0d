//! Direct kernel regression for interval data.
//!
//! Center and radius are predicted as weighted averages of the training
//! responses with shared weights `K(d(x, x_j) / h)`, where `d` is the
//! hyper-interval distance over all predictor centers and radii.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::dataset::IntervalFrame;
use crate::error::{Error, Result};
use crate::interval::CenterRadius;
use crate::model::Prediction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Gaussian,
    Epanechnikov,
    Triangular,
    Uniform,
}

impl Kernel {
    /// Unnormalised kernel profile at `u = d / h >= 0`.
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-0.5 * u * u).exp(),
            Kernel::Epanechnikov => (1.0 - u * u).max(0.0),
            Kernel::Triangular => (1.0 - u.abs()).max(0.0),
            Kernel::Uniform => {
                if u.abs() <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Gaussian => "gaussian",
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Triangular => "triangular",
            Kernel::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Kernel::Gaussian),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "triangular" => Ok(Kernel::Triangular),
            "uniform" => Ok(Kernel::Uniform),
            other => Err(Error::Config(format!("unknown kernel `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    /// Leave-one-out CV over the default grid.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelFit {
    pub kernel: Kernel,
    pub bandwidth: f64,
    /// Embedded copy of the training data.
    pub training: IntervalFrame,
}

impl KernelFit {
    pub fn new(training: IntervalFrame, kernel: Kernel, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::Config(format!(
                "bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        Ok(Self {
            kernel,
            bandwidth,
            training,
        })
    }

    fn dist_sq(&self, x: &[CenterRadius], j: usize) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, q)| {
                let t = self.training.predictor(i)[j];
                let dc = q.center - t.center;
                let dr = q.radius - t.radius;
                dc * dc + dr * dr
            })
            .sum()
    }

    pub fn predict(&self, x: &[CenterRadius]) -> Result<Prediction> {
        if x.len() != self.training.p() {
            return Err(Error::Dimension {
                expected: self.training.p(),
                got: x.len(),
            });
        }
        let d2: Vec<f64> = (0..self.training.n()).map(|j| self.dist_sq(x, j)).collect();
        Ok(weighted_average(
            &d2,
            self.training.response(),
            self.kernel,
            self.bandwidth,
            None,
        ))
    }
}

pub fn predict_kernel(fit: &KernelFit, x: &[CenterRadius]) -> Result<Prediction> {
    fit.predict(x)
}

/// Normalised kernel weights from squared distances, skipping `exclude`.
///
/// Returns `None` when every weight is zero. Gaussian weights are computed
/// relative to the closest point so they cannot all underflow.
pub fn kernel_weights(d2: &[f64], kernel: Kernel, h: f64, exclude: Option<usize>) -> Option<Vec<f64>> {
    let keep = |j: usize| Some(j) != exclude;
    let mut w: Vec<f64> = match kernel {
        Kernel::Gaussian => {
            let dmin = (0..d2.len())
                .filter(|&j| keep(j))
                .map(|j| d2[j])
                .fold(f64::INFINITY, f64::min);
            (0..d2.len())
                .map(|j| if keep(j) { (-(d2[j] - dmin) / (2.0 * h * h)).exp() } else { 0.0 })
                .collect()
        }
        _ => (0..d2.len())
            .map(|j| if keep(j) { kernel.eval(d2[j].sqrt() / h) } else { 0.0 })
            .collect(),
    };
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    w.iter_mut().for_each(|v| *v /= total);
    Some(w)
}

fn weighted_average(
    d2: &[f64],
    responses: &[CenterRadius],
    kernel: Kernel,
    h: f64,
    exclude: Option<usize>,
) -> Prediction {
    match kernel_weights(d2, kernel, h, exclude) {
        Some(w) => {
            let (mut c, mut r) = (0.0, 0.0);
            for (wj, y) in w.iter().zip(responses) {
                c += wj * y.center;
                r += wj * y.radius;
            }
            Prediction::new(CenterRadius::new(c, r))
        }
        None => {
            let nearest = (0..d2.len())
                .filter(|&j| Some(j) != exclude)
                .min_by(|&a, &b| d2[a].total_cmp(&d2[b]))
                .expect("training set has another row");
            let mut p = Prediction::new(responses[nearest]);
            p.extrapolated = true;
            p
        }
    }
}

fn pairwise_sq(frame: &IntervalFrame) -> Vec<Vec<f64>> {
    let n = frame.n();
    let mut d = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let v: f64 = (0..frame.p())
                .map(|i| {
                    let (x, y) = (frame.predictor(i)[a], frame.predictor(i)[b]);
                    let dc = x.center - y.center;
                    let dr = x.radius - y.radius;
                    dc * dc + dr * dr
                })
                .sum();
            d[a][b] = v;
            d[b][a] = v;
        }
    }
    d
}

/// `points` log-spaced values in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Median pairwise hyper-interval distance of the training predictors.
pub fn median_pairwise_distance(frame: &IntervalFrame) -> f64 {
    let d = pairwise_sq(frame);
    let mut v: Vec<f64> = (0..frame.n())
        .flat_map(|a| ((a + 1)..frame.n()).map(move |b| (a, b)))
        .map(|(a, b)| d[a][b].sqrt())
        .collect();
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

pub const DEFAULT_GRID_POINTS: usize = 20;

/// 20 log-spaced bandwidths over `[0.05 s, 5 s]`, `s` the median distance.
pub fn default_grid(train: &IntervalFrame) -> Vec<f64> {
    let s = median_pairwise_distance(train);
    let s = if s > 0.0 { s } else { 1.0 };
    log_grid(0.05 * s, 5.0 * s, DEFAULT_GRID_POINTS)
}

/// Leave-one-out loss `Σ_j δ²(ŷ_{−j}, y_j)` for each grid value.
pub fn loo_losses(train: &IntervalFrame, kernel: Kernel, grid: &[f64]) -> Vec<f64> {
    let d = pairwise_sq(train);
    let y = train.response();
    grid.iter()
        .map(|&h| {
            (0..train.n())
                .map(|j| {
                    let p = weighted_average(&d[j], y, kernel, h, Some(j)).value;
                    let dc = p.center - y[j].center;
                    let dr = p.radius - y[j].radius;
                    dc * dc + dr * dr
                })
                .sum()
        })
        .collect()
}

/// Grid value with the smallest LOO loss; ties go to the larger bandwidth.
pub fn select_bandwidth(train: &IntervalFrame, kernel: Kernel, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Config("bandwidth grid is empty".into()));
    }
    if grid.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(Error::Config("bandwidths must be positive and finite".into()));
    }
    if train.n() < 3 {
        return Err(Error::Underdetermined {
            rows: train.n(),
            cols: 3,
        });
    }
    let losses = loo_losses(train, kernel, grid);
    let mut best = 0;
    for k in 1..grid.len() {
        let tie = (losses[k] - losses[best]).abs() <= 1e-12 * losses[best].abs().max(1e-300);
        if (losses[k] < losses[best] && !tie) || (tie && grid[k] > grid[best]) {
            best = k;
        }
    }
    Ok(grid[best])
}

pub fn fit_kernel(train: &IntervalFrame, kernel: Kernel, bandwidth: Bandwidth) -> Result<KernelFit> {
    let h = match bandwidth {
        Bandwidth::Fixed(h) => h,
        Bandwidth::Auto => select_bandwidth(train, kernel, &default_grid(train))?,
    };
    KernelFit::new(train.clone(), kernel, h)
}
