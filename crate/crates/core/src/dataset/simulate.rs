//! Generators for the seven simulation settings.
//!
//! Draws are taken column by column from the dataset stream of the setting's
//! seed: first the per-dataset hyper-parameters (settings 3 and 4), then each
//! predictor component, then the center noise, then the radius noise.
//! Response radii are never clamped.

use rand::Rng as _;
use rand_distr::{Beta, Distribution, Gamma, Normal, Uniform};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use super::{default_names, IntervalFrame};
use crate::error::{Error, Result};
use crate::interval::CenterRadius;
use crate::rng::{stream, Rng, Stream};

/// How `γ(3, 2)` in setting 7 is read.
pub const GAMMA_PARAMETERIZATION: &str = "gamma(shape = 3, rate = 2), i.e. scale 0.5";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimSetting {
    pub id: u32,
    pub n: usize,
    pub seed: u64,
}

impl SimSetting {
    pub fn new(id: u32, n: usize, seed: u64) -> Result<Self> {
        if !(1..=7).contains(&id) {
            return Err(Error::UnknownSetting(id));
        }
        if n < 2 {
            return Err(Error::Config(format!("simulation needs n >= 2, got {n}")));
        }
        Ok(Self { id, n, seed })
    }
}

struct Sampler {
    rng: Rng,
}

impl Sampler {
    fn normal(&mut self, n: usize, mean: f64, sd: f64) -> Vec<f64> {
        let d = Normal::new(mean, sd).expect("valid normal parameters");
        (0..n).map(|_| d.sample(&mut self.rng)).collect()
    }

    fn uniform(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        let d = Uniform::new(lo, hi).expect("valid uniform parameters");
        (0..n).map(|_| d.sample(&mut self.rng)).collect()
    }

    fn beta(&mut self, n: usize, a: f64, b: f64) -> Vec<f64> {
        let d = Beta::new(a, b).expect("valid beta parameters");
        (0..n).map(|_| d.sample(&mut self.rng)).collect()
    }

    fn gamma_rate(&mut self, n: usize, shape: f64, rate: f64) -> Vec<f64> {
        let d = Gamma::new(shape, 1.0 / rate).expect("valid gamma parameters");
        (0..n).map(|_| d.sample(&mut self.rng)).collect()
    }

    fn scalar_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }
}

fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * libm::erfc(-(x - mean) / (sd * SQRT_2))
}

fn zip_cr(c: Vec<f64>, r: Vec<f64>) -> Vec<CenterRadius> {
    c.into_iter().zip(r).map(|(c, r)| CenterRadius::new(c, r)).collect()
}

/// Generate `n` rows of the given setting.
pub fn simulate(setting: &SimSetting) -> Result<IntervalFrame> {
    let SimSetting { id, n, seed } = *setting;
    if !(1..=7).contains(&id) {
        return Err(Error::UnknownSetting(id));
    }
    if n < 2 {
        return Err(Error::Config(format!("simulation needs n >= 2, got {n}")));
    }
    let mut s = Sampler {
        rng: stream(seed, Stream::Dataset),
    };

    let (xs, yc, yr): (Vec<(Vec<f64>, Vec<f64>)>, Vec<f64>, Vec<f64>) = match id {
        1 | 2 => {
            let (xc, xr, sd_c, mean_r, sd_r) = if id == 1 {
                (s.normal(n, 5.0, 2.0), s.uniform(n, 0.5, 1.5), 2.0, 0.5, 0.3)
            } else {
                (s.uniform(n, 0.0, 20.0), s.uniform(n, 10.0, 11.0), 5.0, -15.0, 0.5)
            };
            let ec = s.normal(n, 0.0, sd_c);
            let er = s.normal(n, mean_r, sd_r);
            let yc = (0..n).map(|i| 2.0 * xc[i] + 5.0 + ec[i]).collect();
            let yr = (0..n).map(|i| 2.0 * xr[i] + er[i]).collect();
            (vec![(xc, xr)], yc, yr)
        }
        3 => {
            let eta = s.scalar_uniform(0.0, 4.0);
            let sigma = s.scalar_uniform(3.0, 4.0);
            // (n/50)·θ ~ U(0, 2)
            let theta = s.scalar_uniform(0.0, 2.0) * 50.0 / n as f64;
            let xc = s.normal(n, 5.0, 5.0);
            let xr = s.uniform(n, 10.0, 15.0);
            let ec = s.normal(n, -5.0, sigma);
            let er = s.normal(n, -15.0, 1.0);
            let yc = (0..n)
                .map(|i| 10.0 * xc[i] + 20.0 * xr[i] + eta + ec[i])
                .collect();
            let yr = (0..n).map(|i| 2.0 * xr[i] + theta + er[i]).collect();
            (vec![(xc, xr)], yc, yr)
        }
        4 => {
            let var_c = s.scalar_uniform(15.0, 20.0);
            let var_r = s.scalar_uniform(0.0, 1.0);
            let xc = s.normal(n, 5.0, 0.9);
            let xr = s.normal(n, 5.0, 10.0);
            let ec = s.normal(n, 0.0, var_c.sqrt());
            let er = s.normal(n, 1.0, var_r.sqrt());
            let yc = (0..n).map(|i| 0.22 * xc[i].exp() + ec[i]).collect();
            let yr = (0..n)
                .map(|i| normal_cdf(xr[i], 2.0, 2.0) + er[i])
                .collect();
            (vec![(xc, xr)], yc, yr)
        }
        5 => {
            let xc = s.normal(n, 5.0, 2.0);
            let xr = s.uniform(n, 0.5, 1.5);
            let ec = s.normal(n, 0.0, 0.5);
            let er = s.normal(n, 0.0, 0.2);
            let yc = (0..n)
                .map(|i| 6.0 + 4.0 * (0.25 * PI * xc[i]).sin() + ec[i])
                .collect();
            let yr = (0..n).map(|i| xr[i] + 0.5 + er[i]).collect();
            (vec![(xc, xr)], yc, yr)
        }
        6 => {
            let xc = s.normal(n, 5.0, 2.0);
            let xr = s.uniform(n, 0.25, 0.5);
            let ec = s.normal(n, 0.0, 0.5);
            let er = s.normal(n, 0.0, 0.1);
            let yc = (0..n)
                .map(|i| 6.0 + 2.0 * xr[i] + (0.253 * PI * xc[i]).sin() + ec[i])
                .collect();
            let yr = (0..n)
                .map(|i| (-0.3 * xc[i] * xr[i] + 0.5).abs() + er[i])
                .collect();
            (vec![(xc, xr)], yc, yr)
        }
        7 => {
            let c1 = s.normal(n, 5.0, 3.0);
            let c2 = s.beta(n, 0.5, 0.5);
            let c3 = s.normal(n, 10.0, 3.5);
            let c4 = s.uniform(n, 0.5, 1.5);
            let c5 = s.normal(n, 8.0, 3.5);

            let g = s.gamma_rate(n, 3.0, 2.0);
            let tau1 = s.normal(n, 0.0, 0.2);
            let u1 = s.uniform(n, 0.0, 0.5);
            let b13 = s.beta(n, 1.0, 3.0);
            let tau2 = s.normal(n, 0.0, 0.2);
            let u2 = s.uniform(n, 0.0, 0.5);
            let v1: Vec<f64> = (0..n).map(|i| u1[i] + (-0.5 * g[i] + tau1[i]).exp()).collect();
            let v2: Vec<f64> = (0..n).map(|i| u2[i] + (-0.5 * b13[i] + tau2[i]).exp()).collect();
            let r1: Vec<f64> = v1.iter().map(|v| 2.0 * v / (1.0 + v)).collect();
            let r2: Vec<f64> = v2.iter().map(|v| 3.0 * v / (1.0 + v)).collect();
            let r3 = s.normal(n, 10.0, 3.0);
            let r4 = s.uniform(n, 2.5, 3.5);
            let r5 = s.beta(n, 2.0, 5.0);

            let ec = s.normal(n, 0.0, 1.0);
            let er = s.normal(n, -3.0, 0.15);
            let t = |x: f64| x + x * x;
            let yc = (0..n)
                .map(|i| t(c1[i]) * t(c2[i]) - t(c3[i]) * t(c4[i]) - c5[i] + ec[i])
                .collect();
            let yr = (0..n)
                .map(|i| {
                    r2[i] * r2[i] / 5.0 + 0.1 * r3[i] - 5.0 * (r1[i] * r4[i] + r5[i])
                        + 4.0
                        + er[i]
                })
                .collect();
            (
                vec![(c1, r1), (c2, r2), (c3, r3), (c4, r4), (c5, r5)],
                yc,
                yr,
            )
        }
        _ => unreachable!(),
    };

    let p = xs.len();
    let predictors = xs.into_iter().map(|(c, r)| zip_cr(c, r)).collect();
    IntervalFrame::new(default_names(p), predictors, "y".into(), zip_cr(yc, yr))
}
