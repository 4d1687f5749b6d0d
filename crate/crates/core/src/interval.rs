//! Closed bounded intervals, Minkowski arithmetic and interval metrics.
//!
//! An interval `[x]` is stored by its bounds and viewed either as
//! `(lower, upper)` or as `(center, radius)`. All closed-form metrics are
//! evaluated in center/radius coordinates.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A closed bounded interval `[lower, upper]` with `lower <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidInterval(format!(
                "bounds must be finite, got [{lower}, {upper}]"
            )));
        }
        if lower > upper {
            return Err(Error::InvalidInterval(format!(
                "lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn from_center_radius(center: f64, radius: f64) -> Result<Self> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(Error::InvalidInterval(format!(
                "center and radius must be finite, got ({center}, {radius})"
            )));
        }
        if radius < 0.0 {
            return Err(Error::InvalidInterval(format!(
                "radius must be nonnegative, got {radius}"
            )));
        }
        Ok(Self {
            lower: center - radius,
            upper: center + radius,
        })
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    pub fn to_center_radius(&self) -> CenterRadius {
        CenterRadius::new(self.center(), self.radius())
    }

    /// Minkowski sum `[a^L + b^L, a^U + b^U]`.
    pub fn minkowski_add(&self, other: &Interval) -> Interval {
        Interval {
            lower: self.lower + other.lower,
            upper: self.upper + other.upper,
        }
    }

    /// Scalar multiple; a negative factor swaps the bounds.
    pub fn scalar_mul(&self, lambda: f64) -> Interval {
        if lambda >= 0.0 {
            Interval {
                lower: lambda * self.lower,
                upper: lambda * self.upper,
            }
        } else {
            Interval {
                lower: lambda * self.upper,
                upper: lambda * self.lower,
            }
        }
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        self.minkowski_add(&rhs)
    }
}

impl std::ops::Mul<Interval> for f64 {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        rhs.scalar_mul(self)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

pub fn make_interval(lower: f64, upper: f64) -> Result<Interval> {
    Interval::new(lower, upper)
}

pub fn from_center_radius(center: f64, radius: f64) -> Result<Interval> {
    Interval::from_center_radius(center, radius)
}

pub fn minkowski_add(a: &Interval, b: &Interval) -> Interval {
    a.minkowski_add(b)
}

pub fn scalar_mul(lambda: f64, a: &Interval) -> Interval {
    a.scalar_mul(lambda)
}

/// A raw `(center, radius)` pair.
///
/// Unlike [`Interval`] the radius may be negative. Generators and the
/// unconstrained linear models produce such values, and they are carried
/// through unchanged so that incoherence can be counted rather than hidden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterRadius {
    pub center: f64,
    pub radius: f64,
}

impl CenterRadius {
    pub fn new(center: f64, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn from_bounds(lower: f64, upper: f64) -> Self {
        Self {
            center: 0.5 * (lower + upper),
            radius: 0.5 * (upper - lower),
        }
    }

    pub fn lower(&self) -> f64 {
        self.center - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.center + self.radius
    }

    /// Mathematically coherent: nonnegative radius.
    pub fn is_coherent(&self) -> bool {
        self.radius >= 0.0
    }

    pub fn to_interval(&self) -> Result<Interval> {
        Interval::from_center_radius(self.center, self.radius)
    }
}

impl From<Interval> for CenterRadius {
    fn from(iv: Interval) -> Self {
        iv.to_center_radius()
    }
}

/// A `p`-dimensional hyper interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperInterval {
    components: Vec<Interval>,
}

impl HyperInterval {
    pub fn new(components: Vec<Interval>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptySample(
                "a hyper interval needs at least one component".into(),
            ));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn to_center_radius(&self) -> Vec<CenterRadius> {
        self.components.iter().map(Interval::to_center_radius).collect()
    }
}

/// Radius weight `c = ∫(2λ−1)² dW(λ)` of a W-distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WWeight(f64);

impl WWeight {
    pub fn new(c_weight: f64) -> Result<Self> {
        if !(c_weight > 0.0 && c_weight <= 1.0) {
            return Err(Error::Config(format!(
                "W-distance weight must lie in (0, 1], got {c_weight}"
            )));
        }
        Ok(Self(c_weight))
    }

    /// Lebesgue measure on `[0, 1]`: `∫(2λ−1)² dλ = 1/3`.
    pub fn lebesgue() -> Self {
        Self(1.0 / 3.0)
    }

    /// The weight that turns the W-distance into the δ-distance.
    pub fn delta() -> Self {
        Self(1.0)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Hausdorff distance `max(|Δlower|, |Δupper|) = |Δcenter| + |Δradius|`.
pub fn hausdorff(a: &Interval, b: &Interval) -> f64 {
    (a.center() - b.center()).abs() + (a.radius() - b.radius()).abs()
}

/// δ-distance `sqrt(Δc² + Δr²)`.
pub fn delta_distance(a: &Interval, b: &Interval) -> f64 {
    let dc = a.center() - b.center();
    let dr = a.radius() - b.radius();
    (dc * dc + dr * dr).sqrt()
}

/// W-distance `sqrt(Δc² + c·Δr²)`.
pub fn w_distance(a: &Interval, b: &Interval, w: WWeight) -> f64 {
    let dc = a.center() - b.center();
    let dr = a.radius() - b.radius();
    (dc * dc + w.value() * dr * dr).sqrt()
}

pub fn hyper_distance(x: &HyperInterval, y: &HyperInterval) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let sq: f64 = x
        .components()
        .iter()
        .zip(y.components())
        .map(|(a, b)| {
            let dc = a.center() - b.center();
            let dr = a.radius() - b.radius();
            dc * dc + dr * dr
        })
        .sum();
    Ok(sq.sqrt())
}

/// Squared hyper-interval distance over raw center/radius rows.
///
/// Callers guarantee equal lengths.
pub fn hyper_distance_sq_raw(x: &[CenterRadius], y: &[CenterRadius]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let dc = a.center - b.center;
            let dr = a.radius - b.radius;
            dc * dc + dr * dr
        })
        .sum()
}

/// Aumann expectation of an empirical sample: `[mean lower, mean upper]`.
pub fn aumann_mean(sample: &[Interval]) -> Result<Interval> {
    if sample.is_empty() {
        return Err(Error::EmptySample("aumann_mean of an empty sample".into()));
    }
    let n = sample.len() as f64;
    let lower = sample.iter().map(Interval::lower).sum::<f64>() / n;
    let upper = sample.iter().map(Interval::upper).sum::<f64>() / n;
    // Means of ordered pairs stay ordered up to rounding.
    Ok(Interval {
        lower: lower.min(upper),
        upper,
    })
}
