//! Regression for interval-valued data.
//!
//! Intervals are handled in center/radius form throughout. The crate offers
//! three families of estimators (linear baselines, a distance-based kernel
//! smoother and a pair of random forests), generators for seven simulation
//! settings, and a seeded benchmark driver.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod forest;
pub mod interval;
pub mod kernel;
pub mod linear;
pub mod model;
pub mod rng;

pub use dataset::{IntervalFrame, SimSetting, SplitMode, SplitSpec};
pub use error::{Error, Result};
pub use eval::{evaluate, run_experiment, EvalReport, ExperimentSpec};
pub use forest::{fit_forest, ForestFit, ForestParams};
pub use interval::{CenterRadius, HyperInterval, Interval, WWeight};
pub use kernel::{fit_kernel, Bandwidth, Kernel, KernelFit};
pub use linear::{fit_linear, LinearFit, LinearVariant};
pub use model::{fit_model, ModelConfig, ModelFit, ModelKind, Prediction};
