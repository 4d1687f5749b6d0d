//! Uniform fit/predict surface over all estimators, and the JSON model file.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::dataset::IntervalFrame;
use crate::error::{Error, Result};
use crate::forest::{fit_forest, ForestFit, ForestParams};
use crate::interval::CenterRadius;
use crate::kernel::{fit_kernel, Bandwidth, Kernel, KernelFit};
use crate::linear::{fit_linear, LinearFit, LinearVariant};

/// One predicted interval in raw center/radius form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: CenterRadius,
    /// Negative radius (upper bound below lower bound).
    pub incoherent: bool,
    /// Kernel fallback to the nearest neighbour after weight underflow.
    pub extrapolated: bool,
}

impl Prediction {
    pub fn new(value: CenterRadius) -> Self {
        Self {
            value,
            incoherent: value.radius < 0.0,
            extrapolated: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ccrm,
    Crm,
    MinMax,
    Ke,
    Rf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Ccrm,
        ModelKind::Crm,
        ModelKind::MinMax,
        ModelKind::Ke,
        ModelKind::Rf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Ccrm => "ccrm",
            ModelKind::Crm => "crm",
            ModelKind::MinMax => "minmax",
            ModelKind::Ke => "ke",
            ModelKind::Rf => "rf",
        }
    }

    /// Upper-case label used in summary tables.
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Ccrm => "CCRM",
            ModelKind::Crm => "CRM",
            ModelKind::MinMax => "MinMax",
            ModelKind::Ke => "KE",
            ModelKind::Rf => "RF",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ccrm" => Ok(ModelKind::Ccrm),
            "crm" => Ok(ModelKind::Crm),
            "minmax" => Ok(ModelKind::MinMax),
            "ke" | "kernel" => Ok(ModelKind::Ke),
            "rf" | "forest" => Ok(ModelKind::Rf),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected ccrm, crm, minmax, ke or rf)"
            ))),
        }
    }
}

/// Parse a comma-separated model list.
pub fn parse_models(list: &str) -> Result<Vec<ModelKind>> {
    let models: Vec<ModelKind> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if models.is_empty() {
        return Err(Error::Config("empty model list".into()));
    }
    Ok(models)
}

/// Hyper-parameters for every estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub forest: ForestParams,
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            forest: ForestParams::default(),
            kernel: Kernel::Gaussian,
            bandwidth: Bandwidth::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelFit {
    Linear(LinearFit),
    Kernel(KernelFit),
    Forest(ForestFit),
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    #[serde(flatten)]
    fit: ModelFit,
}

impl ModelFit {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelFit::Linear(f) => match f.variant {
                LinearVariant::Ccrm => ModelKind::Ccrm,
                LinearVariant::Crm => ModelKind::Crm,
                LinearVariant::MinMax => ModelKind::MinMax,
            },
            ModelFit::Kernel(_) => ModelKind::Ke,
            ModelFit::Forest(_) => ModelKind::Rf,
        }
    }

    pub fn predict(&self, rows: &[Vec<CenterRadius>]) -> Result<Vec<Prediction>> {
        match self {
            ModelFit::Linear(f) => rows.iter().map(|r| f.predict_one(r)).collect(),
            ModelFit::Kernel(f) => rows.iter().map(|r| f.predict(r)).collect(),
            ModelFit::Forest(f) => f.predict_rows(rows),
        }
    }

    pub fn predict_frame(&self, frame: &IntervalFrame) -> Result<Vec<Prediction>> {
        self.predict(&frame.rows())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            fit: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format version {}",
                doc.format_version
            )));
        }
        Ok(doc.fit)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn fit_model(kind: ModelKind, train: &IntervalFrame, config: &ModelConfig) -> Result<ModelFit> {
    Ok(match kind {
        ModelKind::Ccrm => ModelFit::Linear(fit_linear(LinearVariant::Ccrm, train)?),
        ModelKind::Crm => ModelFit::Linear(fit_linear(LinearVariant::Crm, train)?),
        ModelKind::MinMax => ModelFit::Linear(fit_linear(LinearVariant::MinMax, train)?),
        ModelKind::Ke => ModelFit::Kernel(fit_kernel(train, config.kernel, config.bandwidth)?),
        ModelKind::Rf => ModelFit::Forest(fit_forest(train, &config.forest)?),
    })
}
