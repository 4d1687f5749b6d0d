//! Random-forest regression for interval data.
//!
//! Two independent ensembles are grown, one for the response center and one
//! for the response radius. Both use the same `2p` scalar features: every
//! predictor center followed by every predictor radius. Tree `t` of a
//! component draws all of its randomness from a stream seeded by
//! `derive_seed(seed, [component, t])`, so a fit does not depend on how
//! trees are scheduled across threads.

mod split;
mod tree;

pub use split::{best_split, best_split_with_min_leaf, FeatureMatrix, SplitCandidate, MIN_IMPROVEMENT};
pub use tree::{grow_tree, Tree, TreeParams};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::IntervalFrame;
use crate::error::{Error, Result};
use crate::interval::CenterRadius;
use crate::model::Prediction;
use crate::rng::{derive_seed, stream, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Candidate features per node; `None` means `max(1, floor(2p / 3))`.
    pub mtry: Option<usize>,
    pub min_node: usize,
    pub seed: u64,
    pub max_depth: Option<usize>,
    /// Keep bootstrap indices in the fit (needed for OOB recomputation).
    pub keep_bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 500,
            mtry: None,
            min_node: 5,
            seed: 0,
            max_depth: None,
            keep_bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn resolved_mtry(&self, m: usize) -> usize {
        self.mtry.unwrap_or((m / 3).max(1))
    }

    fn validate(&self, m: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Config("n_trees must be at least 1".into()));
        }
        if self.min_node == 0 {
            return Err(Error::Config("min_node must be at least 1".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::Config("max_depth must be positive".into()));
        }
        let mtry = self.resolved_mtry(m);
        if mtry == 0 || mtry > m {
            return Err(Error::Config(format!(
                "mtry must lie in 1..={m}, got {mtry}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Center,
    Radius,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::Center, Component::Radius];

    pub fn name(&self) -> &'static str {
        match self {
            Component::Center => "center",
            Component::Radius => "radius",
        }
    }

    fn stream(&self) -> Stream {
        match self {
            Component::Center => Stream::CenterForest,
            Component::Radius => Stream::RadiusForest,
        }
    }

    fn tag(&self) -> u64 {
        match self {
            Component::Center => 0,
            Component::Radius => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OobComponent {
    pub mse: f64,
    /// `None` when the usable OOB truth has zero variance.
    pub r2: Option<f64>,
    pub n_used: usize,
    /// Rows that were in-bag for every tree.
    pub n_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OobReport {
    pub center: OobComponent,
    pub radius: OobComponent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestFit {
    pub params: ForestParams,
    pub mtry: usize,
    pub predictor_names: Vec<String>,
    /// `<name>_C` for every predictor, then `<name>_R`.
    pub feature_names: Vec<String>,
    pub center_forest: Vec<Tree>,
    pub radius_forest: Vec<Tree>,
    pub oob: Option<OobReport>,
}

/// Scalar feature layout: all centers, then all radii.
pub fn feature_matrix(frame: &IntervalFrame) -> FeatureMatrix {
    let p = frame.p();
    let mut cols = Vec::with_capacity(2 * p);
    for j in 0..p {
        cols.push(frame.predictor(j).iter().map(|c| c.center).collect());
    }
    for j in 0..p {
        cols.push(frame.predictor(j).iter().map(|c| c.radius).collect());
    }
    FeatureMatrix::new(cols)
}

fn features_of(row: &[CenterRadius]) -> Vec<f64> {
    row.iter()
        .map(|c| c.center)
        .chain(row.iter().map(|c| c.radius))
        .collect()
}

fn grow_component(
    component: Component,
    y: &[f64],
    x: &FeatureMatrix,
    params: &ForestParams,
    tree_params: &TreeParams,
) -> Vec<Tree> {
    let n = x.n();
    (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(params.seed, &[component.tag(), t as u64]);
            let mut rng = stream(seed, component.stream());
            let bag: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let mut tree = grow_tree(&bag, y, x, tree_params, &mut rng);
            if params.keep_bootstrap {
                tree.bootstrap = Some(bag.iter().map(|&i| i as u32).collect());
            }
            tree
        })
        .collect()
}

pub fn fit_forest(train: &IntervalFrame, params: &ForestParams) -> Result<ForestFit> {
    if train.n() < 2 {
        return Err(Error::Underdetermined {
            rows: train.n(),
            cols: 2,
        });
    }
    let x = feature_matrix(train);
    params.validate(x.m())?;
    let mtry = params.resolved_mtry(x.m());
    let tree_params = TreeParams {
        mtry,
        min_node: params.min_node,
        max_depth: params.max_depth,
    };
    let center_forest = grow_component(
        Component::Center,
        &train.response_centers(),
        &x,
        params,
        &tree_params,
    );
    let radius_forest = grow_component(
        Component::Radius,
        &train.response_radii(),
        &x,
        params,
        &tree_params,
    );
    let names = train.predictor_names();
    let feature_names = names
        .iter()
        .map(|n| format!("{n}_C"))
        .chain(names.iter().map(|n| format!("{n}_R")))
        .collect();
    let mut fit = ForestFit {
        params: params.clone(),
        mtry,
        predictor_names: names.to_vec(),
        feature_names,
        center_forest,
        radius_forest,
        oob: None,
    };
    if params.keep_bootstrap {
        fit.oob = oob_error(&fit, train).ok();
    }
    Ok(fit)
}

fn mean_prediction(trees: &[Tree], x: &[f64]) -> f64 {
    trees.iter().map(|t| t.predict(x)).sum::<f64>() / trees.len() as f64
}

impl ForestFit {
    pub fn p(&self) -> usize {
        self.predictor_names.len()
    }

    pub fn predict(&self, row: &[CenterRadius]) -> Result<Prediction> {
        if row.len() != self.p() {
            return Err(Error::Dimension {
                expected: self.p(),
                got: row.len(),
            });
        }
        let x = features_of(row);
        Ok(Prediction::new(CenterRadius::new(
            mean_prediction(&self.center_forest, &x),
            mean_prediction(&self.radius_forest, &x),
        )))
    }

    /// Predict many rows; parallel over rows, identical to sequential.
    pub fn predict_rows(&self, rows: &[Vec<CenterRadius>]) -> Result<Vec<Prediction>> {
        rows.par_iter().map(|r| self.predict(r)).collect()
    }
}

pub fn predict_forest(fit: &ForestFit, row: &[CenterRadius]) -> Result<Prediction> {
    fit.predict(row)
}

fn oob_component(trees: &[Tree], x: &FeatureMatrix, truth: &[f64]) -> Result<OobComponent> {
    let n = x.n();
    let mut sum = vec![0.0; n];
    let mut hits = vec![0usize; n];
    let mut in_bag = vec![false; n];
    for t in trees {
        let bag = t.bootstrap.as_ref().ok_or_else(|| {
            Error::Config("forest was fitted without bootstrap indices; OOB unavailable".into())
        })?;
        in_bag.iter_mut().for_each(|b| *b = false);
        for &i in bag {
            let i = i as usize;
            if i >= n {
                return Err(Error::Dimension { expected: n, got: i + 1 });
            }
            in_bag[i] = true;
        }
        for i in (0..n).filter(|&i| !in_bag[i]) {
            sum[i] += t.predict_row(x, i);
            hits[i] += 1;
        }
    }
    let used: Vec<usize> = (0..n).filter(|&i| hits[i] > 0).collect();
    if used.is_empty() {
        return Err(Error::OobUnavailable);
    }
    let m = used.len() as f64;
    let sse: f64 = used
        .iter()
        .map(|&i| (sum[i] / hits[i] as f64 - truth[i]).powi(2))
        .sum();
    let mean = used.iter().map(|&i| truth[i]).sum::<f64>() / m;
    let sst: f64 = used.iter().map(|&i| (truth[i] - mean).powi(2)).sum();
    Ok(OobComponent {
        mse: sse / m,
        r2: (sst > 0.0).then(|| 1.0 - sse / sst),
        n_used: used.len(),
        n_skipped: n - used.len(),
    })
}

/// Out-of-bag MSE and R² per component on the training frame.
pub fn oob_error(fit: &ForestFit, train: &IntervalFrame) -> Result<OobReport> {
    if train.p() != fit.p() {
        return Err(Error::Dimension {
            expected: fit.p(),
            got: train.p(),
        });
    }
    let x = feature_matrix(train);
    Ok(OobReport {
        center: oob_component(&fit.center_forest, &x, &train.response_centers())?,
        radius: oob_component(&fit.radius_forest, &x, &train.response_radii())?,
    })
}
