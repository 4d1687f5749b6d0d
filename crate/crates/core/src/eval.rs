//! Accuracy metrics, the simulation benchmark driver, and the hold-out
//! workflow for user data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{simulate, split, IntervalFrame, SimSetting, SplitSpec};
use crate::error::{Error, Result};
use crate::interval::CenterRadius;
use crate::model::{fit_model, ModelConfig, ModelKind, Prediction};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentScores {
    pub r2: f64,
    pub mse: f64,
    pub mae: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub center: ComponentScores,
    pub radius: ComponentScores,
    pub n_test: usize,
    /// Predictions with a negative radius, scored on their raw values.
    pub incoherent_count: usize,
}

impl EvalReport {
    pub fn component(&self, c: Component) -> &ComponentScores {
        match c {
            Component::Center => &self.center,
            Component::Radius => &self.radius,
        }
    }
}

pub use crate::forest::Component;

fn scores(pred: &[f64], truth: &[f64], what: &'static str) -> Result<ComponentScores> {
    let n = truth.len() as f64;
    let mean = truth.iter().sum::<f64>() / n;
    let sst: f64 = truth.iter().map(|t| (t - mean).powi(2)).sum();
    if sst <= 0.0 {
        return Err(Error::DegenerateTruth(what));
    }
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum();
    let sae: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum();
    Ok(ComponentScores {
        r2: 1.0 - sse / sst,
        mse: sse / n,
        mae: sae / n,
    })
}

/// Score raw center/radius predictions against the truth.
///
/// R² is out of sample: residuals are compared with the spread of the truth
/// around its own mean, so it can be negative.
pub fn evaluate(pred: &[CenterRadius], truth: &[CenterRadius]) -> Result<EvalReport> {
    if pred.len() != truth.len() {
        return Err(Error::Dimension {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if truth.len() < 2 {
        return Err(Error::EmptySample(format!(
            "evaluation needs at least 2 rows, got {}",
            truth.len()
        )));
    }
    let col = |v: &[CenterRadius], f: fn(&CenterRadius) -> f64| v.iter().map(f).collect::<Vec<_>>();
    Ok(EvalReport {
        center: scores(&col(pred, |c| c.center), &col(truth, |c| c.center), "center")?,
        radius: scores(&col(pred, |c| c.radius), &col(truth, |c| c.radius), "radius")?,
        n_test: truth.len(),
        incoherent_count: pred.iter().filter(|c| c.radius < 0.0).count(),
    })
}

pub fn evaluate_predictions(pred: &[Prediction], truth: &[CenterRadius]) -> Result<EvalReport> {
    let raw: Vec<CenterRadius> = pred.iter().map(|p| p.value).collect();
    evaluate(&raw, truth)
}

/// One benchmark grid: settings × total sizes × replications × models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub settings: Vec<u32>,
    /// Total generated sizes; the training part is `train_fraction` of each.
    pub total_sizes: Vec<usize>,
    pub reps: usize,
    pub models: Vec<ModelKind>,
    pub master_seed: u64,
    pub train_fraction: f64,
    pub config: ModelConfig,
    /// Record wall-clock time per cell; off gives byte-stable results.
    pub timings: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            settings: (1..=7).collect(),
            total_sizes: vec![500, 1000, 2000],
            reps: 100,
            models: vec![ModelKind::Ccrm, ModelKind::Crm, ModelKind::Ke, ModelKind::Rf],
            master_seed: 1,
            train_fraction: 0.1,
            config: ModelConfig::default(),
            timings: true,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.settings.is_empty() || self.total_sizes.is_empty() || self.models.is_empty() {
            return Err(Error::Config(
                "settings, sizes and models must all be non-empty".into(),
            ));
        }
        for &s in &self.settings {
            SimSetting::new(s, 2, 0)?;
        }
        for &n in &self.total_sizes {
            crate::dataset::train_size(n, &SplitSpec::random(self.train_fraction, 0))?;
        }
        Ok(())
    }

    /// Seed of one replication, independent of every other cell.
    pub fn rep_seed(&self, setting: u32, total: usize, rep: usize) -> u64 {
        derive_seed(self.master_seed, &[setting as u64, total as u64, rep as u64])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub setting: u32,
    pub n_train: usize,
    pub rep: usize,
    pub model: ModelKind,
    pub component: Component,
    pub r2: f64,
    pub mse: f64,
    pub mae: f64,
    pub wall_time_s: f64,
}

/// Negative radii seen in one (replication, model) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceRow {
    pub setting: u32,
    pub n_train: usize,
    pub rep: usize,
    pub model: ModelKind,
    pub n_test: usize,
    pub incoherent_predictions: usize,
    pub min_predicted_radius: f64,
    /// Test rows whose generated response radius is negative.
    pub negative_truth_radii: usize,
    pub negative_train_radii: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub coherence: Vec<CoherenceRow>,
}

struct Job {
    setting: u32,
    total: usize,
    rep: usize,
}

fn run_job(spec: &ExperimentSpec, job: &Job) -> Result<(Vec<ResultRow>, Vec<CoherenceRow>)> {
    let seed = spec.rep_seed(job.setting, job.total, job.rep);
    let data = simulate(&SimSetting::new(job.setting, job.total, seed)?)?;
    let (train, test) = split(&data, &SplitSpec::random(spec.train_fraction, seed))?;
    let test_rows = test.rows();
    let truth = test.response();
    let negative_truth_radii = truth.iter().filter(|c| c.radius < 0.0).count();
    let negative_train_radii = train.response().iter().filter(|c| c.radius < 0.0).count();

    let mut config = spec.config.clone();
    config.forest.seed = derive_seed(seed, &[0x7266]);

    let mut rows = Vec::new();
    let mut coherence = Vec::new();
    for &model in &spec.models {
        let start = Instant::now();
        let fit = fit_model(model, &train, &config)?;
        let pred = fit.predict(&test_rows)?;
        let wall = if spec.timings {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        let report = evaluate_predictions(&pred, truth)?;
        for component in Component::BOTH {
            let s = report.component(component);
            rows.push(ResultRow {
                setting: job.setting,
                n_train: train.n(),
                rep: job.rep,
                model,
                component,
                r2: s.r2,
                mse: s.mse,
                mae: s.mae,
                wall_time_s: wall,
            });
        }
        coherence.push(CoherenceRow {
            setting: job.setting,
            n_train: train.n(),
            rep: job.rep,
            model,
            n_test: report.n_test,
            incoherent_predictions: report.incoherent_count,
            min_predicted_radius: pred
                .iter()
                .map(|p| p.value.radius)
                .fold(f64::INFINITY, f64::min),
            negative_truth_radii,
            negative_train_radii,
        });
    }
    Ok((rows, coherence))
}

/// Run the whole grid. Output order is fixed by (setting, n_train, rep,
/// model, component) whatever the completion order of the jobs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for &setting in &spec.settings {
        for &total in &spec.total_sizes {
            for rep in 0..spec.reps {
                jobs.push(Job { setting, total, rep });
            }
        }
    }
    let parts: Vec<_> = jobs
        .par_iter()
        .map(|j| run_job(spec, j))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut coherence = Vec::new();
    for (r, c) in parts {
        rows.extend(r);
        coherence.extend(c);
    }
    let key = |r: &ResultRow| (r.setting, r.n_train, r.rep, r.model, r.component as u8);
    rows.sort_by_key(key);
    coherence.sort_by_key(|c| (c.setting, c.n_train, c.rep, c.model));
    Ok(ExperimentResult { rows, coherence })
}

/// Mean scores of one (setting, n_train, model, component) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub setting: u32,
    pub n_train: usize,
    pub component: Component,
    pub model: ModelKind,
    pub reps: usize,
    pub r2: f64,
    pub mse: f64,
    pub mae: f64,
    /// Highest mean R² among the models of this cell.
    pub best: bool,
}

pub fn summarize(result: &ExperimentResult) -> Vec<SummaryRow> {
    let mut acc: BTreeMap<(u32, usize, u8, ModelKind), (usize, f64, f64, f64)> = BTreeMap::new();
    for r in &result.rows {
        let e = acc
            .entry((r.setting, r.n_train, r.component as u8, r.model))
            .or_default();
        e.0 += 1;
        e.1 += r.r2;
        e.2 += r.mse;
        e.3 += r.mae;
    }
    let mut out: Vec<SummaryRow> = acc
        .into_iter()
        .map(|((setting, n_train, comp, model), (k, r2, mse, mae))| {
            let k_f = k as f64;
            SummaryRow {
                setting,
                n_train,
                component: if comp == 0 { Component::Center } else { Component::Radius },
                model,
                reps: k,
                r2: r2 / k_f,
                mse: mse / k_f,
                mae: mae / k_f,
                best: false,
            }
        })
        .collect();
    let mut start = 0;
    while start < out.len() {
        let key = (out[start].setting, out[start].n_train, out[start].component);
        let end = start
            + out[start..]
                .iter()
                .take_while(|r| (r.setting, r.n_train, r.component) == key)
                .count();
        let best = (start..end)
            .reduce(|a, b| if out[b].r2 > out[a].r2 { b } else { a })
            .expect("non-empty group");
        out[best].best = true;
        start = end;
    }
    out
}

/// Mean of one summary cell, if present.
pub fn cell(
    summary: &[SummaryRow],
    setting: u32,
    n_train: usize,
    model: ModelKind,
    component: Component,
) -> Option<&SummaryRow> {
    summary.iter().find(|r| {
        r.setting == setting && r.n_train == n_train && r.model == model && r.component == component
    })
}

pub fn write_results_csv<W: Write>(result: &ExperimentResult, w: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["setting", "n_train", "rep", "model", "component", "r2", "mse", "mae", "wall_time_s"])
        .map_err(csv_err)?;
    for r in &result.rows {
        w.write_record([
            r.setting.to_string(),
            r.n_train.to_string(),
            r.rep.to_string(),
            r.model.name().to_string(),
            r.component.name().to_string(),
            r.r2.to_string(),
            r.mse.to_string(),
            r.mae.to_string(),
            r.wall_time_s.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(summary: &[SummaryRow], w: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["setting", "n_train", "component", "model", "reps", "r2", "mse", "mae", "best"])
        .map_err(csv_err)?;
    for r in summary {
        w.write_record([
            r.setting.to_string(),
            r.n_train.to_string(),
            r.component.name().to_string(),
            r.model.name().to_string(),
            r.reps.to_string(),
            r.r2.to_string(),
            r.mse.to_string(),
            r.mae.to_string(),
            if r.best { "*".into() } else { String::new() },
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coherence_csv<W: Write>(result: &ExperimentResult, w: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record([
        "setting",
        "n_train",
        "rep",
        "model",
        "n_test",
        "incoherent_predictions",
        "min_predicted_radius",
        "negative_truth_radii",
        "negative_train_radii",
    ])
    .map_err(csv_err)?;
    for c in &result.coherence {
        w.write_record([
            c.setting.to_string(),
            c.n_train.to_string(),
            c.rep.to_string(),
            c.model.name().to_string(),
            c.n_test.to_string(),
            c.incoherent_predictions.to_string(),
            c.min_predicted_radius.to_string(),
            c.negative_truth_radii.to_string(),
            c.negative_train_radii.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Plain-text tables, one per component: rows are (setting, n_train),
/// columns are R², MSE and MAE for each model. `*` marks the best R².
pub fn summary_table(summary: &[SummaryRow]) -> String {
    let mut models: Vec<ModelKind> = summary.iter().map(|r| r.model).collect();
    models.sort();
    models.dedup();
    let mut out = String::new();
    for component in Component::BOTH {
        let rows: Vec<&SummaryRow> = summary.iter().filter(|r| r.component == component).collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(out, "Predictive accuracy: {}", component.name());
        let mut header = format!("{:>7} {:>7}", "setting", "n");
        for metric in ["R2", "MSE", "MAE"] {
            for m in &models {
                header.push_str(&format!(" {:>12}", format!("{metric}:{}", m.label())));
            }
        }
        let _ = writeln!(out, "{header}");
        let mut keys: Vec<(u32, usize)> = rows.iter().map(|r| (r.setting, r.n_train)).collect();
        keys.dedup();
        for (setting, n) in keys {
            let mut line = format!("{setting:>7} {n:>7}");
            for metric in 0..3 {
                for &m in &models {
                    let text = match cell(summary, setting, n, m, component) {
                        Some(r) => {
                            let v = [r.r2, r.mse, r.mae][metric];
                            let mark = if r.best { "*" } else { "" };
                            format!("{}{mark}", fmt_value(v))
                        }
                        None => "-".into(),
                    };
                    line.push_str(&format!(" {text:>12}"));
                }
            }
            let _ = writeln!(out, "{line}");
        }
        out.push('\n');
    }
    out
}

fn fmt_value(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.2E}")
    } else {
        format!("{v:.4}")
    }
}

/// Hold-out comparison on a single dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub n_train: usize,
    pub n_test: usize,
    pub models: Vec<(ModelKind, EvalReport)>,
    /// Smallest predicted radius per model.
    pub min_predicted_radius: Vec<(ModelKind, f64)>,
}

pub fn run_holdout(
    frame: &IntervalFrame,
    spec: &SplitSpec,
    models: &[ModelKind],
    config: &ModelConfig,
) -> Result<HoldoutReport> {
    if models.is_empty() {
        return Err(Error::Config("empty model list".into()));
    }
    let (train, test) = split(frame, spec)?;
    let rows = test.rows();
    let mut reports = Vec::new();
    let mut mins = Vec::new();
    for &m in models {
        let pred = fit_model(m, &train, config)?.predict(&rows)?;
        reports.push((m, evaluate_predictions(&pred, test.response())?));
        mins.push((
            m,
            pred.iter().map(|p| p.value.radius).fold(f64::INFINITY, f64::min),
        ));
    }
    Ok(HoldoutReport {
        n_train: train.n(),
        n_test: test.n(),
        models: reports,
        min_predicted_radius: mins,
    })
}

impl HoldoutReport {
    /// One table per component: a row per metric group, R², MSE and MAE with
    /// a column per model, `*` on the better value.
    pub fn table(&self, label: &str, component: Component) -> String {
        let mut out = format!("Predictive accuracy for {label}: {}\n", component.name());
        let mut header = format!("{:<12}", "");
        for metric in ["R2", "MSE", "MAE"] {
            for (m, _) in &self.models {
                header.push_str(&format!(" {:>12}", format!("{metric}:{}", m.label())));
            }
        }
        out.push_str(&header);
        out.push('\n');
        let mut line = format!("{label:<12}");
        for metric in 0..3 {
            let vals: Vec<f64> = self
                .models
                .iter()
                .map(|(_, r)| {
                    let s = r.component(component);
                    [s.r2, s.mse, s.mae][metric]
                })
                .collect();
            let best_i = (0..vals.len())
                .reduce(|a, b| {
                    let better = if metric == 0 { vals[b] > vals[a] } else { vals[b] < vals[a] };
                    if better { b } else { a }
                })
                .unwrap_or(0);
            for (i, v) in vals.iter().enumerate() {
                let mark = if i == best_i { "*" } else { "" };
                line.push_str(&format!(" {:>12}", format!("{}{mark}", fmt_value(*v))));
            }
        }
        out.push_str(&line);
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cr(c: f64, r: f64) -> CenterRadius {
        CenterRadius::new(c, r)
    }

    #[test]
    fn perfect_prediction() {
        let t = vec![cr(0.0, 1.0), cr(1.0, 2.0), cr(3.0, 0.5)];
        let r = evaluate(&t, &t).unwrap();
        assert_eq!(r.center, ComponentScores { r2: 1.0, mse: 0.0, mae: 0.0 });
        assert_eq!(r.radius, ComponentScores { r2: 1.0, mse: 0.0, mae: 0.0 });
        assert_eq!(r.incoherent_count, 0);
    }

    #[test]
    fn mean_prediction_has_zero_r2() {
        let t = vec![cr(0.0, 1.0), cr(1.0, 2.0), cr(2.0, 3.0)];
        let p = vec![cr(1.0, 2.0); 3];
        let r = evaluate(&p, &t).unwrap();
        assert_eq!(r.center.r2, 0.0);
        assert_eq!(r.radius.r2, 0.0);
    }

    #[test]
    fn hand_computed_center_scores() {
        let t = vec![cr(0.0, 1.0), cr(1.0, 2.0), cr(2.0, 3.0)];
        let p = vec![cr(0.0, 1.0), cr(1.0, 2.0), cr(5.0, -3.0)];
        let r = evaluate(&p, &t).unwrap();
        assert!((r.center.mse - 3.0).abs() < 1e-15);
        assert!((r.center.mae - 1.0).abs() < 1e-15);
        assert!((r.center.r2 + 3.5).abs() < 1e-15);
        assert_eq!(r.incoherent_count, 1);
    }

    #[test]
    fn evaluate_errors() {
        let t = vec![cr(1.0, 1.0), cr(1.0, 2.0)];
        assert!(matches!(evaluate(&t, &t), Err(Error::DegenerateTruth("center"))));
        assert!(matches!(evaluate(&t[..1], &t), Err(Error::Dimension { .. })));
        assert!(evaluate(&t[..1], &t[..1]).is_err());
    }

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec {
            settings: vec![1],
            total_sizes: vec![100],
            reps: 2,
            models: vec![ModelKind::Ccrm, ModelKind::Rf],
            config: ModelConfig {
                forest: crate::forest::ForestParams { n_trees: 20, ..Default::default() },
                ..Default::default()
            },
            timings: false,
            ..Default::default()
        }
    }

    #[test]
    fn experiment_is_deterministic_and_sorted() {
        let spec = small_spec();
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 2 * 2 * 2);
        assert_eq!(a.coherence.len(), 4);
        assert!(a.rows.iter().all(|r| r.n_train == 10));
        let s = summarize(&a);
        assert_eq!(s.len(), 4);
        assert_eq!(s.iter().filter(|r| r.best).count(), 2);
        let naive: f64 = a
            .rows
            .iter()
            .filter(|r| r.model == ModelKind::Rf && r.component == Component::Center)
            .map(|r| r.r2)
            .sum::<f64>()
            / 2.0;
        let c = cell(&s, 1, 10, ModelKind::Rf, Component::Center).unwrap();
        assert!((c.r2 - naive).abs() < 1e-15);
    }

    #[test]
    fn experiment_rejects_bad_specs() {
        let mut spec = small_spec();
        spec.reps = 0;
        assert!(matches!(run_experiment(&spec), Err(Error::Config(_))));
        let mut spec = small_spec();
        spec.settings = vec![8];
        assert!(matches!(run_experiment(&spec), Err(Error::UnknownSetting(8))));
    }

    #[test]
    fn csv_and_table_output() {
        let res = run_experiment(&small_spec()).unwrap();
        let mut buf = Vec::new();
        write_results_csv(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("setting,n_train,rep,model,component,r2,mse,mae,wall_time_s\n"));
        assert_eq!(text.lines().count(), 9);
        let table = summary_table(&summarize(&res));
        assert!(table.contains("R2:CCRM"));
        assert!(table.contains('*'));
    }
}
