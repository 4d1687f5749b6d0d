use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use ivf_core::dataset::{load_csv, simulate, write_csv, LoadOptions, GAMMA_PARAMETERIZATION};
use ivf_core::eval::{
    evaluate_predictions, run_holdout, summarize, summary_table, write_coherence_csv,
    write_results_csv, write_summary_csv, Component,
};
use ivf_core::model::parse_models;
use ivf_core::rng::GENERATOR_NAME;
use ivf_core::{
    fit_model, run_experiment, Bandwidth, CenterRadius, Error, ExperimentSpec, ForestParams,
    Kernel, ModelConfig, ModelFit, ModelKind, Prediction, SimSetting, SplitMode, SplitSpec,
};

use crate::args::*;
use crate::svg;
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn load_opts(d: &DataArgs) -> LoadOptions {
    LoadOptions {
        response: d.response.clone(),
        allow_incoherent: d.allow_incoherent,
    }
}

fn kernel_of(k: KernelArg) -> Kernel {
    match k {
        KernelArg::Gaussian => Kernel::Gaussian,
        KernelArg::Epanechnikov => Kernel::Epanechnikov,
        KernelArg::Triangular => Kernel::Triangular,
        KernelArg::Uniform => Kernel::Uniform,
    }
}

fn model_config(m: &ModelArgs, seed: u64) -> Result<ModelConfig> {
    let bandwidth = match m.bandwidth {
        Some(h) if !(h > 0.0 && h.is_finite()) => {
            return Err(Error::Config(format!("bandwidth must be positive, got {h}")).into())
        }
        Some(h) => Bandwidth::Fixed(h),
        None => Bandwidth::Auto,
    };
    Ok(ModelConfig {
        forest: ForestParams {
            n_trees: m.trees,
            mtry: m.mtry,
            min_node: m.min_node,
            seed,
            max_depth: m.max_depth,
            keep_bootstrap: true,
        },
        kernel: kernel_of(m.kernel),
        bandwidth,
    })
}

/// Run metadata written next to every output.
#[derive(Serialize)]
struct Manifest<'a, A: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    args: &'a A,
    rng: &'static str,
    details: Value,
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_manifest<A: Serialize>(path: &Path, command: &str, args: &A, details: Value) -> Result<()> {
    let m = Manifest {
        tool: "ivf",
        version: env!("CARGO_PKG_VERSION"),
        command,
        args,
        rng: GENERATOR_NAME,
        details,
    };
    let mut text = serde_json::to_string_pretty(&m).map_err(Error::from)?;
    text.push('\n');
    fs::write(path, text).map_err(Error::from)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(Error::from)?))
}

/// Parse `1-4,6` style lists.
pub fn parse_id_list(s: &str) -> Result<Vec<u32>> {
    let bad = || CliError::usage(format!("invalid list `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| CliError::usage(format!("invalid size `{p}`"))))
        .collect()
}

pub fn simulate_cmd(a: &SimulateArgs) -> Result<()> {
    let setting = SimSetting::new(a.setting, a.n, a.seed)?;
    let frame = simulate(&setting)?;
    write_csv(&frame, &a.out)?;
    let report = frame.coherence_report();
    write_manifest(
        &manifest_path(&a.out),
        "simulate",
        a,
        json!({
            "rows": frame.n(),
            "predictors": frame.p(),
            "gamma": GAMMA_PARAMETERIZATION,
            "negative_response_radii": report.negative_response_rows.len(),
            "negative_predictor_radii": report.negative_predictor_cells,
        }),
    )?;
    if report.count() > 0 {
        eprintln!(
            "note: {} response radii and {} predictor radii are negative; load with --allow-incoherent",
            report.negative_response_rows.len(),
            report.negative_predictor_cells
        );
    }
    Ok(())
}

pub fn fit_cmd(a: &FitArgs) -> Result<()> {
    let kind: ModelKind = a.model.parse()?;
    let train = load_csv(&a.input, &load_opts(&a.data))?;
    let config = model_config(&a.model_args, a.seed)?;
    let fit = fit_model(kind, &train, &config)?;
    fit.save(&a.out)?;
    let details = match &fit {
        ModelFit::Kernel(k) => json!({ "bandwidth": k.bandwidth, "kernel": k.kernel.name() }),
        ModelFit::Forest(f) => json!({ "mtry": f.mtry, "oob": f.oob }),
        ModelFit::Linear(l) => json!({ "first": l.first, "second": l.second }),
    };
    write_manifest(
        &manifest_path(&a.out),
        "fit",
        a,
        json!({ "model": kind.name(), "rows": train.n(), "config": config, "fit": details }),
    )
}

fn write_predictions(path: &Path, pred: &[Prediction]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e: std::io::Error| CliError::from(Error::from(e));
    writeln!(w, "center,radius,lower,upper,incoherent,extrapolated").map_err(io)?;
    for p in pred {
        let v = p.value;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            v.center,
            v.radius,
            v.lower(),
            v.upper(),
            p.incoherent as u8,
            p.extrapolated as u8
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

/// Read a prediction CSV (needs `center` and `radius` columns).
pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let data_err = |row: usize, message: String| Error::Parse {
        row,
        column: String::new(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| data_err(0, e.to_string()))?;
    let headers = r.headers().map_err(|e| data_err(0, e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse {
                row: 0,
                column: name.into(),
                message: "missing column".into(),
            })
    };
    let (ci, ri) = (col("center")?, col("radius")?);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| data_err(i + 1, e.to_string()))?;
        let num = |j: usize, name: &str| -> std::result::Result<f64, Error> {
            let cell = rec.get(j).unwrap_or("").trim();
            cell.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row: i + 1,
                    column: name.into(),
                    message: format!("not a finite number: `{cell}`"),
                })
        };
        out.push(Prediction::new(CenterRadius::new(num(ci, "center")?, num(ri, "radius")?)));
    }
    if out.is_empty() {
        return Err(Error::EmptySample("prediction file has no rows".into()).into());
    }
    Ok(out)
}

pub fn predict_cmd(a: &PredictArgs) -> Result<()> {
    let fit = ModelFit::load(&a.model_file)?;
    let frame = load_csv(&a.input, &load_opts(&a.data))?;
    let pred = fit.predict_frame(&frame)?;
    write_predictions(&a.out, &pred)?;
    let incoherent = pred.iter().filter(|p| p.incoherent).count();
    let extrapolated = pred.iter().filter(|p| p.extrapolated).count();
    write_manifest(
        &manifest_path(&a.out),
        "predict",
        a,
        json!({
            "model": fit.kind().name(),
            "rows": pred.len(),
            "incoherent": incoherent,
            "extrapolated": extrapolated,
        }),
    )
}

pub fn evaluate_cmd(a: &EvaluateArgs) -> Result<()> {
    let pred = read_predictions(&a.pred)?;
    let truth = load_csv(&a.truth, &load_opts(&a.data))?;
    let report = evaluate_predictions(&pred, truth.response())?;
    let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    println!("{text}");
    if let Some(out) = &a.out {
        fs::write(out, format!("{text}\n")).map_err(Error::from)?;
        write_manifest(&manifest_path(out), "evaluate", a, json!({}))?;
    }
    Ok(())
}

pub fn bench_spec(a: &BenchArgs) -> Result<ExperimentSpec> {
    if a.reps == 0 {
        return Err(Error::Config("--reps must be at least 1".into()).into());
    }
    Ok(ExperimentSpec {
        settings: parse_id_list(&a.settings)?,
        total_sizes: parse_sizes(&a.sizes)?,
        reps: a.reps,
        models: parse_models(&a.models)?,
        master_seed: a.seed,
        train_fraction: a.train_fraction,
        config: model_config(&a.model_args, 0)?,
        timings: !a.no_timings,
    })
}

pub fn bench_cmd(a: &BenchArgs) -> Result<()> {
    let spec = bench_spec(a)?;
    spec.validate()?;
    fs::create_dir_all(&a.out_dir).map_err(Error::from)?;
    let result = run_experiment(&spec)?;
    let summary = summarize(&result);
    let dir = &a.out_dir;
    write_results_csv(&result, create(&dir.join("results.csv"))?)?;
    write_summary_csv(&summary, create(&dir.join("summary.csv"))?)?;
    write_coherence_csv(&result, create(&dir.join("coherence.csv"))?)?;
    let table = summary_table(&summary);
    fs::write(dir.join("summary.txt"), &table).map_err(Error::from)?;
    print!("{table}");
    write_manifest(
        &dir.join("manifest.json"),
        "bench",
        a,
        json!({ "spec": spec, "gamma": GAMMA_PARAMETERIZATION }),
    )
}

pub fn holdout_cmd(a: &HoldoutArgs) -> Result<()> {
    let frame = load_csv(&a.input, &load_opts(&a.data))?;
    let models = parse_models(&a.models)?;
    let spec = SplitSpec {
        train_fraction: a.train_fraction,
        mode: match a.mode {
            ModeArg::Random => SplitMode::Random,
            ModeArg::Chronological => SplitMode::Chronological,
        },
        seed: a.seed,
        train_count: a.train_count,
    };
    let config = model_config(&a.model_args, a.seed)?;
    let report = run_holdout(&frame, &spec, &models, &config)?;
    let label = a.label.clone().unwrap_or_else(|| frame.response_name().to_string());
    fs::create_dir_all(&a.out_dir).map_err(Error::from)?;
    let center = report.table(&label, Component::Center);
    let radius = report.table(&label, Component::Radius);
    fs::write(a.out_dir.join("center_table.txt"), &center).map_err(Error::from)?;
    fs::write(a.out_dir.join("radius_table.txt"), &radius).map_err(Error::from)?;
    let json_text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    fs::write(a.out_dir.join("report.json"), format!("{json_text}\n")).map_err(Error::from)?;
    print!("{center}\n{radius}");
    write_manifest(
        &a.out_dir.join("manifest.json"),
        "holdout",
        a,
        json!({ "split": spec, "config": config, "n_train": report.n_train, "n_test": report.n_test }),
    )
}

pub fn plot_cmd(a: &PlotArgs) -> Result<()> {
    match &a.kind {
        PlotKind::Rectangles { input, x, out, data } => {
            let frame = load_csv(input, &load_opts(data))?;
            let j = match x {
                None => 0,
                Some(name) => frame
                    .predictor_names()
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::Config(format!("no predictor named `{name}`")))?,
            };
            fs::write(out, svg::rectangles(&frame, j)?).map_err(Error::from)?;
        }
        PlotKind::PredScatter { truth, pred, out, data } => {
            let frame = load_csv(truth, &load_opts(data))?;
            let p: Vec<CenterRadius> = read_predictions(pred)?.iter().map(|p| p.value).collect();
            fs::write(out, svg::pred_scatter(frame.response(), &p)?).map_err(Error::from)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_lists() {
        assert_eq!(parse_id_list("1-4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_id_list("1,3,5-7").unwrap(), vec![1, 3, 5, 6, 7]);
        assert!(parse_id_list("4-1").is_err());
        assert!(parse_id_list("x").is_err());
        assert!(parse_sizes("500, 1000").unwrap() == vec![500, 1000]);
    }

    #[test]
    fn manifest_names() {
        assert_eq!(manifest_path(Path::new("a/s1.csv")), PathBuf::from("a/s1.csv.manifest.json"));
    }
}
