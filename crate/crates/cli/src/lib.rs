//! The `ivf` command-line tool.

pub mod args;
pub mod commands;
pub mod svg;

use std::fmt;

use clap::Parser;
use ivf_core::Error;

pub use args::Cli;

/// Process exit status: 2 usage or configuration, 3 data, 4 numeric.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::UnknownSetting(_) => 2,
        Error::Numeric(_) | Error::Underdetermined { .. } => 4,
        _ => 3,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

/// Worker count from `--threads`, then `IVF_THREADS`, else rayon's default.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("IVF_THREADS") {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("IVF_THREADS must be a positive integer, got `{v}`")))?,
            ),
            _ => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::usage("thread count must be at least 1"));
    }
    Ok(n)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    use args::Command::*;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.threads)? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Simulate(a) => commands::simulate_cmd(a),
        Fit(a) => commands::fit_cmd(a),
        Predict(a) => commands::predict_cmd(a),
        Evaluate(a) => commands::evaluate_cmd(a),
        Bench(a) => commands::bench_cmd(a),
        Holdout(a) => commands::holdout_cmd(a),
        Plot(a) => commands::plot_cmd(a),
    })
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
