//! Command-line front end: configuration, dispatch and artifact output.

mod commands;
mod config;
mod io;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

pub use commands::{execute, Outcome, PROFILE_MASS_TOLERANCE};
pub use config::{parse_domain, Command, FileConfig, Flags, KindArg, ProblemArg, RunConfig, DEFAULT_SEED, OUTPUT_ROOT_ENV};
pub use io::{normalize_floats, to_json_value, write_csv, write_json};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "nldiff", version, about = "Short-time asymptotics laboratory for nonlinear diffusion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Self-similar profile f_c and its mass identity.
    Profile(Flags),
    /// Asymptotic constant c(φ,N).
    Constant(Flags),
    /// Run the finite-difference solver and export snapshots.
    Pde(Flags),
    /// −4tΦ(u) against d² on a probe band.
    VerifyVaradhan(Flags),
    /// Heat content in a touching ball against the curvature prediction.
    VerifyCurvature(Flags),
    /// Scaled level-set measure against its limit.
    VerifyAsympvol(Flags),
    /// Barrier sandwich on the solver output and on f₁.
    VerifyBarriers(Flags),
    /// Spread of u along the parallel surface {d = R}.
    VerifyStationarity(Flags),
    /// Nodewise ordering for nested half-spaces.
    VerifyOrdering(Flags),
}

impl Sub {
    pub fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::Profile(f) => (Command::Profile, f),
            Sub::Constant(f) => (Command::Constant, f),
            Sub::Pde(f) => (Command::Pde, f),
            Sub::VerifyVaradhan(f) => (Command::VerifyVaradhan, f),
            Sub::VerifyCurvature(f) => (Command::VerifyCurvature, f),
            Sub::VerifyAsympvol(f) => (Command::VerifyAsympvol, f),
            Sub::VerifyBarriers(f) => (Command::VerifyBarriers, f),
            Sub::VerifyStationarity(f) => (Command::VerifyStationarity, f),
            Sub::VerifyOrdering(f) => (Command::VerifyOrdering, f),
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Runs one command and writes `report.json` (plus `series.csv` when
/// reports exist). Returns whether every report passed.
pub fn run(cfg: &RunConfig) -> Result<bool> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", cfg.output_dir.display())))?;
    let start = Instant::now();
    let outcome = execute(cfg);
    let elapsed = start.elapsed().as_secs_f64();
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let metadata = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "unix_time": stamp,
        "elapsed_seconds": elapsed,
        "threads": rayon::current_num_threads(),
    });
    let mut doc = json!({
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "config": to_json_value(cfg)?,
    });
    let result = match outcome {
        Ok(o) => {
            let reports: Vec<Value> = o
                .reports
                .iter()
                .map(|(label, r)| {
                    let mut v = to_json_value(r)?;
                    v["label"] = json!(label);
                    Ok(v)
                })
                .collect::<Result<_>>()?;
            doc["passed"] = json!(o.passed);
            doc["results"] = normalize_floats(o.results.clone());
            doc["reports"] = Value::Array(reports);
            if !o.reports.is_empty() {
                write_series(cfg, &o)?;
            }
            Ok(o.passed)
        }
        Err(e) => {
            doc["passed"] = json!(false);
            doc["error"] = json!(e.to_string());
            Err(e)
        }
    };
    doc["metadata"] = normalize_floats(metadata);
    write_json(&cfg.output_dir.join("report.json"), &doc)?;
    result
}

fn write_series(cfg: &RunConfig, o: &Outcome) -> Result<()> {
    let mut w = csv::Writer::from_path(cfg.output_dir.join("series.csv"))?;
    w.write_record(["label", "target", "parameter", "value"])?;
    for (label, r) in &o.reports {
        let target = serde_json::to_value(r.target)?;
        let target = target.as_str().unwrap_or_default().to_string();
        for (p, v) in &r.measured_series {
            w.write_record([label.clone(), target.clone(), format!("{p:.16e}"), format!("{v:.16e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses arguments, runs, and maps the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (command, flags) = cli.command.split();
    if let Some(n) = flags.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: could not configure {n} worker threads");
            return EXIT_CONFIG;
        }
    }
    let cfg = match RunConfig::from_sources(command, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match run(&cfg) {
        Ok(true) => {
            println!("{}: passed ({})", command.name(), cfg.output_dir.display());
            EXIT_OK
        }
        Ok(false) => {
            println!("{}: FAILED ({})", command.name(), cfg.output_dir.display());
            EXIT_FAILED_CHECK
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}
