//! Batch front end for the `gaussreg` library: reads a TOML run config,
//! evaluates one scenario (optionally swept over one parameter) and writes a
//! CSV or JSON table.
//!
//! Exit codes: 0 success, 2 config or parameter error, 3 a quadrature did not
//! converge or an evaluation failed, 4 I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod config;
pub mod output;
pub mod scenarios;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;

pub use config::{parse_config, CliError, Command, Format, RunConfig, Sweep};
pub use output::{Report, Summary};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "gaussreg",
    version,
    about = "Gaussian test-function regularization of one-loop integrals"
)]
pub struct Args {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output file, `-` for stdout. Overrides `output` in the config.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides `format` in the config.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Evaluate once per value of one parameter, e.g. `k_max=10,20,40`.
    #[arg(long, value_name = "PARAM=V1,V2,...")]
    pub sweep: Option<Sweep>,
    /// Evaluate sweep points on a single thread.
    #[arg(long)]
    pub seq: bool,
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Evaluate a parsed config; `sweep` values replace one key per point.
pub fn evaluate(cfg: &RunConfig, sweep: Option<&Sweep>, sequential: bool) -> Result<Report, CliError> {
    let resolved = scenarios::resolve(cfg.command, &cfg.params)?;
    let tables: Vec<toml::Table> = match sweep {
        None => vec![cfg.params.clone()],
        Some(s) => {
            if !scenarios::has_param(cfg.command, &s.param, &s.values[0]) {
                return Err(CliError::Config(format!(
                    "--sweep: `{}` is not a parameter of {}",
                    s.param, cfg.command
                )));
            }
            s.values
                .iter()
                .map(|v| {
                    let mut t = cfg.params.clone();
                    t.insert(s.param.clone(), v.clone());
                    t
                })
                .collect()
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(if sequential { 1 } else { 0 })
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let command = cfg.command;
    let points: Vec<_> = pool.install(|| tables.par_iter().map(|t| scenarios::run_point(command, t)).collect());
    for (i, p) in points.iter().enumerate() {
        if let Err(e) = &p.result {
            log::warn!("point {i}: {e:?}");
        }
    }
    Ok(Report {
        command,
        sweep: sweep.cloned(),
        resolved,
        points,
    })
}

/// Run the CLI; returns the exit code.
pub fn run(args: &Args) -> Result<u8, CliError> {
    let text = fs::read_to_string(&args.config).map_err(|e| io_error(&args.config, e))?;
    let cfg = parse_config(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", args.config.display())),
        other => other,
    })?;
    let report = evaluate(&cfg, args.sweep.as_ref(), args.seq)?;
    let body = match args.format.or(cfg.format).unwrap_or_default() {
        Format::Csv => output::to_csv(&report)?,
        Format::Json => output::to_json(&report)?,
    };
    match args.out.as_ref().or(cfg.output.as_ref()) {
        Some(path) if path.as_os_str() != "-" => fs::write(path, body).map_err(|e| io_error(path, e))?,
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| io_error(Path::new("<stdout>"), e))?;
        }
    }
    let code = report.exit_code();
    if code != 0 {
        let s = report.summary();
        eprintln!(
            "gaussreg: {} invalid, {} failed, {} unconverged of {} points",
            s.invalid, s.failed, s.unconverged, s.points
        );
    }
    Ok(code)
}
