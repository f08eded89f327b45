//! Command-line front end for `llr-core`: configuration, dispatch, and the
//! CSV/JSON result formats.
//!
//! ```text
//! llr spectrum --Z 40 --mass 0
//! llr sweep --Z 40 --B-decades 2:6 --out sweep.csv
//! llr check --gamma 0.3 --config run.conf
//! llr --replay result.json
//! ```
//!
//! `LLR_THREADS` caps the worker threads used for matrix assembly and sweeps.

use std::ffi::OsString;

use clap::Parser;

pub mod commands;
pub mod config;
pub mod exit;
pub mod output;

use config::{Cli, Format};
use exit::Failure;
use output::Metadata;

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("LLR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("LLR_THREADS must be a positive integer, got {raw:?}")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: &Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let cfg = config::resolve(cli)?;
    let report = commands::dispatch(&cfg)?;
    let meta = Metadata::new(&cfg);
    let text = match cfg.format {
        Format::Csv => output::render_csv(&meta, &report.table)?,
        Format::Json => output::render_json(&meta, report.json.clone())?,
    };
    output::emit(cfg.output_path(), &text)?;
    if let (Format::Csv, Some(summary)) = (cfg.format, &report.summary) {
        let line = serde_json::to_string(summary).map_err(|e| Failure::usage(e.to_string()))?;
        if cfg.output_path().is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    for w in &report.warnings {
        eprintln!("llr: warning: {w}");
    }
    Ok(report.status)
}

/// Runs the tool on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("llr: {}", f.message);
            f.code
        }
    }
}
