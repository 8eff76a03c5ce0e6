//! Command-line driver for the `jbtriple` identity suites and boundary
//! experiments.
//!
//! A run expands to one batch of trials per (factor, seed). Each trial is a
//! pure function of `(seed, trial index, parameters)`; batches run in
//! parallel and their records are collected in trial order, so a report is
//! byte-identical across reruns whatever the thread count.

pub mod config;
pub mod decoders;
pub mod experiments;
pub mod record;
pub mod suites;
pub mod tolerances;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::config::{Cli, Command, Format, Mode, RunConfig};
use crate::record::{render, Record};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "JBTRIPLE_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Failures shown on stderr before the rest are elided.
const SHOWN_FAILURES: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

/// Records of a finished run.
#[derive(Clone, Debug)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

/// Runs every (name, factor, seed) batch of a validated config.
pub fn run(cfg: &RunConfig) -> Report {
    let mut records = Vec::new();
    for name in &cfg.names {
        for factor in cfg.factors_for(name) {
            for &seed in &cfg.seeds {
                let batch = match cfg.mode {
                    Mode::Verify => suites::run_suite(name, &factor, seed, cfg),
                    Mode::Experiment => experiments::run_experiment(name, &factor, seed, cfg),
                };
                records.extend(batch);
            }
        }
    }
    Report { records }
}

/// Full command-line entry: parses `args`, runs, writes the report and
/// returns the exit code.
pub fn main_with(
    args: Vec<String>,
    out_dir: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    match main_inner(args, out_dir, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn main_inner(
    args: Vec<String>,
    out_dir: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let (args, overrides) = tolerances::extract_overrides(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return Ok(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(stdout, "{e}")?;
                    EXIT_OK
                }
                _ => {
                    write!(stderr, "{e}")?;
                    EXIT_USAGE
                }
            });
        }
    };
    let (mode, args) = match cli.command {
        Command::List => {
            write!(stdout, "{}", config::listing())?;
            return Ok(EXIT_OK);
        }
        Command::Verify(a) => (Mode::Verify, a),
        Command::Experiment(a) => (Mode::Experiment, a),
    };
    let cfg = RunConfig::resolve(mode, args, &overrides, out_dir)?;
    let report = run(&cfg);
    let rendered = render(&report.records, cfg.format)?;
    match &cfg.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, &rendered)?;
            if cfg.format != Format::Text {
                write!(stderr, "{}", render(&report.records, Format::Text)?)?;
            }
        }
        None => stdout.write_all(rendered.as_bytes())?,
    }

    let failures: Vec<&Record> = report.failures().collect();
    for r in failures.iter().take(SHOWN_FAILURES) {
        writeln!(stderr, "FAIL {}", r.failure_line())?;
    }
    if failures.len() > SHOWN_FAILURES {
        writeln!(
            stderr,
            "... and {} more failures",
            failures.len() - SHOWN_FAILURES
        )?;
    }
    writeln!(
        stderr,
        "{} records, {} failed",
        report.records.len(),
        failures.len()
    )?;
    Ok(if failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}
