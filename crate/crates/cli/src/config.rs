//! Flags, config files and their merge into a validated [`RunConfig`].
//!
//! Precedence is built-in defaults, then the JSON config file, then flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jbtriple::Factor;
use serde::{Deserialize, Serialize};

use crate::tolerances::{Tolerances, DEFAULTS};
use crate::{experiments, suites, CliError};

/// The factors exercised by `--factor all`.
pub const ACCEPTANCE_FACTORS: [&str; 6] = [
    "matrix:2x2",
    "matrix:2x3",
    "matrix:3x3",
    "commutative:2",
    "commutative:4",
    "matrix:2x2+commutative:1",
];

pub const DEFAULT_N: [usize; 4] = [16, 64, 256, 512];
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(
    name = "jbtriple",
    version,
    about = "Identity suites and boundary experiments for finite-rank JB*-triples",
    after_help = "Tolerances are overridden with --tol.<name>=<value>; `jbtriple list` shows the table."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an identity suite; exit 1 if any residual exceeds its tolerance.
    Verify(RunArgs),
    /// Run an experiment and emit per-trial records plus a summary.
    Experiment(RunArgs),
    /// Print the suites, experiments and default tolerances.
    List,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Suite or experiment name, as with --suite or --experiment.
    #[arg(value_name = "NAME")]
    pub positional: Option<String>,
    /// Suite to verify, or `all`.
    #[arg(long)]
    pub suite: Option<String>,
    /// Experiment to run.
    #[arg(long)]
    pub experiment: Option<String>,
    /// Factor spec, comma-separated list of specs, or `all`.
    #[arg(long)]
    pub factor: Option<String>,
    /// Trials per factor and seed.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Seed, or comma-separated list of seeds.
    #[arg(long)]
    pub seed: Option<String>,
    /// Quadrature node counts, comma-separated.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<String>,
    /// Exclusion radius for the peak-function experiment.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Sample count for sampled suprema.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// One JSON record per line.
    Jsonl,
    /// Summary table as CSV.
    Csv,
    /// Summary table with aligned columns.
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Jsonl => "jsonl",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

/// JSON config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub factor: Option<String>,
    pub suite: Option<String>,
    pub experiment: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    #[serde(rename = "N", alias = "n")]
    pub n: Option<Vec<usize>>,
    pub epsilon: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Experiment,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    /// Validated suite or experiment names, in run order.
    pub names: Vec<&'static str>,
    /// Explicit factors, or `None` for the acceptance set.
    pub factors: Option<Vec<Factor>>,
    /// `None` selects the per-name default.
    pub trials: Option<usize>,
    pub seeds: Vec<u64>,
    pub n_list: Vec<usize>,
    pub epsilon: f64,
    pub samples: Option<usize>,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| usage(format!("{what}: cannot parse {s:?}")))
        })
        .collect()
}

fn parse_factors(spec: &str) -> Result<Option<Vec<Factor>>, CliError> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(None);
    }
    spec.split(',')
        .map(|s| {
            s.parse::<Factor>()
                .map_err(|e| usage(format!("--factor: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn acceptance_factors() -> Vec<Factor> {
    ACCEPTANCE_FACTORS
        .iter()
        .map(|s| s.parse().expect("built-in factor spec"))
        .collect()
}

impl RunConfig {
    /// Merges defaults, the config file named by `args.config` and the
    /// flags, then validates everything that could fail mid-run.
    pub fn resolve(
        mode: Mode,
        args: RunArgs,
        tol_overrides: &[(String, f64)],
        out_dir: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
                FileConfig::from_json(&text)?
            }
            None => FileConfig::default(),
        };

        let name = match mode {
            Mode::Verify => {
                if args.positional.is_some() || args.experiment.is_some() {
                    return Err(usage("verify takes --suite, not an experiment name"));
                }
                args.suite.or(file.suite)
            }
            Mode::Experiment => {
                if args.suite.is_some() {
                    return Err(usage(
                        "experiment takes a name or --experiment, not --suite",
                    ));
                }
                if let (Some(a), Some(b)) = (&args.positional, &args.experiment) {
                    if a != b {
                        return Err(usage(format!("experiment given twice: {a} and {b}")));
                    }
                }
                args.positional.or(args.experiment).or(file.experiment)
            }
        };
        let name = name.ok_or_else(|| {
            usage(match mode {
                Mode::Verify => "no suite given (use --suite)",
                Mode::Experiment => "no experiment given",
            })
        })?;
        let names = resolve_names(mode, &name)?;

        let factors = parse_factors(
            args.factor
                .as_deref()
                .or(file.factor.as_deref())
                .unwrap_or("all"),
        )?;

        let seeds = match (&args.seed, &file.seeds, file.seed) {
            (Some(raw), _, _) => parse_list(raw, "--seed")?,
            (None, Some(list), _) => list.clone(),
            (None, None, Some(s)) => vec![s],
            (None, None, None) => vec![0],
        };
        if seeds.is_empty() {
            return Err(usage("empty seed list"));
        }

        let n_list = match (&args.n, &file.n) {
            (Some(raw), _) => parse_list(raw, "--N")?,
            (None, Some(list)) => list.clone(),
            (None, None) => DEFAULT_N.to_vec(),
        };
        if n_list.is_empty() || n_list.iter().any(|&n| n < 4) {
            return Err(usage("--N needs node counts of at least 4"));
        }

        let epsilon = args.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON);
        if !(epsilon > 0.0 && epsilon <= 2.0) {
            return Err(usage(format!(
                "--epsilon must lie in (0, 2], got {epsilon}"
            )));
        }

        let trials = args.trials.or(file.trials);
        if trials == Some(0) {
            return Err(usage("--trials must be positive"));
        }
        let samples = args.samples.or(file.samples);
        if samples == Some(0) {
            return Err(usage("--samples must be positive"));
        }

        let mut tolerances = Tolerances::default();
        for (k, v) in &file.tolerances {
            tolerances.set(k, *v)?;
        }
        for (k, v) in tol_overrides {
            tolerances.set(k, *v)?;
        }

        let format = args.format.or(file.format).unwrap_or(Format::Jsonl);
        let out = args.out.or(file.out).or_else(|| {
            out_dir.map(|dir| {
                let kind = match mode {
                    Mode::Verify => "verify",
                    Mode::Experiment => "experiment",
                };
                dir.join(format!("{kind}-{name}.{}", format.extension()))
            })
        });

        let cfg = RunConfig {
            mode,
            names,
            factors,
            trials,
            seeds,
            n_list,
            epsilon,
            samples,
            tolerances,
            out,
            format,
        };
        cfg.check_factor_support()?;
        Ok(cfg)
    }

    /// A config with defaults for everything but the names; used by tests
    /// and the acceptance harness.
    pub fn new(mode: Mode, name: &str) -> Result<Self, CliError> {
        Self::resolve(
            mode,
            RunArgs {
                suite: (mode == Mode::Verify).then(|| name.to_string()),
                experiment: (mode == Mode::Experiment).then(|| name.to_string()),
                ..RunArgs::default()
            },
            &[],
            None,
        )
    }

    /// Factors a given suite or experiment runs on. With `--factor all`,
    /// suites that need unitary tripotents skip factors without them.
    pub fn factors_for(&self, name: &str) -> Vec<Factor> {
        match &self.factors {
            Some(list) => list.clone(),
            None => acceptance_factors()
                .into_iter()
                .filter(|f| !needs_unitaries(name) || f.has_unitaries())
                .collect(),
        }
    }

    fn check_factor_support(&self) -> Result<(), CliError> {
        let Some(list) = &self.factors else {
            return Ok(());
        };
        for name in &self.names {
            if needs_unitaries(name) {
                if let Some(f) = list.iter().find(|f| !f.has_unitaries()) {
                    return Err(usage(format!(
                        "{name} needs unitary tripotents, which {f} does not have"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn trials_for(&self, name: &str) -> usize {
        self.trials.unwrap_or_else(|| match self.mode {
            Mode::Verify => suites::default_trials(name),
            Mode::Experiment => experiments::default_trials(name),
        })
    }
}

fn needs_unitaries(name: &str) -> bool {
    suites::NEEDS_UNITARIES.contains(&name)
}

fn resolve_names(mode: Mode, name: &str) -> Result<Vec<&'static str>, CliError> {
    let known: &[&'static str] = match mode {
        Mode::Verify => suites::SUITES,
        Mode::Experiment => experiments::EXPERIMENTS,
    };
    if mode == Mode::Verify && name == "all" {
        return Ok(known.to_vec());
    }
    known
        .iter()
        .find(|k| **k == name)
        .map(|k| vec![*k])
        .ok_or_else(|| {
            usage(format!(
                "unknown name {name:?}; known: {}",
                known.join(", ")
            ))
        })
}

/// Text for `jbtriple list`.
pub fn listing() -> String {
    let mut s = String::new();
    let _ = writeln!(s, "suites:");
    for name in suites::SUITES {
        let _ = writeln!(
            s,
            "  {name:<20} default trials {}",
            suites::default_trials(name)
        );
    }
    let _ = writeln!(s, "experiments:");
    for name in experiments::EXPERIMENTS {
        let _ = writeln!(
            s,
            "  {name:<20} default trials {}",
            experiments::default_trials(name)
        );
    }
    let _ = writeln!(s, "tolerances:");
    for (name, value, what) in DEFAULTS {
        let _ = writeln!(s, "  {name:<20} {value:<8e} {what}");
    }
    s
}
