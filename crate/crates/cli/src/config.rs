//! Command-line flags, the optional TOML file, and their merge into a
//! validated [`ScanConfig`].

use std::path::{Path, PathBuf};

use bvsieve::large_sieve::DEFAULT_SEED;
use bvsieve::vaughan::DEFAULT_EPSILON;
use bvsieve::Baseline;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::output::Format;

/// Environment variable giving the default worker count.
pub const THREADS_ENV: &str = "BV_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "bvsieve",
    version,
    about = "Numerical checks of the weighted Vaughan identity, large sieve and Bombieri-Vinogradov error sums",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// TOML file with default values; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads [default: $BV_THREADS, else all cores].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file [default: stdout].
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Base seed for randomized trials.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// ε in the bounds and parameter choices, 0 < ε < 1/14.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Fill the wall_time_ms column (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the weighted Vaughan identity and its residual over n ≤ n-max.
    VaughanVerify(VaughanArgs),
    /// Check character orthogonality, primitive counts and Pólya–Vinogradov.
    Characters(CharacterArgs),
    /// Seeded trials of the classical and bilinear large-sieve inequalities.
    LargeSieve(SieveArgs),
    /// Graham's lemma sum and the η-weight mean square.
    Graham(GrahamArgs),
    /// Averaged ψ(y; q, a) error sums.
    BvScan(BvScanArgs),
    /// Averaged π(y; q, a) error sums.
    PiScan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct VaughanArgs {
    #[arg(long, value_parser = parse_count)]
    pub n_max: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CharacterArgs {
    #[arg(long = "q-max", value_parser = parse_count)]
    pub q_max: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SieveKind {
    Classical,
    Bilinear,
    Both,
}

#[derive(Debug, Args)]
pub struct SieveArgs {
    /// Trials per inequality.
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
    #[arg(long, value_enum)]
    pub kind: Option<SieveKind>,
    /// Largest modulus Q drawn [default: 30 classical, 5 bilinear].
    #[arg(long = "q-max", value_parser = parse_count)]
    pub q_max: Option<u64>,
    /// Largest coefficient-vector length [default: 2000 classical, 50 bilinear].
    #[arg(long, value_parser = parse_count)]
    pub max_len: Option<u64>,
    /// Largest range start [default: 1000 classical, 50 bilinear].
    #[arg(long, value_parser = parse_count)]
    pub max_start: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrahamMode {
    Lemma,
    Corollary,
    Both,
}

#[derive(Debug, Args)]
pub struct GrahamArgs {
    #[arg(long, value_enum)]
    pub mode: Option<GrahamMode>,
    /// Outer lengths N (lemma) or Y (corollary), comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub length: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Values of x, comma separated and strictly increasing.
    #[arg(long = "x", value_delimiter = ',', value_parser = parse_real)]
    pub x: Vec<f64>,
    /// Use Q = √x / (log x)^A.
    #[arg(long = "A", value_parser = parse_real)]
    pub a: Option<f64>,
    /// Use a fixed Q.
    #[arg(long = "Q", value_parser = parse_real)]
    pub q: Option<f64>,
    /// Keep moduli whose smallest prime factor exceeds Q1 (1 keeps all).
    #[arg(long = "Q1", value_parser = parse_real)]
    pub q1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineArg {
    /// y / φ(q)
    #[value(alias = "identity_y")]
    #[serde(alias = "identity_y")]
    Identity,
    /// ψ(y) / φ(q)
    #[value(alias = "chebyshev_psi")]
    #[serde(alias = "chebyshev_psi")]
    Chebyshev,
}

impl From<BaselineArg> for Baseline {
    fn from(b: BaselineArg) -> Self {
        match b {
            BaselineArg::Identity => Baseline::IdentityY,
            BaselineArg::Chebyshev => Baseline::ChebyshevPsi,
        }
    }
}

#[derive(Debug, Args)]
pub struct BvScanArgs {
    #[command(flatten)]
    pub scan: ScanArgs,
    #[arg(long, value_enum)]
    pub baseline: Option<BaselineArg>,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s}"))
    }
}

/// Accepts `100000` as well as `1e5`.
fn parse_count(s: &str) -> Result<u64, String> {
    let v = parse_real(s)?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(format!("not a non-negative integer: {s}"));
    }
    Ok(v as u64)
}

/// Keys accepted in the `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub timing: Option<bool>,
    pub x: Option<Vec<f64>>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    #[serde(rename = "Q1")]
    pub q1: Option<f64>,
    pub baseline: Option<BaselineArg>,
    pub n_max: Option<f64>,
    pub q_max: Option<f64>,
    pub trials: Option<f64>,
    pub kind: Option<SieveKind>,
    pub max_len: Option<f64>,
    pub max_start: Option<f64>,
    pub mode: Option<GrahamMode>,
    pub length: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

fn file_count(v: Option<f64>, key: &str) -> CliResult<Option<u64>> {
    v.map(|v| parse_count(&v.to_string()).map_err(|e| CliError::Usage(format!("{key}: {e}"))))
        .transpose()
}

/// How Q is derived from x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QRule {
    /// Q = √x / (log x)^A
    LogPower(f64),
    Fixed(f64),
}

impl QRule {
    pub fn modulus_bound(&self, x: f64) -> f64 {
        match *self {
            QRule::LogPower(a) => x.sqrt() / x.ln().powf(a),
            QRule::Fixed(q) => q,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    VaughanVerify { n_max: u64 },
    Characters { q_max: u64 },
    LargeSieve { trials: u64, kind: SieveKind, q_max: Option<u64>, max_len: Option<u64>, max_start: Option<u64> },
    Graham { mode: GrahamMode, lengths: Vec<u64> },
    Scan { x_list: Vec<f64>, q_rule: QRule, q1: f64, baseline: Baseline, bound_exponent: f64 },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::VaughanVerify { .. } => "vaughan-verify",
            Task::Characters { .. } => "characters",
            Task::LargeSieve { .. } => "large-sieve",
            Task::Graham { .. } => "graham",
            Task::Scan { baseline: Baseline::PiLiStyle, .. } => "pi-scan",
            Task::Scan { .. } => "bv-scan",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub task: Task,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub epsilon: f64,
    pub timing: bool,
}

pub const DEFAULT_X: [f64; 3] = [1e4, 1e5, 1e6];
pub const DEFAULT_A: f64 = 3.0;

/// Merges flags over the file over `BV_THREADS` and validates the result.
pub fn resolve(cli: Cli, env_threads: Option<String>) -> CliResult<ScanConfig> {
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let usage = |m: String| CliError::Usage(m);

    let env_threads = env_threads
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>().map_err(|_| usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))))
        .transpose()?;
    let threads = cli.common.threads.or(file.threads).or(env_threads);
    if threads == Some(0) {
        return Err(usage("thread count must be at least 1".into()));
    }
    let epsilon = cli.common.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0 && epsilon < 1.0 / 14.0) {
        return Err(usage(format!("epsilon must lie in (0, 1/14), got {epsilon}")));
    }

    let task = match cli.command {
        Command::VaughanVerify(a) => Task::VaughanVerify {
            n_max: a.n_max.or(file_count(file.n_max, "n_max")?).unwrap_or(100_000),
        },
        Command::Characters(a) => Task::Characters {
            q_max: a.q_max.or(file_count(file.q_max, "q_max")?).unwrap_or(300),
        },
        Command::LargeSieve(a) => Task::LargeSieve {
            trials: a.trials.or(file_count(file.trials, "trials")?).unwrap_or(1000),
            kind: a.kind.or(file.kind).unwrap_or(SieveKind::Both),
            q_max: a.q_max.or(file_count(file.q_max, "q_max")?),
            max_len: a.max_len.or(file_count(file.max_len, "max_len")?),
            max_start: a.max_start.or(file_count(file.max_start, "max_start")?),
        },
        Command::Graham(a) => {
            let lengths = if !a.length.is_empty() {
                a.length
            } else {
                file.length
                    .unwrap_or_default()
                    .into_iter()
                    .map(|v| file_count(Some(v), "length").map(Option::unwrap))
                    .collect::<CliResult<_>>()?
            };
            if lengths.windows(2).any(|w| w[0] >= w[1]) {
                return Err(usage("lengths must be strictly increasing".into()));
            }
            Task::Graham { mode: a.mode.or(file.mode).unwrap_or(GrahamMode::Both), lengths }
        }
        Command::BvScan(a) => {
            let baseline = a.baseline.or(file.baseline).unwrap_or(BaselineArg::Identity).into();
            scan_task(a.scan, &file, baseline)?
        }
        Command::PiScan(a) => scan_task(a, &file, Baseline::PiLiStyle)?,
    };

    Ok(ScanConfig {
        task,
        threads,
        output: cli.common.output.or(file.output),
        format: cli.common.format.or(file.format).unwrap_or(Format::Csv),
        seed: cli.common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        epsilon,
        timing: cli.common.timing || file.timing.unwrap_or(false),
    })
}

fn scan_task(args: ScanArgs, file: &FileConfig, baseline: Baseline) -> CliResult<Task> {
    let usage = |m: String| CliError::Usage(m);
    let x_list = if !args.x.is_empty() {
        args.x
    } else {
        file.x.clone().unwrap_or_else(|| DEFAULT_X.to_vec())
    };
    if x_list.is_empty() {
        return Err(usage("x list is empty".into()));
    }
    if let Some(bad) = x_list.iter().find(|&&x| !(x >= 4.0 && x.is_finite())) {
        return Err(usage(format!("every x must be at least 4, got {bad}")));
    }
    if x_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("x values must be strictly increasing".into()));
    }

    // A flag-level rule replaces whatever the file says.
    let (a, q) = if args.a.is_some() || args.q.is_some() { (args.a, args.q) } else { (file.a, file.q) };
    let q_rule = match (a, q) {
        (Some(_), Some(_)) => return Err(usage("--A and --Q are mutually exclusive".into())),
        (Some(a), None) => QRule::LogPower(a),
        (None, Some(q)) => QRule::Fixed(q),
        (None, None) => QRule::LogPower(DEFAULT_A),
    };
    if let QRule::LogPower(a) = q_rule {
        if a < 0.0 {
            return Err(usage(format!("A must be non-negative, got {a}")));
        }
    }
    let q1 = args.q1.or(file.q1).unwrap_or(1.0);
    Ok(Task::Scan { x_list, q_rule, q1, baseline, bound_exponent: a.unwrap_or(DEFAULT_A) })
}
