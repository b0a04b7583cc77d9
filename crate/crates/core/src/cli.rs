//! The `mcgap` command line.
//!
//! Exit codes: 0 success, 2 invalid input or flags, 3 numerical failure.
//! Diagnostics go to stderr; verbosity follows `MCGAP_LOG`
//! (`error`, `warn`, `info`, `debug`).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use crate::chain::{validate_path, StochasticMatrix};
use crate::error::Error;
use crate::estimator::{estimate, EstimateOptions};
use crate::intervals::combined::DEFAULT_ERR_CONSTANT;
use crate::linalg::SquareMatrix;
use crate::report::{to_json, CoverageReport, EstimationReport, TruthReport};
use crate::simulator::{
    birth_death_chain, random_walk_on_weighted_graph, run_coverage, sample_path, ChainModel,
    CoverageConfig, Start,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Row-sum tolerance for matrices read from CSV.
pub const MATRIX_FILE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "mcgap",
    version,
    about = "Confidence intervals for the spectral gap and stationary distribution of a reversible Markov chain from one sample path"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate intervals from a path file.
    Estimate(EstimateArgs),
    /// Simulate a path from a known chain.
    Simulate(SimulateArgs),
    /// Measure interval coverage over many simulated paths.
    Coverage(CoverageArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Whitespace-separated 0-based states; lines starting with '#' are ignored. '-' reads stdin.
    #[arg(long)]
    pub input: PathBuf,
    /// Confidence parameter in (0, 1).
    #[arg(long, value_parser = parse_delta)]
    pub delta: f64,
    /// Size of the state space; inferred as 1 + max state when omitted.
    #[arg(long)]
    pub num_states: Option<usize>,
    /// Output file; stdout when omitted or '-'.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include the smoothed transition matrix in the report.
    #[arg(long)]
    pub emit_matrix: bool,
    /// Skip the combined pi_min / gap intervals.
    #[arg(long)]
    pub no_combined: bool,
    /// Absolute constant of the frequency-estimator deviation bounds.
    #[arg(long, default_value_t = DEFAULT_ERR_CONSTANT, value_parser = parse_positive)]
    pub err_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainKind {
    BirthDeath,
    Graph,
    File,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Chain family; `file` needs --matrix, `graph` needs --weights.
    #[arg(long, value_enum)]
    pub chain: Option<ChainKind>,
    /// Number of states of a birth-death chain.
    #[arg(long)]
    pub d: Option<usize>,
    /// Birth-death up rates P(i, i+1): one value or d-1 comma-separated values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub up: Vec<f64>,
    /// Birth-death down rates P(i+1, i): one value or d-1 comma-separated values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub down: Vec<f64>,
    /// CSV of symmetric non-negative edge weights.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// CSV of a row-stochastic transition matrix.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Accept a non-reversible --matrix.
    #[arg(long)]
    pub allow_nonreversible: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Path length.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    /// Seed of the path sampler.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `stationary` or a 0-based state.
    #[arg(long, default_value = "stationary", value_parser = parse_start)]
    pub start: Start,
    /// Output file; stdout when omitted or '-'.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write ground truth (pi, gap, kappa) as JSON.
    #[arg(long)]
    pub emit_truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Length of each simulated path.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    /// Confidence parameter in (0, 1).
    #[arg(long, value_parser = parse_delta)]
    pub delta: f64,
    /// Number of independent paths.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Master seed; trial seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores. Does not affect the output.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// `stationary` or a 0-based state.
    #[arg(long, default_value = "stationary", value_parser = parse_start)]
    pub start: Start,
    /// Output file; stdout when omitted or '-'.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Skip the combined pi_min / gap intervals.
    #[arg(long)]
    pub no_combined: bool,
    /// Absolute constant of the frequency-estimator deviation bounds.
    #[arg(long, default_value_t = DEFAULT_ERR_CONSTANT, value_parser = parse_positive)]
    pub err_constant: f64,
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err("delta must lie strictly between 0 and 1".into())
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be a positive number".into())
    }
}

fn parse_start(s: &str) -> Result<Start, String> {
    if s == "stationary" {
        return Ok(Start::Stationary);
    }
    s.parse()
        .map(Start::State)
        .map_err(|_| format!("expected 'stationary' or a state index, got {s:?}"))
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INPUT
            },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| CliError::input(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::write(p, text).map_err(|e| CliError::input(format!("writing {}: {e}", p.display())))
        }
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::input(format!("writing stdout: {e}")))
        }
    }
}

/// Parse a path file: base-10 integers separated by whitespace, `#` comment lines.
pub fn parse_path_text(text: &str) -> Result<Vec<i64>, String> {
    let mut states = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            let s = token
                .parse::<i64>()
                .map_err(|_| format!("line {}: {token:?} is not an integer state", lineno + 1))?;
            states.push(s);
        }
    }
    Ok(states)
}

/// Parse a CSV matrix: `d` lines of `d` comma-separated reals.
pub fn parse_matrix_csv(text: &str) -> Result<SquareMatrix, String> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("line {}: {:?} is not a number", lineno + 1, t.trim()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    SquareMatrix::from_rows(&rows).map_err(|e| e.to_string())
}

fn expand_rates(name: &str, rates: &[f64], d: usize) -> CliResult<Vec<f64>> {
    match rates.len() {
        0 => Err(CliError::input(format!(
            "--{name} is required for --chain birth-death"
        ))),
        1 => Ok(vec![rates[0]; d - 1]),
        k if k == d - 1 => Ok(rates.to_vec()),
        k => Err(CliError::input(format!(
            "--{name} needs 1 or {} values, got {k}",
            d - 1
        ))),
    }
}

/// Build the chain and a short description of it.
pub fn build_chain(args: &ChainArgs) -> CliResult<(ChainModel, String)> {
    let kind = match (args.chain, &args.matrix) {
        (Some(k), _) => k,
        (None, Some(_)) => ChainKind::File,
        (None, None) => return Err(CliError::input("--chain is required")),
    };
    match kind {
        ChainKind::BirthDeath => {
            let d = args
                .d
                .ok_or_else(|| CliError::input("--d is required for --chain birth-death"))?;
            if d < 2 {
                return Err(CliError::input("--d must be at least 2"));
            }
            let up = expand_rates("up", &args.up, d)?;
            let down = expand_rates("down", &args.down, d)?;
            let model = birth_death_chain(d, &up, &down)?;
            let fmt = |v: &[f64]| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            Ok((
                model,
                format!("birth-death d={d} up={} down={}", fmt(&up), fmt(&down)),
            ))
        }
        ChainKind::Graph => {
            let path = args
                .weights
                .as_ref()
                .ok_or_else(|| CliError::input("--weights is required for --chain graph"))?;
            let w = parse_matrix_csv(&read_text(path)?).map_err(CliError::input)?;
            let model = random_walk_on_weighted_graph(&w)?;
            Ok((model, format!("graph weights={}", path.display())))
        }
        ChainKind::File => {
            let path = args
                .matrix
                .as_ref()
                .ok_or_else(|| CliError::input("--matrix is required for --chain file"))?;
            let m = parse_matrix_csv(&read_text(path)?).map_err(CliError::input)?;
            let p = StochasticMatrix::with_tolerance(m, MATRIX_FILE_TOL)?;
            let model = ChainModel::from_matrix(p, !args.allow_nonreversible, MATRIX_FILE_TOL)
                .map_err(|e| match e {
                    Error::SingularSystem { .. } => {
                        CliError::input(format!("{e}; is the chain irreducible?"))
                    }
                    other => other.into(),
                })?;
            Ok((model, format!("file matrix={}", path.display())))
        }
    }
}

fn cmd_estimate(args: &EstimateArgs) -> CliResult<()> {
    let started = Instant::now();
    let raw = parse_path_text(&read_text(&args.input)?).map_err(CliError::input)?;
    let path = validate_path(&raw, args.num_states)?;
    let d_inferred = args.num_states.is_none();
    if d_inferred {
        warn!(
            "--num-states not given; using d = {} (1 + largest state seen)",
            path.num_states()
        );
    }
    let opts = EstimateOptions {
        combined: !args.no_combined,
        err_constant: args.err_constant,
    };
    let est = estimate(&path, args.delta, &opts)?;
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    info!("estimated n={} d={} in {elapsed:.3} ms", est.n, est.d);
    let report = EstimationReport::new(&est, d_inferred, args.emit_matrix, elapsed);
    write_output(args.output.as_deref(), &to_json(&report))
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let (model, description) = build_chain(&args.chain)?;
    let path = sample_path(&model, args.n as usize, args.seed, args.start)?;
    let mut text = String::with_capacity(path.len() * 3 + 128);
    text.push_str(&format!(
        "# mcgap simulate: {description} n={} seed={} num_states={}\n",
        args.n,
        args.seed,
        model.dim()
    ));
    for s in path.states() {
        text.push_str(&s.to_string());
        text.push('\n');
    }
    write_output(args.output.as_deref(), &text)?;
    if let Some(truth_path) = &args.emit_truth {
        let truth = TruthReport::new(&model, model.kappa()?);
        fs::write(truth_path, to_json(&truth))
            .map_err(|e| CliError::input(format!("writing {}: {e}", truth_path.display())))?;
    }
    Ok(())
}

fn cmd_coverage(args: &CoverageArgs) -> CliResult<()> {
    let (model, description) = build_chain(&args.chain)?;
    if !model.reversible {
        warn!("chain is not reversible; interval guarantees do not apply");
    }
    let cfg = CoverageConfig {
        n: args.n as usize,
        delta: args.delta,
        trials: args.trials as usize,
        master_seed: args.seed,
        start: args.start,
        jobs: args.jobs,
        options: EstimateOptions {
            combined: !args.no_combined,
            err_constant: args.err_constant,
        },
    };
    let started = Instant::now();
    let summary = run_coverage(&model, &cfg)?;
    info!(
        "{} trials in {:.3} s",
        cfg.trials,
        started.elapsed().as_secs_f64()
    );
    let report = CoverageReport::new(&description, &summary);
    write_output(args.output.as_deref(), &to_json(&report))
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("MCGAP_LOG", "warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Coverage(a) => cmd_coverage(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
