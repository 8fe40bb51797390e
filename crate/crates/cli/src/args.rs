use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "aim",
    version,
    about = "Eigenvalues of Schrödinger-type problems by the asymptotic iteration method"
)]
pub struct Cli {
    /// File of `key=value` lines supplying default flags; command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lowest eigenvalues of one problem.
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Sign-change brackets of δ over the energy window.
    #[command(args_override_self = true)]
    Scan(SolveArgs),
    /// Compare iteration results with the finite-difference oracle and exact spectra.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Ground states of x² + A/x^1.9 in N = 2..10 dimensions.
    #[command(args_override_self = true)]
    Table1(TableArgs),
    /// Ground states of x² + γ(γ+1)/x² + A/x⁴ for A ∈ {0.001, 0.01, 0.1, 1}, γ ∈ {3, 4, 5}.
    #[command(args_override_self = true)]
    Table2(TableArgs),
    /// Six lowest levels of x² + A x⁴.
    #[command(args_override_self = true)]
    Table3(TableArgs),
    /// Samples of the general solution y and wavefunction ψ on a grid.
    #[command(args_override_self = true)]
    Reconstruct(ReconstructArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Hermite,
    Harmonic1d,
    Gk,
    Spiked,
    Quartic,
    Custom,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemKind,
    /// Centrifugal parameter γ.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Coupling A.
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Exponent α of the A/x^α term.
    #[arg(long)]
    pub alpha_exp: Option<f64>,
    /// Hermite order.
    #[arg(long)]
    pub k: Option<u32>,
    /// Dimension N, used with --l instead of --gamma.
    #[arg(long = "N")]
    pub n_dim: Option<u32>,
    /// Angular momentum l, used with --N.
    #[arg(long)]
    pub l: Option<u32>,
    /// Potential for --problem custom, e.g. "x^2 + 0.1*x^4".
    #[arg(long, allow_hyphen_values = true)]
    pub potential: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Iteration depth [default: 12].
    #[arg(long)]
    pub iters: Option<usize>,
    /// Jet truncation order [default: 2·iters + 8].
    #[arg(long)]
    pub order: Option<usize>,
    /// Expansion point: auto, min, s0zero or a number.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub emin: f64,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub emax: f64,
    #[arg(long, default_value_t = 0.25)]
    pub estep: f64,
    /// Absolute root tolerance in E.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write results here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// Finite-difference grid points (extrapolated with twice as many).
    #[arg(long, default_value_t = 4000)]
    pub oracle_m: usize,
    /// Finite-difference domain length.
    #[arg(long, default_value_t = 12.0)]
    pub rmax: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Number of levels.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Largest accepted |E_aim − reference|.
    #[arg(long, default_value_t = 1e-6)]
    pub check_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct TableArgs {
    /// Coupling A [table1: 10, table3: 0.1]; ignored by table2.
    #[arg(long = "A")]
    pub a: Option<f64>,
    /// Iteration depth [table1: 12, table2: 20, table3: 40].
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Skip the finite-difference column.
    #[arg(long)]
    pub no_oracle: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Level whose energy is used.
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    /// Energy to use instead of the level's.
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    /// Iteration depth for α = sₙ/λₙ [default: 12].
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub xmax: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c2: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Path given by `--config PATH` or `--config=PATH`, if any.
fn config_path(args: &[OsString]) -> Option<(usize, usize, PathBuf)> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            return args.get(i + 1).map(|p| (i, 2, PathBuf::from(p)));
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some((i, 1, PathBuf::from(p)));
        }
        i += 1;
    }
    None
}

/// `key = value` lines as flags. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value, got {line:?}", lineno + 1))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", lineno + 1));
        }
        out.push(format!("--{key}").into());
        out.push(value.trim().into());
    }
    Ok(out)
}

/// Splices config-file flags in right after the subcommand so that flags
/// given on the command line, which come later, override them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some((at, width, path)) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let injected = parse_config(&text)?;
    let mut rest: Vec<OsString> = args.clone();
    rest.drain(at..at + width);
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 1);
    match sub {
        Some(idx) => {
            let mut out: Vec<OsString> = rest[..=idx].to_vec();
            out.extend(injected);
            out.extend_from_slice(&rest[idx + 1..]);
            Ok(out)
        }
        None => Ok(rest),
    }
}
