use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_sampler::{LatticeName, CACHE_ENV, DEFAULT_TOLERANCE};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(
    name = "lattice-sampler",
    version,
    about = "Reconstruction-error variance of lattice sampling for isotropically bandlimited processes"
)]
struct Cli {
    /// Worker threads for profile building (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog lattices with their geometry.
    List(ListArgs),
    /// Print the two normalized threshold rates per sampling lattice.
    Thresholds(ThresholdArgs),
    /// Sweep error variance and lower bound over a rate grid.
    Curve(CurveArgs),
    /// Locate the rate where two lattices' error variances cross.
    Crossover(CrossoverArgs),
    /// Run the self-verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct ListArgs {
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Comma-separated lattice names (default: the twelve table lattices).
    #[arg(long, value_delimiter = ',')]
    lattices: Vec<LatticeName>,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Directions per profile (default: 10^6 for d <= 4, 10^5 for d = 8).
    #[arg(long)]
    n: Option<usize>,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Bisection tolerance on the boundary radius.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,

    #[arg(long, default_value_t = lattice_sampler::engine::DEFAULT_RATE_MIN)]
    rate_min: f64,

    #[arg(long, default_value_t = lattice_sampler::engine::DEFAULT_RATE_MAX)]
    rate_max: f64,

    #[arg(long, default_value_t = lattice_sampler::engine::DEFAULT_RATE_STEPS)]
    steps: usize,

    /// Directory for cached profiles.
    #[arg(long, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Comma-separated sampling lattices (default: the twelve table lattices).
    #[arg(long, value_delimiter = ',')]
    lattices: Vec<LatticeName>,

    #[command(flatten)]
    sweep: SweepArgs,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CrossoverArgs {
    /// Exactly two sampling lattices.
    #[arg(long, value_delimiter = ',', default_value = "A3,A3_dual")]
    lattices: Vec<LatticeName>,

    #[command(flatten)]
    sweep: SweepArgs,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Directions per profile check.
    #[arg(long, default_value_t = 100_000)]
    n: usize,

    /// Random queries per decoder check.
    #[arg(long, default_value_t = 10_000)]
    queries: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,

    /// Report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Verification,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<lattice_sampler::LatticeError> for CliError {
    fn from(err: lattice_sampler::LatticeError) -> Self {
        use lattice_sampler::LatticeError as E;
        match err {
            E::Io { .. } | E::MalformedProfile { .. } => CliError::Io(err.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else {
        return Ok(());
    };
    if n == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::List(args) => commands::list(&args.output),
        Command::Thresholds(args) => commands::thresholds(&args.lattices, &args.output),
        Command::Curve(args) => commands::curve(&args.lattices, &args.sweep, &args.output),
        Command::Crossover(args) => {
            commands::crossover(&args.lattices, &args.sweep, args.out.as_deref())
        }
        Command::Verify(args) => commands::verify(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Io(msg) => eprintln!("I/O error: {msg}"),
                CliError::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(err.code())
        }
    }
}
