//! Command-line driver: problem → mesh → Lanczos → resolvent, with error
//! reports, convergence sweeps and TT rank tables as CSV or JSON.
//!
//! Exit codes are stable:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | usage (bad flags, unknown problem, work budget exceeded) |
//! | 3 | shape mismatch |
//! | 4 | lucky breakdown (outputs are still written) |
//! | 5 | serious breakdown (outputs hold the completed prefix) |
//! | 6 | singular continued fraction |
//! | 7 | I/O |
//! | 8 | anything else |

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toelanczos_core::Error;

pub use commands::{cmd_convergence, cmd_run, cmd_ttranks};
pub use config::{Resolved, WORK_BUDGET};

#[derive(Parser, Debug)]
#[command(name = "toelanczos", version, about = "Tensor Lanczos solver for time-ordered exponential bilinear forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the pipeline once and report every error measure.
    Run(CommonArgs),
    /// Run a sweep over M and fit the convergence slope.
    Convergence(CommonArgs),
    /// Tensor-train ranks and compression factors of the discretized tensor.
    Ttranks(TtArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// Built-in problem id (const3, timedep5, nmr1, nmr2, nmr3, zero1, cos1).
    #[arg(long, conflicts_with = "problem_file", required_unless_present = "problem_file")]
    pub problem: Option<String>,
    /// Problem in the JSON format.
    #[arg(long)]
    pub problem_file: Option<PathBuf>,
    /// Seed for the generated NMR problems.
    #[arg(long, default_value_t = toelanczos_core::problems::DEFAULT_SEED)]
    pub seed: u64,
    /// Placement of the mesh points.
    #[arg(long, value_enum, default_value_t = MeshArg::Right)]
    pub mesh: MeshArg,
    /// Skip the work-budget guard for large M.
    #[arg(long)]
    pub allow_large: bool,
    /// Output directory; without it the main table goes to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Mesh size, or a comma-separated list for sweeps.
    #[arg(long = "M", value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    /// Lanczos iterations; defaults to N, or the experiment value for NMR problems.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReferenceArg::Auto)]
    pub reference: ReferenceArg,
    #[arg(long, default_value_t = toelanczos_core::problems::DEFAULT_RTOL)]
    pub rtol: f64,
    #[arg(long, default_value_t = toelanczos_core::problems::DEFAULT_ATOL)]
    pub atol: f64,
    #[arg(long, default_value_t = toelanczos_core::lanczos::DEFAULT_EPS_LUCKY)]
    pub eps_lucky: f64,
    #[arg(long, default_value_t = toelanczos_core::lanczos::DEFAULT_EPS_SERIOUS)]
    pub eps_serious: f64,
}

#[derive(Args, Debug, Clone)]
pub struct TtArgs {
    /// Built-in problem id.
    #[arg(long, conflicts_with_all = ["problem_file", "tensor"], required_unless_present_any = ["problem_file", "tensor"])]
    pub problem: Option<String>,
    #[arg(long, conflicts_with = "tensor")]
    pub problem_file: Option<PathBuf>,
    /// A tensor in T4F format instead of a problem.
    #[arg(long)]
    pub tensor: Option<PathBuf>,
    #[arg(long, default_value_t = toelanczos_core::problems::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MeshArg::Right)]
    pub mesh: MeshArg,
    /// Mesh sizes; ignored for `--tensor`.
    #[arg(long = "M", value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Relative tolerances.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-5, 1e-10])]
    pub tol_tt: Vec<f64>,
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReferenceArg {
    /// Closed form when one exists, RK45 otherwise.
    Auto,
    Analytic,
    Rk45,
    None,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeshArg {
    /// Right endpoints of M equal cells.
    Right,
    /// Both endpoints included.
    Closed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Usage = 2,
    Shape = 3,
    Lucky = 4,
    Serious = 5,
    ResolventSingular = 6,
    Io = 7,
    Other = 8,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn name(self) -> &'static str {
        match self {
            ExitCode::Ok => "ok",
            ExitCode::Usage => "usage",
            ExitCode::Shape => "shape",
            ExitCode::Lucky => "breakdown_lucky",
            ExitCode::Serious => "breakdown_serious",
            ExitCode::ResolventSingular => "resolvent_singular",
            ExitCode::Io => "io",
            ExitCode::Other => "other",
        }
    }

    pub fn of(e: &Error) -> ExitCode {
        match e {
            Error::Shape { .. } | Error::Orientation { .. } => ExitCode::Shape,
            Error::SeriousBreakdown { .. } => ExitCode::Serious,
            Error::ResolventSingular { .. } | Error::Singular => ExitCode::ResolventSingular,
            Error::Io(_) => ExitCode::Io,
            Error::UnknownProblem(_) => ExitCode::Usage,
            _ => ExitCode::Other,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::Core(e) => ExitCode::of(e),
            CliError::Io(_) => ExitCode::Io,
        }
    }
}

/// Caps the global thread pool at `TOELANCZOS_THREADS` if set.
pub fn init_threads() {
    if let Some(n) = std::env::var("TOELANCZOS_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        // A pool may already exist when called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `args` and runs the command, writing tables to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return ExitCode::Usage.code();
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Convergence(a) => cmd_convergence(a, out, err),
        Command::Ttranks(a) => cmd_ttranks(a, out, err),
    };
    match result {
        Ok(code) => code.code(),
        Err(e) => {
            let code = e.exit_code();
            let _ = writeln!(err, "error[{}]: {e}", code.name());
            code.code()
        }
    }
}
