//! Command-line front end: CSV ingestion, model fitting, the bootstrap
//! goodness-of-fit test on user data, and the simulation study.
//!
//! Exit status: 0 ran and the null was not rejected, 3 ran and the
//! bootstrap test rejected, 1 usage error, 2 data or numeric error.

pub mod commands;
pub mod format;
pub mod ingest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gofboot_core::GofError;

use crate::ingest::IngestError;

#[derive(Debug, Parser)]
#[command(name = "gofboot", version, about = "Bootstrap goodness-of-fit test for normal linear regression")]
pub struct Cli {
    /// Worker threads for bootstrap and simulation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model and report the goodness-of-fit term and its variance.
    Fit(FitArgs),
    /// Fit a model and run the bootstrap, White and Breusch-Pagan tests.
    Test(TestArgs),
    /// Monte Carlo rejection rates for one of the four simulation scenarios.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Response column.
    #[arg(long)]
    pub response: String,
    /// Comma-separated covariate columns; omit for an intercept-only model.
    #[arg(long, value_delimiter = ',')]
    pub covariates: Vec<String>,
    /// Fit without the intercept column.
    #[arg(long)]
    pub no_intercept: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bootstrap iterations.
    #[arg(long, default_value_t = 1000)]
    pub boot: usize,
    /// Master seed; a random seed is drawn and reported when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub max_redraws: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario 1-4.
    #[arg(long)]
    pub scenario: u8,
    /// Sample sizes, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, default_value_t = 500)]
    pub boot: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_redraws: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    NotRejected = 0,
    Usage = 1,
    DataError = 2,
    Rejected = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Model(GofError),
}

impl From<GofError> for CliError {
    fn from(err: GofError) -> Self {
        match err {
            GofError::InvalidConfig(msg) => CliError::Usage(msg),
            other => CliError::Model(other),
        }
    }
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) => ExitStatus::Usage,
            CliError::Ingest(_) | CliError::Model(_) => ExitStatus::DataError,
        }
    }
}

/// What a command printed and how it should exit.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub status: ExitStatus,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return if err.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, status: ExitStatus::Usage }
            } else {
                Outcome { stdout: text, stderr: String::new(), status: ExitStatus::NotRejected }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(err) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("error: cannot start worker threads: {err}\n"),
                status: ExitStatus::Usage,
            }
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Fit(args) => commands::fit(args),
        Command::Test(args) => commands::test(args),
        Command::Simulate(args) => commands::simulate(args),
    });
    match result {
        Ok(outcome) => outcome,
        Err(err) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            status: err.status(),
        },
    }
}
