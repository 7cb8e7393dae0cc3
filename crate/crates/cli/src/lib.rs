//! Command-line front end for `entpoly`: state preparation, count
//! simulation, reconstruction, witness verdicts, and figure/table data.

pub mod args;
pub mod commands;
pub mod config;
pub mod io;
pub mod reproduce;

use std::path::PathBuf;

/// Exit code for a successful run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_INAPPLICABLE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Core(#[from] entpoly::Error),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization: {0}")]
    Serialize(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        use entpoly::Error as E;
        match self {
            Failure::Core(E::BoundInapplicable(_)) => EXIT_INAPPLICABLE,
            Failure::Core(
                E::InvalidArgument(_) | E::DegenerateOperator(_) | E::DegenerateFamily(_) | E::ResourceLimit(_),
            ) => EXIT_INVALID,
            Failure::Core(_) => EXIT_NUMERIC,
            Failure::Config(_) | Failure::Input { .. } => EXIT_INVALID,
            Failure::Io { .. } | Failure::Serialize(_) => EXIT_NUMERIC,
        }
    }
}

/// A failure tagged with the pipeline stage that produced it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {failure}")]
pub struct CliError {
    pub stage: &'static str,
    #[source]
    pub failure: Failure,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        self.failure.exit_code()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub trait AtStage<T> {
    fn at(self, stage: &'static str) -> CliResult<T>;
}

impl<T, E: Into<Failure>> AtStage<T> for std::result::Result<T, E> {
    fn at(self, stage: &'static str) -> CliResult<T> {
        self.map_err(|e| CliError { stage, failure: e.into() })
    }
}

pub(crate) fn config_error<T>(msg: impl Into<String>) -> std::result::Result<T, Failure> {
    Err(Failure::Config(msg.into()))
}

/// Parses the command line and runs it, returning the text for stdout.
pub fn run_cli(cli: args::Cli) -> CliResult<String> {
    use args::Command;
    match cli.command {
        Command::Prepare(a) => commands::prepare(&a),
        Command::Measure(a) => commands::measure(&a),
        Command::Reconstruct(a) => commands::reconstruct(&a),
        Command::Witness(a) => commands::witness(&a),
        Command::Overhead(a) => commands::overhead(&a),
        Command::Run(a) => commands::run(&a),
        Command::Reproduce(a) => reproduce::reproduce(&a),
    }
}
