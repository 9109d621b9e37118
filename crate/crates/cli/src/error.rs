use std::fmt;
use std::process::ExitCode;

use rncplus::automata::AutomatonError;
use rncplus::dynamics::DynamicsError;
use rncplus::extraction::ExtractionError;
use rncplus::fixtures::FixtureError;
use rncplus::io::IoError;
use rncplus::tanh_analysis::AnalysisError;

/// A failure that stops a command, tagged with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files, malformed input: exit 2.
    Usage(String),
    /// A precondition of the checked property does not hold: exit 1.
    Property(String),
    /// Settling or iteration ran out of budget: exit 3.
    NoConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Property(_) => 1,
            CliError::Usage(_) => 2,
            CliError::NoConvergence(_) => 3,
        })
    }

    /// Prefixes the message with the flag or file it concerns.
    pub fn context(self, what: impl fmt::Display) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Property(m) => CliError::Property(format!("{what}: {m}")),
            CliError::NoConvergence(m) => CliError::NoConvergence(format!("{what}: {m}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Property(m) | CliError::NoConvergence(m) => f.write_str(m),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::NoConvergence { .. } => CliError::NoConvergence(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AutomatonError> for CliError {
    fn from(e: AutomatonError) -> Self {
        match e {
            AutomatonError::Dynamics(d) => d.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ExtractionError> for CliError {
    fn from(e: ExtractionError) -> Self {
        match e {
            ExtractionError::NotRncPlus(_) => CliError::Property(e.to_string()),
            ExtractionError::Dynamics(d) => d.into(),
            ExtractionError::Automaton(a) => a.into(),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::NoConvergence { .. } => CliError::NoConvergence(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FixtureError> for CliError {
    fn from(e: FixtureError) -> Self {
        CliError::Usage(e.to_string())
    }
}
