use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid run or grid configuration.
    #[error("configuration error{}: {message}", location(.key, .line))]
    Config {
        key: Option<String>,
        line: Option<usize>,
        message: String,
    },

    /// Input outside the mathematical domain of a formula (non-positive
    /// pressure, a column too tall for the hydrostatic profile, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Violated calling contract (mismatched field sizes, empty input).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Negative coefficient handed to an operator assembly.
    #[error("assembly error: {0}")]
    Assembly(String),

    /// Iterative solver failed (breakdown, indefiniteness, no convergence).
    #[error("{solver} failed: {reason}")]
    Solver { solver: &'static str, reason: String },

    /// Non-physical state encountered while time stepping.
    #[error("simulation aborted: {0}")]
    Unphysical(String),

    /// Any failure inside a time step, tagged with where it happened.
    #[error("step {step} (t = {time} s): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn location(key: &Option<String>, line: &Option<usize>) -> String {
    match (key, line) {
        (Some(k), Some(l)) => format!(" at line {l} (key `{k}`)"),
        (Some(k), None) => format!(" (key `{k}`)"),
        (None, Some(l)) => format!(" at line {l}"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: Some(key.into()),
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn solver(solver: &'static str, reason: impl Into<String>) -> Self {
        Error::Solver {
            solver,
            reason: reason.into(),
        }
    }

    /// True for errors a caller should report as configuration problems.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
