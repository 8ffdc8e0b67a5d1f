use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Where a parse error was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub source: String,
    pub line: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.source, self.line)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("{location}: {message}")]
    Parse { location: Location, message: String },

    #[error("empty sample")]
    EmptySample,

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("incomplete reduction: {0}")]
    IncompleteReduction(String),

    #[error("insufficient power trace: need at least 2 samples, got {0}")]
    InsufficientTrace(usize),

    #[error("malformed power trace: {0}")]
    MalformedTrace(String),

    #[error("invalid energy {0} J: must be positive")]
    InvalidEnergy(f64),

    #[error("task `{0}` has no measurements and no local executor")]
    UnprofileableTask(String),

    #[error("infeasible workload: {0}")]
    Infeasible(String),

    #[error("plan integrity: {0}")]
    PlanIntegrity(String),

    #[error("empty measurement table")]
    EmptyTable,

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(source: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            location: Location {
                source: source.into(),
                line,
            },
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    /// Process exit code for this error: 2 usage/config, 3 infeasible plan,
    /// 4 data parse error, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnknownTask(_) | Error::EmptyTable => 2,
            Error::Infeasible(_) | Error::UnprofileableTask(_) => 3,
            Error::Parse { .. } | Error::MalformedTrace(_) | Error::InsufficientTrace(_) | Error::Io { .. } => 4,
            _ => 1,
        }
    }
}
