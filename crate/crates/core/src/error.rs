use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("regressor matrix is rank deficient; dependent columns: {}", format_columns(.columns))]
    RankDeficient { columns: Vec<(usize, String)> },

    #[error("constraint system is singular: {0}")]
    SingularConstraint(String),

    #[error("numeric divergence at sample {index}{}", .time.map(|t| format!(" (t = {t} s)")).unwrap_or_default())]
    Diverged { index: usize, time: Option<f64> },

    #[error("{context}: offending terms [{}]", .terms.join(", "))]
    Structural { context: String, terms: Vec<String> },

    #[error("{0}")]
    Causality(String),

    #[error("reference has zero range; MAPE is undefined")]
    ZeroRange,

    #[error("reference increment is zero at index {0}; pointwise NSAVI is undefined")]
    ZeroIncrement(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_columns(cols: &[(usize, String)]) -> String {
    cols.iter()
        .map(|(i, name)| format!("#{i} {name}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Coarse failure classes, used by the command-line tool for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numeric,
    Structural,
}

impl Error {
    pub fn structural(context: impl Into<String>, terms: Vec<String>) -> Self {
        Error::Structural {
            context: context.into(),
            terms,
        }
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidArgument(_)
            | Error::Parse { .. }
            | Error::Config { .. }
            | Error::Io(_)
            | Error::InsufficientData { .. } => ErrorClass::Config,
            Error::RankDeficient { .. }
            | Error::SingularConstraint(_)
            | Error::Diverged { .. }
            | Error::ZeroRange
            | Error::ZeroIncrement(_) => ErrorClass::Numeric,
            Error::Structural { .. } | Error::Causality(_) => ErrorClass::Structural,
        }
    }
}
