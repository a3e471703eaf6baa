use thiserror::Error;

/// Errors raised by the material, section, solver and database layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("reinforcement ruptured: strain {strain:.6} exceeds limit {limit:.6}")]
    Ruptured { strain: f64, limit: f64 },

    #[error("bad geometry: {0}")]
    BadGeometry(String),

    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("compression fiber strain {eps_cf:.6} is beyond the zero-stress tail at {limit:.6}")]
    OverCrushed { eps_cf: f64, limit: f64 },

    #[error("degenerate stress block: beta = {beta:.4}")]
    BadBlock { beta: f64 },

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("failure precedes any reinforcement yield; ductility is undefined")]
    NoYield,

    #[error("curve has no terminal failure event")]
    NoUltimate,

    #[error("curve has no crack-localization event")]
    NoLocalization,

    #[error("solver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("validation failed at row {row} ({name}): {}", .problems.join("; "))]
    Validation {
        row: usize,
        name: String,
        problems: Vec<String>,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    /// Short machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMaterial(_) => "InvalidMaterial",
            Error::Ruptured { .. } => "Ruptured",
            Error::BadGeometry(_) => "BadGeometry",
            Error::NoEquilibrium(_) => "NoEquilibrium",
            Error::OverCrushed { .. } => "OverCrushed",
            Error::BadBlock { .. } => "BadBlock",
            Error::BadInput(_) => "BadInput",
            Error::NoYield => "NoYield",
            Error::NoUltimate => "NoUltimate",
            Error::NoLocalization => "NoLocalization",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::Parse { .. } => "ParseError",
            Error::Validation { .. } => "ValidationError",
            Error::Io { .. } => "IoError",
        }
    }
}
