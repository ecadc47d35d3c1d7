use std::path::PathBuf;

/// Errors raised by the models, the advisor and the file formats.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("processor count must be at least 1")]
    ZeroProcessors,

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("invalid application profile: {0}")]
    InvalidProfile(String),

    #[error("profile exponent b = {b} lies in [-1, 0): 1 + 1/b <= 0 and the cost-over-time integral diverges")]
    DivergentExponent { b: f64 },

    #[error("profile fit needs at least 2 observations, got {0}")]
    TooFewObservations(usize),

    #[error("all observations share processor count {0}; at least 2 distinct counts are needed")]
    DegenerateObservations(u32),

    #[error("fitted exponent b = {0} is not negative: the observations do not show scaling")]
    NonScalingFit(f64),

    #[error("invalid price table: {0}")]
    InvalidPriceTable(String),

    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),

    #[error("invalid node sizes: {0}")]
    InvalidNodeSizes(String),

    #[error("invalid environment `{name}`: {reason}")]
    InvalidEnvironment { name: String, reason: String },

    #[error("deadline-aware request is missing a deadline")]
    MissingDeadline,

    #[error("budget-aware request is missing a budget")]
    MissingBudget,

    #[error("no environments to compare")]
    NoEnvironments,

    #[error("no environment named `{0}`")]
    UnknownEnvironment(String),

    #[error("relative metric is undefined: {0}")]
    UndefinedRelativeMetric(String),

    #[error("random baseline requires a seed")]
    MissingSeed,

    #[error("injected error {0} is outside [-0.9, 1.0]")]
    ErrorOutOfRange(f64),

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),

    #[error("sweep grid has no points")]
    EmptyGrid,

    #[error("nothing to aggregate")]
    EmptyResults,

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn non_positive(what: &'static str, value: f64) -> Self {
        Error::NonPositive { what, value }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse { path: path.into(), message: message.to_string() }
    }

    /// Errors that come from the mathematics of the models rather than from
    /// malformed input or the filesystem.
    pub fn is_model_domain(&self) -> bool {
        matches!(
            self,
            Error::DivergentExponent { .. }
                | Error::NonScalingFit(_)
                | Error::InvalidProfile(_)
                | Error::DegenerateObservations(_)
        )
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
