use thiserror::Error;

/// Errors raised by constructors, transforms and parsers.
///
/// Validation failures map to CLI exit code 1, usage problems (such as an
/// unknown verification suite) to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("mixture weights must be positive and sum to 1 (sum = {0})")]
    WeightSum(String),

    #[error("mixture leaves the representable class: {0}")]
    UnrepresentableMixture(String),

    #[error("conditioning on null interval {0}")]
    NullConditioning(String),

    #[error("not a probability measure: atom at exceptional point {point} leaves mass {mass} < 1")]
    MassDeficiency { point: String, mass: String },

    #[error("transformation is defined on continuous measures only: input has an atom at {0}")]
    AtomicInput(String),

    #[error("co-interval regions are undefined for a Dirac measure; use the Dirac distance formula")]
    DiracInput,

    #[error("map oracle is inconsistent: {0}")]
    OracleInconsistent(String),

    #[error("second argument is not absolutely continuous with respect to the first: {0}")]
    NotAbsolutelyContinuous(String),

    #[error("tolerance must be positive (got {0})")]
    NonPositiveTolerance(String),

    #[error("json error: {0}")]
    Json(String),

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
