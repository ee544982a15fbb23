use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree budget exceeded: n = {n} is above the configured limit {limit}")]
    DegreeBudget { n: u32, limit: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),

    #[error("root finder did not converge on a polynomial of degree {degree}")]
    RootFinding { degree: usize },

    #[error("path tracking stalled near a = {at} (step {step:e})")]
    TrackingStall { at: Complex64, step: f64 },

    #[error("fiber roots collided near a = {at}; path passes too close to a branch point")]
    Collision { at: Complex64 },

    #[error("monodromy at infinity unstable under radius doubling: {first:?} vs {second:?}")]
    UnstableAtInfinity { first: Vec<usize>, second: Vec<usize> },

    #[error("kneading symbol {index} unresolved at the maximal grid resolution")]
    KneadingUnresolved { index: usize },

    #[error("branch ambiguity in the Böttcher product; supply a deeper iterate")]
    Branch,

    #[error("period detection ambiguous at iterate {iterate}; refine the tolerance")]
    AmbiguousPeriod { iterate: u32 },

    #[error("orbit overflowed to infinity at iterate {iterate}")]
    Overflow { iterate: usize },

    #[error("loop around branch point {index} failed: {source}")]
    Loop {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegreeBudget { .. } => 2,
            Error::TrackingStall { .. }
            | Error::Collision { .. }
            | Error::UnstableAtInfinity { .. }
            | Error::KneadingUnresolved { .. }
            | Error::RootFinding { .. }
            | Error::Branch
            | Error::AmbiguousPeriod { .. }
            | Error::Overflow { .. } => 3,
            Error::Internal(_) => 4,
            Error::Loop { source, .. } => source.exit_code(),
            Error::Domain(_) | Error::Parse(_) | Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
