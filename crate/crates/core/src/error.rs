use thiserror::Error;

/// Errors produced by rule construction, verification and discovery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported weight `{weight}`: {reason}")]
    UnsupportedWeight { weight: String, reason: String },

    #[error("symmetric eigen-solver failed to converge for {0}")]
    EigenFailure(String),

    #[error("kernel value K*(z, z) = {value:.3e} at node {index} is not positive; node set and kernel configuration do not match")]
    NonPositiveKernel { index: usize, value: f64 },

    #[error("cubature weight {index} is {value:.3e}; only positive rules are accepted")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("moment residual {residual:.3e} exceeds tolerance {tolerance:.1e}: nodes do not support degree {degree}")]
    MomentResidual {
        residual: f64,
        tolerance: f64,
        degree: usize,
    },

    #[error("expected {expected} points, found {found}")]
    CountMismatch {
        expected: usize,
        found: usize,
        points: Vec<[f64; 2]>,
    },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("not a solution of the {system} system: residual {residual:.3e} exceeds {tolerance:.1e}")]
    SystemResidual {
        system: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("rank condition fails: {0}")]
    RankCondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
