use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("orientation {0} is not allowed here")]
    BadOrientation(&'static str),

    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),

    #[error("unbounded set: {0}")]
    Unbounded(String),

    #[error("piece on ({lo}, {hi}) is not piecewise monotone")]
    NotPiecewiseMonotone { lo: f64, hi: f64 },

    #[error("improper integral did not converge after {doublings} truncation doublings")]
    Divergent { doublings: usize },

    #[error("quadrature failed to reach tolerance on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },

    #[error("test function lacks rapid decay: {0}")]
    NoDecay(String),

    #[error("distribution error: {0}")]
    Distribution(String),

    #[error("trajectory left the working domain (alpha >= 1) at t = {t}")]
    LeftWorkingDomain { t: f64 },

    #[error("coefficient not elliptic: |alpha| * factor = {potential} >= a^2 = {kinetic}")]
    NotElliptic { potential: f64, kinetic: f64 },

    #[error("operation undefined in the Krein regime: {0}")]
    KreinRegime(String),

    #[error("eigensolver did not converge")]
    SolverFailed,

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
