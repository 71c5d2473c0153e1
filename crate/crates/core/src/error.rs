use thiserror::Error;

/// Errors raised by the solvers and transforms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported regime: lambda = {lambda} (solvers require -lambda_1 < lambda <= 1, lambda_1 = {lambda_1})")]
    UnsupportedRegime { lambda: f64, lambda_1: f64 },

    #[error("weight h is singular at t = {t} (cos r(t) below cutoff)")]
    SingularWeight { t: f64 },

    #[error("coordinate mismatch: expected {expected:?}, found {found:?}")]
    CoordinateMismatch {
        expected: crate::profile::CoordinateKind,
        found: crate::profile::CoordinateKind,
    },

    #[error("profile is identically zero")]
    ZeroProfile,

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("integrator exceeded {max_steps} steps at t = {t}")]
    StepLimit { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("minimizer did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NotConverged { iterations: usize, gradient_norm: f64 },

    #[error("no even solutions found for alpha in [{alpha_min:e}, {alpha_max:e}]")]
    ScanExhausted { alpha_min: f64, alpha_max: f64 },

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("eigenvalue {index} disagrees between matrix ({matrix}) and shooting ({shooting})")]
    DiscretizationDisagreement {
        index: usize,
        matrix: f64,
        shooting: f64,
    },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("t = {t} outside the profile grid [{lo}, {hi}]")]
    OutOfGrid { t: f64, lo: f64, hi: f64 },

    #[error("bound violated at t = {t} (margin {margin:e})")]
    BoundViolated { t: f64, margin: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
