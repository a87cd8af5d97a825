use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("site index {index} outside chain range [{lo}, {hi}]")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("outside the domain at site {site}: logarithm argument {argument} <= 0")]
    Domain { site: i64, argument: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("chain too short: {needed} sites required, got {got}")]
    ChainTooShort { needed: usize, got: usize },

    #[error("monodromy did not converge after {steps} steps (last drift {drift:e})")]
    Convergence { steps: usize, drift: f64 },

    #[error("trace of U0 has imaginary part {im_trace:e} >= tolerance {tol:e}")]
    SymmetryViolation { im_trace: f64, tol: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("eigenbasis condition number {condition:e} exceeds {threshold:e}; use stepwise integration")]
    IllConditioned { condition: f64, threshold: f64 },

    #[error("Dirac probability overflowed (P > {limit:e}) at t = {time}")]
    GrowthOverflow { time: f64, limit: f64 },

    #[error("analysis failed: {0}")]
    Analysis(String),

    #[error("non-positive total probability {value:e} in frame {frame}")]
    Data { frame: usize, value: f64 },

    #[error("grid point (j_over_omega={j_over_omega}, beta_over_omega={beta_over_omega}): {source}")]
    AtGridPoint {
        j_over_omega: f64,
        beta_over_omega: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::Precondition(_) => 2,
            Error::Io(_) => 4,
            Error::AtGridPoint { source, .. } => source.exit_code(),
            _ => 3,
        }
    }

    /// Short machine-readable kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::IndexOutOfRange { .. } => "index",
            Error::Domain { .. } => "domain",
            Error::Precondition(_) => "precondition",
            Error::ChainTooShort { .. } => "size",
            Error::Convergence { .. } => "convergence",
            Error::SymmetryViolation { .. } => "symmetry_violation",
            Error::Quadrature(_) => "quadrature",
            Error::IllConditioned { .. } => "conditioning",
            Error::GrowthOverflow { .. } => "growth_overflow",
            Error::Analysis(_) => "analysis",
            Error::Data { .. } => "data",
            Error::AtGridPoint { source, .. } => source.kind(),
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl Clone for Error {
    fn clone(&self) -> Self {
        match self {
            Error::InvalidParameter(s) => Error::InvalidParameter(s.clone()),
            Error::IndexOutOfRange { index, lo, hi } => Error::IndexOutOfRange { index: *index, lo: *lo, hi: *hi },
            Error::Domain { site, argument } => Error::Domain { site: *site, argument: *argument },
            Error::Precondition(s) => Error::Precondition(s.clone()),
            Error::ChainTooShort { needed, got } => Error::ChainTooShort { needed: *needed, got: *got },
            Error::Convergence { steps, drift } => Error::Convergence { steps: *steps, drift: *drift },
            Error::SymmetryViolation { im_trace, tol } => Error::SymmetryViolation { im_trace: *im_trace, tol: *tol },
            Error::Quadrature(s) => Error::Quadrature(s.clone()),
            Error::IllConditioned { condition, threshold } => {
                Error::IllConditioned { condition: *condition, threshold: *threshold }
            }
            Error::GrowthOverflow { time, limit } => Error::GrowthOverflow { time: *time, limit: *limit },
            Error::Analysis(s) => Error::Analysis(s.clone()),
            Error::Data { frame, value } => Error::Data { frame: *frame, value: *value },
            Error::AtGridPoint { j_over_omega, beta_over_omega, source } => Error::AtGridPoint {
                j_over_omega: *j_over_omega,
                beta_over_omega: *beta_over_omega,
                source: source.clone(),
            },
            Error::Config(s) => Error::Config(s.clone()),
            Error::Io(e) => Error::Io(std::io::Error::new(e.kind(), e.to_string())),
        }
    }
}
