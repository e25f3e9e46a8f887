use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("radius {radius} is outside {domain}")]
    OutOfDomain { radius: f64, domain: &'static str },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("could not bracket the discriminant root after {iterations} doublings")]
    Bracketing { iterations: u32 },

    #[error("radicand {value:e} is negative beyond roundoff at r = {radius}")]
    NegativeRadicand { radius: f64, value: f64 },

    #[error(
        "quadrature did not converge within {panels} panels (estimate {value:e}, error {error:e})"
    )]
    NonConvergence {
        value: f64,
        error: f64,
        panels: usize,
    },

    #[error("ODE step halving reached dt = {dt:e} without agreement")]
    StepFloor { dt: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
