use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("mass coefficient mu_{k} vanishes at t = {t}")]
    SingularMass { k: usize, t: f64 },

    #[error("degenerate mode: instantaneous frequency is zero at t = {t}")]
    DegenerateMode { t: f64 },

    #[error("Wronskian drift {drift:e} exceeds limit at t = {t}")]
    WronskianDrift { t: f64, drift: f64 },

    #[error("constraint drift {residual:e} exceeds limit at t = {t}")]
    ConstraintDrift { t: f64, residual: f64 },

    #[error("initial auxiliary matrix violates constraints (worst residual {residual:e})")]
    InvalidSeed { residual: f64 },

    #[error("time {t} outside trajectory range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("singular evaluation: |B| = {modulus:e} at t = {t}")]
    SingularEvaluation { t: f64, modulus: f64 },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}
