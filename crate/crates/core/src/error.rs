use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("Holling exponent must be 1 or 2, got {0}")]
    InvalidHolling(u32),

    #[error("state must be nonnegative, got ({u}, {v})")]
    NegativeState { u: f64, v: f64 },

    #[error("{what} = {value} is outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("operation requires h = {expected}")]
    WrongHolling { expected: u32 },

    #[error("requires beta > r (beta = {beta}, r = {r})")]
    NoPositiveRegime { beta: f64, r: f64 },

    #[error("u = {u} is not an interior fixed point (|psi(u) - theta| = {residual:e})")]
    NotAFixedPoint { u: f64, residual: f64 },

    #[error("no sign change of f on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error(
        "eigenvalues are real (4b - a^2 = {discriminant:e}); outside the Neimark-Sacker regime"
    )]
    RealEigenvalues { discriminant: f64 },

    #[error("orbit diverged at step {step}")]
    Divergence { step: usize },

    #[error("invalid request: {0}")]
    InvalidSpec(String),
}
