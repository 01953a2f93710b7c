use thiserror::Error;

/// Errors raised by the analytic pipeline and the Monte Carlo oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("relay constraint violated: rb1 = {rb1} must exceed r1 = {r1}")]
    RelayConstraint { r1: f64, rb1: f64 },

    #[error("distance {r} outside the support (must be at least {min})")]
    Support { r: f64, min: f64 },

    #[error("no RSU in the simulation window")]
    NoRsuInWindow,

    #[error(
        "quadrature did not converge: worst subinterval [{a}, {b}] with error {error:e} (budget {budget:e})"
    )]
    Quadrature { a: f64, b: f64, error: f64, budget: f64 },

    #[error("non-finite integrand value at x = {x}")]
    NonFinite { x: f64 },

    #[error("conditioning event nearly impossible: probability {value:e} below floor {floor:e}")]
    ConditioningTooRare { value: f64, floor: f64 },

    #[error("{what} = {value} falls outside [0, 1] by more than the numeric budget {budget:e}")]
    OutOfRange { what: &'static str, value: f64, budget: f64 },

    #[error("every drop was degenerate (no RSU in window); enlarge window_radius (currently {window_radius} km)")]
    AllDropsDegenerate { window_radius: f64 },

    #[error("conditioning population is empty after {drops} drops")]
    EmptyConditioning { drops: u64 },

    #[error("conditioning acceptance rate {rate:e} below 1e-3; use a coarser bin or a more likely event")]
    AcceptanceTooLow { rate: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
