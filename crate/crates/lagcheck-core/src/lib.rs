//! Stability and second-law analysis for time-differential dual-phase-lag
//! heat conduction.
//!
//! The constitutive law relates the heat flux at time `t + tau_q` to the
//! temperature gradient at time `t + tau_T`. Truncating both sides of that
//! relation as time Taylor expansions of orders `n` (flux side) and `m`
//! (gradient side) yields an ordinary differential constitutive equation
//! whose behaviour is controlled by two questions:
//!
//! * **Dynamic stability**: the homogeneous flux solutions are governed by
//!   the partial sums of the exponential series; all roots sit in the left
//!   half-plane exactly for `n <= 4` ([`expsum`]).
//! * **Thermodynamic consistency**: on sinusoidal cycles the Clausius-Duhem
//!   inequality reduces to the positivity of a polynomial in `tau_q^2 omega^2`
//!   whose coefficients depend only on the delay ratio `r = tau_T / tau_q`
//!   ([`spectral`]).
//!
//! The [`kernels`] module carries the equivalent fading-memory (resolvent)
//! representation for flux orders 1..=4, and [`oracle`] / [`simulate`]
//! provide independent numerical verification paths (kernel quadrature and
//! direct ODE integration).

pub mod expsum;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod simulate;
pub mod spectral;

mod dd;
mod polyreal;
pub mod quad;

use thiserror::Error;

/// Errors shared across the analysis modules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Conductivity tensor is not symmetric within tolerance.
    #[error("conductivity tensor is not symmetric: |k[{i}][{j}] - k[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
    /// Conductivity tensor has a non-positive eigenvalue.
    #[error("conductivity tensor is not positive definite")]
    NotPositiveDefinite,
    /// A lag or frequency that must be positive was not.
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    /// A cyclic history with zero amplitude on both legs.
    #[error("cyclic history is null: f.f + g.g = 0")]
    NullCycle,
    /// Taylor order outside the admissible range for the requested analysis.
    #[error("order out of range: {what} (got n={n}, m={m})")]
    OrderOutOfRange { what: &'static str, n: u32, m: u32 },
    /// Root polishing failed to reach the residual bound.
    #[error("root solve failed to converge at order {n}: relative residual {residual:e}")]
    ConvergenceFailure { n: u32, residual: f64 },
    /// Adaptive quadrature hit its subdivision cap before the tolerance.
    #[error("quadrature failed to reach tolerance {tol:e}; error estimate {estimate:e}")]
    QuadratureFailure { tol: f64, estimate: f64 },
    /// Kernel truncation horizon exceeded its hard cap.
    #[error("kernel truncation horizon {s_max} exceeds 200*tau_q = {cap}")]
    TruncationFailure { s_max: f64, cap: f64 },
    /// The integrated flux grew past the blow-up guard.
    #[error("flux magnitude exceeded {threshold:e} during integration (order n={n} is unstable)")]
    InstabilityDetected { n: u32, threshold: f64 },
    /// Time step too coarse for the requested integration.
    #[error("step {step} exceeds tau_q/50 = {limit}")]
    StepTooLarge { step: f64, limit: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
