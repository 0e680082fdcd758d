//! Shared domain types: Taylor orders, delay times, conductivity tensor,
//! sinusoidal cycles and consistency verdicts.
//!
//! Everything is immutable after construction and freely shareable across
//! threads. All downstream analysis is nondimensional: verdicts depend on
//! the orders `(n, m)` and the delay ratio `r = tau_T / tau_q` only, so the
//! lags are carried in seconds but only enter through `r` and through the
//! conversion of witness frequencies back to physical units.

use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};

/// Largest Taylor order admitted by the thermodynamic analysis.
pub const MAX_THERMO_ORDER: u32 = 4;

/// Pair of Taylor truncation orders: `n` on the heat-flux side, `m` on the
/// temperature-gradient side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelOrder {
    pub n: u32,
    pub m: u32,
}

impl ModelOrder {
    pub fn new(n: u32, m: u32) -> Self {
        ModelOrder { n, m }
    }

    /// Guards ops that are only meaningful for `n, m <= 4`.
    pub fn require_thermo(self) -> Result<Self> {
        if self.n > MAX_THERMO_ORDER || self.m > MAX_THERMO_ORDER {
            return Err(Error::OrderOutOfRange {
                what: "second-law analysis requires n <= 4 and m <= 4",
                n: self.n,
                m: self.m,
            });
        }
        Ok(self)
    }

    /// The order pair with flux and gradient sides exchanged.
    pub fn swapped(self) -> Self {
        ModelOrder {
            n: self.m,
            m: self.n,
        }
    }
}

/// Delay times of the flux (`tau_q`) and gradient (`tau_T`) sides, seconds.
///
/// A lag paired with order zero is recorded but ignored by the analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagPair {
    tau_q: f64,
    tau_t: f64,
}

impl LagPair {
    pub fn new(tau_q: f64, tau_t: f64) -> Result<Self> {
        if tau_q <= 0.0 || !tau_q.is_finite() {
            return Err(Error::NonPositive {
                name: "tau_q",
                value: tau_q,
            });
        }
        if tau_t <= 0.0 || !tau_t.is_finite() {
            return Err(Error::NonPositive {
                name: "tau_T",
                value: tau_t,
            });
        }
        Ok(LagPair { tau_q, tau_t })
    }

    pub fn tau_q(&self) -> f64 {
        self.tau_q
    }

    pub fn tau_t(&self) -> f64 {
        self.tau_t
    }

    /// Delay ratio `r = tau_T / tau_q`.
    pub fn ratio(&self) -> f64 {
        self.tau_t / self.tau_q
    }

    /// The pair seen from the gradient side: `(tau_T, tau_q)`.
    pub fn swapped(&self) -> LagPair {
        LagPair {
            tau_q: self.tau_t,
            tau_t: self.tau_q,
        }
    }
}

/// Symmetric positive definite conductivity tensor and its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct ConductivityTensor {
    k: Matrix3<f64>,
    k_inv: Matrix3<f64>,
}

/// Checks symmetry and positive definiteness, then inverts.
///
/// Symmetry tolerance is `1e-12 * max |k_ij|`; definiteness is checked by
/// Cholesky, which fails exactly when an eigenvalue is non-positive.
pub fn validate_tensor(k: Matrix3<f64>) -> Result<ConductivityTensor> {
    let scale = k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..3 {
        for j in (i + 1)..3 {
            let diff = (k[(i, j)] - k[(j, i)]).abs();
            if diff > 1e-12 * scale {
                return Err(Error::NotSymmetric { i, j, diff });
            }
        }
    }
    let sym = 0.5 * (k + k.transpose());
    let chol = sym.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let k_inv = chol.inverse();
    // guard against a numerically singular but Cholesky-passing input
    let residual = (k_inv * sym - Matrix3::identity()).norm();
    if residual > 1e-9 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(ConductivityTensor { k: sym, k_inv })
}

impl ConductivityTensor {
    /// Identity conductivity (the canonical choice for nondimensional runs).
    pub fn identity() -> Self {
        ConductivityTensor {
            k: Matrix3::identity(),
            k_inv: Matrix3::identity(),
        }
    }

    pub fn k(&self) -> &Matrix3<f64> {
        &self.k
    }

    /// Inverse tensor `K`, satisfying `K k = k K = I`.
    pub fn inverse(&self) -> &Matrix3<f64> {
        &self.k_inv
    }
}

/// Sinusoidal temperature-gradient program
/// `grad T(t) = f cos(omega t) + g sin(omega t)`.
///
/// The same shape carries flux-valued cycles on the dual (gradient-side)
/// analysis; only the interpretation of the amplitudes changes.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicHistory {
    pub f: Vector3<f64>,
    pub g: Vector3<f64>,
    pub omega: f64,
}

impl CyclicHistory {
    pub fn new(f: Vector3<f64>, g: Vector3<f64>, omega: f64) -> Result<Self> {
        if omega <= 0.0 || !omega.is_finite() {
            return Err(Error::NonPositive {
                name: "omega",
                value: omega,
            });
        }
        if f.norm_squared() + g.norm_squared() == 0.0 {
            return Err(Error::NullCycle);
        }
        Ok(CyclicHistory { f, g, omega })
    }

    /// Canonical unit cycle `f = e_x`, `g = 0` used by the oracle matrix.
    pub fn canonical(omega: f64) -> Self {
        CyclicHistory {
            f: Vector3::new(1.0, 0.0, 0.0),
            g: Vector3::zeros(),
            omega,
        }
    }

    /// Gradient value at time `t`.
    pub fn value(&self, t: f64) -> Vector3<f64> {
        let phase = self.omega * t;
        self.f * phase.cos() + self.g * phase.sin()
    }

    /// Analytic time derivative of any order (the phasor just rotates).
    pub fn derivative(&self, order: u32, t: f64) -> Vector3<f64> {
        let mut f = self.f;
        let mut g = self.g;
        for _ in 0..order {
            let new_f = g * self.omega;
            let new_g = -f * self.omega;
            f = new_f;
            g = new_g;
        }
        let phase = self.omega * t;
        f * phase.cos() + g * phase.sin()
    }
}

/// `f . (k f) + g . (k g)`, the positive factor common to every cycle
/// integral.
pub fn quadratic_form(tensor: &ConductivityTensor, history: &CyclicHistory) -> f64 {
    let kf = tensor.k * history.f;
    let kg = tensor.k * history.g;
    history.f.dot(&kf) + history.g.dot(&kg)
}

/// Outcome of the second-law check for one `(n, m, r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConsistencyVerdict {
    /// The cycle integral is strictly negative for every frequency.
    ConsistentStrict,
    /// The integral is non-positive and vanishes at `witness_omega`.
    ConsistentWeak { witness_omega: f64 },
    /// The integral is positive at `witness_omega`.
    Inconsistent { witness_omega: f64 },
}

/// Which verdicts count as consistent: `Weak` accepts a vanishing cycle
/// integral at isolated frequencies, `Strict` does not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Weak,
}

impl ConsistencyVerdict {
    pub fn witness_omega(&self) -> Option<f64> {
        match *self {
            ConsistencyVerdict::ConsistentStrict => None,
            ConsistencyVerdict::ConsistentWeak { witness_omega }
            | ConsistencyVerdict::Inconsistent { witness_omega } => Some(witness_omega),
        }
    }

    pub fn is_consistent(&self, mode: Mode) -> bool {
        matches!(
            (self, mode),
            (ConsistencyVerdict::ConsistentStrict, _)
                | (ConsistencyVerdict::ConsistentWeak { .. }, Mode::Weak)
        )
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            ConsistencyVerdict::ConsistentStrict => "consistent-strict",
            ConsistencyVerdict::ConsistentWeak { .. } => "consistent-weak",
            ConsistencyVerdict::Inconsistent { .. } => "inconsistent",
        }
    }
}
