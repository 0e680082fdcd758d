//! Independent numerical verification of the closed-form cycle integrals.
//!
//! Two routes that share nothing with the positivity-polynomial algebra:
//!
//! * [`kernel_cycle_integral`] substitutes the sinusoidal history into the
//!   fading-memory convolution and integrates `q . grad T` over one period
//!   by quadrature (the substitute-then-integrate derivation, done
//!   numerically).
//! * [`ode_cycle_integral`] integrates the order-`n` constitutive equation
//!   directly with RK4 from zero initial data, lets the transient die, and
//!   applies the composite trapezoid over the final period (spectrally
//!   accurate for a smooth periodic integrand on a uniform grid).
//!
//! [`compare_all`] runs both against [`crate::spectral::cycle_integral`] on
//! the canonical cycle and reports the worst pairwise disagreement.

use crate::expsum::characteristic_roots;
use crate::kernels::flux_from_history;
use crate::model::{ConductivityTensor, CyclicHistory, LagPair, ModelOrder};
use crate::quad::integrate_auto;
use crate::spectral::cycle_integral;
use crate::{Error, Result};
use nalgebra::Vector3;
use std::f64::consts::PI;

/// Three-way comparison of one cycle integral.
#[derive(Clone, Debug)]
pub struct OracleComparison {
    pub order: ModelOrder,
    pub lags: LagPair,
    pub omega: f64,
    pub value_spectral: f64,
    pub value_kernel: f64,
    pub value_ode: f64,
    /// Max pairwise `|a - b| / max(|a|, |b|, 1e-12)`.
    pub max_rel_disagreement: f64,
}

/// `int_0^{2 pi / omega} q(t) . grad T(t) dt` with the flux taken from the
/// fading-memory convolution on the exact sinusoidal history.
pub fn kernel_cycle_integral(
    order: ModelOrder,
    lags: &LagPair,
    tensor: &ConductivityTensor,
    history: &CyclicHistory,
) -> Result<f64> {
    let period = 2.0 * PI / history.omega;
    let integrand = |t: f64| -> Result<f64> {
        let q = flux_from_history(order, lags, tensor, history, t)?;
        Ok(q.dot(&history.value(t)))
    };
    // two passes: a coarse estimate fixes the scale for the relative target
    let coarse = integrate_fallible(&integrand, 0.0, period, 1e-6)?;
    let tol = (1e-9 * coarse.abs()).max(1e-13);
    integrate_fallible(&integrand, 0.0, period, tol)
}

/// Adapter: adaptive quadrature over a fallible integrand.
fn integrate_fallible(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut inner_error = None;
    let value = integrate_auto(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                inner_error.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        tol,
    );
    if let Some(e) = inner_error {
        return Err(e);
    }
    value
}

/// Default burn-in: the slowest homogeneous mode decays at
/// `|spectral_abscissa| / tau_q`, so `12 / rate` time units push the
/// transient below `e^-12`; the period count is then doubled for margin.
pub fn default_burn_in(order: ModelOrder, lags: &LagPair, omega: f64) -> Result<u32> {
    let report = characteristic_roots(order.n)?;
    let rate = report.spectral_abscissa.abs().max(1e-6) / lags.tau_q();
    let period = 2.0 * PI / omega;
    let periods = (12.0 / rate / period).ceil() as u32;
    Ok((2 * periods).max(1))
}

/// Integrates the order-`n` constitutive law for `q` through
/// `burn_in_periods + 1` periods of the sinusoidal forcing and returns the
/// trapezoid value of `int q . grad T` over the final period.
///
/// Orders 5..=10 are accepted so the blow-up guard is reachable: once any
/// flux component exceeds `1e6` times the forcing scale the run aborts with
/// [`Error::InstabilityDetected`].
pub fn ode_cycle_integral(
    order: ModelOrder,
    lags: &LagPair,
    tensor: &ConductivityTensor,
    history: &CyclicHistory,
    burn_in_periods: u32,
    steps_per_period: u32,
) -> Result<f64> {
    if order.n < 1 || order.n > 10 || order.m > 4 {
        return Err(Error::OrderOutOfRange {
            what: "ODE oracle integrates 1 <= n <= 10, m <= 4",
            n: order.n,
            m: order.m,
        });
    }
    assert!(burn_in_periods >= 1, "burn_in_periods must be at least 1");
    assert!(
        steps_per_period >= 256,
        "steps_per_period must be at least 256"
    );

    let n = order.n as usize;
    let tau_q = lags.tau_q();
    let tau_t = lags.tau_t();
    let period = 2.0 * PI / history.omega;
    let h = period / steps_per_period as f64;

    // rhs(t) = -k . [sum_{j<=m} tau_T^j/j! d^j grad T(t)]
    let rhs = |t: f64| -> Vector3<f64> {
        let mut acc = Vector3::zeros();
        let mut weight = 1.0;
        for j in 0..=order.m {
            if j > 0 {
                weight *= tau_t / j as f64;
            }
            acc += weight * history.derivative(j, t);
        }
        -(tensor.k() * acc)
    };

    let forcing_scale = (0..64)
        .map(|i| rhs(period * i as f64 / 64.0).norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let blow_up = 1e6 * forcing_scale;

    // companion state per flux component: y[c][j] = d^j q_c / dt^j
    // highest derivative from e_n(tau_q d/dt) q = rhs:
    //   q^(n) = (rhs - sum_{j<n} tau_q^j/j! q^(j)) * n! / tau_q^n
    let mut tau_pow = vec![0.0f64; n + 1];
    let mut acc = 1.0;
    for (j, slot) in tau_pow.iter_mut().enumerate() {
        *slot = acc; // tau_q^j / j!
        if j < n {
            acc *= tau_q / (j + 1) as f64;
        }
    }
    let lead = tau_pow[n];

    let derivative = |t: f64, y: &[Vector3<f64>]| -> Vec<Vector3<f64>> {
        let f = rhs(t);
        let mut dy = Vec::with_capacity(n);
        for j in 0..n - 1 {
            dy.push(y[j + 1]);
        }
        let mut top = f;
        for j in 0..n {
            top -= tau_pow[j] * y[j];
        }
        dy.push(top / lead);
        dy
    };

    let axpy = |y: &[Vector3<f64>], k: &[Vector3<f64>], c: f64| -> Vec<Vector3<f64>> {
        y.iter().zip(k).map(|(a, b)| a + c * b).collect()
    };

    let mut y: Vec<Vector3<f64>> = vec![Vector3::zeros(); n];
    let total_steps = (burn_in_periods as u64 + 1) * steps_per_period as u64;
    let final_start = burn_in_periods as u64 * steps_per_period as u64;
    let mut trapezoid = 0.0;
    for step in 0..total_steps {
        let t = step as f64 * h;
        if step >= final_start {
            let weight = if step == final_start { 0.5 } else { 1.0 };
            trapezoid += weight * y[0].dot(&history.value(t));
        }
        let k1 = derivative(t, &y);
        let k2 = derivative(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = derivative(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = derivative(t + h, &axpy(&y, &k3, h));
        for j in 0..n {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y[0].norm() > blow_up {
            return Err(Error::InstabilityDetected {
                n: order.n,
                threshold: blow_up,
            });
        }
    }
    let t_end = total_steps as f64 * h;
    trapezoid += 0.5 * y[0].dot(&history.value(t_end));
    Ok(trapezoid * h)
}

/// Runs all three routes on the canonical cycle (identity conductivity,
/// `f = e_x`, `g = 0`) and reports the worst pairwise disagreement.
pub fn compare_all(order: ModelOrder, lags: &LagPair, omega: f64) -> Result<OracleComparison> {
    order.require_thermo()?;
    if order.n < 1 {
        return Err(Error::OrderOutOfRange {
            what: "oracle comparison needs a flux-side ODE, n >= 1",
            n: order.n,
            m: order.m,
        });
    }
    let tensor = ConductivityTensor::identity();
    let history = CyclicHistory::canonical(omega);
    let value_spectral = cycle_integral(order, lags, &tensor, &history)?;
    let value_kernel = kernel_cycle_integral(order, lags, &tensor, &history)?;
    let burn_in = default_burn_in(order, lags, omega)?;
    let value_ode = ode_cycle_integral(order, lags, &tensor, &history, burn_in, 2048)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-12);
    let max_rel_disagreement = rel(value_spectral, value_kernel)
        .max(rel(value_spectral, value_ode))
        .max(rel(value_kernel, value_ode));
    Ok(OracleComparison {
        order,
        lags: *lags,
        omega,
        value_spectral,
        value_kernel,
        value_ode,
        max_rel_disagreement,
    })
}
