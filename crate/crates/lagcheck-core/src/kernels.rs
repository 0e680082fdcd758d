//! Closed-form fading-memory kernels for flux orders 1..=4.
//!
//! The order-`n` constitutive equation, solved for the flux as a functional
//! of the gradient history, becomes
//!
//! ```text
//! q(t) = - int_0^inf kernel(s) k [ sum_j (tau_T^j / j!) d^j grad T(t - s) ] ds
//! ```
//!
//! where `kernel` is the resolvent of the flux-side operator: its Fourier
//! transform times `e_n(i omega tau_q)` is identically 1. The kernel shapes
//! are sums of decaying exponentials and damped oscillations built from the
//! roots of `e_n`; parameters are recomputed from the root solver at
//! construction (the five-digit published constants live only in tests).
//! No kernel exists for `n >= 5`: a right-half-plane root would make the
//! memory grow instead of fade.

use crate::expsum::characteristic_roots;
use crate::model::{ConductivityTensor, CyclicHistory, LagPair, ModelOrder};
use crate::{Error, Result};
use nalgebra::Vector3;
use num_complex::Complex64;

/// Envelope budget for truncation: `exp(-rho s / tau_q) < 1e-12`.
const ENVELOPE_CUTOFF_LOG: f64 = 27.631021115928547; // 12 ln 10

/// Hard cap on the truncation horizon, in units of `tau_q`.
const S_MAX_CAP_FACTOR: f64 = 200.0;

/// Parameters of the order-3 kernel: real root `-alpha`, complex pair
/// `-gamma +/- i delta` of `e_3`, in `x = tau_q lambda` units.
#[derive(Clone, Copy, Debug)]
pub struct CubicKernelParams {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Parameters of the order-4 kernel: root pairs `-alpha +/- i beta` (the
/// slow pair) and `-gamma +/- i delta` of `e_4`.
#[derive(Clone, Copy, Debug)]
pub struct QuarticKernelParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl QuarticKernelParams {
    /// Normalization determinant of the order-4 resolvent
    /// (about -22.165 for the exponential-sum roots).
    pub fn delta_determinant(&self) -> f64 {
        let QuarticKernelParams {
            alpha: a,
            beta: b,
            gamma: g,
            delta: d,
        } = *self;
        3.0 * a * b * b - 3.0 * g * d * d + g * g * g
            - a * a * a
            - 1.0 / (2.0 * (g - a))
                * ((g - a) * (g - a) * (3.0 * a * a + 3.0 * g * g - b * b - d * d)
                    + (b * b - d * d) * (3.0 * g * g - 3.0 * a * a + b * b - d * d))
    }
}

#[derive(Clone, Copy, Debug)]
enum KernelShape {
    /// `e^{-s/tau_q} / tau_q`
    Exponential,
    /// `(2/tau_q) e^{-s/tau_q} sin(s/tau_q)`
    DampedSine,
    Cubic(CubicKernelParams),
    Quartic(QuarticKernelParams),
}

/// Resolvent kernel of the order-`n` flux operator, `n` in `1..=4`.
#[derive(Clone, Debug)]
pub struct MemoryKernel {
    n: u32,
    tau_q: f64,
    shape: KernelShape,
}

impl MemoryKernel {
    /// Builds the kernel, recomputing its parameters from the
    /// exponential-sum roots.
    pub fn new(n: u32, tau_q: f64) -> Result<Self> {
        if !(1..=4).contains(&n) {
            return Err(Error::OrderOutOfRange {
                what: "memory kernels exist for flux orders 1..=4",
                n,
                m: 0,
            });
        }
        if tau_q <= 0.0 || !tau_q.is_finite() {
            return Err(Error::NonPositive {
                name: "tau_q",
                value: tau_q,
            });
        }
        let shape = match n {
            1 => KernelShape::Exponential,
            2 => KernelShape::DampedSine,
            3 => {
                let report = characteristic_roots(3)?;
                let real = report
                    .roots
                    .iter()
                    .find(|r| r.im.abs() <= 1e-9)
                    .expect("odd order has one real root");
                let complex = report
                    .roots
                    .iter()
                    .find(|r| r.im > 1e-9)
                    .expect("order 3 has a complex pair");
                KernelShape::Cubic(CubicKernelParams {
                    alpha: -real.re,
                    gamma: -complex.re,
                    delta: complex.im,
                })
            }
            _ => {
                let report = characteristic_roots(4)?;
                let mut uppers: Vec<Complex64> = report
                    .roots
                    .iter()
                    .copied()
                    .filter(|r| r.im > 0.0)
                    .collect();
                // slow pair (re closest to zero) carries (alpha, beta)
                uppers.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
                KernelShape::Quartic(QuarticKernelParams {
                    alpha: -uppers[0].re,
                    beta: uppers[0].im,
                    gamma: -uppers[1].re,
                    delta: uppers[1].im,
                })
            }
        };
        Ok(MemoryKernel { n, tau_q, shape })
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn tau_q(&self) -> f64 {
        self.tau_q
    }

    pub fn cubic_params(&self) -> Option<&CubicKernelParams> {
        match &self.shape {
            KernelShape::Cubic(p) => Some(p),
            _ => None,
        }
    }

    pub fn quartic_params(&self) -> Option<&QuarticKernelParams> {
        match &self.shape {
            KernelShape::Quartic(p) => Some(p),
            _ => None,
        }
    }

    /// Normalization constant `c_n` multiplying the raw kernel shape.
    pub fn normalization(&self) -> f64 {
        match &self.shape {
            KernelShape::Exponential => 1.0 / self.tau_q,
            KernelShape::DampedSine => 2.0 / self.tau_q,
            KernelShape::Cubic(p) => {
                6.0 / (self.tau_q * ((p.alpha - p.gamma).powi(2) + p.delta * p.delta))
            }
            KernelShape::Quartic(p) => 24.0 / (self.tau_q * p.delta_determinant()),
        }
    }

    /// Raw kernel shape without the normalization constant.
    pub fn core_eval(&self, s: f64) -> f64 {
        let x = s / self.tau_q;
        match &self.shape {
            KernelShape::Exponential => (-x).exp(),
            KernelShape::DampedSine => (-x).exp() * x.sin(),
            KernelShape::Cubic(p) => {
                (-p.alpha * x).exp()
                    + (-p.gamma * x).exp()
                        * ((p.alpha - p.gamma) / p.delta * (p.delta * x).sin()
                            - (p.delta * x).cos())
            }
            KernelShape::Quartic(p) => {
                let gm = 2.0 * (p.gamma - p.alpha);
                let c1 = ((p.alpha - p.gamma).powi(2) + p.delta * p.delta - p.beta * p.beta)
                    / (gm * p.beta);
                let c2 = ((p.alpha - p.gamma).powi(2) + p.beta * p.beta - p.delta * p.delta)
                    / (gm * p.delta);
                (-p.alpha * x).exp() * ((p.beta * x).cos() - c1 * (p.beta * x).sin())
                    - (-p.gamma * x).exp() * ((p.delta * x).cos() + c2 * (p.delta * x).sin())
            }
        }
    }

    /// Kernel value including normalization, `s >= 0`.
    pub fn eval(&self, s: f64) -> f64 {
        self.normalization() * self.core_eval(s)
    }

    /// Slowest decay rate among the kernel exponents, in `1/tau_q` units.
    fn min_decay_rate(&self) -> f64 {
        match &self.shape {
            KernelShape::Exponential | KernelShape::DampedSine => 1.0,
            KernelShape::Cubic(p) => p.alpha.min(p.gamma),
            KernelShape::Quartic(p) => p.alpha.min(p.gamma),
        }
    }

    /// Truncation horizon: smallest `s` with envelope below `1e-12`.
    pub fn s_max(&self) -> Result<f64> {
        self.horizon(ENVELOPE_CUTOFF_LOG)
    }

    fn horizon(&self, envelope_log: f64) -> Result<f64> {
        let s = envelope_log * self.tau_q / self.min_decay_rate();
        let cap = S_MAX_CAP_FACTOR * self.tau_q;
        if s > cap {
            return Err(Error::TruncationFailure { s_max: s, cap });
        }
        Ok(s)
    }

    /// `int_0^inf kernel(s) exp(-i omega s) ds` by adaptive quadrature.
    ///
    /// Seeds the panel grid at a quarter oscillation period so the rule is
    /// exact to roundoff per panel; the resolvent identity
    /// `transform(omega) * e_n(i omega tau_q) = 1` then holds to roughly
    /// `eps * |e_n| * int |kernel|` even where `|e_n|` is large.
    pub fn transform(&self, omega: f64) -> Result<Complex64> {
        // deeper cutoff than the flux convolution: at high frequency the
        // identity error is |e_n| * (tail + roundoff), and |e_n| reaches 4e6
        // at omega = 100 / tau_q, so the tail must sit near roundoff
        let s_max = self.horizon(35.0)?;
        let per_period = 4.0 * omega.abs() * s_max / (2.0 * std::f64::consts::PI);
        let seed = (per_period.ceil() as usize).clamp(64, 16_384);
        crate::quad::integrate_seeded(
            |s| {
                let phase = omega * s;
                self.eval(s) * Complex64::new(phase.cos(), -phase.sin())
            },
            0.0,
            s_max,
            1e-10,
            40_000,
            seed,
        )
    }
}

/// Cosine and sine transforms of the raw order-3 kernel, closed form.
///
/// Equals `(int kappa cos(omega s), int kappa sin(omega s))` without the
/// normalization constant.
pub fn kappa_cs_closed_form(p: &CubicKernelParams, tau_q: f64, omega: f64) -> (f64, f64) {
    let CubicKernelParams {
        alpha: a,
        gamma: g,
        delta: d,
    } = *p;
    let u = tau_q * tau_q * omega * omega;
    let den2 = (g * g + d * d + u).powi(2) - 4.0 * d * d * u;
    let kappa_c = tau_q * (a / (a * a + u) + ((a - 2.0 * g) * (g * g + d * d) - a * u) / den2);
    let kappa_s = tau_q
        * tau_q
        * omega
        * (1.0 / (a * a + u) + (d * d - 3.0 * g * g + 2.0 * g * a - u) / den2);
    (kappa_c, kappa_s)
}

/// Cosine and sine transforms of the raw order-4 kernel, closed form.
pub fn big_k_cs_closed_form(p: &QuarticKernelParams, tau_q: f64, omega: f64) -> (f64, f64) {
    let QuarticKernelParams {
        alpha: a,
        beta: b,
        gamma: g,
        delta: d,
    } = *p;
    let u = tau_q * tau_q * omega * omega;
    let ab2 = a * a + b * b;
    let gd2 = g * g + d * d;
    let den_ab = u * u + 2.0 * (a * a - b * b) * u + ab2 * ab2;
    let den_gd = u * u + 2.0 * (g * g - d * d) * u + gd2 * gd2;
    let k_c = tau_q / (2.0 * (g - a))
        * (((gd2 - ab2) * u - ab2 * (3.0 * a * a - b * b + gd2 - 4.0 * a * g)) / den_ab
            - ((gd2 - ab2) * u + gd2 * (3.0 * g * g - d * d + ab2 - 4.0 * a * g)) / den_gd);
    let k_s = tau_q
        * tau_q
        * omega
        * ((u + a * a - b * b - a / (g - a) * ((g - a) * (g - a) + d * d - b * b)) / den_ab
            - (u + g * g - d * d + g / (g - a) * ((g - a) * (g - a) + b * b - d * d)) / den_gd);
    (k_c, k_s)
}

/// A gradient history smooth enough to take `m` time derivatives.
///
/// Derivatives are supplied analytically by the implementor; the
/// convolution quadrature would lose its accuracy contract on numerically
/// differentiated histories.
pub trait GradientHistory {
    fn derivative(&self, order: u32, t: f64) -> Vector3<f64>;

    fn value(&self, t: f64) -> Vector3<f64> {
        self.derivative(0, t)
    }
}

impl GradientHistory for CyclicHistory {
    fn derivative(&self, order: u32, t: f64) -> Vector3<f64> {
        CyclicHistory::derivative(self, order, t)
    }
}

/// Spatially uniform steady gradient.
#[derive(Clone, Copy, Debug)]
pub struct ConstantGradient(pub Vector3<f64>);

impl GradientHistory for ConstantGradient {
    fn derivative(&self, order: u32, _t: f64) -> Vector3<f64> {
        if order == 0 {
            self.0
        } else {
            Vector3::zeros()
        }
    }
}

/// Heat flux at time `t` from the convolution representation:
/// `q(t) = -int_0^{s_max} kernel(s) k [sum_{j<=m} (tau_T^j/j!) d^j grad T(t-s)] ds`.
pub fn flux_from_history<H: GradientHistory>(
    order: ModelOrder,
    lags: &LagPair,
    tensor: &ConductivityTensor,
    history: &H,
    t: f64,
) -> Result<Vector3<f64>> {
    order.require_thermo()?;
    let kernel = MemoryKernel::new(order.n, lags.tau_q())?;
    let s_max = kernel.s_max()?;
    let tau_t = lags.tau_t();
    let gradient_operator = |time: f64| {
        let mut acc = Vector3::zeros();
        let mut weight = 1.0;
        for j in 0..=order.m {
            if j > 0 {
                weight *= tau_t / j as f64;
            }
            acc += weight * history.derivative(j, time);
        }
        acc
    };
    // 256 seed panels resolve both the kernel oscillation and any history
    // frequency the oracle matrix exercises before adaptivity kicks in
    let integral = crate::quad::integrate_seeded(
        |s| kernel.eval(s) * (tensor.k() * gradient_operator(t - s)),
        0.0,
        s_max,
        1e-10,
        20_000,
        256,
    )?;
    Ok(-integral)
}
