//! Partial sums of the exponential series and their root geometry.
//!
//! The homogeneous flux solutions of the order-`n` constitutive equation are
//! driven by the roots of `e_n(x) = sum_{k=0..n} x^k / k!` in the
//! nondimensional variable `x = tau_q * lambda`. This module locates those
//! roots, classifies stability by the spectral abscissa, checks the
//! Enestroem-Kakeya annulus bound `|x| >= 1`, and samples the limiting
//! Szegoe curve `|z exp(1 - z)| = 1` that the scaled roots `x / n` approach.
//!
//! Root pipeline: eigenvalues of the balanced companion matrix of the monic
//! polynomial `n! e_n`, then Newton polishing in double-double arithmetic on
//! the nested Horner form. The partial sum near its left-half-plane roots
//! cancels down to ~`exp(-|x|)` of its term magnitude, which puts an f64
//! floor of about 1e-3 on root accuracy at order 50; the double-double
//! polish removes that floor. An independent Aberth-Ehrlich simultaneous
//! iteration ([`aberth_roots`]) is kept as a cross-check for tests.

use crate::dd::{exp_partial_sum_cdd, CDd};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Largest order accepted by the root solver.
pub const MAX_ORDER: u32 = 50;

/// Stability margin: abscissas inside `(-MARGIN, MARGIN)` are Marginal.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// `sum_{k=0..n} z^k / k!` evaluated in nested Horner form.
pub fn eval_partial_sum(n: u32, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for k in (1..=n).rev() {
        acc = 1.0 + z * acc / (k as f64);
    }
    acc
}

/// Stability classification by the sign of the spectral abscissa.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    AsymptoticallyStable,
    Unstable,
    Marginal,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::AsymptoticallyStable => "asymptotically-stable",
            Classification::Unstable => "unstable",
            Classification::Marginal => "marginal",
        }
    }
}

/// Roots of `e_n` in `x = tau_q lambda` units plus derived stability data.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub n: u32,
    /// All `n` roots, conjugate-paired, sorted by (re, im).
    pub roots: Vec<Complex64>,
    /// Max real part over the roots.
    pub spectral_abscissa: f64,
    /// True when every root satisfies `|x| >= 1 - 1e-9`.
    pub ek_satisfied: bool,
    /// Number of roots with `|Im x| <= 1e-9`.
    pub real_root_count: usize,
    pub classification: Classification,
    /// Max over roots of `|e_n(x)|` relative to `sum |x|^k / k!`.
    pub max_rel_residual: f64,
}

/// Scaled roots `x / n` against a discretization of the Szegoe curve.
#[derive(Clone, Debug)]
pub struct SzegoSample {
    pub n: u32,
    pub scaled_roots: Vec<Complex64>,
    /// Points on `{ |z exp(1-z)| = 1, |z| <= 1 }`.
    pub curve_points: Vec<Complex64>,
    /// Max over scaled roots of the distance to the nearest curve point.
    pub max_distance: f64,
}

/// Magnitude scale of `e_n` at `|x|`: `sum_{k=0..n} |x|^k / k!`.
fn partial_sum_magnitude(n: u32, x_abs: f64) -> f64 {
    let mut acc = 1.0;
    for k in (1..=n).rev() {
        acc = 1.0 + x_abs * acc / (k as f64);
    }
    acc
}

/// In-place Parlett-Reinsch balancing (radix 2), as in EISPACK `balanc`.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[(j, i)].abs();
                    row += a[(i, j)].abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = col + row;
            let mut c = col;
            let mut g = row / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = row * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + row) / f < 0.95 * s {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Eigenvalues of the companion matrix of the monic polynomial `n! e_n`.
fn companion_eigenvalues(n: u32) -> Vec<Complex64> {
    let size = n as usize;
    // ascending coefficients of x^n + n x^{n-1} + ... + n!/k! x^k + ... + n!
    let mut coeff = vec![0.0f64; size];
    let mut acc = 1.0f64;
    for k in (0..size).rev() {
        acc *= (k + 1) as f64; // n! / k!
        coeff[k] = acc;
    }
    let mut m = DMatrix::<f64>::zeros(size, size);
    for i in 1..size {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..size {
        m[(i, size - 1)] = -coeff[i];
    }
    balance(&mut m);
    m.complex_eigenvalues().iter().copied().collect()
}

/// Newton iteration on `e_n` in double-double arithmetic.
fn polish_root(n: u32, start: Complex64) -> Complex64 {
    let mut x = CDd::new(start.re, start.im);
    for _ in 0..16 {
        let p = exp_partial_sum_cdd(n, x);
        let dp = exp_partial_sum_cdd(n - 1, x);
        if dp.abs() == 0.0 {
            break;
        }
        let step = p.div(dp);
        x = x.sub(step);
        if step.abs() <= 1e-30 * x.abs().max(1.0) {
            break;
        }
    }
    Complex64::new(x.re.hi, x.im.hi)
}

/// Replaces each root pair with its exact conjugate average and forces the
/// imaginary part of unpaired (real) roots to zero.
fn symmetrize_conjugates(n: u32, mut roots: Vec<Complex64>) -> Result<Vec<Complex64>> {
    const IM_TOL: f64 = 1e-6;
    let mut upper: Vec<Complex64> = roots.iter().copied().filter(|r| r.im > IM_TOL).collect();
    let mut lower: Vec<Complex64> = roots.iter().copied().filter(|r| r.im < -IM_TOL).collect();
    let mut real: Vec<Complex64> = roots
        .iter()
        .copied()
        .filter(|r| r.im.abs() <= IM_TOL)
        .map(|r| Complex64::new(r.re, 0.0))
        .collect();
    if upper.len() != lower.len() {
        return Err(Error::ConvergenceFailure {
            n,
            residual: f64::NAN,
        });
    }
    let key = |a: &Complex64| (a.re, a.im.abs());
    upper.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    lower.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    roots = Vec::with_capacity(n as usize);
    for (u, l) in upper.iter().zip(lower.iter()) {
        let mu = 0.5 * (u + l.conj());
        roots.push(mu);
        roots.push(mu.conj());
    }
    roots.append(&mut real);
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(roots)
}

/// Solves `e_n(x) = 0` and classifies the outcome.
///
/// Fails with [`Error::ConvergenceFailure`] when any polished root leaves a
/// relative residual above 1e-10 (relative to `sum |x|^k / k!`, the
/// magnitude the evaluation actually carries at that point).
pub fn characteristic_roots(n: u32) -> Result<StabilityReport> {
    if !(1..=MAX_ORDER).contains(&n) {
        return Err(Error::OrderOutOfRange {
            what: "stability analysis accepts 1 <= n <= 50",
            n,
            m: 0,
        });
    }
    let polished: Vec<Complex64> = companion_eigenvalues(n)
        .into_iter()
        .map(|e| polish_root(n, e))
        .collect();
    let roots = symmetrize_conjugates(n, polished)?;

    let mut max_rel_residual = 0.0f64;
    for &x in &roots {
        let value = exp_partial_sum_cdd(n, CDd::new(x.re, x.im)).abs();
        let scale = partial_sum_magnitude(n, x.norm());
        max_rel_residual = max_rel_residual.max(value / scale);
    }
    if max_rel_residual > 1e-10 {
        return Err(Error::ConvergenceFailure {
            n,
            residual: max_rel_residual,
        });
    }

    let spectral_abscissa = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
    let ek_satisfied = roots.iter().all(|r| r.norm() >= 1.0 - 1e-9);
    let real_root_count = roots.iter().filter(|r| r.im.abs() <= 1e-9).count();
    let classification = if spectral_abscissa < -STABILITY_MARGIN {
        Classification::AsymptoticallyStable
    } else if spectral_abscissa > STABILITY_MARGIN {
        Classification::Unstable
    } else {
        Classification::Marginal
    };
    Ok(StabilityReport {
        n,
        roots,
        spectral_abscissa,
        ek_satisfied,
        real_root_count,
        classification,
        max_rel_residual,
    })
}

impl StabilityReport {
    /// True iff every root lies on or outside the unit circle (within 1e-9),
    /// the annulus bound guaranteed by the Enestroem-Kakeya theorem for the
    /// coefficient sequence `1/k!`.
    pub fn enestrom_kakeya_certificate(&self) -> bool {
        self.roots.iter().all(|r| r.norm() >= 1.0 - 1e-9)
    }

    /// Number of real roots (`|Im x| <= 1e-9`); equals `n mod 2`.
    pub fn real_root_parity(&self) -> usize {
        self.roots.iter().filter(|r| r.im.abs() <= 1e-9).count()
    }
}

/// Aberth-Ehrlich simultaneous iteration on `e_n`, independent of the
/// companion-matrix route. Starts on the circle of radius `(n!)^{1/n}`
/// (the geometric mean of the root moduli) and finishes with double-double
/// sweeps so both pipelines reach comparable accuracy.
#[allow(clippy::needless_range_loop)] // in-place sweep reads all of z while updating z[i]
pub fn aberth_roots(n: u32) -> Result<Vec<Complex64>> {
    assert!((1..=MAX_ORDER).contains(&n));
    let ln_factorial: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let radius = (ln_factorial / n as f64).exp();
    let offset = 0.31 + 0.5 / n as f64; // keep iterates off the real axis
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + offset;
            radius * Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    // coarse f64 sweeps; near the left-half-plane roots the f64 evaluation
    // of e_n stalls at its cancellation floor, so a stall here is expected
    // and the double-double sweeps below finish the job
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..z.len() {
            let zi = z[i];
            let p = eval_partial_sum(n, zi);
            let dp = eval_partial_sum(n - 1, zi);
            let newton = p / dp;
            let mut repulse = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    repulse += 1.0 / (zi - zj);
                }
            }
            let w = newton / (1.0 - newton * repulse);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] = zi - w;
            max_step = max_step.max(w.norm() / zi.norm().max(1e-300));
        }
        if max_step < 1e-6 {
            break;
        }
    }

    // double-double sweeps: quadratic convergence down to the f64 storage
    // quantum of the iterates themselves
    let scale = z.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    let mut converged = false;
    for _ in 0..24 {
        let snapshot = z.clone();
        let mut max_step = 0.0f64;
        for i in 0..z.len() {
            let zi = CDd::new(z[i].re, z[i].im);
            let p = exp_partial_sum_cdd(n, zi);
            let dp = exp_partial_sum_cdd(n - 1, zi);
            if dp.abs() == 0.0 {
                continue;
            }
            let newton = p.div(dp);
            let newton64 = Complex64::new(newton.re.hi, newton.im.hi);
            let mut repulse = Complex64::new(0.0, 0.0);
            for (j, &zj) in snapshot.iter().enumerate() {
                if j != i {
                    repulse += 1.0 / (z[i] - zj);
                }
            }
            let w = newton64 / (1.0 - newton64 * repulse);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] -= w;
            max_step = max_step.max(w.norm());
        }
        if max_step <= 1e-12 * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure {
            n,
            residual: f64::NAN,
        });
    }
    z.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(z)
}

/// Radius of the Szegoe curve at angle `theta`, solving
/// `ln rho + 1 - rho cos(theta) = 0` on `(0, 1]` by bisection.
fn szego_radius(theta: f64) -> f64 {
    let h = |rho: f64| rho.ln() + 1.0 - rho * theta.cos();
    let mut lo = 1e-12;
    let mut hi = 1.0;
    if h(hi) <= 0.0 {
        return 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Discretizes the Szegoe curve with `num_points` angle samples.
pub fn szego_curve(num_points: usize) -> Vec<Complex64> {
    assert!(num_points >= 64, "curve needs at least 64 samples");
    (0..num_points)
        .map(|j| {
            let theta = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * j as f64 / (num_points - 1) as f64;
            let rho = szego_radius(theta);
            Complex64::new(rho * theta.cos(), rho * theta.sin())
        })
        .collect()
}

/// Scaled roots `x / n` with their distances to the sampled curve.
pub fn szego_sample(n: u32, num_curve_points: usize) -> Result<SzegoSample> {
    let report = characteristic_roots(n)?;
    let curve_points = szego_curve(num_curve_points);
    let scaled_roots: Vec<Complex64> = report.roots.iter().map(|r| r / n as f64).collect();
    let max_distance = scaled_roots
        .iter()
        .map(|z| {
            curve_points
                .iter()
                .map(|c| (z - c).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    Ok(SzegoSample {
        n,
        scaled_roots,
        curve_points,
        max_distance,
    })
}
