//! Sign analysis of low-degree real polynomials on the positive axis.
//!
//! Consistency verdicts must not be sampled: a thin negative dip between
//! sample points would flip a verdict. Instead the derivative cascade
//! isolates every extremum exactly: roots of p' bracket intervals on which
//! p is monotone, and roots of p' are found the same way one level down.
//! Bisection inside a monotone bracket cannot miss a sign change.

/// Evaluates `sum c_j x^j` (ascending coefficients) by Horner.
pub(crate) fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Evaluates `sum |c_j| x^j`, the natural magnitude scale at `x`.
pub(crate) fn eval_poly_mag(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c.abs();
    }
    acc
}

pub(crate) fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| j as f64 * c)
        .collect()
}

/// Drops trailing coefficients below `rel` times the largest magnitude.
///
/// A vanishing leading coefficient is a genuine degeneracy here (the
/// delay-ratio families pass through ratios where the top coefficient
/// collapses exactly), and the sign analysis must then see the lower-degree
/// polynomial rather than a noise-sign tail.
pub(crate) fn trim_trailing(coeffs: &[f64], rel: f64) -> Vec<f64> {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 {
        return vec![0.0];
    }
    let mut out: Vec<f64> = coeffs.to_vec();
    while out.len() > 1 && out.last().unwrap().abs() <= rel * max {
        out.pop();
    }
    out
}

/// Upper bound for moduli of all roots (Cauchy bound).
fn cauchy_bound(coeffs: &[f64]) -> f64 {
    let d = coeffs.len() - 1;
    let lead = coeffs[d].abs();
    let max_rest = coeffs[..d].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    1.0 + max_rest / lead
}

/// Bisects a sign change of `p` inside a monotone bracket.
fn bisect_root(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = eval_poly(coeffs, lo);
    if f_lo == 0.0 {
        return lo;
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = eval_poly(coeffs, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All sign-crossing roots of `p` in `(0, B]`, ascending.
///
/// Roots of even multiplicity (touch points) are not crossings and are not
/// reported; callers that care about touch points inspect critical values
/// instead.
pub(crate) fn positive_crossings(coeffs: &[f64]) -> Vec<f64> {
    let coeffs = trim_trailing(coeffs, 0.0);
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return vec![];
    }
    if degree == 1 {
        let root = -coeffs[0] / coeffs[1];
        return if root > 0.0 { vec![root] } else { vec![] };
    }
    let crit = positive_crossings(&poly_derivative(&coeffs));
    let bound = cauchy_bound(&coeffs);
    let mut knots = vec![0.0];
    knots.extend(crit.into_iter().filter(|&c| c < bound));
    knots.push(bound);
    let mut roots = vec![];
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let f_lo = eval_poly(&coeffs, lo);
        let f_hi = eval_poly(&coeffs, hi);
        if f_lo == 0.0 {
            // knot itself is a root; counted when it ended the previous bracket
            if lo > 0.0 && roots.last().is_none_or(|&r: &f64| r != lo) {
                roots.push(lo);
            }
            continue;
        }
        if f_hi == 0.0 {
            roots.push(hi);
            continue;
        }
        if (f_lo > 0.0) != (f_hi > 0.0) {
            roots.push(bisect_root(&coeffs, lo, hi));
        }
    }
    roots
}

/// Critical points of `p` on the open positive axis.
pub(crate) fn positive_critical_points(coeffs: &[f64]) -> Vec<f64> {
    if coeffs.len() <= 1 {
        return vec![];
    }
    positive_crossings(&poly_derivative(coeffs))
}
