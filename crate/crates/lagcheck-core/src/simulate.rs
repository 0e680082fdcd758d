//! Time-domain demonstration of the stability dichotomy: homogeneous flux
//! solutions decay for orders 1..=4 and blow up from order 5 on.
//!
//! The order-`n` scalar constitutive equation (all three flux components
//! decouple) is integrated in companion form with classical RK4 from given
//! initial data and zero forcing, and the decay (or growth) rate is
//! recovered from a log-linear fit of the `|q|` envelope over the final
//! third of the run. Peak detection keeps the fit honest for oscillatory
//! modes, where a naive fit through the rectified zero crossings would be
//! biased.

use crate::{Error, Result};

/// End state of a free-decay run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Final amplitude below `1e-9` of the initial scale.
    Decayed,
    /// Amplitude exceeded `1e6` of the initial scale (run truncated there).
    BlewUp,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Decayed => "decayed",
            Outcome::BlewUp => "blew-up",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

/// Sampled `|q|(t)` trajectory with the fitted envelope rate.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub n: u32,
    pub tau_q: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Log-linear envelope slope over the final third, in 1/time units;
    /// compare against `spectral_abscissa / tau_q`.
    pub fitted_rate: f64,
    pub outcome: Outcome,
}

const DECAY_THRESHOLD: f64 = 1e-9;
const BLOW_UP_THRESHOLD: f64 = 1e6;

/// Integrates the homogeneous order-`n` equation from the given initial
/// derivatives `q(0), q'(0), ..., q^{(n-1)}(0)`.
pub fn free_decay(
    n: u32,
    tau_q: f64,
    initial: &[f64],
    horizon: f64,
    step: f64,
) -> Result<Trajectory> {
    if !(1..=10).contains(&n) {
        return Err(Error::OrderOutOfRange {
            what: "free decay integrates 1 <= n <= 10",
            n,
            m: 0,
        });
    }
    if tau_q <= 0.0 || tau_q.is_nan() {
        return Err(Error::NonPositive {
            name: "tau_q",
            value: tau_q,
        });
    }
    let limit = tau_q / 50.0;
    if step > limit {
        return Err(Error::StepTooLarge { step, limit });
    }
    assert_eq!(initial.len(), n as usize, "need n initial derivatives");
    assert!(horizon > 0.0);

    let n_us = n as usize;
    let mut tau_pow = vec![0.0f64; n_us + 1];
    let mut acc = 1.0;
    for (j, slot) in tau_pow.iter_mut().enumerate() {
        *slot = acc; // tau_q^j / j!
        acc *= tau_q / (j + 1) as f64;
    }
    let lead = tau_pow[n_us];
    let derivative = |y: &[f64]| -> Vec<f64> {
        let mut dy = Vec::with_capacity(n_us);
        for j in 0..n_us - 1 {
            dy.push(y[j + 1]);
        }
        let mut top = 0.0;
        for j in 0..n_us {
            top -= tau_pow[j] * y[j];
        }
        dy.push(top / lead);
        dy
    };
    let axpy = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(a, b)| a + c * b).collect()
    };

    let scale0 = initial.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let steps = (horizon / step).ceil() as usize;
    let mut y: Vec<f64> = initial.to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(y[0].abs());
    let mut blew_up = false;
    for i in 0..steps {
        let k1 = derivative(&y);
        let k2 = derivative(&axpy(&y, &k1, 0.5 * step));
        let k3 = derivative(&axpy(&y, &k2, 0.5 * step));
        let k4 = derivative(&axpy(&y, &k3, step));
        for j in 0..n_us {
            y[j] += step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        times.push((i + 1) as f64 * step);
        values.push(y[0].abs());
        if y[0].abs() > BLOW_UP_THRESHOLD * scale0 {
            blew_up = true;
            break;
        }
    }

    // end-state amplitude: max over the trailing 5% of samples, so a zero
    // crossing at the last step cannot masquerade as decay
    let tail = (values.len() / 20).max(1);
    let final_amp = values[values.len() - tail..]
        .iter()
        .fold(0.0f64, |m, v| m.max(*v));
    let outcome = if blew_up {
        Outcome::BlewUp
    } else if scale0 > 0.0 && final_amp < DECAY_THRESHOLD * scale0 {
        Outcome::Decayed
    } else {
        Outcome::Inconclusive
    };

    let fitted_rate = fit_envelope_rate(&times, &values);
    Ok(Trajectory {
        n,
        tau_q,
        times,
        values,
        fitted_rate,
        outcome,
    })
}

/// Least-squares slope of `ln |q|` over the final third of the recorded
/// samples, restricted to envelope peaks when the signal oscillates.
fn fit_envelope_rate(times: &[f64], values: &[f64]) -> f64 {
    let start = times.len() * 2 / 3;
    let t_window = &times[start..];
    let v_window = &values[start..];

    // local maxima of |q| in the window
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 1..v_window.len().saturating_sub(1) {
        if v_window[i] >= v_window[i - 1] && v_window[i] > v_window[i + 1] && v_window[i] > 1e-300 {
            peaks.push((t_window[i], v_window[i].ln()));
        }
    }
    if peaks.len() < 3 {
        // monotone envelope: fit every positive sample directly
        peaks = t_window
            .iter()
            .zip(v_window)
            .filter(|(_, v)| **v > 1e-300)
            .map(|(t, v)| (*t, v.ln()))
            .collect();
    }
    if peaks.len() < 2 {
        return f64::NAN;
    }
    let count = peaks.len() as f64;
    let t_mean = peaks.iter().map(|p| p.0).sum::<f64>() / count;
    let v_mean = peaks.iter().map(|p| p.1).sum::<f64>() / count;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, v) in &peaks {
        num += (t - t_mean) * (v - v_mean);
        den += (t - t_mean) * (t - t_mean);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::characteristic_roots;

    #[test]
    fn first_order_is_pure_exponential() {
        let traj = free_decay(1, 1.0, &[1.0], 60.0, 1.0 / 64.0).unwrap();
        assert_eq!(traj.outcome, Outcome::Decayed);
        assert!(
            (traj.fitted_rate + 1.0).abs() < 0.01,
            "rate {}",
            traj.fitted_rate
        );
        // sampled solution is e^{-t} on the grid
        let mid = traj.values[traj.values.len() / 2];
        let t_mid = traj.times[traj.times.len() / 2];
        assert!((mid - (-t_mid).exp()).abs() < 1e-8);
    }

    #[test]
    fn fourth_order_decays_at_dominant_rate() {
        let traj = free_decay(4, 1.0, &[1.0, 0.0, 0.0, 0.0], 120.0, 1.0 / 64.0).unwrap();
        assert_eq!(traj.outcome, Outcome::Decayed);
        let abscissa = characteristic_roots(4).unwrap().spectral_abscissa;
        let rel = (traj.fitted_rate - abscissa).abs() / abscissa.abs();
        assert!(rel < 0.05, "rate {} vs {abscissa}", traj.fitted_rate);
    }

    #[test]
    fn fifth_order_blows_up() {
        let traj = free_decay(5, 1.0, &[1.0, 0.0, 0.0, 0.0, 0.0], 120.0, 1.0 / 64.0).unwrap();
        assert_eq!(traj.outcome, Outcome::BlewUp);
        assert!(traj.fitted_rate > 0.0);
    }

    #[test]
    fn oscillatory_envelope_is_fit_from_peaks() {
        // order 2: q ~ e^{-t} cos(t + phi), envelope rate exactly -1
        let traj = free_decay(2, 1.0, &[1.0, 0.0], 80.0, 1.0 / 64.0).unwrap();
        assert_eq!(traj.outcome, Outcome::Decayed);
        assert!(
            (traj.fitted_rate + 1.0).abs() < 0.02,
            "rate {}",
            traj.fitted_rate
        );
    }

    #[test]
    fn step_cap_is_enforced() {
        let res = free_decay(2, 1.0, &[1.0, 0.0], 10.0, 0.5);
        assert!(matches!(res, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn tau_q_scales_the_rate() {
        let traj = free_decay(1, 2.0, &[1.0], 120.0, 1.0 / 32.0).unwrap();
        assert!(
            (traj.fitted_rate + 0.5).abs() < 0.01,
            "rate {}",
            traj.fitted_rate
        );
    }
}
