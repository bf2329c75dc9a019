//! Adaptive explicit Runge-Kutta integration with an embedded error
//! estimate: the Dormand-Prince 5(4) pair with FSAL and cubic Hermite dense
//! output at requested sample times.

use crate::{Error, Result};

/// Counters reported alongside a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegratorStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
}

// Dormand-Prince 5(4) coefficients.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b - b_hat: weights of the embedded 4th-order error estimate
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end`, invoking `on_sample` at
/// every requested sample time (strictly increasing, inside `[t0, t_end]`)
/// with the dense-output solution there.
pub fn integrate_adaptive<F>(
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    sample_times: &[f64],
    mut on_sample: impl FnMut(usize, f64, &[f64]),
) -> Result<IntegratorStats>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(t_end > t0) {
        return Err(Error::invalid("integration span must be positive"));
    }
    let dim = y0.len();
    let mut stats = IntegratorStats {
        accepted_steps: 0,
        rejected_steps: 0,
        rhs_evaluations: 0,
    };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; dim];
    rhs(t, &y, &mut f);
    stats.rhs_evaluations += 1;

    let mut next_sample = 0usize;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        on_sample(next_sample, sample_times[next_sample], &y);
        next_sample += 1;
    }

    let mut h = initial_step(&mut rhs, t, &y, &f, t_end, rel_tol, abs_tol, &mut stats);
    let mut k = vec![vec![0.0; dim]; 7];
    k[0].copy_from_slice(&f);
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    while t < t_end {
        h = h.min(t_end - t);
        if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::numerical(format!(
                "step-size underflow at t = {t} (h = {h:.3e})"
            )));
        }

        // stages 2..6
        let a_rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, a_row) in a_rows.iter().enumerate() {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, aj) in a_row.iter().enumerate() {
                    acc += aj * k[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            let ts = t + C[s] * h;
            let (head, tail) = k.split_at_mut(s + 1);
            let _ = head;
            rhs(ts, &y_stage, &mut tail[0]);
            stats.rhs_evaluations += 1;
        }
        // 5th-order solution
        for i in 0..dim {
            let mut acc = 0.0;
            for (j, bj) in B.iter().enumerate() {
                acc += bj * k[j][i];
            }
            y_new[i] = y[i] + h * acc;
        }
        // FSAL stage: derivative at the new point
        {
            let (head, tail) = k.split_at_mut(6);
            let _ = head;
            rhs(t + h, &y_new, &mut tail[0]);
            stats.rhs_evaluations += 1;
        }
        // scaled RMS error of the embedded difference
        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, ej) in E.iter().enumerate() {
                e += ej * k[j][i];
            }
            e *= h;
            let scale = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
            let r = e / scale;
            err_sq += r * r;
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 {
            // emit dense output inside (t, t+h]
            while next_sample < sample_times.len() && sample_times[next_sample] <= t + h {
                let ts = sample_times[next_sample];
                let theta = (ts - t) / h;
                let mut ys = vec![0.0; dim];
                for i in 0..dim {
                    ys[i] = hermite(theta, h, y[i], y_new[i], k[0][i], k[6][i]);
                }
                on_sample(next_sample, ts, &ys);
                next_sample += 1;
            }
            t += h;
            std::mem::swap(&mut y, &mut y_new);
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
            stats.accepted_steps += 1;
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= factor;
        } else {
            stats.rejected_steps += 1;
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }
    // t may overshoot the last sample by round-off
    while next_sample < sample_times.len() {
        on_sample(next_sample, sample_times[next_sample], &y);
        next_sample += 1;
    }
    Ok(stats)
}

/// Cubic Hermite interpolation on one step.
fn hermite(theta: f64, h: f64, y0: f64, y1: f64, f0: f64, f1: f64) -> f64 {
    let u = 1.0 - theta;
    u * y0
        + theta * y1
        + theta * (theta - 1.0) * ((1.0 - 2.0 * theta) * (y1 - y0) + (theta - 1.0) * h * f0 + theta * h * f1)
}

/// Starting step heuristic based on the magnitude of the state and its first
/// two derivatives.
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    rhs: &mut F,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    stats: &mut IntegratorStats,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let scale: Vec<f64> = y0.iter().map(|v| abs_tol + rel_tol * v.abs()).collect();
    let d0 = rms(y0, &scale);
    let d1 = rms(f0, &scale);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = vec![0.0; dim];
    for i in 0..dim {
        y1[i] = y0[i] + h0 * f0[i];
    }
    let mut f1 = vec![0.0; dim];
    rhs(t0 + h0, &y1, &mut f1);
    stats.rhs_evaluations += 1;
    let mut diff = vec![0.0; dim];
    for i in 0..dim {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = rms(&diff, &scale) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(t_end - t0)
}

fn rms(v: &[f64], scale: &[f64]) -> f64 {
    let s: f64 = v
        .iter()
        .zip(scale)
        .map(|(x, sc)| (x / sc) * (x / sc))
        .sum();
    (s / v.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_accuracy() {
        let omega = 2.0;
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -omega * omega * y[0];
        };
        let t_end = 20.0 * std::f64::consts::PI / omega;
        let samples: Vec<f64> = (0..=400).map(|i| t_end * i as f64 / 400.0).collect();
        let mut max_err = 0.0f64;
        let stats = integrate_adaptive(
            rhs,
            0.0,
            &[1.0, 0.0],
            t_end,
            1e-10,
            1e-13,
            &samples,
            |_, t, y| {
                let exact = (omega * t).cos();
                max_err = max_err.max((y[0] - exact).abs());
            },
        )
        .unwrap();
        assert!(max_err < 1e-8, "max err {max_err}");
        assert!(stats.accepted_steps > 0);
    }

    #[test]
    fn exponential_decay_dense_output() {
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = -y[0];
        };
        let samples: Vec<f64> = (0..=100).map(|i| 5.0 * i as f64 / 100.0).collect();
        let mut pts = Vec::new();
        integrate_adaptive(rhs, 0.0, &[1.0], 5.0, 1e-9, 1e-12, &samples, |_, t, y| {
            pts.push((t, y[0]));
        })
        .unwrap();
        assert_eq!(pts.len(), samples.len());
        for (t, v) in pts {
            assert!((v - (-t).exp()).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn rejects_empty_span() {
        let rhs = |_t: f64, _y: &[f64], dy: &mut [f64]| {
            dy[0] = 0.0;
        };
        assert!(integrate_adaptive(rhs, 1.0, &[1.0], 1.0, 1e-9, 1e-12, &[], |_, _, _| {}).is_err());
    }

    #[test]
    fn tighter_tolerance_reduces_error() {
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let t_end = 100.0;
        let samples = [t_end];
        let mut errs = Vec::new();
        for tol in [1e-5, 1e-7, 1e-9, 1e-11] {
            let mut err = 0.0;
            integrate_adaptive(rhs, 0.0, &[1.0, 0.0], t_end, tol, tol * 1e-3, &samples, |_, t, y| {
                err = (y[0] - t.cos()).abs();
            })
            .unwrap();
            errs.push(err);
        }
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "errors not decreasing: {errs:?}");
        }
    }
}
