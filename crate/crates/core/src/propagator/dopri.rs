//! Dormand–Prince 5(4) with step-size control and the standard fourth-order
//! continuous extension, for small fixed-size complex systems `y' = f(t, y)`.
//!
//! Output samples are interpolated from the dense output, so the accepted step
//! sequence depends only on the tolerances, never on where samples are taken.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// Fifth-order weights; also the last row of the tableau (FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug)]
pub(crate) struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

type State<const N: usize> = [C64; N];

#[inline]
fn axpy<const N: usize>(y: &State<N>, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (coef, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += *ki * *coef;
        }
    }
    out
}

fn scaled_norm<const N: usize>(err: &State<N>, y0: &State<N>, y1: &State<N>, ctl: &StepControl) -> f64 {
    (0..N)
        .map(|i| {
            let sc = ctl.abs_tol + ctl.rel_tol * y0[i].norm().max(y1[i].norm());
            err[i].norm() / sc
        })
        .fold(0.0, f64::max)
}

fn initial_step<const N: usize, F>(rhs: &F, t0: f64, y0: &State<N>, f0: &State<N>, span: f64, ctl: &StepControl) -> f64
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    let d0 = scaled_norm(y0, y0, y0, ctl);
    let d1 = scaled_norm(f0, y0, y0, ctl);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span).min(ctl.max_step);
    let y1 = axpy(y0, &[(h0, f0)]);
    let f1 = rhs(t0 + h0, &y1);
    let diff = axpy(&f1, &[(-1.0, f0)]);
    let d2 = scaled_norm(&diff, y0, y0, ctl) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(span).min(ctl.max_step)
}

/// Integrates from `t0` to `t1` and returns the state at each of
/// `sample_times` (sorted, inside `[t0, t1]`).
///
/// A sample exactly at `t1` receives the final step's endpoint, not an
/// interpolant.
pub(crate) fn integrate<const N: usize, F>(
    rhs: F,
    t0: f64,
    t1: f64,
    y0: State<N>,
    sample_times: &[f64],
    ctl: &StepControl,
) -> Result<Vec<State<N>>>
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    debug_assert!(t1 > t0);
    debug_assert!(sample_times.windows(2).all(|w| w[0] <= w[1]));

    let mut out = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        out.push(y0);
        next_sample += 1;
    }

    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = initial_step(&rhs, t, &y, &k1, span, ctl);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while t < t1 {
        if steps >= ctl.max_steps {
            return Err(Error::StepBudgetExhausted {
                t,
                max_steps: ctl.max_steps,
            });
        }
        if h < 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepSizeUnderflow { t, step: h });
        }
        let last_step = t + h >= t1 || (t1 - (t + h)) < 1e-12 * span;
        let h_try = if last_step { t1 - t } else { h };

        let k2 = rhs(t + C2 * h_try, &axpy(&y, &[(h_try * A21, &k1)]));
        let k3 = rhs(t + C3 * h_try, &axpy(&y, &[(h_try * A31, &k1), (h_try * A32, &k2)]));
        let k4 = rhs(
            t + C4 * h_try,
            &axpy(&y, &[(h_try * A41, &k1), (h_try * A42, &k2), (h_try * A43, &k3)]),
        );
        let k5 = rhs(
            t + C5 * h_try,
            &axpy(
                &y,
                &[
                    (h_try * A51, &k1),
                    (h_try * A52, &k2),
                    (h_try * A53, &k3),
                    (h_try * A54, &k4),
                ],
            ),
        );
        let k6 = rhs(
            t + h_try,
            &axpy(
                &y,
                &[
                    (h_try * A61, &k1),
                    (h_try * A62, &k2),
                    (h_try * A63, &k3),
                    (h_try * A64, &k4),
                    (h_try * A65, &k5),
                ],
            ),
        );
        let y_new = axpy(
            &y,
            &[
                (h_try * B1, &k1),
                (h_try * B3, &k3),
                (h_try * B4, &k4),
                (h_try * B5, &k5),
                (h_try * B6, &k6),
            ],
        );
        let t_new = if last_step { t1 } else { t + h_try };
        let k7 = rhs(t_new, &y_new);
        steps += 1;

        let zero = [C64::new(0.0, 0.0); N];
        let err = axpy(
            &zero,
            &[
                (h_try * E1, &k1),
                (h_try * E3, &k3),
                (h_try * E4, &k4),
                (h_try * E5, &k5),
                (h_try * E6, &k6),
                (h_try * E7, &k7),
            ],
        );
        let err_norm = scaled_norm(&err, &y, &y_new, ctl);

        if err_norm <= 1.0 {
            // Dense output coefficients for the accepted step.
            let r2 = axpy(&y_new, &[(-1.0, &y)]);
            let r3 = axpy(&zero, &[(h_try, &k1), (-1.0, &r2)]);
            let r4 = axpy(&r2, &[(-h_try, &k7), (-1.0, &r3)]);
            let r5 = axpy(
                &zero,
                &[
                    (h_try * D1, &k1),
                    (h_try * D3, &k3),
                    (h_try * D4, &k4),
                    (h_try * D5, &k5),
                    (h_try * D6, &k6),
                    (h_try * D7, &k7),
                ],
            );
            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let ts = sample_times[next_sample];
                if ts >= t_new {
                    out.push(y_new);
                } else {
                    let s = (ts - t) / h_try;
                    let s1 = 1.0 - s;
                    let mut v = [C64::new(0.0, 0.0); N];
                    for i in 0..N {
                        v[i] = y[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * s1) * s) * s1) * s;
                    }
                    out.push(v);
                }
                next_sample += 1;
            }

            let mut factor = if err_norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if last_rejected {
                factor = factor.min(1.0);
            }
            last_rejected = false;
            // A shortened final step must not shrink the proposal.
            h = (h.max(h_try) * factor).min(ctl.max_step);
            t = t_new;
            y = y_new;
            k1 = k7;
        } else {
            last_rejected = true;
            h = h_try * (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }

    while next_sample < sample_times.len() {
        out.push(y);
        next_sample += 1;
    }
    Ok(out)
}
