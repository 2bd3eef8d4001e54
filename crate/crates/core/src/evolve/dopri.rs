//! Dormand–Prince 5(4) with embedded error control for autonomous linear
//! systems on complex matrices.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::C64;

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

fn combine(y: &Array2<C64>, h: f64, terms: &[(f64, &Array2<C64>)]) -> Array2<C64> {
    let mut out = y.clone();
    for &(w, k) in terms {
        if w != 0.0 {
            out.scaled_add(C64::new(h * w, 0.0), k);
        }
    }
    out
}

/// Worst entry of the scaled local error; every matrix element must meet
/// `atol + rtol·|y|`.
fn error_norm(err: &Array2<C64>, y: &Array2<C64>, y_new: &Array2<C64>, tol: Tolerances) -> f64 {
    err.iter()
        .zip(y.iter().zip(y_new.iter()))
        .map(|(e, (a, b))| e.norm() / (tol.atol + tol.rtol * a.norm().max(b.norm())))
        .fold(0.0, f64::max)
}

fn rms(m: &Array2<C64>) -> f64 {
    (m.iter().map(|z| z.norm_sqr()).sum::<f64>() / m.len() as f64).sqrt()
}

/// Integrates `dy/dt = f(y)` from `times[0]`, returning `y` at every entry of
/// `times` (increasing). `after_step` runs on every accepted step and may
/// modify the state in place.
pub(crate) fn integrate<F, G>(
    f: F,
    y0: Array2<C64>,
    times: &[f64],
    tol: Tolerances,
    mut after_step: G,
) -> Result<Vec<Array2<C64>>>
where
    F: Fn(&Array2<C64>) -> Array2<C64>,
    G: FnMut(&mut Array2<C64>),
{
    let mut out = Vec::with_capacity(times.len());
    let Some(&t0) = times.first() else {
        return Ok(out);
    };
    let span = times[times.len() - 1] - t0;
    let mut y = y0;
    let mut t = t0;
    out.push(y.clone());

    let f0 = f(&y);
    let (d0, d1) = (rms(&y), rms(&f0));
    let mut h = if d0 > 1e-5 && d1 > 1e-5 { 0.01 * d0 / d1 } else { 1e-6 * span };
    h = h.min(span).max(f64::EPSILON * span);
    let h_min = 16.0 * f64::EPSILON * span.max(t0.abs());

    let mut steps = 0usize;
    for &target in &times[1..] {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            let k1 = f(&y);
            let k2 = f(&combine(&y, step, &[(A21, &k1)]));
            let k3 = f(&combine(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(&combine(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(&combine(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(&combine(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = combine(&y, step, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(&y_new);
            let err_vec = combine(
                &Array2::zeros(y.dim()),
                step,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            );
            let err = error_norm(&err_vec, &y, &y_new, tol);

            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepSizeTooLarge { t, h: step });
            }

            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                after_step(&mut y);
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // a step clipped to hit an output time says little about the
                // natural step size, so only grow from unclipped steps
                if !last {
                    h = step * factor;
                } else {
                    h = h.max(step * factor.min(1.0));
                }
            } else {
                let factor = (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                h = step * factor;
                if h < h_min || !err.is_finite() {
                    return Err(Error::StepSizeTooLarge { t, h });
                }
            }
        }
        out.push(y.clone());
    }
    log::debug!("dopri5: {steps} steps over [{t0:e}, {:e}]", t);
    Ok(out)
}
