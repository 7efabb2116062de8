//! Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.

use crate::error::{PfkError, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct OdeSettings {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (same as the last row of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t1`. After every accepted step
/// `observe(t, y)` is called; returning `false` stops the integration there.
/// Returns the last accepted `(t, y)`.
pub(crate) fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    cfg: OdeSettings,
    mut observe: impl FnMut(f64, &[f64; N]) -> bool,
) -> Result<(f64, [f64; N])> {
    let mut t = t0;
    let mut y = y0;
    let mut h = cfg.initial_step.min(t1 - t0);
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    let mut steps = 0;
    while t < t1 {
        if steps >= cfg.max_steps {
            return Err(PfkError::NotConverged(format!(
                "ODE integration exceeded {} steps at t = {t}",
                cfg.max_steps
            )));
        }
        steps += 1;
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let mut stage = [0.0; N];
        for s in 1..7 {
            for i in 0..N {
                let mut acc = y[i];
                for (r, a) in A[s].iter().enumerate().take(s) {
                    acc += h * a * k[r][i];
                }
                stage[i] = acc;
            }
            k[s] = f(t + C[s] * h, &stage);
        }
        // stage now holds the fifth-order solution (FSAL)
        let mut err = 0.0f64;
        for i in 0..N {
            let mut e = 0.0;
            for s in 0..7 {
                e += (B5[s] - B4[s]) * k[s][i];
            }
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(stage[i].abs());
            err = err.max((h * e / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
            if h < 1e-14 * t1.abs().max(1.0) {
                return Err(PfkError::NotConverged(format!("ODE step underflow at t = {t}")));
            }
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = stage;
            k[0] = k[6];
            if !observe(t, &y) {
                return Ok((t, y));
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t1.abs().max(1.0) && t < t1 {
            return Err(PfkError::NotConverged(format!("ODE step underflow at t = {t}")));
        }
    }
    Ok((t, y))
}
