//! Dormand–Prince 5(4) embedded pair with a standard step-size controller.
//!
//! The integrator runs in either direction of the independent variable and
//! hands every accepted step to an observer that may stop the integration.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            max_steps: 200_000,
        }
    }
}

/// End state of an integration.
#[derive(Debug, Clone, Copy)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    /// Last proposed step size (signed); useful to warm-start the next call.
    pub h: f64,
    pub stopped: bool,
    pub steps: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[[f64; N]; 7], row: &[f64; 6], upto: usize) -> [f64; N] {
    let mut out = *y;
    for (j, kj) in k.iter().enumerate().take(upto) {
        let a = row[j];
        if a != 0.0 {
            for i in 0..N {
                out[i] += h * a * kj[i];
            }
        }
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction).
///
/// `h0` is the magnitude of the initial step guess; pass 0 to let the
/// integrator choose. `observe` sees every accepted `(t, y)`.
pub fn integrate<const N: usize, F, O>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    h0: f64,
    tol: Tolerances,
    mut observe: O,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> Flow,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(Outcome { t: t0, y: y0, h: h0, stopped: false, steps: 0 });
    }
    let dir = span.signum();
    let mut h = if h0 > 0.0 { h0.min(span.abs()) } else { (span.abs() * 1e-3).max(1e-6).min(span.abs()) };
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = rhs(t, &y);
    let mut steps = 0usize;
    let mut rejects = 0usize;
    loop {
        if steps + rejects >= tol.max_steps {
            return Err(Error::NoConvergence {
                what: "Runge-Kutta integration",
                iterations: steps + rejects,
                residual: (t1 - t).abs(),
            });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining * (1.0 - 1e-12);
        let hs = if last { remaining } else { h } * dir;
        for s in 1..7 {
            let ys = axpy(&y, hs, &k, &A[s], s);
            k[s] = rhs(t + C[s] * hs, &ys);
        }
        // FSAL: the seventh stage evaluates the 5th-order solution
        let y_new = axpy(&y, hs, &k, &A[6], 6);
        let mut err = 0.0f64;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            let r = (hs * e).abs() / scale;
            if r.is_nan() {
                err = f64::INFINITY;
            } else {
                err = err.max(r);
            }
        }
        if err <= 1.0 {
            steps += 1;
            t = if last { t1 } else { t + hs };
            y = y_new;
            k[0] = k[6];
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = hs.abs() * factor;
            if observe(t, &y) == Flow::Stop {
                return Ok(Outcome { t, y, h, stopped: true, steps });
            }
            if last {
                return Ok(Outcome { t, y, h, stopped: false, steps });
            }
        } else {
            rejects += 1;
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h = hs.abs() * factor;
            if h < 1e-14 * (t.abs() + span.abs()) {
                return Err(Error::NoConvergence {
                    what: "Runge-Kutta step size",
                    iterations: steps + rejects,
                    residual: err,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_forward_and_backward() {
        let tol = Tolerances { rtol: 1e-11, atol: 1e-14, ..Default::default() };
        let out = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 3.0, 0.0, tol, |_, _| Flow::Continue).unwrap();
        assert!((out.y[0] - (-3.0f64).exp()).abs() < 1e-11);
        let back = integrate(|_, y: &[f64; 1]| [-y[0]], 3.0, out.y, 0.0, 0.0, tol, |_, _| Flow::Continue).unwrap();
        assert!((back.y[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_and_stop() {
        let tol = Tolerances::default();
        let mut crossings = 0;
        let out = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            0.0,
            tol,
            |_, y| {
                if y[0] < 0.0 {
                    crossings += 1;
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            },
        )
        .unwrap();
        assert!(out.stopped);
        assert_eq!(crossings, 1);
        assert!(out.t > std::f64::consts::FRAC_PI_2 && out.t < 2.0);
    }
}
