//! Runge-Kutta kernels shared by the flow and profile integrators.
//!
//! Two schemes cover every deterministic integration in the crate:
//!
//! * classic RK4 with step doubling (Richardson estimate, local
//!   extrapolation), used for the Loewner flows where the right-hand side
//!   carries a moving singularity and the caller supplies a state-dependent
//!   step cap;
//! * an embedded Dormand-Prince 5(4) pair for the smooth second-order
//!   profile equation, where plain error-per-step control is enough.

use crate::error::{Error, Result};

/// Minimal state interface for the integrators. `axpy` is `self + a * rhs`,
/// `dist` a max-norm of the difference, `scaled_err` the usual
/// componentwise error norm against `atol + rtol * |y|`.
pub trait OdeState: Copy {
    fn axpy(self, a: f64, rhs: Self) -> Self;
    fn dist(self, other: Self) -> f64;
    fn scaled_err(err: Self, y0: Self, y1: Self, atol: f64, rtol: f64) -> f64;
}

impl OdeState for f64 {
    fn axpy(self, a: f64, rhs: Self) -> Self {
        self + a * rhs
    }
    fn dist(self, other: Self) -> f64 {
        (self - other).abs()
    }
    fn scaled_err(err: Self, y0: Self, y1: Self, atol: f64, rtol: f64) -> f64 {
        err.abs() / (atol + rtol * y0.abs().max(y1.abs()))
    }
}

impl OdeState for num_complex::Complex64 {
    fn axpy(self, a: f64, rhs: Self) -> Self {
        self + a * rhs
    }
    fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }
    fn scaled_err(err: Self, y0: Self, y1: Self, atol: f64, rtol: f64) -> f64 {
        err.norm() / (atol + rtol * y0.norm().max(y1.norm()))
    }
}

impl OdeState for [f64; 2] {
    fn axpy(self, a: f64, rhs: Self) -> Self {
        [self[0] + a * rhs[0], self[1] + a * rhs[1]]
    }
    fn dist(self, other: Self) -> f64 {
        (self[0] - other[0]).abs().max((self[1] - other[1]).abs())
    }
    fn scaled_err(err: Self, y0: Self, y1: Self, atol: f64, rtol: f64) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
            m = m.max(err[i].abs() / sc);
        }
        m
    }
}

/// One classic RK4 step of signed size `h`.
pub fn rk4_step<S: OdeState>(f: &impl Fn(f64, S) -> S, t: f64, y: S, h: f64) -> S {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, y.axpy(0.5 * h, k1));
    let k3 = f(t + 0.5 * h, y.axpy(0.5 * h, k2));
    let k4 = f(t + h, y.axpy(h, k3));
    // y + h/6 (k1 + 2 k2 + 2 k3 + k4)
    y.axpy(h / 6.0, k1)
        .axpy(h / 3.0, k2)
        .axpy(h / 3.0, k3)
        .axpy(h / 6.0, k4)
}

/// Controls for [`integrate_rk4`]. `tol` bounds the Richardson estimate of
/// the local error per step.
#[derive(Debug, Clone, Copy)]
pub struct Rk4Opts {
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
}

impl Default for Rk4Opts {
    fn default() -> Self {
        Rk4Opts {
            tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-15,
        }
    }
}

/// Adaptive RK4 with step doubling from `t0` to `t1` (either direction).
///
/// `cap` bounds the unsigned step from the current state, which is how the
/// Loewner flows keep steps proportional to the squared distance from the
/// driving singularity. `watch` inspects every accepted state and may abort
/// with a flow-specific error (swallowing, blowup).
pub fn integrate_rk4<S: OdeState>(
    f: &impl Fn(f64, S) -> S,
    t0: f64,
    t1: f64,
    y0: S,
    opts: Rk4Opts,
    mut cap: impl FnMut(f64, S) -> f64,
    mut watch: impl FnMut(f64, S) -> Result<()>,
) -> Result<S> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let total = (t1 - t0).abs();
    if total == 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(total).max(opts.h_min);
    loop {
        let remaining = (t1 - t).abs();
        if remaining <= 0.0 {
            return Ok(y);
        }
        h = h.min(remaining).min(cap(t, y).max(opts.h_min));
        let hs = dir * h;
        let full = rk4_step(f, t, y, hs);
        let half = rk4_step(f, t, y, 0.5 * hs);
        let half2 = rk4_step(f, t + 0.5 * hs, half, 0.5 * hs);
        let err = full.dist(half2) / 15.0;
        if err <= opts.tol {
            t += hs;
            // local extrapolation: the doubled step is fifth-order accurate
            y = half2.axpy(1.0 / 15.0, half2).axpy(-1.0 / 15.0, full);
            watch(t, y)?;
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * (opts.tol / err).powf(0.25)).clamp(0.2, 5.0)
            };
            h = (h * grow).max(opts.h_min);
        } else {
            h *= (0.9 * (opts.tol / err).powf(0.25)).clamp(0.1, 0.9);
            if h < opts.h_min {
                return Err(Error::StiffnessFailure { u: t, h });
            }
        }
    }
}

const DP_A: [[f64; 6]; 6] = [
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
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// difference between the fifth- and fourth-order weights
const DP_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Controls for [`integrate_rk45`].
#[derive(Debug, Clone, Copy)]
pub struct Rk45Opts {
    pub atol: f64,
    pub rtol: f64,
    pub h_init: f64,
    pub h_min: f64,
}

impl Default for Rk45Opts {
    fn default() -> Self {
        Rk45Opts {
            atol: 1e-12,
            rtol: 1e-12,
            h_init: 1e-4,
            h_min: 1e-16,
        }
    }
}

/// Embedded Dormand-Prince 5(4) from `t0` to `t1` (either direction),
/// calling `watch` on every accepted step with the step's start and end.
pub fn integrate_rk45<S: OdeState>(
    f: &impl Fn(f64, S) -> S,
    t0: f64,
    t1: f64,
    y0: S,
    opts: Rk45Opts,
    mut watch: impl FnMut(f64, S, f64, S) -> Result<()>,
) -> Result<S> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let total = (t1 - t0).abs();
    if total == 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(total);
    let mut k1 = f(t, y);
    loop {
        let remaining = (t1 - t).abs();
        if remaining <= 0.0 {
            return Ok(y);
        }
        h = h.min(remaining);
        let hs = dir * h;
        let mut k = [k1, k1, k1, k1, k1, k1, k1];
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = DP_A[s - 1][j];
                if a != 0.0 {
                    ys = ys.axpy(hs * a, *kj);
                }
            }
            k[s] = f(t + DP_C[s - 1] * hs, ys);
        }
        // fifth-order solution is the stage-7 state (FSAL)
        let mut y5 = y;
        for (j, a) in DP_A[5].iter().enumerate() {
            if *a != 0.0 {
                y5 = y5.axpy(hs * a, k[j]);
            }
        }
        let mut ey = y;
        for (j, e) in DP_E.iter().enumerate() {
            if *e != 0.0 {
                ey = ey.axpy(hs * e, k[j]);
            }
        }
        let err = S::scaled_err(
            ey.axpy(-1.0, y),
            y,
            y5,
            opts.atol,
            opts.rtol,
        );
        if !err.is_finite() {
            // Overflowed stages poison the error estimate; a NaN would
            // otherwise survive clamp() and min() and stall the loop.
            h *= 0.1;
            if h < opts.h_min {
                return Err(Error::StiffnessFailure { u: t, h });
            }
        } else if err <= 1.0 {
            let t_prev = t;
            let y_prev = y;
            t += hs;
            y = y5;
            k1 = k[6];
            watch(t_prev, y_prev, t, y)?;
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= grow;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h < opts.h_min {
                return Err(Error::StiffnessFailure { u: t, h });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential() {
        let f = |_t: f64, y: f64| y;
        let y = integrate_rk4(
            &f,
            0.0,
            1.0,
            1.0,
            Rk4Opts::default(),
            |_, _| f64::INFINITY,
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((y - 1.0f64.exp()).abs() < 1e-11);
    }

    #[test]
    fn rk4_backward_direction() {
        let f = |_t: f64, y: f64| y;
        let y = integrate_rk4(
            &f,
            1.0,
            0.0,
            1.0f64.exp(),
            Rk4Opts::default(),
            |_, _| f64::INFINITY,
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((y - 1.0).abs() < 1e-11);
    }

    #[test]
    fn rk45_harmonic_oscillator() {
        // y'' = -y as a system; one full period returns the state
        let f = |_t: f64, y: [f64; 2]| [y[1], -y[0]];
        let y = integrate_rk45(
            &f,
            0.0,
            std::f64::consts::TAU,
            [1.0, 0.0],
            Rk45Opts::default(),
            |_, _, _, _| Ok(()),
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn rk45_reports_stiffness_on_blowup() {
        // y' = y^2 from y(0)=1 blows up at t=1; finite steps must underflow
        let f = |_t: f64, y: f64| y * y;
        let r = integrate_rk45(
            &f,
            0.0,
            2.0,
            1.0,
            Rk45Opts {
                h_min: 1e-12,
                ..Rk45Opts::default()
            },
            |_, _, _, _| Ok(()),
        );
        assert!(matches!(r, Err(Error::StiffnessFailure { .. })));
    }
}
