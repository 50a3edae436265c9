//! Driving-process generation: the plain spiral driver, the coupled
//! force-point SDE, and the one-dimensional gap diffusion with absorption.
//!
//! All stochastic paths use Euler-Maruyama on a uniform grid with adaptive
//! sub-stepping near the cotangent singularities: within one grid interval
//! the sub-step shrinks while the drift displacement (and, for the
//! absorbed gap diffusion, the diffusion scale sqrt(kappa h)) exceeds a
//! tenth of the distance to the nearest singular angle. Interval attempts
//! that still overshoot a guard band are retried with a halved base
//! sub-step and fresh draws.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::angle::{self, Angle};
use crate::error::{Error, Result};
use crate::loewner::{boundary_flow_step, TOL_GAP};
use crate::params::SleParams;
use crate::rng::RngSpec;

/// Distance from an endpoint below which a gap excursion is resolved
/// exactly: sub-cut excursions last O(EPS_CUT^2), so their time is
/// negligible and the absorb-or-return split is the local scale-law
/// ratio (theta / EPS_CUT)^((8-kappa)/kappa).
pub const EPS_CUT: f64 = 1e-3;
/// Default cap on simulated time before a gap path is declared stuck.
pub const DEFAULT_T_CAP: f64 = 50.0;
/// Base sub-step halvings tried before an interval aborts the path.
pub const MAX_HALVINGS: u32 = 40;

/// Driver path on a uniform grid. `v` is present when a force point is
/// tracked alongside the driver; both are continuous angle branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingPath {
    pub dt: f64,
    pub xi: Vec<f64>,
    pub v: Option<Vec<f64>>,
}

impl DrivingPath {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.xi.len()).map(move |k| k as f64 * self.dt)
    }

    pub fn t_final(&self) -> f64 {
        (self.xi.len().saturating_sub(1)) as f64 * self.dt
    }

    /// Writes `t,xi[,v]` rows with round-trip-precision floats.
    pub fn write_csv(&self, out: &mut impl std::io::Write) -> Result<()> {
        match &self.v {
            Some(v) => {
                writeln!(out, "t,xi,v")?;
                for (k, (x, w)) in self.xi.iter().zip(v).enumerate() {
                    writeln!(out, "{:.16e},{:.16e},{:.16e}", k as f64 * self.dt, x, w)?;
                }
            }
            None => {
                writeln!(out, "t,xi")?;
                for (k, x) in self.xi.iter().enumerate() {
                    writeln!(out, "{:.16e},{:.16e}", k as f64 * self.dt, x)?;
                }
            }
        }
        Ok(())
    }
}

fn grid_steps(t_total: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_total >= 0.0) || !(dt > 0.0) || !t_total.is_finite() || !dt.is_finite() {
        return Err(Error::Domain(format!(
            "need T >= 0 and dt > 0, got T={t_total} dt={dt}"
        )));
    }
    if t_total == 0.0 {
        return Ok((0, dt));
    }
    let n = (t_total / dt).round().max(1.0) as usize;
    Ok((n, t_total / n as f64))
}

/// Spiral driver xi_t = theta0 + sqrt(kappa) B_t + mu t on the grid; the
/// linear SDE makes the Euler step exact in law.
pub fn sample_radial_driver(
    p: SleParams,
    theta0: Angle,
    t_total: f64,
    dt: f64,
    rng: RngSpec,
) -> Result<DrivingPath> {
    let (n, dt) = grid_steps(t_total, dt)?;
    let mut rng = rng.build();
    let mut xi = Vec::with_capacity(n + 1);
    let mut x = theta0.radians();
    xi.push(x);
    let vol = (p.kappa * dt).sqrt();
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        x += p.mu * dt + vol * z;
        xi.push(x);
    }
    Ok(DrivingPath { dt, xi, v: None })
}

/// One grid interval of the coupled (xi, v) SDE
///
/// ```text
/// d xi = sqrt(kappa) dB + (rho/2) cot((xi - v)/2) dt + mu dt
/// d v  = cot((v - xi)/2) dt
/// ```
///
/// with adaptive sub-stepping; the deterministic v component advances by
/// the exact frozen-driver boundary flow. Returns the interval's end state
/// or retries with a halved base sub-step and fresh draws when the gap
/// leaves its guard band.
fn kappa_mu_rho_interval(
    p: SleParams,
    xi0: f64,
    v0: f64,
    dt: f64,
    t_start: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    'attempt: for halvings in 0..=MAX_HALVINGS {
        let base = dt / f64::powi(2.0, halvings as i32);
        let (mut x, mut w) = (xi0, v0);
        let mut remaining = dt;
        while remaining > 1e-18 * dt.max(1.0) {
            let gap = w - x;
            let margin = gap.min(TAU - gap);
            let drift = 0.5 * p.rho * angle::cot(0.5 * (x - w)) + p.mu;
            let mut h = base.min(remaining);
            let mut shrink = 0;
            while drift.abs() * h > 0.1 * margin {
                h *= 0.5;
                shrink += 1;
                if shrink > 60 {
                    continue 'attempt;
                }
            }
            let z: f64 = rng.sample(StandardNormal);
            let nx = x + drift * h + (p.kappa * h).sqrt() * z;
            let nw = match boundary_flow_step(Angle(w), Angle(x), h) {
                Ok(a) => a.radians(),
                Err(_) => continue 'attempt,
            };
            let ngap = nw - nx;
            if !(TOL_GAP..=TAU - TOL_GAP).contains(&ngap) {
                continue 'attempt;
            }
            x = nx;
            w = nw;
            remaining -= h;
        }
        return Ok((x, w));
    }
    Err(Error::GapCollapse {
        t: t_start,
        halvings: MAX_HALVINGS,
    })
}

pub(crate) fn kappa_mu_rho_path(
    p: SleParams,
    theta1: f64,
    theta2: f64,
    n_steps: usize,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let gap0 = angle::gap(theta1, theta2);
    if gap0 >= TAU - TOL_GAP || gap0 <= TOL_GAP {
        return Err(Error::Domain(format!(
            "force point must be separated from the driver, gap {gap0}"
        )));
    }
    let mut xi = Vec::with_capacity(n_steps + 1);
    let mut v = Vec::with_capacity(n_steps + 1);
    let (mut x, mut w) = (theta1, theta1 + gap0);
    xi.push(x);
    v.push(w);
    for k in 0..n_steps {
        let (nx, nw) = kappa_mu_rho_interval(p, x, w, dt, k as f64 * dt, rng)?;
        x = nx;
        w = nw;
        xi.push(x);
        v.push(w);
    }
    Ok((xi, v))
}

/// Coupled driver/force-point path started from (theta1, theta2).
pub fn sample_kappa_mu_rho_driver(
    p: SleParams,
    theta1: Angle,
    theta2: Angle,
    t_total: f64,
    dt: f64,
    rng: RngSpec,
) -> Result<DrivingPath> {
    if !(p.kappa < 8.0) {
        return Err(Error::Domain(format!(
            "coupled driver needs kappa in [0,8), got {}",
            p.kappa
        )));
    }
    if !(p.rho > -2.0) {
        return Err(Error::Domain(format!(
            "coupled driver needs rho > -2, got {}",
            p.rho
        )));
    }
    let (n, dt) = grid_steps(t_total, dt)?;
    let mut rng = rng.build();
    let (xi, v) = kappa_mu_rho_path(p, theta1.radians(), theta2.radians(), n, dt, &mut rng)?;
    Ok(DrivingPath { dt, xi, v: Some(v) })
}

/// Which endpoint of (0, 2 pi) absorbed the gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Zero,
    TwoPi,
}

/// Gap diffusion path run to absorption at an endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapAbsorption {
    pub dt: f64,
    /// Node values up to the last full grid node before absorption.
    pub values: Vec<f64>,
    pub t_absorb: f64,
    pub side: Side,
}

/// Outcome of running the gap diffusion to a fixed horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum GapOutcome {
    Absorbed { t: f64, side: Side },
    Alive { theta: f64 },
}

fn gap_drift(kappa: f64, theta: f64) -> f64 {
    0.5 * (kappa - 4.0) * angle::cot(0.5 * theta)
}

/// One adaptive EM sub-step of d theta = sqrt(kappa) dB + (kappa-4)/2
/// cot(theta/2) dt; returns (new theta, h used).
fn gap_substep(kappa: f64, theta: f64, h_base: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let margin = theta.min(TAU - theta).max(EPS_CUT * 0.5);
    let drift = gap_drift(kappa, theta);
    // Both the drift displacement and the diffusion scale sqrt(kappa h)
    // must stay a small fraction of the boundary distance. Without the
    // second bound the near-boundary noise is a constant fraction of the
    // margin at every dt, which distorts absorption statistics by an
    // amount that decays only like the boundary-layer weight.
    let cap = 0.1 * margin;
    let mut h = h_base;
    while (drift.abs() * h > cap || kappa * h > cap * cap) && h > 1e-18 {
        h *= 0.5;
    }
    let z: f64 = rng.sample(StandardNormal);
    (theta + drift * h + (kappa * h).sqrt() * z, h)
}

/// Runs the gap diffusion until absorption or `horizon`; when `record` is
/// given, node values at whole grid times are appended to it.
pub(crate) fn run_gap(
    kappa: f64,
    theta0: f64,
    dt: f64,
    horizon: f64,
    cap_is_error: bool,
    mut record: Option<&mut Vec<f64>>,
    rng: &mut ChaCha8Rng,
) -> Result<GapOutcome> {
    if !(kappa > 0.0 && kappa < 8.0) {
        return Err(Error::Domain(format!(
            "gap diffusion needs kappa in (0,8), got {kappa}"
        )));
    }
    if !(theta0 > EPS_CUT && theta0 < TAU - EPS_CUT) {
        return Err(Error::Domain(format!(
            "gap start must lie inside the exit cuts, got {theta0}"
        )));
    }
    let scale_pow = (8.0 - kappa) / kappa;
    let mut theta = theta0;
    let mut t = 0.0;
    if let Some(rec) = record.as_deref_mut() {
        rec.push(theta);
    }
    while t < horizon {
        let interval = dt.min(horizon - t);
        let mut rem = interval;
        while rem > 1e-18 {
            let (next, h) = gap_substep(kappa, theta, rem, rng);
            if next <= EPS_CUT {
                if rng.random::<f64>() >= (next.max(0.0) / EPS_CUT).powf(scale_pow) {
                    let frac = ((theta - EPS_CUT) / (theta - next)).clamp(0.0, 1.0);
                    return Ok(GapOutcome::Absorbed {
                        t: t + (interval - rem) + frac * h,
                        side: Side::Zero,
                    });
                }
                theta = EPS_CUT;
                rem -= h;
                continue;
            }
            if next >= TAU - EPS_CUT {
                if rng.random::<f64>() >= ((TAU - next).max(0.0) / EPS_CUT).powf(scale_pow) {
                    let frac = ((TAU - EPS_CUT - theta) / (next - theta)).clamp(0.0, 1.0);
                    return Ok(GapOutcome::Absorbed {
                        t: t + (interval - rem) + frac * h,
                        side: Side::TwoPi,
                    });
                }
                theta = TAU - EPS_CUT;
                rem -= h;
                continue;
            }
            theta = next;
            rem -= h;
        }
        t += interval;
        if let Some(rec) = record.as_deref_mut() {
            rec.push(theta);
        }
    }
    if cap_is_error {
        Err(Error::MaxTimeExceeded { t_cap: horizon })
    } else {
        Ok(GapOutcome::Alive { theta })
    }
}

/// Simulates the absorbed gap diffusion and returns the recorded path,
/// the interpolated absorption time, and the side taken.
pub fn sample_gap_process(
    kappa: f64,
    theta_gap0: f64,
    dt: f64,
    t_cap: f64,
    rng: RngSpec,
) -> Result<GapAbsorption> {
    let (_, dt) = grid_steps(t_cap, dt)?;
    let mut values = Vec::new();
    let mut chacha = rng.build();
    match run_gap(kappa, theta_gap0, dt, t_cap, true, Some(&mut values), &mut chacha)? {
        GapOutcome::Absorbed { t, side } => Ok(GapAbsorption {
            dt,
            values,
            t_absorb: t,
            side,
        }),
        GapOutcome::Alive { .. } => unreachable!("cap_is_error guarantees an error"),
    }
}

pub(crate) fn absorption_time(
    kappa: f64,
    theta0: f64,
    dt: f64,
    t_cap: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, Side)> {
    match run_gap(kappa, theta0, dt, t_cap, true, None, rng)? {
        GapOutcome::Absorbed { t, side } => Ok((t, side)),
        GapOutcome::Alive { .. } => unreachable!("cap_is_error guarantees an error"),
    }
}
