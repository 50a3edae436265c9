//! Path samplers built on the drivers and the Loewner engine: single-curve
//! traces, the alternating two-curve sampler, and Monte Carlo estimators
//! for the conformal-radius moment and its martingale.

use std::f64::consts::TAU;

use crate::angle::{self, Angle};
use crate::drivers::{
    absorption_time, kappa_mu_rho_path, run_gap, sample_radial_driver, DrivingPath, GapOutcome,
    Side, DEFAULT_T_CAP, EPS_CUT,
};
use crate::error::{Error, Result};
use crate::loewner::{preimage_point, CurveTrace, LoewnerChain, EPS_TIP, TOL_GAP};
use crate::mc::{map_paths, McEstimate};
use crate::params::SleParams;
use crate::partition::{cr_moment_exact, moment_threshold};
use crate::rng::RngSpec;

/// A sampled single curve: its driver, the chain built from it, and tip
/// positions along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTrace {
    pub driver: DrivingPath,
    pub chain: LoewnerChain,
    pub trace: CurveTrace,
}

/// Samples a radial driver and traces the curve at `n_trace` roughly
/// equispaced capacity times (plus the start point on the circle).
pub fn trace_radial_sle(
    p: SleParams,
    theta0: Angle,
    t_total: f64,
    dt: f64,
    n_trace: usize,
    rng: RngSpec,
) -> Result<RadialTrace> {
    if n_trace == 0 {
        return Err(Error::Domain("trace needs at least one sample time".into()));
    }
    let driver = sample_radial_driver(p, theta0, t_total, dt, rng)?;
    let chain = chain_from_nodes(driver.dt, &driver.xi)?;
    let trace = trace_at_nodes(&chain, &driver.xi, driver.dt, n_trace)?;
    Ok(RadialTrace {
        driver,
        chain,
        trace,
    })
}

/// Samples the coupled driver/force-point SDE and traces the attached
/// curve; the force-point angle rides along in the returned driver.
pub fn trace_forced_radial(
    p: SleParams,
    theta1: Angle,
    theta2: Angle,
    t_total: f64,
    dt: f64,
    n_trace: usize,
    rng: RngSpec,
) -> Result<RadialTrace> {
    if n_trace == 0 {
        return Err(Error::Domain("trace needs at least one sample time".into()));
    }
    let driver = crate::drivers::sample_kappa_mu_rho_driver(p, theta1, theta2, t_total, dt, rng)?;
    let chain = chain_from_nodes(driver.dt, &driver.xi)?;
    let trace = trace_at_nodes(&chain, &driver.xi, driver.dt, n_trace)?;
    Ok(RadialTrace {
        driver,
        chain,
        trace,
    })
}

/// Piecewise-constant chain from driver node values (left endpoints).
fn chain_from_nodes(dt: f64, xi: &[f64]) -> Result<LoewnerChain> {
    let mut chain = LoewnerChain::new();
    for &x in &xi[..xi.len() - 1] {
        chain.push(dt, Angle(x))?;
    }
    Ok(chain)
}

/// Tip positions at `n_trace` node indices spread over the chain, each
/// computed as the preimage of the slightly retracted driver node.
fn trace_at_nodes(
    chain: &LoewnerChain,
    xi: &[f64],
    dt: f64,
    n_trace: usize,
) -> Result<CurveTrace> {
    let n = chain.len();
    let mut times = Vec::with_capacity(n_trace + 1);
    let mut points = Vec::with_capacity(n_trace + 1);
    let mut last = usize::MAX;
    for j in 0..=n_trace {
        let k = ((j as f64 / n_trace as f64) * n as f64).round() as usize;
        let k = k.min(n);
        if k == last {
            continue;
        }
        last = k;
        times.push(k as f64 * dt);
        if k == 0 {
            points.push(Angle(xi[0]).unit_point());
        } else {
            let w = Angle(xi[k]).unit_point() * (1.0 - EPS_TIP);
            points.push(preimage_point(&chain.prefix(k), w)?);
        }
    }
    Ok(CurveTrace { times, points })
}

/// Common-chain state of a two-curve sample: the shared chain, the current
/// driving angles, how much capacity each curve has grown, and the first
/// driver increment of curve 1 (kept for distribution checks).
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub chain: LoewnerChain,
    pub theta1_t: f64,
    pub theta2_t: f64,
    pub cap1: f64,
    pub cap2: f64,
    pub first_inc1: f64,
}

/// A sampled pair with tip traces recorded at episode ends.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub state: PairState,
    pub trace1: CurveTrace,
    pub trace2: CurveTrace,
}

fn validate_pair_inputs(p: SleParams, t_total: f64, eps_step: f64) -> Result<()> {
    if !(p.kappa >= 0.0 && p.kappa < 8.0) {
        return Err(Error::Domain(format!(
            "pair sampler needs kappa in [0,8), got {}",
            p.kappa
        )));
    }
    if !(p.rho > -2.0) {
        return Err(Error::Domain(format!(
            "pair sampler needs rho > -2, got {}",
            p.rho
        )));
    }
    if !(t_total > 0.0 && eps_step > 0.0) {
        return Err(Error::Domain(format!(
            "pair sampler needs positive capacity and episode size, got ({t_total}, {eps_step})"
        )));
    }
    Ok(())
}

/// Grows the two curves on a common chain, alternating episodes of
/// `eps_step` capacity starting with curve 1, and calls `on_episode`
/// with the state after each episode. The two curves draw from the
/// derived streams `2 s` and `2 s + 1` of the input stream `s`, so a
/// curve's draws do not depend on the other curve's schedule.
fn pair_core(
    p: SleParams,
    theta1: f64,
    theta2: f64,
    t_total: f64,
    eps_step: f64,
    rng: RngSpec,
    mut on_episode: impl FnMut(&LoewnerChain, f64, f64) -> Result<()>,
) -> Result<PairState> {
    validate_pair_inputs(p, t_total, eps_step)?;
    let gap0 = angle::gap(theta1, theta2);
    if gap0 <= TOL_GAP || gap0 >= TAU - TOL_GAP {
        return Err(Error::Domain(format!(
            "pair needs separated start angles, gap {gap0}"
        )));
    }
    let dt_em = 1e-3f64.min(eps_step / 8.0);
    let mut rng1 = rng.with_stream(2 * rng.stream).build();
    let mut rng2 = rng.with_stream(2 * rng.stream + 1).build();

    let mut chain = LoewnerChain::new();
    let (mut a1, mut a2) = (theta1, theta2);
    let (mut cap1, mut cap2) = (0.0, 0.0);
    let mut first_inc1 = f64::NAN;
    let mut episode = 0usize;
    let mut grown = 0.0;
    while grown < t_total - 1e-12 {
        let cap = eps_step.min(t_total - grown);
        let n = (cap / dt_em).ceil().max(1.0) as usize;
        let dt_ep = cap / n as f64;
        let own_is_first = episode.is_multiple_of(2);
        let (own, other, rng_own) = if own_is_first {
            (a1, a2, &mut rng1)
        } else {
            (a2, a1, &mut rng2)
        };
        let (xi, v) = kappa_mu_rho_path(p, own, other, n, dt_ep, rng_own)?;
        for &x in &xi[..n] {
            chain.push(dt_ep, Angle(x))?;
        }
        // v starts on the branch own + gap(own, other); undo that shift
        let other_end = v[n] - (v[0] - other);
        if own_is_first {
            a1 = xi[n];
            a2 = other_end;
            cap1 += cap;
            if episode == 0 {
                first_inc1 = xi[1] - xi[0];
            }
        } else {
            a2 = xi[n];
            a1 = other_end;
            cap2 += cap;
        }
        grown += cap;
        episode += 1;
        on_episode(&chain, a1, a2)?;
    }
    Ok(PairState {
        chain,
        theta1_t: a1,
        theta2_t: a2,
        cap1,
        cap2,
        first_inc1,
    })
}

/// Pair sample without traces, for distribution batteries.
pub fn sample_pair_state(
    p: SleParams,
    theta1: Angle,
    theta2: Angle,
    t_total: f64,
    eps_step: f64,
    rng: RngSpec,
) -> Result<PairState> {
    pair_core(
        p,
        theta1.radians(),
        theta2.radians(),
        t_total,
        eps_step,
        rng,
        |_, _, _| Ok(()),
    )
}

/// Grows the two curves and records both tips after every episode.
pub fn sample_two_sided_pair(
    p: SleParams,
    theta1: Angle,
    theta2: Angle,
    t_total: f64,
    eps_step: f64,
    rng: RngSpec,
) -> Result<PairSample> {
    let mut trace1 = CurveTrace {
        times: vec![0.0],
        points: vec![theta1.unit_point()],
    };
    let mut trace2 = CurveTrace {
        times: vec![0.0],
        points: vec![theta2.unit_point()],
    };
    let state = pair_core(
        p,
        theta1.radians(),
        theta2.radians(),
        t_total,
        eps_step,
        rng,
        |chain, a1, a2| {
            let t = chain.total_capacity();
            trace1.times.push(t);
            trace1
                .points
                .push(preimage_point(chain, Angle(a1).unit_point() * (1.0 - EPS_TIP))?);
            trace2.times.push(t);
            trace2
                .points
                .push(preimage_point(chain, Angle(a2).unit_point() * (1.0 - EPS_TIP))?);
            Ok(())
        },
    )?;
    Ok(PairSample {
        state,
        trace1,
        trace2,
    })
}

fn validate_moment_inputs(kappa: f64, alpha: f64, theta0: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 8.0) {
        return Err(Error::Domain(format!(
            "moment estimate needs kappa in (0,8), got {kappa}"
        )));
    }
    if !(theta0 > EPS_CUT && theta0 < TAU - EPS_CUT) {
        return Err(Error::Domain(format!(
            "moment estimate needs theta0 inside the exit cuts, got {theta0}"
        )));
    }
    if alpha < 0.0 {
        return Err(Error::Domain(format!(
            "moment weight must be nonnegative, got {alpha}"
        )));
    }
    let bound = moment_threshold(kappa);
    if alpha >= bound {
        return Err(Error::Divergent { alpha, bound });
    }
    Ok(bound)
}

/// Horizon that keeps the truncated tail of `exp(alpha T)` far below the
/// Monte Carlo resolution while staying finite for near-critical weights.
fn moment_horizon(lam: f64, alpha: f64) -> f64 {
    let margin = (lam - alpha.max(0.0)).max(0.05);
    (40.0 / margin).max(DEFAULT_T_CAP)
}

fn variance_is_unbounded(kappa: f64, alpha: f64) -> bool {
    alpha > 0.8 * (1.0 - kappa / 8.0)
}

fn moment_paths(
    kappa: f64,
    alpha: f64,
    theta0: f64,
    n_paths: u64,
    dt: f64,
    rng: RngSpec,
) -> Result<Vec<(f64, Side)>> {
    let lam = validate_moment_inputs(kappa, alpha, theta0)?;
    let t_cap = moment_horizon(lam, alpha);
    map_paths(n_paths, |i| {
        let mut chacha = rng.with_stream(rng.stream + i).build();
        let (t, side) = absorption_time(kappa, theta0, dt, t_cap, &mut chacha)?;
        Ok(((alpha * t).exp(), side))
    })
}

/// One-sided split of the moment estimate: `left` collects the paths whose
/// gap closed at `2 pi`, `right` those that closed at `0`; each mean is
/// taken over all `n` paths with the other side's values zeroed out, so
/// the two means add up to the plain estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidedMoment {
    pub left: McEstimate,
    pub right: McEstimate,
    pub n_left: u64,
    pub n_right: u64,
}

fn sided_from_paths(
    values: &[(f64, Side)],
    kappa: f64,
    alpha: f64,
    seed: RngSpec,
    dt: f64,
) -> SidedMoment {
    let mask = |keep: Side| -> Vec<f64> {
        values
            .iter()
            .map(|&(v, s)| if s == keep { v } else { 0.0 })
            .collect()
    };
    let warn = variance_is_unbounded(kappa, alpha);
    let mut left = McEstimate::from_values(&mask(Side::TwoPi), seed, dt, EPS_CUT);
    let mut right = McEstimate::from_values(&mask(Side::Zero), seed, dt, EPS_CUT);
    left.variance_warning = warn;
    right.variance_warning = warn;
    SidedMoment {
        left,
        right,
        n_left: values.iter().filter(|(_, s)| *s == Side::TwoPi).count() as u64,
        n_right: values.iter().filter(|(_, s)| *s == Side::Zero).count() as u64,
    }
}

/// Monte Carlo estimate of `E[exp(alpha T)]`, the `alpha`-th inverse-power
/// moment of the conformal radius left at the absorption time `T` of the
/// gap diffusion started from `theta0`.
///
/// The mean is defined as the sum of the two one-sided means from
/// [`estimate_cr_moment_sided`], so the split identity holds bitwise; the
/// standard error comes from the combined per-path values.
pub fn estimate_cr_moment(
    kappa: f64,
    alpha: f64,
    theta0: f64,
    n_paths: u64,
    dt: f64,
    rng: RngSpec,
) -> Result<McEstimate> {
    let paths = moment_paths(kappa, alpha, theta0, n_paths, dt, rng)?;
    let sided = sided_from_paths(&paths, kappa, alpha, rng, dt);
    let combined: Vec<f64> = paths.iter().map(|&(v, _)| v).collect();
    let mut est = McEstimate::from_values(&combined, rng, dt, EPS_CUT);
    est.mean = sided.left.mean + sided.right.mean;
    est.variance_warning = variance_is_unbounded(kappa, alpha);
    Ok(est)
}

/// The two one-sided contributions to the moment estimate, split by which
/// endpoint absorbed the gap.
pub fn estimate_cr_moment_sided(
    kappa: f64,
    alpha: f64,
    theta0: f64,
    n_paths: u64,
    dt: f64,
    rng: RngSpec,
) -> Result<SidedMoment> {
    let paths = moment_paths(kappa, alpha, theta0, n_paths, dt, rng)?;
    Ok(sided_from_paths(&paths, kappa, alpha, rng, dt))
}

/// Samples `exp(alpha min(T, t)) Phi(theta)` at the fixed time `t`, where
/// `Phi` is the exact moment function and `theta` the stopped gap. The
/// mean must reproduce `Phi(theta0)` for every `t` if the estimator, the
/// exact formula, and the diffusion are mutually consistent.
pub fn martingale_check(
    kappa: f64,
    alpha: f64,
    theta0: f64,
    t_fixed: f64,
    n_paths: u64,
    dt: f64,
    rng: RngSpec,
) -> Result<McEstimate> {
    validate_moment_inputs(kappa, alpha, theta0)?;
    if !(t_fixed >= 0.0) {
        return Err(Error::Domain(format!(
            "martingale check needs t >= 0, got {t_fixed}"
        )));
    }
    let values = map_paths(n_paths, |i| {
        let mut chacha = rng.with_stream(rng.stream + i).build();
        match run_gap(kappa, theta0, dt, t_fixed, false, None, &mut chacha)? {
            GapOutcome::Absorbed { t, .. } => Ok((alpha * t).exp()),
            GapOutcome::Alive { theta } => {
                Ok((alpha * t_fixed).exp() * cr_moment_exact(kappa, alpha, theta)?)
            }
        }
    })?;
    let mut est = McEstimate::from_values(&values, rng, dt, EPS_CUT);
    est.variance_warning = variance_is_unbounded(kappa, alpha);
    Ok(est)
}
