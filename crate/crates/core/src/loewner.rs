//! Discrete radial Loewner engine.
//!
//! A hull growing in the unit disc is encoded as a [`LoewnerChain`]:
//! ordered capacity increments with a driver angle held constant over each
//! step. The mapping-out function g solves
//!
//! ```text
//! dg/dt = g (e^{i xi} + g) / (e^{i xi} - g),   g_0(z) = z,
//! ```
//!
//! normalized so that g'(0) = e^t at capacity t. Forward and backward
//! flows are integrated per step with adaptive RK4; the steps near the
//! driving singularity are capped proportionally to the squared distance
//! from e^{i xi}, which the flow itself then grows quadratically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{self, Angle};
use crate::error::{Error, Result};
use crate::ode::{integrate_rk4, Rk4Opts};

/// Gap threshold below which a marked boundary angle counts as swallowed.
pub const TOL_GAP: f64 = 1e-8;
/// Distance to the driver point at which an interior point counts as
/// swallowed during forward flow.
pub const TOL_SWALLOW: f64 = 1e-8;
/// Allowed excursion outside the closed unit disc before the integration
/// is declared broken.
pub const TOL_GEOM: f64 = 1e-7;
/// Radial offset of the tip preimage start point from the unit circle.
pub const EPS_TIP: f64 = 1e-6;

/// One elementary capacity step with its frozen driver angle.
/// Serializes as a `[dt, xi]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct ChainStep {
    pub dt: f64,
    pub xi: f64,
}

impl From<(f64, f64)> for ChainStep {
    fn from((dt, xi): (f64, f64)) -> Self {
        ChainStep { dt, xi }
    }
}

impl From<ChainStep> for (f64, f64) {
    fn from(s: ChainStep) -> Self {
        (s.dt, s.xi)
    }
}

/// Piecewise-constant driving record of the discrete chain; the capacity
/// parametrization means total capacity is simply the sum of step sizes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoewnerChain {
    steps: Vec<ChainStep>,
}

impl LoewnerChain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one step. `dt` must be positive and finite.
    pub fn push(&mut self, dt: f64, xi: Angle) -> Result<()> {
        if !(dt > 0.0) || !dt.is_finite() || !xi.radians().is_finite() {
            return Err(Error::Domain(format!(
                "chain step needs dt > 0 and finite xi, got dt={dt} xi={}",
                xi.radians()
            )));
        }
        self.steps.push(ChainStep {
            dt,
            xi: xi.radians(),
        });
        Ok(())
    }

    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_capacity(&self) -> f64 {
        self.steps.iter().map(|s| s.dt).sum()
    }

    /// exp(-total capacity): the conformal radius of the complement seen
    /// from the origin.
    pub fn conformal_radius(&self) -> f64 {
        (-self.total_capacity()).exp()
    }

    /// Chain consisting of the first `n` steps.
    pub fn prefix(&self, n: usize) -> LoewnerChain {
        LoewnerChain {
            steps: self.steps[..n.min(self.steps.len())].to_vec(),
        }
    }
}

/// Sampled curve in the closed unit disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTrace {
    pub times: Vec<f64>,
    pub points: Vec<Complex64>,
}

impl CurveTrace {
    /// Writes `t,re,im` rows with round-trip-precision floats.
    pub fn write_csv(&self, out: &mut impl std::io::Write) -> Result<()> {
        writeln!(out, "t,re,im")?;
        for (t, p) in self.times.iter().zip(&self.points) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", t, p.re, p.im)?;
        }
        Ok(())
    }
}

/// exp(-total capacity) of the chain.
pub fn conformal_radius(chain: &LoewnerChain) -> f64 {
    chain.conformal_radius()
}

/// Advances a marked boundary angle under dV/dt = cot((V - xi)/2) with the
/// driver frozen, using the exact solution of the flow: the gap u = V - xi
/// satisfies cos(u_t/2) = cos(u_0/2) e^{-t/2}, so u relaxes monotonically
/// toward the antipode at pi without ever crossing 0 or 2 pi.
pub fn boundary_flow_step(v: Angle, xi: Angle, dt: f64) -> Result<Angle> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!(
            "boundary flow needs dt >= 0, got {dt}"
        )));
    }
    let gap0 = angle::gap(xi.radians(), v.radians());
    if (gap0 / 2.0).sin().abs() < TOL_GAP {
        return Err(Error::SingularGap { gap: gap0 });
    }
    if dt == 0.0 {
        return Ok(v);
    }
    let cu = (gap0 / 2.0).cos() * (-dt / 2.0).exp();
    let gap1 = 2.0 * cu.acos();
    Ok(Angle(v.radians() + (gap1 - gap0)))
}

fn forward_rhs(u: Complex64) -> impl Fn(f64, Complex64) -> Complex64 {
    move |_t, g| g * (u + g) / (u - g)
}

fn backward_rhs(u: Complex64) -> impl Fn(f64, Complex64) -> Complex64 {
    move |_t, z| -z * (u + z) / (u - z)
}

fn flow_opts(dt: f64) -> Rk4Opts {
    Rk4Opts {
        tol: 1e-13,
        h_init: dt,
        h_min: 1e-15,
    }
}

/// Applies the chain's mapping-out function g to a point of the closed
/// disc. The origin is fixed; points collapsing onto the driving
/// singularity are reported as swallowed.
pub fn forward_map(chain: &LoewnerChain, z: Complex64) -> Result<Complex64> {
    if z.norm() > 1.0 + TOL_GEOM {
        return Err(Error::Domain(format!(
            "forward map needs |z| <= 1, got |z| = {}",
            z.norm()
        )));
    }
    if z == Complex64::ZERO {
        return Ok(z);
    }
    let mut g = z;
    let mut t_base = 0.0;
    for step in chain.steps() {
        let u = Angle(step.xi).unit_point();
        if (g - u).norm() <= TOL_SWALLOW {
            return Err(Error::PointSwallowed { t: t_base });
        }
        g = integrate_rk4(
            &forward_rhs(u),
            0.0,
            step.dt,
            g,
            flow_opts(step.dt),
            |_t, g: Complex64| 0.1 * (g - u).norm_sqr(),
            |t, g: Complex64| {
                if (g - u).norm() <= TOL_SWALLOW {
                    Err(Error::PointSwallowed { t: t_base + t })
                } else if g.norm() > 1.0 + TOL_GEOM {
                    Err(Error::NumericalBlowup {
                        abs: g.norm(),
                        t: t_base + t,
                    })
                } else {
                    Ok(())
                }
            },
        )?;
        t_base += step.dt;
    }
    Ok(g)
}

/// Pulls a point of the closed disc back through the chain: evaluates
/// g_T^{-1}(w) by integrating each step's flow in reverse order.
pub fn preimage_point(chain: &LoewnerChain, w: Complex64) -> Result<Complex64> {
    preimage_steps(chain.steps(), w)
}

pub(crate) fn preimage_steps(steps: &[ChainStep], w: Complex64) -> Result<Complex64> {
    if w.norm() > 1.0 + TOL_GEOM {
        return Err(Error::Domain(format!(
            "preimage needs |w| <= 1, got |w| = {}",
            w.norm()
        )));
    }
    if w == Complex64::ZERO {
        return Ok(w);
    }
    let mut z = w;
    let mut t_base: f64 = steps.iter().map(|s| s.dt).sum();
    for step in steps.iter().rev() {
        let u = Angle(step.xi).unit_point();
        z = integrate_rk4(
            &backward_rhs(u),
            0.0,
            step.dt,
            z,
            flow_opts(step.dt),
            |_t, z: Complex64| 0.1 * (z - u).norm_sqr(),
            |t, z: Complex64| {
                if z.norm() > 1.0 + TOL_GEOM {
                    Err(Error::NumericalBlowup {
                        abs: z.norm(),
                        t: t_base - t,
                    })
                } else {
                    Ok(())
                }
            },
        )?;
        t_base -= step.dt;
    }
    Ok(z)
}

/// Curve tip of a nonempty chain: the preimage of the final driver point,
/// started a small radial offset inside the circle because the exact
/// preimage is the slit's boundary tip. The square-root folding of the
/// map at the tip turns the offset into an O(offset^2) position error.
pub fn tip_point(chain: &LoewnerChain) -> Result<Complex64> {
    let last = chain
        .steps()
        .last()
        .ok_or_else(|| Error::Domain("tip of an empty chain".into()))?;
    let w = Complex64::from_polar(1.0 - EPS_TIP, last.xi);
    preimage_point(chain, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn boundary_flow_fixed_point_at_antipode() {
        let v = boundary_flow_step(Angle(PI), Angle(0.0), 5.0).unwrap();
        assert_relative_eq!(v.radians(), PI, max_relative = 1e-14);
    }

    #[test]
    fn boundary_flow_zero_dt_is_identity() {
        let v = boundary_flow_step(Angle(1.3), Angle(0.2), 0.0).unwrap();
        assert_eq!(v.radians(), 1.3);
    }

    #[test]
    fn boundary_flow_quarter_gap_increment() {
        // exact flow: gap_t = 2 acos(cos(pi/4) e^{-dt/2})
        let v = boundary_flow_step(Angle(FRAC_PI_2), Angle(0.0), 0.01).unwrap();
        assert_relative_eq!(
            v.radians() - FRAC_PI_2,
            0.00995033044552294911,
            max_relative = 1e-12
        );
    }

    #[test]
    fn boundary_flow_keeps_continuous_branch() {
        let base = boundary_flow_step(Angle(FRAC_PI_2), Angle(0.0), 0.01).unwrap();
        let wound =
            boundary_flow_step(Angle(FRAC_PI_2 + 6.0 * PI), Angle(0.0), 0.01).unwrap();
        assert_relative_eq!(
            wound.radians() - 6.0 * PI,
            base.radians(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn boundary_flow_rejects_swallowed_point() {
        let r = boundary_flow_step(Angle(1e-12), Angle(0.0), 0.1);
        assert!(matches!(r, Err(Error::SingularGap { .. })));
    }

    #[test]
    fn forward_map_empty_chain_is_identity() {
        let chain = LoewnerChain::new();
        let z = Complex64::new(0.3, -0.4);
        assert_eq!(forward_map(&chain, z).unwrap(), z);
    }

    #[test]
    fn forward_map_fixes_origin() {
        let mut chain = LoewnerChain::new();
        chain.push(0.2, Angle(0.7)).unwrap();
        assert_eq!(forward_map(&chain, Complex64::ZERO).unwrap(), Complex64::ZERO);
    }

    #[test]
    fn capacity_and_radius_bookkeeping() {
        let mut chain = LoewnerChain::new();
        chain.push(0.1, Angle(0.0)).unwrap();
        chain.push(0.2, Angle(1.0)).unwrap();
        assert_eq!(chain.total_capacity(), 0.1 + 0.2);
        assert_relative_eq!(chain.conformal_radius(), (-0.3f64).exp());
    }

    #[test]
    fn tip_of_constant_driver_slit_matches_closed_form() {
        // radial slit along the ray through 1: |tip| at capacity t solves
        // the step map w/(1+w)^2 = e^{t} w0/(1+w0)^2 folded at the tip
        for (cap, radius) in [
            (0.5, 0.22905132331899873780),
            (1.0, 0.11416882512791492303),
        ] {
            let mut chain = LoewnerChain::new();
            for _ in 0..10 {
                chain.push(cap / 10.0, Angle(0.0)).unwrap();
            }
            let tip = tip_point(&chain).unwrap();
            assert!(tip.im.abs() < 1e-9, "slit should stay on the axis: {tip}");
            assert!(
                (tip.re - radius).abs() < 1e-7,
                "cap {cap}: tip {} vs closed form {radius}",
                tip.re
            );
        }
    }

    #[test]
    fn preimage_inverts_forward_map() {
        let mut chain = LoewnerChain::new();
        chain.push(0.05, Angle(0.1)).unwrap();
        chain.push(0.05, Angle(-0.2)).unwrap();
        chain.push(0.05, Angle(0.3)).unwrap();
        for z in [Complex64::new(-0.4, 0.1), Complex64::new(0.0, -0.6)] {
            let g = forward_map(&chain, z).unwrap();
            let back = preimage_point(&chain, g).unwrap();
            assert!((back - z).norm() < 1e-10, "roundtrip {z} -> {g} -> {back}");
        }
    }

    #[test]
    fn forward_map_reports_swallowed_driver_point() {
        let mut chain = LoewnerChain::new();
        chain.push(0.3, Angle(0.0)).unwrap();
        let z = Complex64::new(0.999999999, 0.0);
        assert!(matches!(
            forward_map(&chain, z),
            Err(Error::PointSwallowed { .. })
        ));
    }

    #[test]
    fn chain_serializes_as_pairs() {
        let mut chain = LoewnerChain::new();
        chain.push(0.1, Angle(0.5)).unwrap();
        let json = serde_json::to_string(&chain).unwrap();
        assert_eq!(json, "[[0.1,0.5]]");
        let back: LoewnerChain = serde_json::from_str(&json).unwrap();
        assert_eq!(back, chain);
    }
}
