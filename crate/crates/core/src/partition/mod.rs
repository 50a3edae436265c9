//! The two weight families attached to a commuting pair of radial curves:
//! the spiral weight in the two boundary angles and the conformal-radius
//! weighted profile in the gap, plus the drifts they induce and the exact
//! moment they encode.

mod euler;
mod moment;

pub use euler::{solve_phi_alpha, GridSpec, HypSolution};
pub use moment::{cr_moment_exact, moment_threshold};

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// A positive weight on ordered angle pairs, fixed up to scale.
#[derive(Debug, Clone)]
pub enum PartitionFn {
    /// `(sin(gap/2))^{2/kappa} exp((mu/kappa)(theta1+theta2))`.
    Spiral { kappa: f64, mu: f64 },
    /// `(sin(gap/2))^{(kappa-6)/kappa} phi(sin^2(gap/4))` built from a
    /// solved profile.
    CrWeighted {
        kappa: f64,
        alpha: f64,
        hyp: HypSolution,
    },
}

impl PartitionFn {
    pub fn spiral(kappa: f64, mu: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite() && mu.is_finite()) {
            return Err(Error::Domain(format!(
                "spiral weight needs finite kappa > 0 and finite mu, got ({kappa}, {mu})"
            )));
        }
        Ok(PartitionFn::Spiral { kappa, mu })
    }

    /// Solves the profile and wraps it. The weight exists only below the
    /// positivity threshold for the exponent.
    pub fn cr_weighted(kappa: f64, alpha: f64) -> Result<Self> {
        Self::cr_weighted_on(kappa, alpha, &GridSpec::default())
    }

    pub fn cr_weighted_on(kappa: f64, alpha: f64, grid: &GridSpec) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 8.0) {
            return Err(Error::Domain(format!(
                "weighted profile needs kappa in (0,8), got {kappa}"
            )));
        }
        if alpha >= moment_threshold(kappa) {
            return Err(Error::Domain(format!(
                "weight exponent {alpha} is at or above the positivity threshold {}",
                moment_threshold(kappa)
            )));
        }
        let hyp = solve_phi_alpha(kappa, alpha, grid)?;
        if let Some(u) = hyp.sign_change() {
            return Err(Error::Domain(format!(
                "profile lost positivity at u = {u} despite subcritical exponent"
            )));
        }
        Ok(PartitionFn::CrWeighted { kappa, alpha, hyp })
    }

    pub fn kappa(&self) -> f64 {
        match self {
            PartitionFn::Spiral { kappa, .. } => *kappa,
            PartitionFn::CrWeighted { kappa, .. } => *kappa,
        }
    }

    pub fn eval(&self, theta1: f64, theta2: f64) -> Result<f64> {
        match self {
            PartitionFn::Spiral { kappa, mu } => eval_g_mu(*kappa, *mu, theta1, theta2),
            PartitionFn::CrWeighted { hyp, .. } => eval_z_alpha(hyp, ordered_gap(theta1, theta2)?),
        }
    }

    pub fn drift(&self, theta1: f64, theta2: f64) -> Result<(f64, f64)> {
        drift_b(self, theta1, theta2)
    }

    pub fn interchange(&self) -> f64 {
        interchange_constant(self)
    }
}

fn ordered_gap(theta1: f64, theta2: f64) -> Result<f64> {
    let gap = theta2 - theta1;
    if !(gap > 0.0 && gap < TAU) {
        return Err(Error::SingularGap { gap });
    }
    Ok(gap)
}

/// Spiral weight on an ordered pair with gap in (0, 2pi).
pub fn eval_g_mu(kappa: f64, mu: f64, theta1: f64, theta2: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite() && mu.is_finite()) {
        return Err(Error::Domain(format!(
            "spiral weight needs finite kappa > 0 and finite mu, got ({kappa}, {mu})"
        )));
    }
    let gap = ordered_gap(theta1, theta2)?;
    let s = (gap / 2.0).sin();
    Ok(s.powf(2.0 / kappa) * ((mu / kappa) * (theta1 + theta2)).exp())
}

/// Gap weight built from a solved profile, at gap angle theta in (0, 2pi).
pub fn eval_z_alpha(hyp: &HypSolution, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < TAU) {
        return Err(Error::Domain(format!(
            "gap weight needs theta in (0, 2pi), got {theta}"
        )));
    }
    let s = (theta / 2.0).sin();
    let u = (theta / 4.0).sin().powi(2);
    let phi = hyp.phi_at(u)?;
    Ok(s.powf((hyp.kappa - 6.0) / hyp.kappa) * phi)
}

/// Angle drifts `(b1, b2)` induced by a weight: kappa times the gradient
/// of its log.
pub fn drift_b(pf: &PartitionFn, theta1: f64, theta2: f64) -> Result<(f64, f64)> {
    let gap = ordered_gap(theta1, theta2)?;
    match pf {
        PartitionFn::Spiral { mu, .. } => {
            let cot = (gap / 2.0).cos() / (gap / 2.0).sin();
            Ok((mu - cot, mu + cot))
        }
        PartitionFn::CrWeighted { kappa, hyp, .. } => {
            let half = gap / 2.0;
            let u = (gap / 4.0).sin().powi(2);
            let (phi, dphi) = hyp.eval(u)?;
            if phi <= 0.0 {
                return Err(Error::Domain(format!(
                    "profile is nonpositive at u = {u}; drift undefined"
                )));
            }
            let d = ((kappa - 6.0) / 2.0) * (half.cos() / half.sin())
                + (kappa / 4.0) * (dphi / phi) * half.sin();
            Ok((-d, d))
        }
    }
}

/// Multiplicative constant picked up when the two angles swap roles across
/// the branch cut, `(theta1, theta2) -> (theta2, theta1 + 2pi)`.
pub fn interchange_constant(pf: &PartitionFn) -> f64 {
    match pf {
        PartitionFn::Spiral { kappa, mu } => (TAU * mu / kappa).exp(),
        PartitionFn::CrWeighted { .. } => 1.0,
    }
}
