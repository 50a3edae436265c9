//! Zero-diffusivity limit: deterministic radial flows, the limiting
//! potentials attached to the two weight families, and the trend of the
//! scaled log-weight toward its limit as the diffusivity shrinks.

use std::f64::consts::TAU;

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::params::SleParams;
use crate::partition::{eval_z_alpha, solve_phi_alpha, GridSpec};
use crate::rng::RngSpec;
use crate::samplers::{sample_two_sided_pair, trace_radial_sle, PairSample, RadialTrace};

fn log_half_gap_sine(theta1: f64, theta2: f64) -> Result<f64> {
    let gap = theta2 - theta1;
    if !(gap > 0.0 && gap < TAU) {
        return Err(Error::SingularGap { gap });
    }
    Ok((gap / 2.0).sin().ln())
}

/// Spiral-family potential `2 ln sin((theta2-theta1)/2) + mu (theta1+theta2)`;
/// it equals `kappa ln G` exactly at every diffusivity.
pub fn u_mu(mu: f64, theta1: f64, theta2: f64) -> Result<f64> {
    Ok(2.0 * log_half_gap_sine(theta1, theta2)? + mu * (theta1 + theta2))
}

/// Limiting gap potential of the weighted family,
/// `-6 ln sin((theta2-theta1)/2)`; the weight exponent only enters at the
/// next order in the diffusivity.
pub fn u_chordal(theta1: f64, theta2: f64) -> Result<f64> {
    Ok(-6.0 * log_half_gap_sine(theta1, theta2)?)
}

/// Deterministic radial flow at zero diffusivity: the driver rotates at
/// rate `mu` and the curve follows it.
pub fn trace_zero_radial(
    mu: f64,
    theta0: Angle,
    t_total: f64,
    dt: f64,
    n_trace: usize,
) -> Result<RadialTrace> {
    let p = SleParams {
        kappa: 0.0,
        mu,
        rho: 0.0,
    };
    // draws are multiplied by sqrt(kappa) = 0, so the seed is irrelevant
    trace_radial_sle(p, theta0, t_total, dt, n_trace, RngSpec::new(0))
}

/// Deterministic two-curve flow at zero diffusivity with the pair
/// interaction weight `rho = 2` of the commuting family.
pub fn trace_zero_pair(
    mu: f64,
    theta1: Angle,
    theta2: Angle,
    t_total: f64,
    eps_step: f64,
) -> Result<PairSample> {
    let p = SleParams {
        kappa: 0.0,
        mu,
        rho: 2.0,
    };
    sample_two_sided_pair(p, theta1, theta2, t_total, eps_step, RngSpec::new(0))
}

/// One diffusivity's distance from the limiting potential.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrendRow {
    pub kappa: f64,
    pub kappa_log_z: f64,
    pub target: f64,
    pub error: f64,
}

/// Scaled log-weights along a sequence of diffusivities, against the
/// limiting potential.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
    /// Whether the errors strictly decrease along the given order.
    pub strictly_decreasing: bool,
}

/// Evaluates `kappa ln Z_alpha(theta)` for each diffusivity and compares
/// with the limiting gap potential at the same angle. Pass the
/// diffusivities in decreasing order to read the flag as convergence.
pub fn semiclassical_z_trend(alpha: f64, theta: f64, kappas: &[f64]) -> Result<TrendTable> {
    if kappas.is_empty() {
        return Err(Error::Domain("trend needs at least one diffusivity".into()));
    }
    let target = u_chordal(0.0, theta)?;
    let mut rows = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let hyp = solve_phi_alpha(kappa, alpha, &GridSpec::default())?;
        let z = eval_z_alpha(&hyp, theta)?;
        if !(z > 0.0) {
            return Err(Error::Domain(format!(
                "weight must be positive to take its log, got {z} at kappa {kappa}"
            )));
        }
        let kappa_log_z = kappa * z.ln();
        rows.push(TrendRow {
            kappa,
            kappa_log_z,
            target,
            error: (kappa_log_z - target).abs(),
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].error < w[0].error);
    Ok(TrendTable {
        rows,
        strictly_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::eval_g_mu;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn scaled_spiral_log_equals_potential_at_every_kappa() {
        for (kappa, mu, t1, t2) in [
            (2.0, 0.0, 0.1, 2.0),
            (4.0, 1.0, -0.3, 1.9),
            (0.5, 2.0, 0.0, PI),
            (6.0, -1.5, 0.7, 3.1),
        ] {
            let g = eval_g_mu(kappa, mu, t1, t2).unwrap();
            let u = u_mu(mu, t1, t2).unwrap();
            assert!(
                (kappa * g.ln() - u).abs() < 1e-12 * u.abs().max(1.0),
                "kappa={kappa} mu={mu}"
            );
        }
    }

    #[test]
    fn chordal_potential_closed_values() {
        assert_eq!(u_chordal(0.0, PI).unwrap(), 0.0);
        assert_relative_eq!(
            u_chordal(0.0, FRAC_PI_2).unwrap(),
            3.0 * 2.0f64.ln(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn potentials_reject_degenerate_gap() {
        assert!(u_mu(0.5, 1.0, 1.0).is_err());
        assert!(u_chordal(0.0, -TAU).is_err());
    }

    #[test]
    fn zero_flow_is_deterministic_and_radial() {
        let a = trace_zero_radial(0.0, Angle(0.4), 0.6, 1e-2, 8).unwrap();
        let b = trace_zero_radial(0.0, Angle(0.4), 0.6, 1e-2, 8).unwrap();
        assert_eq!(a.trace, b.trace);
        let rot = Angle(0.4).unit_point().conj();
        for z in &a.trace.points {
            assert!((z * rot).im.abs() < 1e-9);
        }
    }

    #[test]
    fn trend_moves_toward_the_limit() {
        let table = semiclassical_z_trend(0.25, FRAC_PI_2, &[2.0, 1.0]).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(table.rows[0].error > table.rows[1].error);
        assert!(table.strictly_decreasing);
        assert_relative_eq!(
            table.rows[0].target,
            3.0 * 2.0f64.ln(),
            max_relative = 1e-15
        );
    }
}
