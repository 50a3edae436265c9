//! Initial-value solver for the hypergeometric-type profile equation
//!
//! ```text
//! u (1-u) phi'' - (3k-8)/(2k) (2u-1) phi' + (8a/k) phi = 0,
//! phi(1/2) = 1,  phi'(1/2) = 0,
//! ```
//!
//! integrated outward from the center on a node grid clustered toward the
//! regular singular endpoints. Both halves are integrated independently;
//! the even symmetry of the solution is a cross-check, not an input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate_rk45, Rk45Opts};

/// Node layout for a profile solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Total node count; odd so the center node sits exactly at 1/2.
    pub n_nodes: usize,
    /// Truncation distance from the singular endpoints 0 and 1.
    pub u_min: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_nodes: 2049,
            u_min: 1e-5,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.n_nodes < 9 || self.n_nodes.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "grid needs an odd node count >= 9, got {}",
                self.n_nodes
            )));
        }
        if !(self.u_min > 0.0 && self.u_min <= 0.01) {
            return Err(Error::Domain(format!(
                "grid truncation must lie in (0, 0.01], got {}",
                self.u_min
            )));
        }
        Ok(())
    }

    /// Ascending nodes on [u_min, 1-u_min], quadratically clustered at
    /// the ends, center exactly 1/2, upper half the exact mirror of the
    /// lower half.
    fn nodes(&self) -> Vec<f64> {
        let m = (self.n_nodes - 1) / 2;
        let mut u = vec![0.0; self.n_nodes];
        for (k, node) in u.iter_mut().enumerate().take(m + 1) {
            let s = (std::f64::consts::FRAC_PI_2 * k as f64 / m as f64).sin();
            *node = self.u_min + (0.5 - self.u_min) * s * s;
        }
        for k in 0..m {
            u[2 * m - k] = 1.0 - u[k];
        }
        u
    }
}

/// Solved profile on its grid: values and first derivatives per node.
/// Second derivatives come from the equation itself, which gives the
/// piecewise-quintic evaluation two continuous derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypSolution {
    pub kappa: f64,
    pub alpha: f64,
    u_grid: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    u_min: f64,
    u_max: f64,
    sign_change: Option<f64>,
}

fn profile_rhs(kappa: f64, alpha: f64) -> impl Fn(f64, [f64; 2]) -> [f64; 2] {
    let advect = (3.0 * kappa - 8.0) / (2.0 * kappa);
    let source = 8.0 * alpha / kappa;
    move |u, y| {
        let dd = (advect * (2.0 * u - 1.0) * y[1] - source * y[0]) / (u * (1.0 - u));
        [y[1], dd]
    }
}

fn crossing(u0: f64, p0: f64, u1: f64, p1: f64) -> f64 {
    u0 + (u1 - u0) * (p0 / (p0 - p1))
}

/// Integrates the profile IVP outward to both truncation points. A first
/// sign change of phi, if any, is located by linear interpolation across
/// the step that produced it; when the grid stays positive and the
/// parameter lies above the positivity threshold, the integration probes
/// beyond the truncation point toward the endpoint to find the crossing.
pub fn solve_phi_alpha(kappa: f64, alpha: f64, grid: &GridSpec) -> Result<HypSolution> {
    if !(kappa > 0.0 && kappa < 8.0) {
        return Err(Error::Domain(format!(
            "profile solve needs kappa in (0,8), got {kappa}"
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
    }
    grid.validate()?;
    let u_grid = grid.nodes();
    let n = u_grid.len();
    let center = (n - 1) / 2;
    let rhs = profile_rhs(kappa, alpha);
    let mut phi = vec![0.0; n];
    let mut dphi = vec![0.0; n];
    phi[center] = 1.0;
    dphi[center] = 0.0;
    let mut sign_change: Option<f64> = None;

    let half = |indices: &mut dyn Iterator<Item = usize>,
                    phi: &mut Vec<f64>,
                    dphi: &mut Vec<f64>,
                    sign_change: &mut Option<f64>|
     -> Result<[f64; 2]> {
        let mut y = [1.0, 0.0];
        let mut u_prev = u_grid[center];
        for k in indices {
            let target = u_grid[k];
            let opts = Rk45Opts {
                h_init: (target - u_prev).abs(),
                ..Rk45Opts::default()
            };
            y = integrate_rk45(&rhs, u_prev, target, y, opts, |t0, y0: [f64; 2], t1, y1| {
                if sign_change.is_none() && y0[0] > 0.0 && y1[0] <= 0.0 {
                    *sign_change = Some(crossing(t0, y0[0], t1, y1[0]));
                }
                Ok(())
            })?;
            phi[k] = y[0];
            dphi[k] = y[1];
            u_prev = target;
        }
        Ok(y)
    };

    half(
        &mut (0..center).rev(),
        &mut phi,
        &mut dphi,
        &mut sign_change,
    )?;
    let y_top = half(
        &mut ((center + 1)..n),
        &mut phi,
        &mut dphi,
        &mut sign_change,
    )?;

    let u_max = u_grid[n - 1];
    if sign_change.is_none() && alpha > 1.0 - kappa / 8.0 {
        sign_change = probe_past_truncation(&rhs, u_max, y_top)?;
    }

    Ok(HypSolution {
        kappa,
        alpha,
        u_min: u_grid[0],
        u_max,
        u_grid,
        phi,
        dphi,
        sign_change,
    })
}

/// Continues the solution from the truncation point toward u = 1 hunting
/// for a crossing that lies outside the grid. A step-size stall this deep
/// in the singular region means no crossing was reachable.
fn probe_past_truncation(
    rhs: &impl Fn(f64, [f64; 2]) -> [f64; 2],
    u_max: f64,
    y: [f64; 2],
) -> Result<Option<f64>> {
    let mut cross = None;
    let r = integrate_rk45(
        rhs,
        u_max,
        1.0 - 1e-13,
        y,
        Rk45Opts {
            h_init: (1.0 - u_max) * 0.1,
            ..Rk45Opts::default()
        },
        |t0, y0: [f64; 2], t1, y1| {
            if y0[0] > 0.0 && y1[0] <= 0.0 {
                cross = Some(crossing(t0, y0[0], t1, y1[0]));
                return Err(Error::PathAbort("crossing located".into()));
            }
            Ok(())
        },
    );
    match r {
        Ok(_) | Err(Error::PathAbort(_)) | Err(Error::StiffnessFailure { .. }) => Ok(cross),
        Err(e) => Err(e),
    }
}

impl HypSolution {
    pub fn u_min(&self) -> f64 {
        self.u_min
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn u_grid(&self) -> &[f64] {
        &self.u_grid
    }

    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi
    }

    pub fn dphi_nodes(&self) -> &[f64] {
        &self.dphi
    }

    /// Location of one phi sign crossing, if the solve found any.
    pub fn sign_change(&self) -> Option<f64> {
        self.sign_change
    }

    fn d2(&self, u: f64, p: f64, dp: f64) -> f64 {
        profile_rhs(self.kappa, self.alpha)(u, [p, dp])[1]
    }

    fn bracket(&self, u: f64) -> Result<usize> {
        if !(self.u_min..=self.u_max).contains(&u) {
            return Err(Error::OutOfGrid {
                u,
                u_min: self.u_min,
                u_max: self.u_max,
            });
        }
        let i = self.u_grid.partition_point(|&x| x <= u);
        Ok(i.clamp(1, self.u_grid.len() - 1) - 1)
    }

    /// Piecewise-quintic Hermite evaluation of (phi, phi'), matching
    /// value, slope, and equation curvature at both bracketing nodes.
    pub fn eval(&self, u: f64) -> Result<(f64, f64)> {
        let i = self.bracket(u)?;
        let (ua, ub) = (self.u_grid[i], self.u_grid[i + 1]);
        let h = ub - ua;
        let t = (u - ua) / h;
        let (fa, fb) = (self.phi[i], self.phi[i + 1]);
        let (da, db) = (self.dphi[i], self.dphi[i + 1]);
        let sa = self.d2(ua, fa, da);
        let sb = self.d2(ub, fb, db);

        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        let h21 = 0.5 * t3 - t4 + 0.5 * t5;
        let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let value = fa * h00
            + h * da * h10
            + h * h * sa * h20
            + h * h * sb * h21
            + h * db * h11
            + fb * h01;

        let g00 = -30.0 * t2 * (1.0 - t) * (1.0 - t);
        let g10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let g20 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
        let g21 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
        let g11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let g01 = -g00;
        let slope = (fa * g00
            + h * da * g10
            + h * h * sa * g20
            + h * h * sb * g21
            + h * db * g11
            + fb * g01)
            / h;
        Ok((value, slope))
    }

    pub fn phi_at(&self, u: f64) -> Result<f64> {
        self.eval(u).map(|(p, _)| p)
    }

    pub fn dphi_at(&self, u: f64) -> Result<f64> {
        self.eval(u).map(|(_, d)| d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn center_node_is_exact() {
        let sol = solve_phi_alpha(3.0, 0.4, &GridSpec::default()).unwrap();
        let grid = sol.u_grid();
        let center = (grid.len() - 1) / 2;
        assert_eq!(grid[center], 0.5);
        assert_eq!(sol.phi_nodes()[center], 1.0);
        assert_eq!(sol.dphi_nodes()[center], 0.0);
        assert_eq!(sol.phi_at(0.5).unwrap(), 1.0);
    }

    #[test]
    fn grid_is_exactly_mirror_symmetric() {
        // Upper-half nodes are literally 1 - lower-half nodes, so that
        // direction of the identity is bitwise; the reverse direction
        // cannot be (1 - (1 - u) != u in floating point).
        let grid = GridSpec::default().nodes();
        let m = (grid.len() - 1) / 2;
        for k in 0..=m {
            assert_eq!(grid[2 * m - k], 1.0 - grid[k], "node {k}");
        }
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn solution_is_even_about_center() {
        let sol = solve_phi_alpha(2.0, -0.5, &GridSpec::default()).unwrap();
        let grid = sol.u_grid();
        let phi = sol.phi_nodes();
        let n = grid.len();
        for k in 0..n {
            assert!(
                (phi[k] - phi[n - 1 - k]).abs() < 1e-10,
                "asymmetry at node {k}: {} vs {}",
                phi[k],
                phi[n - 1 - k]
            );
        }
    }

    #[test]
    fn interpolation_matches_series_solution() {
        // independently derived even power series about the center:
        // phi = 1 + sum B_{2n} x^{2n}, x = 2u-1,
        // B_{2j} = B_{2j-2} [2(j-1)(j - 4/k) - 4a/k] / [j(2j-1)]
        let series = |kappa: f64, alpha: f64, x: f64| {
            let mut b = 1.0;
            let mut sum = 1.0;
            for j in 1..200 {
                let jf = j as f64;
                b *= (2.0 * (jf - 1.0) * (jf - 4.0 / kappa) - 4.0 * alpha / kappa)
                    / (jf * (2.0 * jf - 1.0));
                sum += b * x.powi(2 * j);
                if b.abs() * x.powi(2 * j) < 1e-18 {
                    break;
                }
            }
            sum
        };
        for (kappa, alpha, u) in [
            (3.0, 0.4, 0.6),
            (3.0, 0.4, 0.675),
            (6.0, 0.2, 0.65),
            (2.0, -0.5, 0.85),
        ] {
            let sol = solve_phi_alpha(kappa, alpha, &GridSpec::default()).unwrap();
            let x = 2.0 * u - 1.0;
            assert_relative_eq!(
                sol.phi_at(u).unwrap(),
                series(kappa, alpha, x),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn critical_profile_closed_form() {
        let kappa = 2.0;
        let alpha0 = 1.0 - kappa / 8.0;
        let sol = solve_phi_alpha(kappa, alpha0, &GridSpec::default()).unwrap();
        assert_relative_eq!(
            sol.phi_at(0.25).unwrap(),
            0.649519052838328985,
            max_relative = 1e-10
        );
        assert!(sol.sign_change().is_none());
    }

    #[test]
    fn out_of_grid_is_reported() {
        let sol = solve_phi_alpha(4.0, 0.125, &GridSpec::default()).unwrap();
        assert!(matches!(
            sol.phi_at(1e-7),
            Err(Error::OutOfGrid { .. })
        ));
        assert!(matches!(sol.phi_at(1.0), Err(Error::OutOfGrid { .. })));
    }

    #[test]
    fn rejects_bad_grid_and_kappa() {
        assert!(solve_phi_alpha(0.0, 0.1, &GridSpec::default()).is_err());
        assert!(solve_phi_alpha(8.0, 0.1, &GridSpec::default()).is_err());
        let bad = GridSpec {
            n_nodes: 100,
            u_min: 1e-5,
        };
        assert!(solve_phi_alpha(3.0, 0.1, &bad).is_err());
    }
}
