//! Distributional checks of the stochastic drivers against closed-form
//! moments and against the exact hypergeometric moment formula.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use radial_sle::angle::Angle;
use radial_sle::drivers::{sample_gap_process, sample_kappa_mu_rho_driver, sample_radial_driver};
use radial_sle::partition::cr_moment_exact;
use radial_sle::samplers::estimate_cr_moment;
use radial_sle::{RngSpec, SleParams};

#[test]
fn driver_variance_matches_brownian_scaling() {
    // Var[xi_T - theta0] = kappa T; the Euler step is exact for the linear
    // driver, so only the MC error is in play.
    let p = SleParams::new(4.0, 0.0, 0.0).unwrap();
    let n = 10_000;
    let t_total = 1.0;
    let mut sq = 0.0;
    let mut mean = 0.0;
    let mut finals = Vec::with_capacity(n);
    for i in 0..n {
        let path = sample_radial_driver(
            p,
            Angle(0.3),
            t_total,
            1e-2,
            RngSpec::new(101).with_stream(i as u64),
        )
        .unwrap();
        let d = path.xi.last().unwrap() - path.xi[0];
        finals.push(d);
        mean += d;
    }
    mean /= n as f64;
    for d in &finals {
        sq += (d - mean) * (d - mean);
    }
    let var = sq / (n as f64 - 1.0);
    // stderr of a sample variance of a Gaussian: var * sqrt(2/(n-1))
    let se = var * (2.0 / (n as f64 - 1.0)).sqrt();
    assert!(
        (var - 4.0 * t_total).abs() < 3.0 * se,
        "variance {var} vs {} (se {se})",
        4.0 * t_total
    );
}

#[test]
fn coupled_gap_drift_regression_at_quarter_gap() {
    // d(gap) = (1 + rho/2) cot(gap/2) dt - sqrt(kappa) dB, so at rho = 2
    // and gap = pi/2 the instantaneous mean rate is 2 cot(pi/4) = 2.
    let p = SleParams::new(2.0, 0.0, 2.0).unwrap();
    let dt = 1e-3;
    let n = 20_000;
    let mut rates = Vec::with_capacity(n);
    for i in 0..n {
        let path = sample_kappa_mu_rho_driver(
            p,
            Angle(0.0),
            Angle(FRAC_PI_2),
            dt,
            dt,
            RngSpec::new(7).with_stream(i as u64),
        )
        .unwrap();
        let v = path.v.as_ref().unwrap();
        let g0 = v[0] - path.xi[0];
        let g1 = v[1] - path.xi[1];
        rates.push((g1 - g0) / dt);
    }
    let mean = rates.iter().sum::<f64>() / n as f64;
    let ss = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>();
    let se = (ss / ((n as f64 - 1.0) * n as f64)).sqrt();
    assert!(
        (mean - 2.0).abs() < 3.0 * se,
        "gap drift {mean} vs 2 (se {se})"
    );
}

#[test]
fn gap_process_is_absorbed_before_the_default_cap() {
    // Absorption is almost sure; at the default cap the failure rate must
    // stay under a tenth of a percent.
    for kappa in [2.0, 4.0] {
        let n = 2_000;
        let mut misses = 0;
        for i in 0..n {
            let r = sample_gap_process(
                kappa,
                PI,
                1e-2,
                50.0,
                RngSpec::new(23).with_stream(i as u64),
            );
            if r.is_err() {
                misses += 1;
            }
        }
        assert!(
            (misses as f64) <= 0.001 * n as f64,
            "kappa {kappa}: {misses} of {n} paths hit the cap"
        );
    }
}

#[test]
fn halving_dt_moves_the_moment_less_than_the_mc_error() {
    let (kappa, alpha, theta0) = (3.0, 0.3, FRAC_PI_2);
    let n = 30_000;
    let coarse = estimate_cr_moment(kappa, alpha, theta0, n, 2e-3, RngSpec::new(91)).unwrap();
    let fine = estimate_cr_moment(kappa, alpha, theta0, n, 1e-3, RngSpec::new(92)).unwrap();
    let gap = (coarse.mean - fine.mean).abs();
    let band = 3.0 * (coarse.stderr.powi(2) + fine.stderr.powi(2)).sqrt();
    assert!(gap < band, "dt halving moved the mean by {gap} > {band}");
}

#[test]
fn absorption_moment_matches_exact_formula() {
    let (kappa, alpha, theta0) = (3.0, 0.3, FRAC_PI_2);
    let exact = cr_moment_exact(kappa, alpha, theta0).unwrap();
    let est = estimate_cr_moment(kappa, alpha, theta0, 20_000, 1e-3, RngSpec::new(55)).unwrap();
    assert!(!est.variance_warning);
    assert!(
        (est.mean - exact).abs() < 4.0 * est.stderr,
        "MC {} +- {} vs exact {exact}",
        est.mean,
        est.stderr
    );
}
