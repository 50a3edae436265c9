//! Shared oracles for the integration suites: routes that reach reference
//! values without going through the code paths under test.

#![allow(dead_code)]

/// Even power series about u = 1/2 for the profile equation
///
/// ```text
/// u(1-u) phi'' - ((3k-8)/(2k))(2u-1) phi' + (8a/k) phi = 0,
/// phi(1/2) = 1, phi'(1/2) = 0,
/// ```
///
/// in the variable x = 2u - 1. Converges for |x| < 1, which covers every
/// point the tests ask about.
pub fn series_phi(kappa: f64, alpha: f64, u: f64) -> f64 {
    let x2 = (2.0 * u - 1.0) * (2.0 * u - 1.0);
    assert!(x2 < 1.0, "series oracle needs u in (0,1), got {u}");
    let mut coeff = 1.0f64;
    let mut power = 1.0f64;
    let mut sum = 1.0f64;
    for n in 0..600 {
        let nf = n as f64;
        let num = 2.0 * (nf * (nf + 1.0) - 4.0 * nf / kappa - 2.0 * alpha / kappa);
        let den = (nf + 1.0) * (2.0 * nf + 1.0);
        coeff *= num / den;
        power *= x2;
        let term = coeff * power;
        sum += term;
        if n > 6 && term.abs() < 1e-18 * sum.abs().max(1.0) {
            return sum;
        }
    }
    sum
}

/// Weight built from the series profile, the same combination the library
/// forms from its solved profile.
pub fn series_weight(kappa: f64, alpha: f64, theta: f64) -> f64 {
    let u = (theta / 4.0).sin().powi(2);
    (theta / 2.0).sin().powf((kappa - 6.0) / kappa) * series_phi(kappa, alpha, u)
}

/// Closed profile at kappa = 4: cos for positive exponents, cosh for
/// negative ones, both as functions of the boundary angle.
pub fn kappa4_weight(alpha: f64, theta: f64) -> f64 {
    let envelope = (theta / 2.0).sin().powf(-0.5);
    let shifted = theta - std::f64::consts::PI;
    if alpha >= 0.0 {
        envelope * ((alpha / 2.0).sqrt() * shifted).cos()
    } else {
        envelope * ((-alpha / 2.0).sqrt() * shifted).cosh()
    }
}

/// Map between the angle and the profile variable u = sin^2(theta/4).
pub fn u_of_theta(theta: f64) -> f64 {
    (theta / 4.0).sin().powi(2)
}

pub fn theta_of_u(u: f64) -> f64 {
    4.0 * u.sqrt().asin()
}
