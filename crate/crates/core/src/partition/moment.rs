//! Closed-form conformal-radius moment for the weighted chordal family.
//!
//! The moment E[CR^alpha] started from gap angle theta equals
//! Phi(sin^2(theta/4)) where Phi solves the same hypergeometric-type
//! equation as the profile but with boundary values 1 at both endpoints.
//! Phi is assembled from the Frobenius pair at u = 0 via the standard
//! connection values at u = 1.

use crate::error::{Error, Result};
use crate::special::{gamma_ratio, hyp2f1, sin_pi};

/// Largest alpha with a finite moment at the given kappa.
pub fn moment_threshold(kappa: f64) -> f64 {
    1.0 - kappa / 8.0
}

/// E[CR^alpha] for the gap started at angle theta, kappa in (0,8).
///
/// Finite exactly for alpha below the threshold 1 - kappa/8; negative
/// alpha is outside the weighted family and rejected. The result is an
/// even function of theta about pi.
pub fn cr_moment_exact(kappa: f64, alpha: f64, theta: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 8.0) {
        return Err(Error::Domain(format!(
            "moment needs kappa in (0,8), got {kappa}"
        )));
    }
    if !(theta > 0.0 && theta < std::f64::consts::TAU) {
        return Err(Error::Domain(format!(
            "moment needs theta in (0, 2pi), got {theta}"
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
    if alpha == 0.0 {
        return Ok(1.0);
    }

    let c = 1.5 - 4.0 / kappa;
    if (c - c.round()).abs() < 1e-9 {
        return Err(Error::ParameterDegenerate(format!(
            "moment index c = {c} collides with an integer; perturb kappa"
        )));
    }
    let q = 1.0 - 4.0 / kappa;
    let disc = (q * q + 8.0 * alpha / kappa).sqrt();
    let a = q + disc;
    let b = q - disc;

    let half = theta / 4.0;
    let u = half.sin().powi(2);

    // Frobenius basis at u = 0 for exponents 0 and 1-c.
    let f1 = hyp2f1(a, b, c, u)?;
    let f2 = u.powf(1.0 - c) * hyp2f1(1.0 + a - c, 1.0 + b - c, 2.0 - c, u)?;

    // Values of the basis at u = 1. The first follows from the Gauss sum
    // with c-a-b = 1-c and the reflection formula; the second is a ratio
    // of gammas whose arguments are all positive below the threshold.
    let f1_at_1 = (std::f64::consts::PI * disc).cos() / sin_pi(c);
    let f2_at_1 = gamma_ratio(&[2.0 - c, 1.0 - c], &[1.0 - a, 1.0 - b])?;
    if f2_at_1 == 0.0 {
        return Err(Error::ParameterDegenerate(format!(
            "second connection value vanished at kappa={kappa}, alpha={alpha}"
        )));
    }

    Ok(f1 + ((1.0 - f1_at_1) / f2_at_1) * f2)
}
