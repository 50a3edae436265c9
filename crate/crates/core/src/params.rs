//! Core parameter bundle shared by samplers, partition functions, and the
//! identity checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diffusivity, spiral rate, and interaction weight for a coupled radial
/// pair. Derived exponents are methods so they can never drift out of sync
/// with the stored fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SleParams {
    pub kappa: f64,
    pub mu: f64,
    pub rho: f64,
}

impl SleParams {
    /// Validates `kappa > 0` and finiteness of all fields.
    pub fn new(kappa: f64, mu: f64, rho: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!(
                "kappa must be positive and finite, got {kappa}"
            )));
        }
        if !mu.is_finite() || !rho.is_finite() {
            return Err(Error::Domain(format!(
                "mu and rho must be finite, got mu={mu} rho={rho}"
            )));
        }
        Ok(SleParams { kappa, mu, rho })
    }

    /// Boundary scaling exponent (6 - kappa) / (2 kappa).
    pub fn h(&self) -> f64 {
        (6.0 - self.kappa) / (2.0 * self.kappa)
    }

    /// Bulk scaling exponent (6 - kappa)(kappa - 2) / (8 kappa).
    pub fn h_tilde(&self) -> f64 {
        (6.0 - self.kappa) * (self.kappa - 2.0) / (8.0 * self.kappa)
    }
}
