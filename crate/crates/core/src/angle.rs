//! Boundary angles as continuous real branches.
//!
//! Angles on the unit circle are tracked on the universal cover: a value is
//! any real number, winding included, and is only reduced mod 2pi inside
//! trigonometric kernels. Keeping the branch is what makes spiral winding
//! and gap bookkeeping well defined.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// An angle in radians on a continuous branch (never reduced mod 2pi).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }

    /// Point on the unit circle for this angle.
    pub fn unit_point(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.0.cos(), self.0.sin())
    }

    /// Representative in [0, 2pi).
    pub fn reduced(self) -> f64 {
        self.0.rem_euclid(TAU)
    }
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle(v)
    }
}

/// Gap `b - a` reduced to (0, 2pi]; the branch difference itself when the
/// caller already maintains `a < b < a + 2pi`.
pub fn gap(a: f64, b: f64) -> f64 {
    let g = (b - a).rem_euclid(TAU);
    if g == 0.0 {
        TAU
    } else {
        g
    }
}

/// cot(x), with the caller responsible for keeping x away from multiples
/// of pi.
#[inline]
pub fn cot(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    c / s
}

/// 1 / sin^2(x).
#[inline]
pub fn csc2(x: f64) -> f64 {
    let s = x.sin();
    1.0 / (s * s)
}
