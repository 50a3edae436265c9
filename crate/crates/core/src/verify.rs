//! Residual checks for the identities that pin down the weight families:
//! the second-order null-state identity, commutation of the two growth
//! generators, cross-symmetry of the drifts, and the zero-diffusivity
//! constant.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::Serialize;

use crate::angle::{cot, csc2};
use crate::error::{Error, Result};
use crate::partition::{drift_b, eval_z_alpha, PartitionFn};
use crate::semiclassical::{u_chordal, u_mu};

/// Drift field of one curve as a function of both angles.
pub type DriftFn = Box<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// A candidate pair of growth generators: diffusivity plus the two drift
/// fields. The transport coefficients on the opposite angle are fixed by
/// the radial flow itself and are not free data.
pub struct GeneratorSpec {
    pub kappa: f64,
    pub b1: DriftFn,
    pub b2: DriftFn,
}

impl GeneratorSpec {
    /// Generators induced by a weight: `b_j` is kappa times the j-th
    /// log-gradient.
    pub fn from_partition(pf: &PartitionFn) -> GeneratorSpec {
        let kappa = pf.kappa();
        let p1 = Arc::new(pf.clone());
        let p2 = Arc::clone(&p1);
        GeneratorSpec {
            kappa,
            b1: Box::new(move |t1, t2| drift_b(&p1, t1, t2).map(|(b1, _)| b1)),
            b2: Box::new(move |t1, t2| drift_b(&p2, t1, t2).map(|(_, b2)| b2)),
        }
    }

    /// Same generators with a constant added to the first drift; breaks
    /// commutation while leaving each generator individually well formed.
    pub fn with_b1_offset(self, c: f64) -> GeneratorSpec {
        let old = self.b1;
        GeneratorSpec {
            kappa: self.kappa,
            b1: Box::new(move |t1, t2| old(t1, t2).map(|b| b + c)),
            b2: self.b2,
        }
    }
}

/// Outcome of a residual check at one location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub location: (f64, f64),
    /// The residual itself: measured minus expected.
    pub value: f64,
    /// The constant the measured quantity is checked against.
    pub expected: f64,
    /// Step of the finite-difference evaluation, if one was used.
    pub fd_step: Option<f64>,
    /// log2 decay rate of the residual under step halving, if measured.
    pub estimated_order: Option<f64>,
}

/// The constant the null-state combination must produce for a weight.
pub fn expected_f(pf: &PartitionFn) -> f64 {
    match pf {
        PartitionFn::Spiral { kappa, mu } => (mu * mu - 3.0) / (2.0 * kappa),
        PartitionFn::CrWeighted { kappa, alpha, .. } => {
            (6.0 - kappa) * (kappa - 2.0) / (8.0 * kappa) - alpha
        }
    }
}

fn five_point_d1(f: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((-f(x + 2.0 * h)? + 8.0 * f(x + h)? - 8.0 * f(x - h)? + f(x - 2.0 * h)?) / (12.0 * h))
}

fn five_point_d2(f: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok(
        (-f(x + 2.0 * h)? + 16.0 * f(x + h)? - 30.0 * f(x)? + 16.0 * f(x - h)?
            - f(x - 2.0 * h)?)
            / (12.0 * h * h),
    )
}

fn boundary_exponent(kappa: f64) -> f64 {
    (6.0 - kappa) / (2.0 * kappa)
}

/// Null-state residual of a weight at one ordered angle pair:
///
/// ```text
/// (kappa/2) d11 Z / Z + cot(gap/2) d2 Z / Z - h / (2 sin^2(gap/2)) - F
/// ```
///
/// evaluated analytically for the spiral family and by step-halved
/// five-point differences in the gap for the weighted profile.
pub fn bpz_residual(pf: &PartitionFn, theta1: f64, theta2: f64) -> Result<ResidualReport> {
    let gap = theta2 - theta1;
    if !(gap > 0.0 && gap < TAU) {
        return Err(Error::SingularGap { gap });
    }
    let s = gap / 2.0;
    let f_expected = expected_f(pf);
    match pf {
        PartitionFn::Spiral { kappa, mu } => {
            let dl1 = (mu - cot(s)) / kappa;
            let dl2 = (mu + cot(s)) / kappa;
            let d11 = -csc2(s) / (2.0 * kappa) + dl1 * dl1;
            let lhs = (kappa / 2.0) * d11 + cot(s) * dl2
                - boundary_exponent(*kappa) * csc2(s) / 2.0;
            Ok(ResidualReport {
                location: (theta1, theta2),
                value: lhs - f_expected,
                expected: f_expected,
                fd_step: None,
                estimated_order: None,
            })
        }
        PartitionFn::CrWeighted { kappa, hyp, .. } => {
            let h0 = 1e-2;
            let z = |g: f64| {
                eval_z_alpha(hyp, g).map_err(|e| match e {
                    Error::OutOfGrid { .. } | Error::Domain(_) => Error::StencilOutOfDomain {
                        th1: theta1,
                        th2: theta2,
                        h: h0,
                    },
                    other => other,
                })
            };
            let lhs_at = |h: f64| -> Result<f64> {
                let z0 = z(gap)?;
                let d1 = five_point_d1(&z, gap, h)?;
                let d2 = five_point_d2(&z, gap, h)?;
                Ok((kappa / 2.0) * (d2 / z0) + cot(s) * (d1 / z0)
                    - boundary_exponent(*kappa) * csc2(s) / 2.0)
            };
            let r0 = lhs_at(h0)? - f_expected;
            let r1 = lhs_at(h0 / 2.0)? - f_expected;
            let estimated_order = if r0.abs() > 1e-13 && r1.abs() > 1e-13 {
                Some((r0.abs() / r1.abs()).log2())
            } else {
                None
            };
            Ok(ResidualReport {
                location: (theta1, theta2),
                value: r1,
                expected: f_expected,
                fd_step: Some(h0 / 2.0),
                estimated_order,
            })
        }
    }
}

type Field<'a> = &'a dyn Fn(f64, f64) -> Result<f64>;

/// One growth generator applied to a scalar field by five-point stencils:
/// `(kappa/2) d_own^2 + b_own d_own + cot((theta_oth - theta_own)/2) d_oth`.
fn apply_generator(
    kappa: f64,
    b_own: &DriftFn,
    own_is_first: bool,
    f: Field,
    t1: f64,
    t2: f64,
    h: f64,
) -> Result<f64> {
    let s = (t2 - t1) / 2.0;
    if s.sin().abs() < 1e-9 {
        return Err(Error::StencilOutOfDomain { th1: t1, th2: t2, h });
    }
    let (d_own, d_own2, d_oth, transport) = if own_is_first {
        let g1 = |x: f64| f(x, t2);
        let g2 = |y: f64| f(t1, y);
        (
            five_point_d1(&g1, t1, h)?,
            five_point_d2(&g1, t1, h)?,
            five_point_d1(&g2, t2, h)?,
            cot(s),
        )
    } else {
        let g1 = |y: f64| f(t1, y);
        let g2 = |x: f64| f(x, t2);
        (
            five_point_d1(&g1, t2, h)?,
            five_point_d2(&g1, t2, h)?,
            five_point_d1(&g2, t1, h)?,
            cot(-s),
        )
    };
    let b = b_own(t1, t2)?;
    Ok((kappa / 2.0) * d_own2 + b * d_own + transport * d_oth)
}

fn bracket_minus_identity(
    spec: &GeneratorSpec,
    f: fn(f64, f64) -> f64,
    t1: f64,
    t2: f64,
    h: f64,
) -> Result<f64> {
    let lift: Field = &|x, y| Ok(f(x, y));
    let l1f: Field = &|x, y| apply_generator(spec.kappa, &spec.b1, true, lift, x, y, h);
    let l2f: Field = &|x, y| apply_generator(spec.kappa, &spec.b2, false, lift, x, y, h);
    let l1l2 = apply_generator(spec.kappa, &spec.b1, true, l2f, t1, t2, h)?;
    let l2l1 = apply_generator(spec.kappa, &spec.b2, false, l1f, t1, t2, h)?;
    let s = (t2 - t1) / 2.0;
    Ok((l1l2 - l2l1) - csc2(s) * (l2f(t1, t2)? - l1f(t1, t2)?))
}

/// Residual of the commutation identity
///
/// ```text
/// [L1, L2] f = (L2 - L1) f / sin^2((theta2-theta1)/2)
/// ```
///
/// measured with nested five-point stencils at `base_step`, `base_step/2`,
/// and `base_step/4`; the reported order is the decay rate over the last
/// halving and the value is the finest-step residual.
pub fn commutation_bracket_residual(
    spec: &GeneratorSpec,
    f: fn(f64, f64) -> f64,
    theta1: f64,
    theta2: f64,
    base_step: f64,
) -> Result<ResidualReport> {
    if !(base_step > 0.0) {
        return Err(Error::Domain(format!(
            "bracket check needs a positive step, got {base_step}"
        )));
    }
    let r0 = bracket_minus_identity(spec, f, theta1, theta2, base_step)?;
    let r1 = bracket_minus_identity(spec, f, theta1, theta2, base_step / 2.0)?;
    let r2 = bracket_minus_identity(spec, f, theta1, theta2, base_step / 4.0)?;
    let floor = 1e-11;
    let rate = |a: f64, b: f64| (a.abs() > floor && b.abs() > floor).then(|| (a.abs() / b.abs()).log2());
    let estimated_order = match (rate(r0, r1), rate(r1, r2)) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (one, two) => one.or(two),
    };
    Ok(ResidualReport {
        location: (theta1, theta2),
        value: r2,
        expected: 0.0,
        fd_step: Some(base_step / 4.0),
        estimated_order,
    })
}

/// Difference of the drift cross-derivatives `d2 b1 - d1 b2`, which must
/// vanish when both drifts come from one weight.
pub fn drift_cross_symmetry(spec: &GeneratorSpec, theta1: f64, theta2: f64) -> Result<ResidualReport> {
    let h = 1e-3;
    let d2b1 = five_point_d1(&|y| (spec.b1)(theta1, y), theta2, h)?;
    let d1b2 = five_point_d1(&|x| (spec.b2)(x, theta2), theta1, h)?;
    Ok(ResidualReport {
        location: (theta1, theta2),
        value: d2b1 - d1b2,
        expected: 0.0,
        fd_step: Some(h),
        estimated_order: None,
    })
}

/// A named two-angle test function.
pub type BatteryFn = (&'static str, fn(f64, f64) -> f64);

/// The standard field battery for generator checks: constants, linear
/// functions, and transcendental mixtures with nonvanishing mixed
/// derivatives.
pub fn commutation_battery() -> [BatteryFn; 6] {
    [
        ("one", |_, _| 1.0),
        ("theta1", |t1, _| t1),
        ("theta2", |_, t2| t2),
        ("sin1_plus_cos2", |t1, t2| t1.sin() + t2.cos()),
        ("sin1_times_sin2", |t1, t2| t1.sin() * t2.sin()),
        ("exp_mixed", |t1, t2| (0.1 * (t1 + t2)).exp()),
    ]
}

/// The two zero-diffusivity potentials subject to the constant check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroKappaPotential {
    Spiral { mu: f64 },
    Chordal,
}

impl ZeroKappaPotential {
    fn eval(&self, t1: f64, t2: f64) -> Result<f64> {
        match self {
            ZeroKappaPotential::Spiral { mu } => u_mu(*mu, t1, t2),
            ZeroKappaPotential::Chordal => u_chordal(t1, t2),
        }
    }

    /// The constant the potential must produce.
    pub fn expected_constant(&self) -> f64 {
        match self {
            ZeroKappaPotential::Spiral { mu } => mu * mu - 3.0,
            ZeroKappaPotential::Chordal => -3.0,
        }
    }
}

/// Residual of the zero-diffusivity constant identity
///
/// ```text
/// (d2 U)^2 + 2 cot((theta1-theta2)/2) d1 U - 3 / sin^2((theta2-theta1)/2) = C
/// ```
///
/// with the derivatives taken by five-point differences.
pub fn zero_kappa_residual(
    potential: &ZeroKappaPotential,
    theta1: f64,
    theta2: f64,
) -> Result<ResidualReport> {
    let gap = theta2 - theta1;
    if !(gap > 0.0 && gap < TAU) {
        return Err(Error::SingularGap { gap });
    }
    let h = 1e-3;
    let u = |x: f64, y: f64| potential.eval(x, y);
    let d1 = five_point_d1(&|x| u(x, theta2), theta1, h)?;
    let d2 = five_point_d1(&|y| u(theta1, y), theta2, h)?;
    let s = gap / 2.0;
    let lhs = d2 * d2 + 2.0 * cot(-s) * d1 - 3.0 * csc2(s);
    let expected = potential.expected_constant();
    Ok(ResidualReport {
        location: (theta1, theta2),
        value: lhs - expected,
        expected,
        fd_step: Some(h),
        estimated_order: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn spiral_null_state_residual_is_analytic_zero() {
        for mu in [0.0, 1.0, 3.0f64.sqrt()] {
            let pf = PartitionFn::spiral(3.0, mu).unwrap();
            let rep = bpz_residual(&pf, 0.3, 2.4).unwrap();
            assert!(rep.value.abs() < 1e-13, "mu={mu}: {}", rep.value);
            assert_eq!(rep.expected, (mu * mu - 3.0) / 6.0);
            assert!(rep.fd_step.is_none());
        }
    }

    #[test]
    fn weighted_null_state_residual_small_and_high_order() {
        let pf = PartitionFn::cr_weighted(3.0, 0.4).unwrap();
        let rep = bpz_residual(&pf, 0.0, 2.0).unwrap();
        assert!(rep.value.abs() < 1e-4, "residual {}", rep.value);
        let order = rep.estimated_order.expect("order must be measurable");
        assert!(order > 2.0, "order {order}");
        assert!((rep.expected - (0.125 - 0.4)).abs() < 1e-15);
    }

    #[test]
    fn weighted_null_state_constant_is_location_free() {
        let pf = PartitionFn::cr_weighted(4.0, 0.125).unwrap();
        let f1 = bpz_residual(&pf, 0.0, 2.0).unwrap();
        let f2 = bpz_residual(&pf, 0.0, 2.9).unwrap();
        let measured1 = f1.value + f1.expected;
        let measured2 = f2.value + f2.expected;
        assert!(
            (measured1 - measured2).abs() < 1e-5,
            "{measured1} vs {measured2}"
        );
    }

    #[test]
    fn bracket_residual_decays_for_weight_generators() {
        let pf = PartitionFn::spiral(2.0, 1.0).unwrap();
        let spec = GeneratorSpec::from_partition(&pf);
        let f = commutation_battery()[3].1;
        let rep = commutation_bracket_residual(&spec, f, 0.3, 2.1, 0.1).unwrap();
        match rep.estimated_order {
            Some(order) => assert!(order > 2.0, "order {order}"),
            None => assert!(rep.value.abs() < 1e-11),
        }
    }

    #[test]
    fn constant_drift_offset_is_detected() {
        let pf = PartitionFn::spiral(2.0, 1.0).unwrap();
        let spec = GeneratorSpec::from_partition(&pf).with_b1_offset(0.1);
        let f = commutation_battery()[3].1;
        let rep = commutation_bracket_residual(&spec, f, 0.3, 2.1, 0.1).unwrap();
        assert!(
            rep.value.abs() > 1e-3,
            "perturbation must not pass, residual {}",
            rep.value
        );
    }

    #[test]
    fn cross_symmetry_holds_for_both_families() {
        for pf in [
            PartitionFn::spiral(3.0, 0.5).unwrap(),
            PartitionFn::cr_weighted(3.0, 0.4).unwrap(),
        ] {
            let spec = GeneratorSpec::from_partition(&pf);
            let rep = drift_cross_symmetry(&spec, 0.4, 2.2).unwrap();
            assert!(rep.value.abs() < 1e-8, "residual {}", rep.value);
        }
    }

    #[test]
    fn zero_kappa_constants_match() {
        for (pot, c) in [
            (ZeroKappaPotential::Spiral { mu: 0.0 }, -3.0),
            (ZeroKappaPotential::Spiral { mu: 2.0 }, 1.0),
            (ZeroKappaPotential::Chordal, -3.0),
        ] {
            assert_eq!(pot.expected_constant(), c);
            let rep = zero_kappa_residual(&pot, 0.2, 0.2 + FRAC_PI_2).unwrap();
            assert!(rep.value.abs() < 1e-9, "{pot:?}: residual {}", rep.value);
        }
    }

    #[test]
    fn stencil_domain_is_guarded() {
        let pf = PartitionFn::cr_weighted(3.0, 0.4).unwrap();
        let near_edge = bpz_residual(&pf, 0.0, 0.02);
        assert!(matches!(
            near_edge,
            Err(Error::StencilOutOfDomain { .. })
        ));
        assert!(bpz_residual(&pf, 0.0, PI + TAU).is_err());
    }
}
