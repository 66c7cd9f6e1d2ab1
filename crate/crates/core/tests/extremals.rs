//! Extremal integration: symmetry, constraints and cusp bookkeeping.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use sr_elastica::extremal::{
    abnormal_chain, integrate_oriented, integrate_projective, AbnormalKind, Covector, ExtremalSpec,
    IntegrateOptions,
};
use sr_elastica::se2::{Mode, Se2};

fn rotated(l: &Covector, phi: f64) -> Covector {
    let (c, s) = (phi.cos(), phi.sin());
    Covector::new(c * l.lambda_x - s * l.lambda_y, s * l.lambda_x + c * l.lambda_y, l.lambda_theta)
}

#[test]
fn left_translation_commutes_with_integration() {
    let mut rng = common::rng(21);
    let opts = IntegrateOptions::with_step(1e-2);
    for _ in 0..10 {
        let spec = common::random_spec(&mut rng, 4.0, Mode::Projective);
        let g = common::random_motion(&mut rng);
        let moved = ExtremalSpec::new(g * spec.q0, rotated(&spec.lambda0, g.theta), spec.duration, spec.problem).unwrap();
        let a = integrate_projective(&spec, &opts).unwrap();
        let b = integrate_projective(&moved, &opts).unwrap();
        let expected = g * a.trajectory.end_se2();
        assert!(expected.to_projective().representative().distance(&b.trajectory.end_se2().to_projective().representative()) < 1e-8);
        assert_eq!(a.h1_zeros.len(), b.h1_zeros.len());
    }
}

#[test]
fn oriented_extremals_never_reverse() {
    let mut rng = common::rng(22);
    for _ in 0..20 {
        let spec = common::random_spec(&mut rng, 6.0, Mode::Oriented);
        let traj = integrate_oriented(&spec, &IntegrateOptions::with_step(1e-3)).unwrap();
        let worst = traj.samples().map(|s| s.u1).fold(f64::INFINITY, f64::min);
        assert!(worst >= 0.0);
        // finite differences of interpolated states: a consistency check, not
        // an accuracy bound
        assert!(traj.dynamics_residual() < 1e-4, "{}", traj.dynamics_residual());
    }
}

#[test]
fn projective_cusps_sit_where_u1_changes_sign() {
    let mut rng = common::rng(23);
    let mut seen = 0;
    for _ in 0..20 {
        let spec = common::random_spec(&mut rng, 6.0, Mode::Projective);
        let ext = integrate_projective(&spec, &IntegrateOptions::with_step(1e-3)).unwrap();
        let samples: Vec<_> = ext.trajectory.samples().collect();
        let flips: Vec<f64> = samples
            .windows(2)
            .filter(|w| w[0].u1 * w[1].u1 < 0.0)
            .map(|w| w[1].t)
            .collect();
        for t in &flips {
            assert!(ext.cusp_times().iter().any(|c| (c - t).abs() < 2e-3), "sign change at {t} without a cusp");
        }
        seen += flips.len();
    }
    assert!(seen > 0, "corpus exercised no cusps");
}

#[test]
fn abnormal_chain_ends_where_expected() {
    let q0 = Se2::new(1.0, 2.0, 0.0);
    let traj = abnormal_chain(
        &q0,
        &[
            (AbnormalKind::Line, 1.0),
            (AbnormalKind::Rotation { clockwise: false }, FRAC_PI_2),
            (AbnormalKind::Line, 2.0),
        ],
        Some(1e-2),
    )
    .unwrap();
    let end = traj.end_se2();
    assert!(end.distance(&Se2::new(2.0, 4.0, FRAC_PI_2)) < 1e-12, "{end:?}");
    assert!((traj.duration() - (3.0 + FRAC_PI_2)).abs() < 1e-12);
    assert!(traj.samples().all(|s| s.theta <= FRAC_PI_2 + 1e-12 && s.theta > -PI));
}
