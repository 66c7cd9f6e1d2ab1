//! Curves, costs and lifts across module boundaries.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::io::Cursor;

use approx::assert_relative_eq;
use proptest::prelude::*;
use sr_elastica::cost::{arclength_reparam, cost_c, cost_e, cost_j, cost_j_weighted, Functional};
use sr_elastica::curve::PlanarCurve;
use sr_elastica::lift::{lift, project};
use sr_elastica::se2::{Point2, Se2};
use sr_elastica::Error;

#[test]
fn lift_then_project_returns_the_curve() {
    for (name, curve) in common::curve_corpus() {
        let traj = lift(&curve).unwrap();
        let back = project(&traj).unwrap();
        for s in traj.samples() {
            let err = (back.point_at(s.t) - curve.point_at(s.t)).norm();
            assert!(err < 1e-12, "{name}: {err} at {}", s.t);
        }
        assert_relative_eq!(cost_j(&back).unwrap().value, cost_j(&curve).unwrap().value, max_relative = 1e-6);
    }
}

#[test]
fn csv_round_trip_keeps_the_cost() {
    for (name, curve) in common::curve_corpus().into_iter().step_by(3) {
        let text = lift(&curve).map(|t| project(&t).unwrap()).unwrap().to_csv(400);
        let back = PlanarCurve::from_csv(Cursor::new(text)).unwrap();
        let (a, b) = (cost_j(&curve).unwrap().value, cost_j(&back).unwrap().value);
        assert!((a - b).abs() < 1e-8 * a, "{name}: {a} vs {b}");
    }
}

#[test]
fn quarter_circle_closed_form() {
    let curve = PlanarCurve::sample_fn(|t| Point2::new(t.cos(), t.sin()), 0.0, FRAC_PI_2, 2001).unwrap();
    assert_relative_eq!(cost_j(&curve).unwrap().value, FRAC_PI_2 * SQRT_2, epsilon = 1e-9);
    // E1 on a unit circle is the angle swept.
    assert_relative_eq!(cost_e(&curve, Functional::E1).unwrap().value, FRAC_PI_2, epsilon = 1e-7);
}

#[test]
fn weighted_cost_and_homothety() {
    for (_, curve) in common::curve_corpus().into_iter().take(10) {
        for beta in [0.5, 2.0, -3.0] {
            let scaled = curve.homothety(beta).unwrap();
            let lhs = cost_j_weighted(&scaled, beta).unwrap();
            let rhs = beta.abs() * cost_j(&curve).unwrap().value;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        }
    }
}

#[test]
fn elastica_family_fails_through_a_cusp() {
    // (t², t³) has a cusp at the origin
    let curve = PlanarCurve::sample_fn(|t| Point2::new(t * t, t * t * t), -1.0, 1.0, 801).unwrap();
    assert!(cost_j(&curve).unwrap().value.is_finite());
    assert!(matches!(
        cost_e(&curve, Functional::E2),
        Err(Error::VanishingVelocity { .. })
    ));
}

#[test]
fn reparam_of_lifted_corpus_is_constant_speed() {
    for (name, curve) in common::curve_corpus() {
        let traj = lift(&curve).unwrap();
        let out = arclength_reparam(&traj).unwrap();
        let rate = cost_c(&traj).value / traj.duration();
        for s in out.samples() {
            assert!((s.control_norm() - rate).abs() < 1e-6 * rate, "{name}");
        }
        assert_relative_eq!(cost_c(&out).value, cost_c(&traj).value, max_relative = 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rigid_motion_preserves_j(x in -5.0..5.0f64, y in -5.0..5.0f64, th in -PI..PI, idx in 0usize..20) {
        let (_, curve) = common::curve_corpus().swap_remove(idx);
        let j = cost_j(&curve).unwrap().value;
        let k = cost_j(&curve.transformed(&Se2::new(x, y, th))).unwrap().value;
        prop_assert!((j - k).abs() < 1e-6 * j);
    }

    #[test]
    fn se2_group_laws(a in prop::array::uniform3(-3.0..3.0f64), b in prop::array::uniform3(-3.0..3.0f64)) {
        let (g, h) = (Se2::new(a[0], a[1], a[2]), Se2::new(b[0], b[1], b[2]));
        prop_assert!((g * g.inverse()).distance(&Se2::identity()) < 1e-12);
        let p = Point2::new(0.3, -0.7);
        prop_assert!(((g * h).act(&p) - g.act(&h.act(&p))).norm() < 1e-12);
    }
}
