//! Boundary value problems end to end.

mod common;

use std::f64::consts::PI;

use sr_elastica::cost::cost_j;
use sr_elastica::extremal::{integrate_projective, ExtremalSpec, IntegrateOptions};
use sr_elastica::lift::project;
use sr_elastica::se2::{BoundaryConditions, Mode, Point2};
use sr_elastica::shooting::{analyze_oriented, solve_projective, solve_projective_with, ShootingOptions};

fn bc(start: (f64, f64, f64), end: (f64, f64, f64), mode: Mode) -> BoundaryConditions {
    BoundaryConditions::from_angles(start, end, mode).unwrap()
}

#[test]
fn u_turn_has_at_most_two_cusps() {
    let results = solve_projective(&bc((0.0, 0.0, 0.0), (0.0, 1.0, PI), Mode::Projective)).unwrap();
    let best = &results[0];
    assert!(best.converged && best.mismatch.max_abs() < 1e-8);
    assert!(best.cusp_times.len() <= 2);
    assert!(results.windows(2).all(|w| w[0].cost <= w[1].cost));
}

#[test]
fn cost_is_invariant_under_rigid_motion() {
    let mut rng = common::rng(31);
    let base = bc((0.0, 0.0, 0.3), (1.2, 0.4, 1.1), Mode::Projective);
    let c0 = solve_projective(&base).unwrap()[0].cost;
    for _ in 0..3 {
        let g = common::random_motion(&mut rng);
        let c = solve_projective(&base.transformed(&g)).unwrap()[0].cost;
        assert!((c - c0).abs() < 1e-8 * c0, "{c} vs {c0}");
    }
}

#[test]
fn projective_cost_ignores_direction_flips() {
    let a = bc((0.0, 0.0, 0.3), (1.2, 0.4, 1.1), Mode::Projective);
    let b = bc((0.0, 0.0, 0.3 + PI), (1.2, 0.4, 1.1 - PI), Mode::Projective);
    let swapped = bc((1.2, 0.4, 1.1), (0.0, 0.0, 0.3), Mode::Projective);
    let c = solve_projective(&a).unwrap()[0].cost;
    for other in [b, swapped] {
        let d = solve_projective(&other).unwrap()[0].cost;
        assert!((c - d).abs() < 1e-6 * c, "{c} vs {d}");
    }
}

#[test]
fn solution_meets_the_boundary_conditions() {
    let target = bc((0.5, -0.5, 2.0), (2.0, 1.0, 0.2), Mode::Projective);
    let best = &solve_projective(&target).unwrap()[0];
    let start = best.trajectory.start_se2().to_projective().representative();
    let end = best.trajectory.end_se2().to_projective().representative();
    assert!(start.distance(&target.start_pose().to_projective().representative()) < 1e-8);
    assert!(end.distance(&target.end_pose().to_projective().representative()) < 1e-8);
}

#[test]
fn oriented_straight_line_is_admissible() {
    let analysis = analyze_oriented(&bc((0.0, 0.0, 0.0), (2.0, 0.0, 0.0), Mode::Oriented)).unwrap();
    assert!((analysis.cost - 2.0).abs() < 1e-8);
    assert!(analysis.projection_admissible && analysis.witness.is_none());
}

#[test]
fn oriented_reversal_needs_rotation_arcs() {
    // Going straight backwards: the car turns in place, drives, turns back.
    let analysis = analyze_oriented(&bc((0.0, 0.0, 0.0), (-1.0, 0.0, 0.0), Mode::Oriented)).unwrap();
    assert!(!analysis.projection_admissible);
    assert!(analysis.witness.is_some());
    assert!(analysis.cost <= 1.0 + 2.0 * PI + 1e-8);
    assert!(analysis.message().contains("not attained"));
}

#[test]
fn tangent_lines_agree_across_cusps() {
    let target = bc((0.0, 0.0, 0.0), (0.0, 1.0, PI), Mode::Projective);
    let best = &solve_projective(&target).unwrap()[0];
    assert!(!best.cusp_times.is_empty());
    let h = 1e-7;
    let opts = IntegrateOptions {
        sample_step: None,
        extra_times: best.cusp_times.iter().flat_map(|&t| [t - h, t + h]).collect(),
        ..IntegrateOptions::default()
    };
    let spec = ExtremalSpec::new(target.start_pose(), best.lambda0, best.duration, Mode::Projective).unwrap();
    let samples: Vec<_> = integrate_projective(&spec, &opts).unwrap().trajectory.samples().copied().collect();
    let at = |t: f64| samples.iter().find(|s| (s.t - t).abs() < 1e-12).copied().unwrap();
    for &t in &best.cusp_times {
        let (before, after) = (at(t - h), at(t + h));
        assert!(before.u1 * after.u1 < 0.0, "u1 keeps its sign at {t}");
        let dir = |s: sr_elastica::trajectory::Sample| Point2::new(s.theta.cos(), s.theta.sin()) * s.u1.signum();
        let (a, b) = (dir(before), dir(after));
        assert!((a - b).norm().min((a + b).norm()) < 1e-6);
    }
}

#[test]
fn finer_start_grid_never_costs_more() {
    let target = bc((0.0, 0.0, 0.3), (1.2, 0.4, 1.1), Mode::Projective);
    let coarse = solve_projective(&target).unwrap()[0].cost;
    let base = ShootingOptions::default();
    let fine = ShootingOptions {
        alpha_count: 2 * base.alpha_count,
        lambda_theta_count: 2 * base.lambda_theta_count - 1,
        duration_factors: vec![0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0],
        probes: 2 * base.probes,
        ..base
    };
    let refined = solve_projective_with(&target, &fine).unwrap()[0].cost;
    assert!(refined <= coarse + 1e-9, "{refined} vs {coarse}");
}

#[test]
fn admissible_oriented_projection_keeps_the_cost() {
    let analysis = analyze_oriented(&bc((0.0, 0.0, 0.0), (1.0, 0.5, 0.5), Mode::Oriented)).unwrap();
    assert!(analysis.projection_admissible, "{}", analysis.message());
    let j = cost_j(&project(&analysis.minimizer).unwrap()).unwrap().value;
    assert!((j - analysis.cost).abs() < 1e-6, "{j} vs {}", analysis.cost);
}
