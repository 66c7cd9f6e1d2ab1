//! Corpora shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sr_elastica::curve::{CircularArc, Line, PlanarCurve, Segment};
use sr_elastica::extremal::{Covector, ExtremalSpec};
use sr_elastica::se2::{Mode, Point2, Se2};
use sr_elastica::trajectory::{Arc, ArcKind, ControlTrajectory, Sample};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normal extremal data on the unit level: random pose, `α`, `λθ`, with
/// `ρ` solved from `ρ² cos²(θ0 − α) + λθ² = 1`.
pub fn random_spec(rng: &mut ChaCha8Rng, duration: f64, mode: Mode) -> ExtremalSpec {
    loop {
        let q0 = Se2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TAU));
        let alpha = rng.gen_range(0.0..TAU);
        let c = (q0.theta - alpha).cos();
        if c.abs() < 0.2 {
            continue;
        }
        let lt: f64 = rng.gen_range(-0.95..0.95);
        let rho = (1.0 - lt * lt).sqrt() / c.abs();
        let lambda = Covector::from_polar(rho, alpha, lt);
        if let Ok(spec) = ExtremalSpec::new(q0, lambda, duration, mode) {
            return spec;
        }
    }
}

/// Twenty regular curves: lines, circular arcs and cubic splines, at
/// non-unit speeds.
pub fn curve_corpus() -> Vec<(String, PlanarCurve)> {
    let mut rng = rng(2024);
    let mut out = Vec::new();
    for i in 0..5 {
        let from = Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let to = from + Point2::new(rng.gen_range(0.2..2.0), rng.gen_range(-2.0..2.0));
        let t1 = rng.gen_range(0.5..3.0);
        let c = PlanarCurve::new(vec![Segment::Line(Line { t0: 0.0, t1, from, to })]).unwrap();
        out.push((format!("line {i}"), c));
    }
    for i in 0..5 {
        let start = Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let radius = rng.gen_range(0.3..3.0);
        let sweep = rng.gen_range(0.3..5.0) * if i % 2 == 0 { 1.0 } else { -1.0 };
        let arc = CircularArc::from_tangent(0.0, rng.gen_range(0.5..2.0), start, rng.gen_range(0.0..TAU), radius, sweep);
        out.push((format!("arc {i}"), PlanarCurve::new(vec![Segment::Arc(arc)]).unwrap()));
    }
    for i in 0..10 {
        // Cubic with x(t) = t, so the speed never drops below 1.
        let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let rot = Se2::new(0.0, 0.0, rng.gen_range(0.0..TAU));
        let f = move |t: f64| {
            let s = 1.0 - t;
            let y = 3.0 * s * s * t * a + 3.0 * s * t * t * b + t * t * t * c;
            rot.act(&Point2::new(t, y))
        };
        out.push((format!("spline {i}"), PlanarCurve::sample_fn(f, 0.0, 1.0, 4000).unwrap()));
    }
    out
}

/// Smooth increasing map of `[0, 1]` onto itself with `φ' ≥ 1 − |a| > 0`.
pub fn time_change(a: f64) -> impl Fn(f64) -> f64 {
    move |s: f64| s - a * (TAU * s).sin() / TAU
}

pub fn constant_arc(kind: ArcKind, t0: f64, t1: f64, start: Sample, u: (f64, f64), n: usize) -> Arc {
    let samples = (0..=n)
        .map(|i| {
            let t = t0 + (t1 - t0) * i as f64 / n as f64;
            let dt = t - t0;
            let theta = start.theta + u.1 * dt;
            let (x, y) = if u.1 == 0.0 {
                (start.x + u.0 * dt * start.theta.cos(), start.y + u.0 * dt * start.theta.sin())
            } else {
                let r = u.0 / u.1;
                (
                    start.x + r * (theta.sin() - start.theta.sin()),
                    start.y - r * (theta.cos() - start.theta.cos()),
                )
            };
            Sample {
                t,
                x,
                y,
                theta,
                u1: u.0,
                u2: u.1,
                covector: None,
            }
        })
        .collect();
    Arc { kind, samples }
}

/// Piecewise constant controls with at least one idle piece and one moving
/// piece.
pub fn trajectory_with_idle(rng: &mut ChaCha8Rng) -> ControlTrajectory {
    let pieces = rng.gen_range(3..7);
    let idle_at = rng.gen_range(0..pieces);
    let mut start = Sample {
        t: 0.0,
        x: rng.gen_range(-1.0..1.0),
        y: rng.gen_range(-1.0..1.0),
        theta: rng.gen_range(-PI..PI),
        u1: 0.0,
        u2: 0.0,
        covector: None,
    };
    let mut arcs = Vec::new();
    for k in 0..pieces {
        let dt = rng.gen_range(0.2..1.0);
        let u = if k == idle_at {
            (0.0, 0.0)
        } else {
            (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
        };
        let arc = constant_arc(ArcKind::Lifted, start.t, start.t + dt, start, u, 200);
        start = *arc.last();
        arcs.push(arc);
    }
    ControlTrajectory::new(Mode::Oriented, arcs).unwrap()
}

pub fn random_motion(rng: &mut ChaCha8Rng) -> Se2 {
    Se2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.0..TAU))
}
