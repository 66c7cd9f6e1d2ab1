//! Lifting planar curves to SE(2) and projecting trajectories back.

use crate::curve::{Frame, PlanarCurve, Sampled, Segment};
use crate::error::{Error, Result};
use crate::quadrature::linspace;
use crate::se2::{Mode, Point2};
use crate::tolerances::Tolerances;
use crate::trajectory::{Arc, ArcKind, ControlTrajectory, Sample};

/// Samples per exact primitive in a lift.
const PRIMITIVE_SAMPLES: usize = 64;

/// `γ ↦ (x, y, θ)` with `θ` the tangent angle, `u1 = ‖γ̇‖` and `u2 = θ̇`.
/// One arc per segment; `θ` is unwrapped to stay continuous.
pub fn lift(curve: &PlanarCurve) -> Result<ControlTrajectory> {
    lift_with(curve, &Tolerances::default())
}

pub fn lift_with(curve: &PlanarCurve, tol: &Tolerances) -> Result<ControlTrajectory> {
    let mut arcs = Vec::with_capacity(curve.segments().len());
    let mut prev_theta: Option<f64> = None;
    for seg in curve.segments() {
        let times: Vec<f64> = match seg {
            Segment::Sampled(s) => s.times.clone(),
            _ => linspace(seg.t_start(), seg.t_end(), PRIMITIVE_SAMPLES),
        };
        let exact = |i: usize, t: f64| -> Option<Frame> {
            match seg {
                Segment::Sampled(s) => s.frames.as_ref().map(|f| f[i]),
                Segment::Line(l) => Some(Frame {
                    theta: (l.to - l.from).y.atan2((l.to - l.from).x),
                    u1: l.length() / (l.t1 - l.t0),
                    u2: 0.0,
                }),
                Segment::Arc(a) => {
                    let dt = a.t1 - a.t0;
                    Some(Frame {
                        theta: a.tangent_angle_at(t),
                        u1: a.length() / dt,
                        u2: a.sweep / dt,
                    })
                }
            }
        };
        let jets = match seg {
            Segment::Sampled(s) if s.frames.is_none() => Some(s.jets()),
            _ => None,
        };
        let mut samples = Vec::with_capacity(times.len());
        for (i, &t) in times.iter().enumerate() {
            let point = match seg {
                Segment::Sampled(s) => s.points[i],
                _ => seg.point_at(t),
            };
            let frame = match exact(i, t) {
                Some(f) => f,
                None => {
                    let j = jets.as_ref().unwrap()[i];
                    let v = j.speed();
                    if !(v >= tol.vanishing_speed) {
                        return Err(Error::VanishingVelocity { t, speed: v });
                    }
                    Frame {
                        theta: j.velocity.y.atan2(j.velocity.x),
                        u1: v,
                        u2: j.cross() / (v * v),
                    }
                }
            };
            if frame.u1.abs() < tol.vanishing_speed {
                return Err(Error::VanishingVelocity { t, speed: frame.u1.abs() });
            }
            let theta = match prev_theta {
                Some(p) => p + crate::se2::angle_diff_2pi(frame.theta, p),
                None => frame.theta,
            };
            prev_theta = Some(theta);
            samples.push(Sample {
                t,
                x: point.x,
                y: point.y,
                theta,
                u1: frame.u1,
                u2: frame.u2,
                covector: None,
            });
        }
        arcs.push(Arc {
            kind: ArcKind::Lifted,
            samples,
        });
    }
    ControlTrajectory::new(Mode::Oriented, arcs)
}

/// Planar projection `(x, y)` keeping `(θ, u1, u2)` as exact frames.
/// Arcs along which the position does not move (rotations in place) have
/// no planar image and are dropped.
pub fn project(traj: &ControlTrajectory) -> Result<PlanarCurve> {
    let mut segments = Vec::new();
    for arc in &traj.arcs {
        if arc.samples.iter().all(|s| s.u1 == 0.0) {
            continue;
        }
        let times = arc.samples.iter().map(|s| s.t).collect();
        let points = arc.samples.iter().map(Sample::point).collect::<Vec<Point2>>();
        let frames = arc
            .samples
            .iter()
            .map(|s| Frame {
                theta: s.theta,
                u1: s.u1,
                u2: s.u2,
            })
            .collect();
        segments.push(Segment::Sampled(Sampled::with_frames(times, points, frames)?));
    }
    if segments.is_empty() {
        return Err(Error::InvalidCurve("trajectory never moves in the plane".into()));
    }
    PlanarCurve::new(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{cost_c, cost_j};
    use crate::curve::{CircularArc, Line};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn lift_of_line_and_arc() {
        let a = Segment::Line(Line { t0: 0.0, t1: 1.0, from: Point2::zeros(), to: Point2::new(2.0, 0.0) });
        let b = Segment::Arc(CircularArc::from_tangent(1.0, 2.0, Point2::new(2.0, 0.0), 0.0, 1.0, 3.0 * PI / 2.0));
        let c = PlanarCurve::new(vec![a, b]).unwrap();
        let q = lift(&c).unwrap();
        assert_eq!(q.arcs.len(), 2);
        assert_relative_eq!(q.end().theta, 3.0 * PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(cost_c(&q).value, cost_j(&c).unwrap().value, max_relative = 1e-12);
        assert!(q.dynamics_residual() < 1e-2);
    }

    #[test]
    fn lift_of_sampled_curve_unwraps_angle() {
        let c = PlanarCurve::sample_fn(|t| Point2::new(t.cos(), t.sin()), 0.0, 3.0 * PI, 3000).unwrap();
        let q = lift(&c).unwrap();
        assert_relative_eq!(q.end().theta - q.start().theta, 3.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn lift_rejects_stationary_curve() {
        let c = PlanarCurve::sample_fn(|t| Point2::new(t * t, t * t * t), -1.0, 1.0, 20).unwrap();
        assert!(matches!(lift(&c), Err(Error::VanishingVelocity { .. })));
    }

    #[test]
    fn project_round_trip() {
        let c = PlanarCurve::sample_fn(|t| Point2::new(t, 0.3 * t * t), 0.0, 1.0, 500).unwrap();
        let back = project(&lift(&c).unwrap()).unwrap();
        assert_relative_eq!(cost_j(&back).unwrap().value, cost_j(&c).unwrap().value, max_relative = 1e-9);
    }
}
