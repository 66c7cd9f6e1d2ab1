//! The oriented counterexample: a minimizer `q̄` on SE(2) that rotates in
//! place before moving, and planar curves `pⁿ` whose cost tends to `C[q̄]`
//! while their limit violates the oriented boundary conditions.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt::Write as _;

use serde::Serialize;

use crate::cost::{cost_c, cost_j};
use crate::curve::{CircularArc, Frame, Line, PlanarCurve, Sampled, Segment};
use crate::error::{Error, Result};
use crate::extremal::{integrate_oriented, Covector, ExtremalSpec, IntegrateOptions};
use crate::se2::{angle_diff_2pi, BoundaryConditions, Mode, Point2, Se2};
use crate::tolerances::Tolerances;
use crate::trajectory::{ArcKind, ControlTrajectory};

/// Largest accepted half-interval.
pub const XI_MAX: f64 = 0.05;
/// Half-interval used when none is given.
pub const XI_DEFAULT: f64 = 0.02;
/// Time of the switch from rotation to pendulum on the extremal through
/// the identity.
pub const SWITCH_TIME: f64 = FRAC_PI_2;
/// Samples per half-interval.
const SAMPLES_PER_HALF: f64 = 2000.0;

/// Initial covector of the extremal from the identity that switches at
/// `t = π/2`.
pub fn switching_covector() -> Covector {
    Covector::new(-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2)
}

/// `q̄` on `[0, 2ξ]`: rotation at unit rate on `[0, ξ]`, pendulum on
/// `[ξ, 2ξ]`, with `q̄(ξ) = Id`.
#[derive(Debug, Clone)]
pub struct QBarSpec {
    pub xi: f64,
    pub trajectory: ControlTrajectory,
    /// Covector at `t = ξ`, expressed in the frame where `q̄(ξ) = Id`.
    pub covector_at_xi: Covector,
    pub tol: Tolerances,
}

pub fn build_qbar(xi: f64) -> Result<QBarSpec> {
    build_qbar_with(xi, &[], &Tolerances::default())
}

/// As [`build_qbar`], also sampling `q̄` at each time in `marks`.
pub fn build_qbar_with(xi: f64, marks: &[f64], tol: &Tolerances) -> Result<QBarSpec> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::InvalidSpec(format!("xi must be positive, got {xi}")));
    }
    if xi > XI_MAX {
        return Err(Error::XiTooLarge {
            xi,
            reason: format!("the construction is only certified for xi <= {XI_MAX}"),
        });
    }
    let t_a = SWITCH_TIME - xi;
    let t_b = SWITCH_TIME + xi;
    let mut extra = vec![t_a, SWITCH_TIME];
    extra.extend(marks.iter().filter(|&&m| m > 0.0 && m < 2.0 * xi).map(|m| m + t_a));
    let opts = IntegrateOptions {
        sample_step: Some(xi / SAMPLES_PER_HALF),
        extra_times: extra,
        tol: *tol,
        ..IntegrateOptions::default()
    };
    let spec = ExtremalSpec::new(Se2::identity(), switching_covector(), t_b, Mode::Oriented)?;
    let full = integrate_oriented(&spec, &opts)?;

    let kinds: Vec<ArcKind> = full.arcs.iter().map(|a| a.kind).collect();
    if kinds != [ArcKind::PureRotation, ArcKind::Pendulum] {
        return Err(Error::XiTooLarge {
            xi,
            reason: "h1 returns to zero before the pendulum arc reaches xi".into(),
        });
    }
    let switch = full.arcs[0].last();
    if (switch.t - SWITCH_TIME).abs() > 1e-12 {
        return Err(Error::InvalidSpec(format!(
            "rotation arc ends at {} instead of pi/2",
            switch.t
        )));
    }
    let lam_switch = switch.covector.expect("extremal samples carry covectors");
    if lam_switch.h1(switch.theta).abs() > 1e-12 {
        return Err(Error::InvalidSpec("h1 does not vanish at the switch".into()));
    }

    // keep θ unwrapped so that θ̄(0) = −ξ rather than 2π − ξ
    let mut to_id = switch.pose().inverse();
    to_id.theta = -switch.theta;
    let shifted = full
        .window(t_a, t_b)?
        .left_translated(&to_id)
        .time_shifted(-t_a);
    let pend = &shifted.arcs[1];
    if pend
        .samples
        .iter()
        .skip(1)
        .any(|s| s.covector.map_or(true, |l| !(l.h1(s.theta) > 0.0)))
    {
        return Err(Error::XiTooLarge {
            xi,
            reason: "h1 is not positive along the pendulum arc".into(),
        });
    }
    // h2 alone sets the level at the switch; rescale to the unit level
    let covector_at_xi = pend
        .first()
        .covector
        .expect("extremal samples carry covectors")
        .normalized_at(0.0)?;
    Ok(QBarSpec {
        xi,
        trajectory: shifted,
        covector_at_xi,
        tol: *tol,
    })
}

impl QBarSpec {
    pub fn theta0(&self) -> f64 {
        self.trajectory.start().theta
    }

    pub fn start_pose(&self) -> Se2 {
        self.trajectory.start_se2()
    }

    pub fn end_pose(&self) -> Se2 {
        self.trajectory.end_se2()
    }

    /// Oriented conditions joining the ends of `q̄`.
    pub fn boundary_conditions(&self) -> Result<BoundaryConditions> {
        let a = self.start_pose();
        let b = self.end_pose();
        BoundaryConditions::from_angles((a.x, a.y, a.theta), (b.x, b.y, b.theta), Mode::Oriented)
    }

    /// The planar projection `p̄` restricted to `[from, 2ξ]` with
    /// `ξ < from < 2ξ`, re-integrated from `q̄(ξ) = Id` so that `from` is a
    /// sample. Frames are exact.
    pub fn tail(&self, from: f64) -> Result<ControlTrajectory> {
        let xi = self.xi;
        if !(from > xi && from < 2.0 * xi) {
            return Err(Error::InvalidSpec(format!(
                "tail start {from} is outside ({xi}, {})",
                2.0 * xi
            )));
        }
        let off = from - xi;
        let opts = IntegrateOptions {
            sample_step: Some((xi - off) / SAMPLES_PER_HALF),
            extra_times: vec![off],
            tol: self.tol,
            ..IntegrateOptions::default()
        };
        let spec = ExtremalSpec::new(Se2::identity(), self.covector_at_xi, xi, Mode::Oriented)?;
        let traj = integrate_oriented(&spec, &opts)?;
        if traj.arcs.len() != 1 || traj.arcs[0].kind != ArcKind::Pendulum {
            return Err(Error::XiTooLarge {
                xi,
                reason: "re-integrated tail leaves the pendulum arc".into(),
            });
        }
        Ok(traj.window(off, xi)?.time_shifted(xi))
    }
}

/// Which straight piece is shortened to make the tangent lengths equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionCase {
    /// `ℓ(OB) ≤ ℓ(BC)`: arc `OD`, then segment `DC`.
    ObLeBc,
    /// `ℓ(OB) > ℓ(BC)`: segment `OD`, then arc `DC`.
    ObGeBc,
}

/// One member of the minimizing sequence.
#[derive(Debug, Clone)]
pub struct PnCurve {
    pub n: usize,
    pub curve: PlanarCurve,
    pub case: ConstructionCase,
    pub o: Point2,
    pub b: Point2,
    pub c: Point2,
    pub d: Point2,
    /// The circular fillet.
    pub arc: CircularArc,
    /// Time at which the copy of `p̄` begins.
    pub tail_start: f64,
}

fn cross(a: Point2, b: Point2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn unit(angle: f64) -> Point2 {
    Point2::new(angle.cos(), angle.sin())
}

pub fn build_pn(qbar: &QBarSpec, n: usize) -> Result<PnCurve> {
    if n == 0 {
        return Err(Error::InvalidSpec("n must be at least 1".into()));
    }
    let xi = qbar.xi;
    let tail_start = xi + xi / n as f64;
    // for n = 1 the copy of p̄ is empty and C is the end point
    let tail = if n == 1 { None } else { Some(qbar.tail(tail_start)?) };
    let first = *tail.as_ref().map_or(qbar.trajectory.end(), |t| t.start());

    let o = qbar.trajectory.start().point();
    let theta0 = qbar.theta0();
    let theta_c = first.theta;
    let c = first.point();
    let dir_s = unit(theta0);
    let dir_r = unit(theta_c);

    // O + a·dir_s = C + b·dir_r
    let det = cross(dir_s, dir_r);
    if det.abs() < 1e-12 {
        return Err(Error::DegenerateIntersection(det.abs()));
    }
    let a = cross(c - o, dir_r) / det;
    let b_par = cross(c - o, dir_s) / det;
    let b = o + dir_s * a;
    if !(a > 0.0 && b_par < 0.0) {
        return Err(Error::DegenerateIntersection(det.abs()));
    }
    let ob = a;
    let bc = -b_par;
    let turn = angle_diff_2pi(theta_c, theta0);
    let half = (turn / 2.0).abs().tan();

    let (case, d, arc_start, arc_dir, tangent_len) = if ob <= bc {
        (ConstructionCase::ObLeBc, b + dir_r * ob, o, theta0, ob)
    } else {
        let d = b - dir_s * bc;
        (ConstructionCase::ObGeBc, d, d, theta0, bc)
    };
    let radius = tangent_len / half;
    let line_len = (ob - bc).abs();
    let arc_len = radius * turn.abs();
    let head = tail_start;
    let total = arc_len + line_len;
    let mut pieces = Vec::new();
    let arc;
    match case {
        ConstructionCase::ObLeBc => {
            let t1 = head * arc_len / total;
            arc = CircularArc::from_tangent(0.0, t1, arc_start, arc_dir, radius, turn);
            pieces.push(Segment::Arc(arc));
            if line_len > 0.0 {
                pieces.push(Segment::Line(Line {
                    t0: t1,
                    t1: head,
                    from: d,
                    to: c,
                }));
            }
        }
        ConstructionCase::ObGeBc => {
            let t1 = head * line_len / total;
            if line_len > 0.0 {
                pieces.push(Segment::Line(Line {
                    t0: 0.0,
                    t1,
                    from: o,
                    to: d,
                }));
            }
            arc = CircularArc::from_tangent(t1, head, arc_start, arc_dir, radius, turn);
            pieces.push(Segment::Arc(arc));
        }
    }
    let arc_end = arc.point_at(arc.t1);
    let arc_target = match case {
        ConstructionCase::ObLeBc => d,
        ConstructionCase::ObGeBc => c,
    };
    let miss = (arc_end - arc_target).norm();
    if miss > 1e-10 {
        return Err(Error::InvalidCurve(format!("fillet misses its tangency point by {miss:e}")));
    }

    if let Some(tail) = &tail {
        let samples: Vec<_> = tail.samples().copied().collect();
        let mut times: Vec<f64> = samples.iter().map(|s| s.t).collect();
        times[0] = head;
        let points = samples.iter().map(|s| s.point()).collect();
        let frames = samples
            .iter()
            .map(|s| Frame {
                theta: s.theta,
                u1: s.u1,
                u2: s.u2,
            })
            .collect();
        pieces.push(Segment::Sampled(Sampled::with_frames(times, points, frames)?));
    }
    let curve = PlanarCurve::new(pieces)?;
    Ok(PnCurve {
        n,
        curve,
        case,
        o,
        b,
        c,
        d,
        arc,
        tail_start,
    })
}

impl PnCurve {
    /// Turning angle of the fillet.
    pub fn arc_turn(&self) -> f64 {
        self.arc.sweep
    }

    /// `J` of the fillet alone.
    pub fn arc_cost(&self) -> f64 {
        self.arc.sweep.abs() * self.arc.radius.hypot(1.0)
    }

    /// `Δangle ≤ J[arc] ≤ ℓ(arc) + Δangle`.
    pub fn sandwich_holds(&self) -> bool {
        let turn = self.arc.sweep.abs();
        let j = self.arc_cost();
        turn <= j && j <= self.arc.length() + turn
    }

    /// `J` of the copy of `p̄` (zero for `n = 1`).
    pub fn tail_cost(&self) -> Result<f64> {
        match self.curve.segments().last() {
            Some(seg @ Segment::Sampled(_)) => Ok(cost_j(&PlanarCurve::new(vec![seg.clone()])?)?.value),
            _ => Ok(0.0),
        }
    }

    /// Largest distance between `pⁿ(t)` and `p̄(t)` over the samples of `q̄`.
    pub fn max_distance_to(&self, qbar: &QBarSpec) -> f64 {
        qbar.trajectory
            .samples()
            .map(|s| (self.curve.point_at(s.t) - s.point()).norm())
            .fold(0.0, f64::max)
    }
}

/// Membership test for smooth oriented curves: nonvanishing speed, tangent
/// direction continuous across pieces, ends matching the conditions.
#[derive(Debug, Clone, Serialize)]
pub struct D1Check {
    pub min_speed: f64,
    /// Largest tangent angle jump at a join between pieces.
    pub max_tangent_jump: f64,
    pub start_point_error: f64,
    pub end_point_error: f64,
    /// Angle between the start tangent and the prescribed direction.
    pub start_dir_error: f64,
    pub end_dir_error: f64,
    pub admissible: bool,
}

/// Tolerance for [`check_d1`] on positions and angles.
const D1_TOL: f64 = 1e-9;

pub fn check_d1(curve: &PlanarCurve, bc: &BoundaryConditions) -> D1Check {
    let segs = curve.segments();
    let mut min_speed = f64::INFINITY;
    for seg in segs {
        let speeds: Vec<f64> = match seg {
            Segment::Sampled(s) => s.jets().iter().map(|j| j.speed()).collect(),
            Segment::Line(l) => vec![l.length() / (l.t1 - l.t0)],
            Segment::Arc(a) => vec![a.length() / (a.t1 - a.t0)],
        };
        min_speed = speeds.into_iter().fold(min_speed, f64::min);
    }
    let angle = |v: Point2| v.y.atan2(v.x);
    let max_tangent_jump = segs
        .windows(2)
        .map(|w| angle_diff_2pi(angle(w[1].start_tangent()), angle(w[0].end_tangent())).abs())
        .fold(0.0, f64::max);
    let start_point_error = (curve.start_point() - bc.start_point).norm();
    let end_point_error = (curve.end_point() - bc.end_point).norm();
    let start_dir_error = angle_diff_2pi(angle(curve.start_tangent()), bc.start_angle()).abs();
    let end_dir_error = angle_diff_2pi(angle(curve.end_tangent()), bc.end_angle()).abs();
    let admissible = min_speed > Tolerances::default().vanishing_speed
        && max_tangent_jump < D1_TOL
        && start_point_error < D1_TOL
        && end_point_error < D1_TOL
        && start_dir_error < D1_TOL
        && end_dir_error < D1_TOL;
    D1Check {
        min_speed,
        max_tangent_jump,
        start_point_error,
        end_point_error,
        start_dir_error,
        end_dir_error,
        admissible,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub j_pn: f64,
    pub c_qbar: f64,
    pub gap: f64,
    /// `J[pⁿ]` on `[ξ + ξ/n, 2ξ]`.
    pub tail_j: f64,
    /// `C[q̄]` on the same interval.
    pub tail_c: f64,
    pub arc_turn: f64,
    pub arc_length: f64,
    pub arc_cost: f64,
    pub sandwich: bool,
    pub dist_b: f64,
    pub dist_c: f64,
    pub max_distance: f64,
    pub case: ConstructionCase,
    pub d1: D1Check,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub xi: f64,
    pub c_qbar: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// `n,J_pn,C_qbar,gap`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,J_pn,C_qbar,gap\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{}", r.n, r.j_pn, r.c_qbar, r.gap);
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Positive gaps that decrease with `n` (rows sorted by `n`).
    pub fn gaps_positive_and_decreasing(&self) -> bool {
        self.rows.iter().all(|r| r.gap > 0.0)
            && self.rows.windows(2).all(|w| w[1].gap < w[0].gap)
    }
}

pub fn convergence_table(qbar: &QBarSpec, ns: &[usize]) -> Result<ConvergenceTable> {
    let xi = qbar.xi;
    let marks: Vec<f64> = ns.iter().map(|&n| xi + xi / n.max(1) as f64).collect();
    let marked = build_qbar_with(xi, &marks, &qbar.tol)?;
    let c_qbar = cost_c(&marked.trajectory).value;
    let bc = qbar.boundary_conditions()?;

    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                let (marked, bc) = (&marked, &bc);
                scope.spawn(move || row(qbar, marked, bc, c_qbar, n))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("row worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rows = rows;
    rows.sort_by_key(|r| r.n);
    Ok(ConvergenceTable { xi, c_qbar, rows })
}

fn row(qbar: &QBarSpec, marked: &QBarSpec, bc: &BoundaryConditions, c_qbar: f64, n: usize) -> Result<ConvergenceRow> {
    let pn = build_pn(qbar, n)?;
    let j_pn = cost_j(&pn.curve)?.value;
    let tail_j = pn.tail_cost()?;
    let tail_c = if n == 1 {
        0.0
    } else {
        cost_c(&marked.trajectory.window(pn.tail_start, 2.0 * qbar.xi)?).value
    };
    Ok(ConvergenceRow {
        n,
        j_pn,
        c_qbar,
        gap: j_pn - c_qbar,
        tail_j,
        tail_c,
        arc_turn: pn.arc_turn(),
        arc_length: pn.arc.length(),
        arc_cost: pn.arc_cost(),
        sandwich: pn.sandwich_holds(),
        dist_b: (pn.b - pn.o).norm(),
        dist_c: (pn.c - pn.o).norm(),
        max_distance: pn.max_distance_to(qbar),
        case: pn.case,
        d1: check_d1(&pn.curve, bc),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn qbar_passes_through_identity_at_xi() {
        let q = build_qbar(XI_DEFAULT).unwrap();
        let mid = q.trajectory.arcs[1].first();
        assert_abs_diff_eq!(mid.t, XI_DEFAULT, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.x, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(mid.y, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(angle_diff_2pi(mid.theta, 0.0), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(q.theta0(), -XI_DEFAULT, epsilon = 1e-10);
        assert_abs_diff_eq!(cost_c(&q.trajectory).value, 2.0 * XI_DEFAULT, epsilon = 1e-8);
    }

    #[test]
    fn qbar_rejects_large_xi() {
        assert!(matches!(build_qbar(0.2), Err(Error::XiTooLarge { .. })));
        assert!(build_qbar(0.0).is_err());
    }

    #[test]
    fn tail_matches_qbar() {
        let q = build_qbar(XI_DEFAULT).unwrap();
        let tail = q.tail(1.5 * XI_DEFAULT).unwrap();
        let e = tail.end();
        let f = q.trajectory.end();
        assert!((e.point() - f.point()).norm() < 1e-10);
        assert_abs_diff_eq!(e.theta, f.theta, epsilon = 1e-10);
    }

    #[test]
    fn pn_is_tangent_and_hits_the_ends() {
        let q = build_qbar(XI_DEFAULT).unwrap();
        let bc = q.boundary_conditions().unwrap();
        for n in [1, 3, 10, 100] {
            let p = build_pn(&q, n).unwrap();
            let chk = check_d1(&p.curve, &bc);
            assert!(chk.admissible, "n = {n}: {chk:?}");
            assert!(p.sandwich_holds());
        }
    }

    #[test]
    fn fillet_turn_tends_to_xi() {
        let q = build_qbar(XI_DEFAULT).unwrap();
        let p = build_pn(&q, 1000).unwrap();
        assert_abs_diff_eq!(p.arc_turn(), XI_DEFAULT, epsilon = 1e-4);
    }
}
