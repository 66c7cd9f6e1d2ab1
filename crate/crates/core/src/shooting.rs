//! Multi-start shooting for the boundary value problems on SE(2) and on its
//! projective quotient.
//!
//! Normal extremals start at the identity with a unit-level covector
//! `λ = (cos ψ, λy, sin ψ)`, so `h1(0) = cos ψ` and `h2(0) = sin ψ`. The
//! unknowns are `(ψ, λy, ln T)` and the residual is the endpoint mismatch,
//! which makes the system square.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::cost::cost_c;
use crate::error::{Error, Result};
use crate::extremal::{
    abnormal_chain, integrate_oriented, integrate_projective, AbnormalKind, Covector, ExtremalSpec, H1Zero,
    IntegrateOptions,
};
use crate::se2::{angle_diff_2pi, angle_diff_pi, wrap_2pi, BoundaryConditions, Canonical, Mode, Pse2, Se2};
use crate::tolerances::Tolerances;
use crate::trajectory::{ArcKind, ControlTrajectory, Sample};

/// Endpoint minus target. `dtheta` is the shortest signed angle in the
/// quotient of the respective space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mismatch {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

impl Mismatch {
    pub fn max_abs(&self) -> f64 {
        self.dx.abs().max(self.dy.abs()).max(self.dtheta.abs())
    }

    pub fn norm(&self) -> f64 {
        (self.dx * self.dx + self.dy * self.dy + self.dtheta * self.dtheta).sqrt()
    }

    fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.dx, self.dy, self.dtheta)
    }
}

pub fn mismatch(end: &Se2, target: &Se2, space: Mode) -> Mismatch {
    let dtheta = match space {
        Mode::Oriented => angle_diff_2pi(end.theta, target.theta),
        Mode::Projective => angle_diff_pi(end.theta, target.theta),
    };
    Mismatch {
        dx: end.x - target.x,
        dy: end.y - target.y,
        dtheta,
    }
}

pub fn mismatch_projective(end: &Pse2, target: &Pse2) -> Mismatch {
    mismatch(&end.representative(), &target.representative(), Mode::Projective)
}

/// Start grid and refinement settings.
#[derive(Debug, Clone)]
pub struct ShootingOptions {
    /// Number of initial `α` values in `[0, 2π)`.
    pub alpha_count: usize,
    /// Number of initial `λθ` values in `[−1, 1]`.
    pub lambda_theta_count: usize,
    /// Durations tried, as multiples of the problem scale. The largest one
    /// bounds the scan; every start is probed along the whole interval.
    pub duration_factors: Vec<f64>,
    /// Probe times per start along `(0, max factor × scale]`.
    pub probes: usize,
    /// How many of the best starts are refined.
    pub refine: usize,
    pub max_iterations: usize,
    /// Output sampling of accepted results, as a fraction of the duration.
    pub samples_per_result: usize,
    pub tol: Tolerances,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            alpha_count: 48,
            lambda_theta_count: 17,
            duration_factors: vec![0.5, 1.0, 2.0, 4.0],
            probes: 64,
            refine: 48,
            max_iterations: 80,
            samples_per_result: 4000,
            tol: Tolerances::default(),
        }
    }
}

impl ShootingOptions {
    pub fn with_tolerances(tol: Tolerances) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShootingResult {
    /// Initial covector in the frame of the original boundary conditions.
    pub lambda0: Covector,
    pub duration: f64,
    pub mismatch: Mismatch,
    pub cost: f64,
    pub cusp_times: Vec<f64>,
    pub h1_zeros: Vec<H1Zero>,
    pub converged: bool,
    pub trajectory: ControlTrajectory,
}

#[derive(Serialize)]
struct ResultJson<'a> {
    cost: f64,
    duration: f64,
    lambda0: [f64; 3],
    cusps: &'a [f64],
    converged: bool,
    mismatch: Mismatch,
    samples: Vec<&'a Sample>,
}

impl ShootingResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ResultJson {
            cost: self.cost,
            duration: self.duration,
            lambda0: self.lambda0.as_array(),
            cusps: &self.cusp_times,
            converged: self.converged,
            mismatch: self.mismatch,
            samples: self.trajectory.samples().collect(),
        })
        .expect("shooting result serializes")
    }
}

/// Unknowns `(ψ, λy, ln T)` to a unit-level covector at `θ = 0` and a
/// duration.
fn chart(z: &Vector3<f64>) -> (Covector, f64) {
    (Covector::new(z[0].cos(), z[1], z[0].sin()), z[2].exp())
}

/// Chart coordinates of the start `(α, λθ)` on the unit level at `θ = 0`.
fn seed(alpha: f64, lambda_theta: f64) -> Option<(f64, f64)> {
    let r = (1.0 - lambda_theta * lambda_theta).max(0.0).sqrt();
    let c = alpha.cos();
    if c.abs() > 1e-8 {
        let lx = r * c.signum();
        let ly = r * alpha.tan() * c.signum();
        Some((lambda_theta.atan2(lx), ly))
    } else if lambda_theta != 0.0 {
        // h1(0) = 0: the start sits on the switching surface
        Some((lambda_theta.signum() * PI / 2.0, alpha.sin()))
    } else {
        None
    }
}

fn problem_scale(target: &Se2, space: Mode) -> f64 {
    let d = target.x.hypot(target.y);
    let dtheta = match space {
        Mode::Oriented => angle_diff_2pi(target.theta, 0.0),
        Mode::Projective => angle_diff_pi(target.theta, 0.0),
    };
    d.hypot(dtheta)
}

/// Steps allowed per arc while shooting; covectors that make the pendulum
/// this stiff are abandoned.
const SHOOTING_STEP_BUDGET: usize = 20_000;

struct Shooter<'a> {
    space: Mode,
    target: Se2,
    opts: &'a ShootingOptions,
    /// Longest duration considered.
    t_cap: f64,
}

impl<'a> Shooter<'a> {
    fn new(space: Mode, target: Se2, opts: &'a ShootingOptions) -> Self {
        let scale = problem_scale(&target, space);
        let factor = opts.duration_factors.iter().cloned().fold(1.0, f64::max);
        Self {
            space,
            target,
            opts,
            t_cap: 8.0 * factor * scale,
        }
    }
}

impl Shooter<'_> {
    fn trajectory(&self, lam: Covector, duration: f64, io: &IntegrateOptions) -> Result<(ControlTrajectory, Vec<H1Zero>)> {
        let spec = ExtremalSpec::new(Se2::identity(), lam, duration, self.space)?;
        match self.space {
            Mode::Oriented => Ok((integrate_oriented(&spec, io)?, Vec::new())),
            Mode::Projective => {
                let e = integrate_projective(&spec, io)?;
                Ok((e.trajectory, e.h1_zeros))
            }
        }
    }

    fn residual(&self, z: &Vector3<f64>) -> Option<Mismatch> {
        let (lam, t) = chart(z);
        if !(t.is_finite() && t > 0.0 && t < self.t_cap) {
            return None;
        }
        let io = IntegrateOptions {
            max_steps: SHOOTING_STEP_BUDGET,
            ..IntegrateOptions::endpoints_only(self.opts.tol)
        };
        let (traj, _) = self.trajectory(lam, t, &io).ok()?;
        Some(mismatch(&traj.end_se2(), &self.target, self.space))
    }

    /// Best probe time along each start of the grid.
    fn scan(&self) -> Vec<(f64, Vector3<f64>)> {
        let scale = problem_scale(&self.target, self.space);
        let t_max = scale * self.opts.duration_factors.iter().cloned().fold(0.0, f64::max);
        let mut probe_tol = self.opts.tol;
        probe_tol.integrator = probe_tol.integrator.max(1e-8);
        let mut probe_times: Vec<f64> = (1..=self.opts.probes)
            .map(|k| t_max * k as f64 / self.opts.probes as f64)
            .collect();
        probe_times.extend(self.opts.duration_factors.iter().map(|f| f * scale));
        probe_times.sort_by(f64::total_cmp);
        probe_times.dedup();
        let io = IntegrateOptions {
            sample_step: None,
            extra_times: probe_times.clone(),
            tol: probe_tol,
            max_steps: SHOOTING_STEP_BUDGET,
        };
        let mut starts = Vec::new();
        let na = self.opts.alpha_count.max(1);
        let nl = self.opts.lambda_theta_count.max(2);
        for i in 0..na {
            let alpha = TAU * i as f64 / na as f64;
            for j in 0..nl {
                let lt = -1.0 + 2.0 * j as f64 / (nl - 1) as f64;
                let Some((psi, ly)) = seed(alpha, lt) else { continue };
                let lam = Covector::new(psi.cos(), ly, psi.sin());
                let Ok((traj, _)) = self.trajectory(lam, t_max, &io) else { continue };
                let mut best: Option<(f64, f64)> = None;
                for s in traj.samples().filter(|s| s.t > 0.0) {
                    let m = mismatch(&s.pose(), &self.target, self.space).norm() / scale;
                    if best.map_or(true, |b| m < b.0) {
                        best = Some((m, s.t));
                    }
                }
                if let Some((m, t)) = best {
                    starts.push((m, Vector3::new(psi, ly, t.ln())));
                }
            }
        }
        starts.sort_by(|a, b| a.0.total_cmp(&b.0));
        starts
    }

    /// Levenberg-Marquardt on the mismatch with a forward-difference
    /// Jacobian. Returns the final point and its mismatch.
    fn refine(&self, z0: Vector3<f64>) -> Option<(Vector3<f64>, Mismatch)> {
        let mut z = z0;
        let mut r = self.residual(&z)?;
        let mut mu = 1e-3;
        for _ in 0..self.opts.max_iterations {
            if r.max_abs() < 1e-12 {
                break;
            }
            let mut jac = Matrix3::zeros();
            for k in 0..3 {
                let h = 1e-7 * z[k].abs().max(1.0);
                let mut zk = z;
                zk[k] += h;
                let rk = self.residual(&zk)?;
                let col = (rk.vector() - r.vector()) / h;
                jac.set_column(k, &col);
            }
            let jtj = jac.transpose() * jac;
            let g = jac.transpose() * r.vector();
            let mut improved = false;
            for _ in 0..12 {
                let mut a = jtj;
                for k in 0..3 {
                    a[(k, k)] += mu * (jtj[(k, k)] + 1e-12);
                }
                let Some(step) = a.lu().solve(&(-g)) else {
                    mu *= 10.0;
                    continue;
                };
                let zn = z + step;
                match self.residual(&zn) {
                    Some(rn) if rn.norm() < r.norm() => {
                        z = zn;
                        r = rn;
                        mu = (mu / 3.0).max(1e-12);
                        improved = true;
                        break;
                    }
                    _ => mu *= 4.0,
                }
            }
            if !improved {
                break;
            }
        }
        Some((z, r))
    }

    fn solve(&self) -> Result<Vec<(Vector3<f64>, Mismatch)>> {
        let starts = self.scan();
        let mut out = Vec::new();
        let mut best_mismatch = f64::INFINITY;
        for (_, z0) in starts.into_iter().take(self.opts.refine) {
            if let Some((z, r)) = self.refine(z0) {
                best_mismatch = best_mismatch.min(r.max_abs());
                out.push((z, r));
            }
        }
        if out.iter().all(|(_, r)| r.max_abs() >= self.opts.tol.converge) {
            return Err(Error::NoConvergence { best_mismatch });
        }
        Ok(out)
    }
}

/// Covector in the canonical frame to the frame of `g`.
fn rotate_covector(lam: &Covector, angle: f64) -> Covector {
    let (s, c) = angle.sin_cos();
    Covector::new(
        c * lam.lambda_x - s * lam.lambda_y,
        s * lam.lambda_x + c * lam.lambda_y,
        lam.lambda_theta,
    )
}

/// Minimizer candidates for projective boundary conditions, best first.
/// Candidates with more than two zeros of `h1` (cusps) are dropped.
pub fn solve_projective(bc: &BoundaryConditions) -> Result<Vec<ShootingResult>> {
    solve_projective_with(bc, &ShootingOptions::default())
}

pub fn solve_projective_with(bc: &BoundaryConditions, opts: &ShootingOptions) -> Result<Vec<ShootingResult>> {
    if bc.mode != Mode::Projective {
        return Err(Error::InvalidSpec("solve_projective needs projective boundary conditions".into()));
    }
    let Canonical::Projective { target, .. } = bc.canonicalize()? else { unreachable!() };
    let shooter = Shooter::new(Mode::Projective, target.representative(), opts);
    let refined = shooter.solve()?;
    let frame = bc.frame();
    let mut results: Vec<(ShootingResult, Covector)> = Vec::new();
    for (z, r) in refined {
        if r.max_abs() >= opts.tol.converge {
            continue;
        }
        let (lam, t) = chart(&z);
        let duplicate = results.iter().any(|(res, canon)| {
            let d = (canon.as_array().iter().zip(lam.as_array()))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            d < opts.tol.dedup_covector && (res.duration - t).abs() < opts.tol.dedup_cost
        });
        if duplicate {
            continue;
        }
        let io = IntegrateOptions {
            sample_step: Some(t / opts.samples_per_result as f64),
            extra_times: Vec::new(),
            tol: opts.tol,
            max_steps: 2_000_000,
        };
        let (traj, zeros) = shooter.trajectory(lam, t, &io)?;
        if zeros.len() > 2 {
            continue;
        }
        let trajectory = traj.left_translated(&frame);
        results.push((
            ShootingResult {
                lambda0: rotate_covector(&lam, frame.theta),
                duration: t,
                mismatch: r,
                cost: cost_c(&trajectory).value,
                cusp_times: zeros.iter().map(|z| z.t).collect(),
                h1_zeros: zeros,
                converged: true,
                trajectory,
            },
            lam,
        ));
    }
    if results.is_empty() {
        return Err(Error::NoConvergence {
            best_mismatch: opts.tol.converge,
        });
    }
    let mut results: Vec<ShootingResult> = results.into_iter().map(|(r, _)| r).collect();
    results.sort_by(|a, b| {
        a.cost
            .total_cmp(&b.cost)
            .then(a.cusp_times.len().cmp(&b.cusp_times.len()))
            .then(wrap_2pi(a.lambda0.alpha()).total_cmp(&wrap_2pi(b.lambda0.alpha())))
    });
    Ok(results)
}

/// Time span of a rotation arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Span {
    pub t_start: f64,
    pub t_end: f64,
    pub duration: f64,
}

/// Where the oriented minimizer rotates in place.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub initial_rotation_arc: Option<Span>,
    pub final_rotation_arc: Option<Span>,
    pub interior_rotation_arcs: Vec<Span>,
}

impl Witness {
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(s) = self.initial_rotation_arc {
            parts.push(format!("initial rotation arc on [{}, {}]", s.t_start, s.t_end));
        }
        if let Some(s) = self.final_rotation_arc {
            parts.push(format!("final rotation arc on [{}, {}]", s.t_start, s.t_end));
        }
        for s in &self.interior_rotation_arcs {
            parts.push(format!("interior rotation arc on [{}, {}]", s.t_start, s.t_end));
        }
        parts.join("; ")
    }
}

/// How the oriented minimizer was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Origin {
    Normal { lambda0: [f64; 3] },
    Abnormal { pieces: String },
}

#[derive(Debug, Clone)]
pub struct OrientedAnalysis {
    pub minimizer: ControlTrajectory,
    pub cost: f64,
    pub origin: Origin,
    pub mismatch: Mismatch,
    pub projection_admissible: bool,
    pub witness: Option<Witness>,
}

#[derive(Serialize)]
struct AnalysisJson<'a> {
    cost: f64,
    duration: f64,
    origin: &'a Origin,
    projection_admissible: bool,
    witness: &'a Option<Witness>,
    message: String,
    arcs: Vec<crate::trajectory::ArcMark>,
}

impl OrientedAnalysis {
    pub fn message(&self) -> String {
        match &self.witness {
            None => "the SE(2) minimizer projects to an admissible planar curve".into(),
            Some(w) => format!(
                "the infimum of J is not attained by an admissible planar curve: the SE(2) minimizer has an {}",
                w.describe()
            ),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&AnalysisJson {
            cost: self.cost,
            duration: self.minimizer.duration(),
            origin: &self.origin,
            projection_admissible: self.projection_admissible,
            witness: &self.witness,
            message: self.message(),
            arcs: self.minimizer.arc_marks(),
        })
        .expect("analysis serializes")
    }
}

/// Rotation arcs shorter than this do not count against admissibility.
const MIN_ROTATION: f64 = 1e-9;

fn classify(traj: &ControlTrajectory) -> Option<Witness> {
    let n = traj.arcs.len();
    let mut w = Witness {
        initial_rotation_arc: None,
        final_rotation_arc: None,
        interior_rotation_arcs: Vec::new(),
    };
    let mut any = false;
    for (i, arc) in traj.arcs.iter().enumerate() {
        if !arc.kind.is_rotation() || arc.duration() <= MIN_ROTATION {
            continue;
        }
        any = true;
        let span = Span {
            t_start: arc.t_start(),
            t_end: arc.t_end(),
            duration: arc.duration(),
        };
        if i == 0 {
            w.initial_rotation_arc = Some(span);
        } else if i + 1 == n {
            w.final_rotation_arc = Some(span);
        } else {
            w.interior_rotation_arcs.push(span);
        }
    }
    any.then_some(w)
}

/// Rotation of least magnitude taking angle `from` to `to`.
fn shortest_turn(from: f64, to: f64) -> (AbnormalKind, f64) {
    let d = angle_diff_2pi(to, from);
    (AbnormalKind::Rotation { clockwise: d < 0.0 }, d.abs())
}

/// Concatenations of at most three abnormal pieces that meet the target
/// exactly, as `(label, pieces)`.
fn abnormal_candidates(target: &Se2) -> Vec<(&'static str, Vec<(AbnormalKind, f64)>)> {
    const EPS: f64 = 1e-12;
    let mut out = Vec::new();
    let p = nalgebra::Vector2::new(target.x, target.y);
    let d = p.norm();
    let heading = p.y.atan2(p.x);
    let th = target.theta;
    // single line
    if d > EPS && p.y.abs() <= EPS * d.max(1.0) && p.x > 0.0 && angle_diff_2pi(th, 0.0).abs() <= EPS {
        out.push(("L", vec![(AbnormalKind::Line, d)]));
    }
    if d <= EPS {
        out.push(("R", vec![shortest_turn(0.0, th)]));
        return out;
    }
    let on_ray = p.y.abs() <= EPS * d && p.x > 0.0;
    if on_ray {
        out.push(("LR", vec![(AbnormalKind::Line, d), shortest_turn(0.0, th)]));
    }
    if angle_diff_2pi(th, heading).abs() <= EPS {
        out.push(("RL", vec![shortest_turn(0.0, heading), (AbnormalKind::Line, d)]));
    }
    out.push((
        "RLR",
        vec![shortest_turn(0.0, heading), (AbnormalKind::Line, d), shortest_turn(heading, th)],
    ));
    // line along θ = 0 for a, rotation to th, line for b: a e0 + b e(th) = p
    let (s, c) = th.sin_cos();
    if s.abs() > EPS {
        let b = p.y / s;
        let a = p.x - b * c;
        if a >= 0.0 && b >= 0.0 {
            out.push((
                "LRL",
                vec![(AbnormalKind::Line, a), shortest_turn(0.0, th), (AbnormalKind::Line, b)],
            ));
        }
    }
    out
}

/// Solves the oriented problem on SE(2) and reports whether the minimizer
/// projects to an admissible planar curve. A positive-duration rotation
/// arc means the planar infimum is not attained.
pub fn analyze_oriented(bc: &BoundaryConditions) -> Result<OrientedAnalysis> {
    analyze_oriented_with(bc, &ShootingOptions::default())
}

pub fn analyze_oriented_with(bc: &BoundaryConditions, opts: &ShootingOptions) -> Result<OrientedAnalysis> {
    if bc.mode != Mode::Oriented {
        return Err(Error::InvalidSpec("analyze_oriented needs oriented boundary conditions".into()));
    }
    let Canonical::Oriented { target, .. } = bc.canonicalize()? else { unreachable!() };
    let shooter = Shooter::new(Mode::Oriented, target, opts);
    struct Candidate {
        traj: ControlTrajectory,
        cost: f64,
        origin: Origin,
        mismatch: Mismatch,
        interior_rotation: bool,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    let refined = shooter.solve().unwrap_or_default();
    for (z, r) in refined {
        if r.max_abs() >= opts.tol.converge {
            continue;
        }
        let (lam, t) = chart(&z);
        let io = IntegrateOptions {
            sample_step: Some(t / opts.samples_per_result as f64),
            extra_times: Vec::new(),
            tol: opts.tol,
            max_steps: 2_000_000,
        };
        let Ok((traj, _)) = shooter.trajectory(lam, t, &io) else { continue };
        let interior_rotation = classify(&traj).is_some_and(|w| !w.interior_rotation_arcs.is_empty());
        candidates.push(Candidate {
            cost: cost_c(&traj).value,
            origin: Origin::Normal {
                lambda0: rotate_covector(&lam, bc.frame().theta).as_array(),
            },
            mismatch: r,
            interior_rotation,
            traj,
        });
    }
    for (label, pieces) in abnormal_candidates(&target) {
        let total: f64 = pieces.iter().map(|p| p.1).sum();
        let step = (total / opts.samples_per_result as f64).max(1e-9);
        let Ok(traj) = abnormal_chain(&Se2::identity(), &pieces, Some(step)) else { continue };
        let r = mismatch(&traj.end_se2(), &target, Mode::Oriented);
        if r.max_abs() >= opts.tol.converge {
            continue;
        }
        candidates.push(Candidate {
            cost: cost_c(&traj).value,
            origin: Origin::Abnormal { pieces: label.into() },
            mismatch: r,
            interior_rotation: traj.arcs.len() == 3 && traj.arcs[1].kind.is_rotation(),
            traj,
        });
    }
    // a pendulum-rotation-pendulum pattern is treated as non-optimal when
    // anything else is available
    if candidates.iter().any(|c| !c.interior_rotation) {
        candidates.retain(|c| !c.interior_rotation || !matches!(c.origin, Origin::Normal { .. }));
    }
    let best = candidates
        .into_iter()
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .ok_or(Error::NoConvergence {
            best_mismatch: f64::INFINITY,
        })?;
    let minimizer = best.traj.left_translated(&bc.frame());
    let witness = classify(&minimizer);
    Ok(OrientedAnalysis {
        projection_admissible: witness.is_none(),
        witness,
        cost: best.cost,
        origin: best.origin,
        mismatch: best.mismatch,
        minimizer,
    })
}

/// Number of arcs of each kind, for summaries.
pub fn arc_pattern(traj: &ControlTrajectory) -> String {
    traj.arcs
        .iter()
        .map(|a| match a.kind {
            ArcKind::Pendulum => "P",
            ArcKind::PureRotation | ArcKind::AbnormalRotation => "R",
            ArcKind::AbnormalLine => "L",
            ArcKind::Lifted => "C",
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mismatch_examples() {
        let q = Se2::new(0.3, -0.2, 1.0);
        assert_eq!(mismatch(&q, &q, Mode::Oriented).max_abs(), 0.0);
        let m = mismatch_projective(&Pse2::new(0.0, 0.0, PI - 0.01), &Pse2::new(0.0, 0.0, 0.01));
        assert_abs_diff_eq!(m.dtheta, -0.02, epsilon = 1e-12);
        let m = mismatch(&Se2::new(0.0, 0.0, 0.1), &Se2::new(0.0, 0.0, TAU - 0.1), Mode::Oriented);
        assert_abs_diff_eq!(m.dtheta.abs(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn seeds_lie_on_unit_level() {
        for i in 0..48 {
            let alpha = TAU * i as f64 / 48.0;
            for j in 0..17 {
                let lt = -1.0 + j as f64 / 8.0;
                if let Some((psi, ly)) = seed(alpha, lt) {
                    let (lam, _) = chart(&Vector3::new(psi, ly, 0.0));
                    assert_abs_diff_eq!(lam.h1(0.0).hypot(lam.lambda_theta), 1.0, epsilon = 1e-12);
                    if alpha.cos().abs() > 1e-8 {
                        assert_abs_diff_eq!(lam.lambda_theta, lt, epsilon = 1e-12);
                    }
                    if alpha.cos().abs() > 1e-8 && lt.abs() < 1.0 {
                        let a = lam.alpha();
                        assert_abs_diff_eq!(angle_diff_2pi(a, alpha), 0.0, epsilon = 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn abnormal_candidates_reach_target() {
        let target = Se2::new(1.0, 1.0, 0.5);
        for (label, pieces) in abnormal_candidates(&target) {
            let traj = abnormal_chain(&Se2::identity(), &pieces, None).unwrap();
            let r = mismatch(&traj.end_se2(), &target, Mode::Oriented);
            assert!(r.max_abs() < 1e-12, "{label}: {r:?}");
        }
    }

    #[test]
    fn witness_positions() {
        let traj = abnormal_chain(
            &Se2::identity(),
            &[
                (AbnormalKind::Rotation { clockwise: false }, 0.5),
                (AbnormalKind::Line, 1.0),
            ],
            None,
        )
        .unwrap();
        let w = classify(&traj).unwrap();
        assert_eq!(w.initial_rotation_arc.unwrap().duration, 0.5);
        assert!(w.final_rotation_arc.is_none());
        assert_eq!(arc_pattern(&traj), "RL");
    }
}
