//! Normal and abnormal extremals of the sub-Riemannian problem on SE(2).
//!
//! Along a normal extremal the covector components `λx`, `λy` are constant
//! and the state `(x, y, θ, λθ)` obeys
//!
//! ```text
//! ẋ = u1 cos θ,  ẏ = u1 sin θ,  θ̇ = u2,  λ̇θ = −u1 (−λx sin θ + λy cos θ)
//! ```
//!
//! with `h1 = λx cos θ + λy sin θ`, `h2 = λθ`. Controls are the unit vector
//! `(h1, h2) / |(h1, h2)|`, which keeps `h1² + h2²` constant and makes the
//! cost equal to the duration. The tangent angle then satisfies the pendulum
//! equation `2θ̈ = ρ² sin(2(θ − α))` on the unit level.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::curve::fd_weights;
use crate::error::{Error, Result};
use crate::ode::{self, Crossing, Event, Settings};
use crate::se2::{wrap_2pi, Mode, Se2};
use crate::tolerances::Tolerances;
use crate::trajectory::{Arc, ArcKind, ControlTrajectory, Sample};

/// `|h1|` below this (relative to the level) counts as a zero of `h1` when
/// choosing the initial branch of an oriented extremal.
const BRANCH_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covector {
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub lambda_theta: f64,
}

impl Covector {
    pub fn new(lambda_x: f64, lambda_y: f64, lambda_theta: f64) -> Self {
        Self {
            lambda_x,
            lambda_y,
            lambda_theta,
        }
    }

    /// `λx = ρ cos α`, `λy = ρ sin α`.
    pub fn from_polar(rho: f64, alpha: f64, lambda_theta: f64) -> Self {
        Self::new(rho * alpha.cos(), rho * alpha.sin(), lambda_theta)
    }

    pub fn rho(&self) -> f64 {
        self.lambda_x.hypot(self.lambda_y)
    }

    pub fn alpha(&self) -> f64 {
        self.lambda_y.atan2(self.lambda_x)
    }

    pub fn h1(&self, theta: f64) -> f64 {
        self.lambda_x * theta.cos() + self.lambda_y * theta.sin()
    }

    /// `−λx sin θ + λy cos θ`, the derivative of `h1` with respect to `θ`.
    pub fn w(&self, theta: f64) -> f64 {
        -self.lambda_x * theta.sin() + self.lambda_y * theta.cos()
    }

    /// Rescales so that `h1² + h2² = 1` at angle `theta`.
    pub fn normalized_at(&self, theta: f64) -> Result<Self> {
        let n = self.h1(theta).hypot(self.lambda_theta);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidSpec("covector annihilates both controls".into()));
        }
        Ok(Self::new(
            self.lambda_x / n,
            self.lambda_y / n,
            self.lambda_theta / n,
        ))
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.lambda_x, self.lambda_y, self.lambda_theta]
    }
}

/// `(h1, h2)` at pose `q`.
pub fn hamiltonian(q: &Se2, lambda: &Covector) -> (f64, f64) {
    (lambda.h1(q.theta), lambda.lambda_theta)
}

/// Admissible control set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// `u1 ≥ 0`: the car may not reverse.
    HalfPlane,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalSpec {
    pub q0: Se2,
    pub lambda0: Covector,
    pub duration: f64,
    pub problem: Mode,
    pub constraint: Constraint,
}

impl ExtremalSpec {
    /// Validated spec; the constraint follows from the problem.
    pub fn new(q0: Se2, lambda0: Covector, duration: f64, problem: Mode) -> Result<Self> {
        let spec = Self {
            q0,
            lambda0,
            duration,
            problem,
            constraint: match problem {
                Mode::Oriented => Constraint::HalfPlane,
                Mode::Projective => Constraint::Free,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration >= 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidSpec(format!("duration {} is not finite and nonnegative", self.duration)));
        }
        let expected = match self.problem {
            Mode::Oriented => Constraint::HalfPlane,
            Mode::Projective => Constraint::Free,
        };
        if self.constraint != expected {
            return Err(Error::InvalidSpec("u1 >= 0 applies exactly to the oriented problem".into()));
        }
        let (h1, h2) = hamiltonian(&self.q0, &self.lambda0);
        let level = h1 * h1 + h2 * h2;
        if (level - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!("h1^2 + h2^2 = {level}, expected 1")));
        }
        Ok(())
    }
}

/// Sampling and accuracy knobs for the integrators.
#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    /// Spacing of the uniform output grid; `None` records arc endpoints only.
    pub sample_step: Option<f64>,
    /// Additional times that must appear as samples.
    pub extra_times: Vec<f64>,
    pub tol: Tolerances,
    /// Step budget per integrated arc.
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            sample_step: Some(1e-3),
            extra_times: Vec::new(),
            tol: Tolerances::default(),
            max_steps: 2_000_000,
        }
    }
}

impl IntegrateOptions {
    pub fn endpoints_only(tol: Tolerances) -> Self {
        Self {
            sample_step: None,
            extra_times: Vec::new(),
            tol,
            max_steps: 2_000_000,
        }
    }

    pub fn with_step(step: f64) -> Self {
        Self {
            sample_step: Some(step),
            ..Self::default()
        }
    }

    fn settings(&self) -> Settings {
        let mut s = Settings::new(self.tol.integrator, self.tol.event);
        s.max_steps = self.max_steps;
        s
    }

    /// Output times strictly inside `(a, b)`. Grid points crowding an extra
    /// time or an end are dropped so that spacings stay comparable.
    fn outputs(&self, a: f64, b: f64) -> Vec<f64> {
        let mut extras: Vec<f64> = self
            .extra_times
            .iter()
            .copied()
            .filter(|&t| t > a && t < b)
            .collect();
        let mut out = extras.clone();
        if let Some(h) = self.sample_step {
            let guard = 0.25 * h;
            extras.push(a);
            extras.push(b);
            let k0 = (a / h).floor() as i64 + 1;
            let mut k = k0;
            loop {
                let t = k as f64 * h;
                if t >= b {
                    break;
                }
                if t > a && extras.iter().all(|e| (t - e).abs() > guard) {
                    out.push(t);
                }
                k += 1;
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// A zero of `h1` on a projective extremal: the projected curve has a cusp
/// there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1Zero {
    pub t: f64,
    /// `ḣ1` at the zero.
    pub slope: f64,
    /// True when `|ḣ1|` is too small to call the zero simple.
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct ProjectiveExtremal {
    pub trajectory: ControlTrajectory,
    pub h1_zeros: Vec<H1Zero>,
}

impl ProjectiveExtremal {
    pub fn cusp_times(&self) -> Vec<f64> {
        self.h1_zeros.iter().map(|z| z.t).collect()
    }
}

/// Level `|h2|` at a switch, relative to `ρ`, below which the switch is
/// treated as an abnormal point.
const NEAR_ABNORMAL: f64 = 1e-9;
/// Each rotation between pendulum arcs takes π, so this is far beyond any
/// duration of interest.
const MAX_ORIENTED_ARCS: usize = 10_000;

fn pendulum_rhs(lx: f64, ly: f64) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    move |_t, y| {
        let (s, c) = y[2].sin_cos();
        let h1 = lx * c + ly * s;
        let h2 = y[3];
        let n = h1.hypot(h2);
        let (u1, u2) = if n > 0.0 { (h1 / n, h2 / n) } else { (0.0, 0.0) };
        let w = -lx * s + ly * c;
        [u1 * c, u1 * s, u2, -u1 * w]
    }
}

fn pendulum_sample(t: f64, y: &[f64; 4], lx: f64, ly: f64) -> Sample {
    let h1 = lx * y[2].cos() + ly * y[2].sin();
    let n = h1.hypot(y[3]);
    let (u1, u2) = if n > 0.0 { (h1 / n, y[3] / n) } else { (0.0, 0.0) };
    Sample {
        t,
        x: y[0],
        y: y[1],
        theta: y[2],
        u1,
        u2,
        covector: Some(Covector::new(lx, ly, y[3])),
    }
}

struct PendulumRun {
    samples: Vec<Sample>,
    roots: Vec<(f64, [f64; 4])>,
    stopped: bool,
}

/// Integrates a pendulum arc from `t0` to at most `t_end`. `stop_on_fall`
/// ends the arc at the first falling zero of `h1`; otherwise every zero is
/// recorded.
fn run_pendulum(
    t0: f64,
    y0: [f64; 4],
    t_end: f64,
    lx: f64,
    ly: f64,
    stop_on_fall: bool,
    opts: &IntegrateOptions,
) -> Result<PendulumRun> {
    let rhs = pendulum_rhs(lx, ly);
    let g = move |y: &[f64; 4]| lx * y[2].cos() + ly * y[2].sin();
    let event = Event {
        g: &g,
        crossing: if stop_on_fall { Crossing::Falling } else { Crossing::Either },
        terminal: stop_on_fall,
    };
    let outputs = opts.outputs(t0, t_end);
    let sol = ode::integrate(&rhs, t0, y0, t_end, &outputs, Some(&event), &opts.settings())?;
    let mut samples: Vec<Sample> = sol
        .times
        .iter()
        .zip(&sol.states)
        .map(|(&t, y)| pendulum_sample(t, y, lx, ly))
        .collect();
    if stop_on_fall {
        // arc ends sit on h1 = 0, where roundoff may leave u1 slightly negative
        for s in samples.iter_mut().filter(|s| s.u1 < 0.0) {
            s.u1 = 0.0;
            s.u2 = s.u2.signum();
        }
    }
    if sol.stopped && samples.len() > 2 {
        // keep the spacing near the located switch comparable to the grid
        if let Some(h) = opts.sample_step {
            let end = samples.last().unwrap().t;
            let k = samples.len() - 2;
            let protected = opts.extra_times.iter().any(|&e| e == samples[k].t);
            if end - samples[k].t < 0.25 * h && !protected {
                samples.remove(k);
            }
        }
    }
    Ok(PendulumRun {
        samples,
        roots: sol.roots,
        stopped: sol.stopped,
    })
}

fn rotation_arc(kind: ArcKind, start: &Sample, sigma: f64, duration: f64, opts: &IntegrateOptions) -> Arc {
    let t0 = start.t;
    let t1 = t0 + duration;
    let make = |t: f64| Sample {
        t,
        x: start.x,
        y: start.y,
        theta: start.theta + sigma * (t - t0),
        u1: 0.0,
        u2: sigma,
        covector: start.covector,
    };
    let mut samples = vec![make(t0)];
    samples.extend(opts.outputs(t0, t1).into_iter().map(make));
    samples.push(make(t1));
    Arc { kind, samples }
}

fn start_sample(q0: &Se2, lambda: &Covector) -> Sample {
    Sample {
        t: 0.0,
        x: q0.x,
        y: q0.y,
        theta: q0.theta,
        u1: 0.0,
        u2: 0.0,
        covector: Some(*lambda),
    }
}

/// Oriented extremal (`u1 ≥ 0`). Pendulum arcs while `h1 > 0`; when `h1`
/// falls through zero the extremal rotates in place at unit rate in the
/// direction of `h2` until `h1` returns to zero, which takes a rotation of
/// exactly π.
pub fn integrate_oriented(spec: &ExtremalSpec, opts: &IntegrateOptions) -> Result<ControlTrajectory> {
    if spec.problem != Mode::Oriented {
        return Err(Error::InvalidSpec("integrate_oriented needs an oriented spec".into()));
    }
    spec.validate()?;
    let lam = spec.lambda0;
    let (lx, ly) = (lam.lambda_x, lam.lambda_y);
    let total = spec.duration;
    let rho = lam.rho();

    if rho < opts.tol.degenerate_rho {
        let h2 = lam.lambda_theta;
        if h2 == 0.0 {
            return Err(Error::InvalidSpec("h1 and h2 both vanish".into()));
        }
        let start = start_sample(&spec.q0, &lam);
        return degenerate_rotation(&start, h2.signum(), total, opts, Mode::Oriented);
    }
    if total == 0.0 {
        return Err(Error::InvalidSpec("zero duration".into()));
    }

    let alpha = lam.alpha();
    let mut arcs: Vec<Arc> = Vec::new();
    let mut cur = start_sample(&spec.q0, &lam);
    let mut lt = lam.lambda_theta;

    // initial branch
    let h1 = lam.h1(cur.theta);
    let level = h1.hypot(lt);
    let mut on_pendulum = if h1.abs() <= BRANCH_ZERO * level {
        lam.w(cur.theta) * lt > 0.0
    } else {
        h1 > 0.0
    };

    while cur.t < total {
        if arcs.len() > MAX_ORIENTED_ARCS {
            return Err(Error::NonIntegrable(format!(
                "more than {MAX_ORIENTED_ARCS} switches before t = {}",
                cur.t
            )));
        }
        if on_pendulum {
            let y0 = [cur.x, cur.y, cur.theta, lt];
            let run = run_pendulum(cur.t, y0, total, lx, ly, true, opts)?;
            let last = *run.samples.last().unwrap();
            arcs.push(Arc {
                kind: ArcKind::Pendulum,
                samples: run.samples,
            });
            cur = last;
            lt = last.covector.unwrap().lambda_theta;
            if !run.stopped {
                break;
            }
            on_pendulum = false;
        } else {
            if lt == 0.0 {
                return Err(Error::InvalidSpec(
                    "h1 <= 0 with h2 = 0: the covector is abnormal".into(),
                ));
            }
            if lt.abs() < NEAR_ABNORMAL * rho {
                return Err(Error::NonIntegrable(format!(
                    "switch at t = {} with |h2| = {:e}: the covector is numerically abnormal",
                    cur.t,
                    lt.abs()
                )));
            }
            let sigma = lt.signum();
            let phi0 = cur.theta - alpha;
            let phi_target = -sigma * FRAC_PI_2;
            let dur = wrap_2pi(sigma * (phi_target - phi0));
            if dur > PI + 1e-9 {
                // h2 changed sign together with h1: the covector is
                // numerically abnormal here and the switching rule is void
                return Err(Error::InvalidSpec(format!(
                    "h1 and h2 vanish together near t = {}",
                    cur.t
                )));
            }
            let dur = dur.min(total - cur.t);
            if dur > 1e-14 {
                let arc = rotation_arc(ArcKind::PureRotation, &cur, sigma, dur, opts);
                let mut last = *arc.last();
                last.covector = Some(Covector::new(lx, ly, lt));
                cur = last;
                arcs.push(arc);
            }
            on_pendulum = true;
        }
    }
    let traj = ControlTrajectory::new(Mode::Oriented, arcs)?;
    Ok(traj)
}

fn degenerate_rotation(
    start: &Sample,
    sigma: f64,
    total: f64,
    opts: &IntegrateOptions,
    mode: Mode,
) -> Result<ControlTrajectory> {
    if total == 0.0 {
        return Err(Error::InvalidSpec("zero duration".into()));
    }
    let arc = rotation_arc(ArcKind::PureRotation, start, sigma, total, opts);
    ControlTrajectory::new(mode, vec![arc])
}

/// Projective extremal: `u = (h1, h2)` for the whole duration, `u1` may
/// change sign. Zeros of `h1` are returned as cusp candidates.
pub fn integrate_projective(spec: &ExtremalSpec, opts: &IntegrateOptions) -> Result<ProjectiveExtremal> {
    if spec.problem != Mode::Projective {
        return Err(Error::InvalidSpec("integrate_projective needs a projective spec".into()));
    }
    spec.validate()?;
    let lam = spec.lambda0;
    if spec.duration == 0.0 {
        return Err(Error::InvalidSpec("zero duration".into()));
    }
    if lam.rho() < opts.tol.degenerate_rho {
        let start = start_sample(&spec.q0, &lam);
        let trajectory =
            degenerate_rotation(&start, lam.lambda_theta.signum(), spec.duration, opts, Mode::Projective)?;
        return Ok(ProjectiveExtremal {
            trajectory,
            h1_zeros: Vec::new(),
        });
    }
    let (lx, ly) = (lam.lambda_x, lam.lambda_y);
    let q0 = spec.q0;
    let y0 = [q0.x, q0.y, q0.theta, lam.lambda_theta];
    let run = run_pendulum(0.0, y0, spec.duration, lx, ly, false, opts)?;
    let h1_zeros = run
        .roots
        .iter()
        .map(|(t, y)| {
            let s = pendulum_sample(*t, y, lx, ly);
            let slope = lam.w(y[2]) * s.u2;
            H1Zero {
                t: *t,
                slope,
                flagged: slope.abs() < 1e-9,
            }
        })
        .collect();
    let trajectory = ControlTrajectory::new(
        Mode::Projective,
        vec![Arc {
            kind: ArcKind::Pendulum,
            samples: run.samples,
        }],
    )?;
    Ok(ProjectiveExtremal { trajectory, h1_zeros })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbnormalKind {
    /// Straight motion along the current heading, `u = (1, 0)`.
    Line,
    /// Rotation in place, `u = (0, ±1)`.
    Rotation { clockwise: bool },
}

/// Abnormal extremal starting at `q0` at time 0.
pub fn abnormal_extremal(
    kind: AbnormalKind,
    q0: &Se2,
    duration: f64,
    sample_step: Option<f64>,
) -> Result<ControlTrajectory> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidSpec(format!("duration {duration} must be positive")));
    }
    let opts = IntegrateOptions {
        sample_step,
        ..IntegrateOptions::default()
    };
    let start = Sample {
        t: 0.0,
        x: q0.x,
        y: q0.y,
        theta: q0.theta,
        u1: 0.0,
        u2: 0.0,
        covector: None,
    };
    let arc = match kind {
        AbnormalKind::Rotation { clockwise } => {
            let sigma = if clockwise { -1.0 } else { 1.0 };
            rotation_arc(ArcKind::AbnormalRotation, &start, sigma, duration, &opts)
        }
        AbnormalKind::Line => {
            let (s, c) = q0.theta.sin_cos();
            let make = |t: f64| Sample {
                t,
                x: q0.x + t * c,
                y: q0.y + t * s,
                theta: q0.theta,
                u1: 1.0,
                u2: 0.0,
                covector: None,
            };
            let mut samples = vec![make(0.0)];
            samples.extend(opts.outputs(0.0, duration).into_iter().map(make));
            samples.push(make(duration));
            Arc {
                kind: ArcKind::AbnormalLine,
                samples,
            }
        }
    };
    ControlTrajectory::new(Mode::Oriented, vec![arc])
}

/// Chains abnormal pieces end to end, starting at `q0` at time 0.
pub fn abnormal_chain(
    q0: &Se2,
    pieces: &[(AbnormalKind, f64)],
    sample_step: Option<f64>,
) -> Result<ControlTrajectory> {
    let mut parts = Vec::new();
    let mut q = *q0;
    let mut t = 0.0;
    let mut theta = q0.theta;
    for &(kind, dur) in pieces.iter().filter(|p| p.1 > 0.0) {
        let mut part = abnormal_extremal(kind, &q, dur, sample_step)?.time_shifted(t);
        // keep θ continuous across pieces
        let shift = theta - q.theta;
        for arc in &mut part.arcs {
            for s in &mut arc.samples {
                s.theta += shift;
            }
        }
        let end = *part.end();
        q = end.pose();
        theta = end.theta;
        t = end.t;
        parts.push(part);
    }
    ControlTrajectory::concat(&parts)
}

/// Largest `|2θ̈ − ρ̃² sin(2(θ − α))|` over interior samples of pendulum
/// arcs, with `θ̈` from five-point finite differences and `ρ̃ = ρ/|(h1, h2)|`
/// the level-normalized modulus.
pub fn pendulum_residual(traj: &ControlTrajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    let mut longest = 0usize;
    for arc in traj.arcs.iter().filter(|a| a.kind == ArcKind::Pendulum) {
        let s = &arc.samples;
        longest = longest.max(s.len());
        if s.len() < 5 || s.iter().any(|p| p.covector.is_none()) {
            continue;
        }
        for i in 2..s.len() - 2 {
            let ts: Vec<f64> = s[i - 2..=i + 2].iter().map(|p| p.t).collect();
            let w = fd_weights(&ts, s[i].t);
            let theta_dd: f64 = w[2].iter().zip(&s[i - 2..=i + 2]).map(|(c, p)| c * p.theta).sum();
            let lam = s[i].covector.unwrap();
            let n = lam.h1(s[i].theta).hypot(lam.lambda_theta);
            let rho = lam.rho() / n;
            let rhs = rho * rho * (2.0 * (s[i].theta - lam.alpha())).sin();
            worst = worst.max((2.0 * theta_dd - rhs).abs());
            checked += 1;
        }
    }
    if checked == 0 {
        return Err(Error::InsufficientSamples {
            needed: 5,
            got: longest,
        });
    }
    Ok(worst)
}
