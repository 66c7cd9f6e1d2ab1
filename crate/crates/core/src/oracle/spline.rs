//! Curves made of lifted circular arcs, that is, piecewise constant
//! controls. The cost of such a curve is its exact `J`, so minimizing over
//! them bounds the continuum infimum from above and cannot exploit
//! discretization artifacts.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::se2::{BoundaryConditions, Mode, Point2};

use super::OracleOptions;

/// Arc `j` starts with heading `θ_j = θ_0 + Σ_{i<j} τ_i`, turns by `τ_j` and
/// has signed length `a_j`. A negative length is traversed backwards, so a
/// sign change between neighbours is a cusp.
#[derive(Debug, Clone)]
pub(super) struct Spline {
    pub a: Vec<f64>,
    pub tau: Vec<f64>,
}

/// `S(τ) = sin(τ/2) / (τ/2)` and its derivative: the chord of an arc of
/// length `a` turning by `τ` is `a S(τ)`.
fn chord_factor(t: f64) -> (f64, f64) {
    if t.abs() < 1e-4 {
        (1.0 - t * t / 24.0, -t / 12.0)
    } else {
        let s = (0.5 * t).sin() / (0.5 * t);
        (s, ((0.5 * t).cos() - s) / t)
    }
}

fn unit(angle: f64) -> Point2 {
    Point2::new(angle.cos(), angle.sin())
}

/// Per arc: chord factor, its derivative and the chord direction angle.
struct Geometry {
    s: Vec<f64>,
    ds: Vec<f64>,
    psi: Vec<f64>,
}

/// Boundary data. The total turn is fixed at `theta_end − theta_start`,
/// which also fixes the winding class.
#[derive(Debug, Clone, Copy)]
pub(super) struct Problem {
    pub start: Point2,
    pub delta: Point2,
    pub theta_start: f64,
    pub theta_end: f64,
    pub mode: Mode,
    /// Chord length, the natural length scale.
    pub scale: f64,
}

impl Problem {
    pub fn new(bc: &BoundaryConditions, theta_end: f64) -> Self {
        Self {
            start: bc.start_point,
            delta: bc.end_point - bc.start_point,
            theta_start: bc.start_angle(),
            theta_end,
            mode: bc.mode,
            scale: (bc.end_point - bc.start_point).norm(),
        }
    }

    /// Oriented curves keep every arc at least this long, so every iterate
    /// moves forward.
    pub fn a_min(&self, m: usize) -> f64 {
        match self.mode {
            Mode::Oriented => 1e-3 * self.scale / m as f64,
            Mode::Projective => f64::NEG_INFINITY,
        }
    }

    /// The end heading in the winding class closest to `theta`.
    pub fn wound_end(bc: &BoundaryConditions, theta: f64) -> f64 {
        let period = match bc.mode {
            Mode::Oriented => TAU,
            Mode::Projective => PI,
        };
        let base = bc.end_angle();
        base + ((theta - base) / period).round() * period
    }

    fn geometry(&self, sp: &Spline) -> Geometry {
        let m = sp.a.len();
        let mut g = Geometry {
            s: Vec::with_capacity(m),
            ds: Vec::with_capacity(m),
            psi: Vec::with_capacity(m),
        };
        let mut theta = self.theta_start;
        for &t in &sp.tau {
            let (s, ds) = chord_factor(t);
            g.s.push(s);
            g.ds.push(ds);
            g.psi.push(theta + 0.5 * t);
            theta += t;
        }
        g
    }

    pub fn closure(&self, sp: &Spline) -> Point2 {
        let g = self.geometry(sp);
        (0..sp.a.len()).map(|j| unit(g.psi[j]) * (sp.a[j] * g.s[j])).sum::<Point2>() - self.delta
    }

    /// Exact `J` of the arc spline.
    pub fn cost(sp: &Spline) -> f64 {
        sp.a.iter().zip(&sp.tau).map(|(a, t)| a.hypot(*t)).sum()
    }

    /// The augmented Lagrangian `J + μ·r + w |r|² / 2` of the closure defect
    /// `r` with its gradients in `a` and `τ`.
    fn objective(&self, sp: &Spline, mu: Point2, w: f64) -> (f64, Vec<f64>, Vec<f64>) {
        let m = sp.a.len();
        let g = self.geometry(sp);
        let r = (0..m).map(|j| unit(g.psi[j]) * (sp.a[j] * g.s[j])).sum::<Point2>() - self.delta;
        let c = mu + r * w;
        let mut ga = vec![0.0; m];
        let mut gt = vec![0.0; m];
        let mut value = mu.dot(&r) + 0.5 * w * r.norm_squared();
        let mut later = 0.0;
        for j in (0..m).rev() {
            let (a, t) = (sp.a[j], sp.tau[j]);
            let f = a.hypot(t);
            value += f;
            let e = unit(g.psi[j]);
            let perp = Point2::new(-e.y, e.x);
            let swing = a * g.s[j] * c.dot(&perp);
            if f > 0.0 {
                ga[j] = a / f;
                gt[j] = t / f;
            }
            ga[j] += g.s[j] * c.dot(&e);
            gt[j] += a * g.ds[j] * c.dot(&e) + 0.5 * swing + later;
            later += swing;
        }
        (value, ga, gt)
    }

    /// Enforces the length bound and the total turn.
    fn project(&self, sp: &mut Spline) {
        let lo = self.a_min(sp.a.len());
        for a in &mut sp.a {
            *a = a.max(lo);
        }
        let m = sp.tau.len() as f64;
        let shift = (self.theta_end - self.theta_start - sp.tau.iter().sum::<f64>()) / m;
        for t in &mut sp.tau {
            *t += shift;
        }
    }

    /// Least-norm change of the free lengths that closes the curve exactly.
    pub fn restore(&self, sp: &mut Spline) {
        self.project(sp);
        let lo = self.a_min(sp.a.len());
        let g = self.geometry(sp);
        let cols: Vec<Point2> = (0..sp.a.len()).map(|j| unit(g.psi[j]) * g.s[j]).collect();
        for _ in 0..50 {
            let r = cols.iter().zip(&sp.a).map(|(d, a)| d * *a).sum::<Point2>() - self.delta;
            if r.norm() <= 1e-13 * self.scale {
                return;
            }
            let free: Vec<usize> = (0..sp.a.len()).filter(|&j| sp.a[j] > lo).collect();
            let (mut p, mut q, mut s) = (0.0, 0.0, 0.0);
            for &j in &free {
                p += cols[j].x * cols[j].x;
                q += cols[j].x * cols[j].y;
                s += cols[j].y * cols[j].y;
            }
            let det = p * s - q * q;
            if det.abs() < 1e-14 {
                return;
            }
            let y = Point2::new((s * r.x - q * r.y) / det, (p * r.y - q * r.x) / det);
            for &j in &free {
                sp.a[j] = (sp.a[j] - cols[j].dot(&y)).max(lo);
            }
        }
    }

    /// Arc end points, starting at the start point.
    pub fn points(&self, sp: &Spline) -> Vec<Point2> {
        let g = self.geometry(sp);
        let mut p = self.start;
        let mut out = vec![p];
        for j in 0..sp.a.len() {
            p += unit(g.psi[j]) * (sp.a[j] * g.s[j]);
            out.push(p);
        }
        out
    }

    /// Arc spline through the given points. Segment headings are unwrapped
    /// continuously (modulo `π` with a length sign flip in projective mode)
    /// and averaged at the nodes.
    pub fn from_points(bc: &BoundaryConditions, pts: &[Point2]) -> (Problem, Spline) {
        let period = match bc.mode {
            Mode::Oriented => TAU,
            Mode::Projective => PI,
        };
        let mut signed = Vec::with_capacity(pts.len() - 1);
        let mut heading = Vec::with_capacity(pts.len() - 1);
        let mut prev = bc.start_angle();
        for w in pts.windows(2) {
            let e = w[1] - w[0];
            let raw = e.y.atan2(e.x);
            let h = raw + ((prev - raw) / period).round() * period;
            let sign = if (h - raw).cos() >= 0.0 { 1.0 } else { -1.0 };
            signed.push(sign * e.norm());
            heading.push(h);
            prev = h;
        }
        let m = heading.len();
        let problem = Problem::new(bc, Problem::wound_end(bc, heading[m - 1]));
        let mut nodes = Vec::with_capacity(m + 1);
        nodes.push(problem.theta_start);
        nodes.extend(heading.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        nodes.push(problem.theta_end);
        let tau: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let a = signed
            .iter()
            .zip(&tau)
            .map(|(s, t)| s / chord_factor(*t).0.max(0.1))
            .collect();
        let mut sp = Spline { a, tau };
        problem.restore(&mut sp);
        (problem, sp)
    }

    /// Transfers a spline to `m` arcs by resampling the running sums of `a`
    /// and `τ` linearly in the arc index. Doubling is exact.
    pub fn prolong(&self, sp: &Spline, m: usize) -> Spline {
        let old = sp.a.len();
        let running = |v: &[f64]| {
            let mut cum = vec![0.0; old + 1];
            for k in 0..old {
                cum[k + 1] = cum[k] + v[k];
            }
            cum
        };
        let (ca, ct) = (running(&sp.a), running(&sp.tau));
        let at = |cum: &[f64], v: &[f64], u: f64| {
            let x = u * old as f64;
            let k = (x.floor() as usize).min(old - 1);
            cum[k] + (x - k as f64) * v[k]
        };
        let split = |cum: &[f64], v: &[f64]| -> Vec<f64> {
            (0..m)
                .map(|k| at(cum, v, (k + 1) as f64 / m as f64) - at(cum, v, k as f64 / m as f64))
                .collect()
        };
        let mut out = Spline {
            a: split(&ca, &sp.a),
            tau: split(&ct, &sp.tau),
        };
        self.restore(&mut out);
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outer rounds of the multiplier update.
const LAGRANGE_ROUNDS: usize = 12;

/// Projected gradient descent on the augmented Lagrangian with a
/// Barzilai-Borwein trial step and Armijo backtracking; the multiplier is
/// updated between rounds until the closure defect is negligible.
pub(super) fn descend(problem: &Problem, mut sp: Spline, opts: &OracleOptions) -> Spline {
    let m = sp.a.len();
    let w = 1e2 / problem.scale;
    let mut mu = Point2::zeros();
    problem.project(&mut sp);
    let pack = |sp: &Spline| -> Vec<f64> { sp.a.iter().chain(&sp.tau).copied().collect() };
    let unpack = |x: &[f64]| Spline {
        a: x[..m].to_vec(),
        tau: x[m..].to_vec(),
    };
    let gradient = |sp: &Spline, mu: Point2| {
        let (j, ga, mut gt) = problem.objective(sp, mu, w);
        let mean = gt.iter().sum::<f64>() / m as f64;
        gt.iter_mut().for_each(|v| *v -= mean);
        (j, ga.into_iter().chain(gt).collect::<Vec<f64>>())
    };
    for _ in 0..LAGRANGE_ROUNDS {
        let mut x = pack(&sp);
        let (mut j, mut g) = gradient(&sp, mu);
        let mut alpha = 1e-3 * problem.scale;
        let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
        let window = 50;
        let mut history: Vec<f64> = Vec::new();
        for _ in 0..opts.max_iterations {
            if let Some((xp, gp)) = &prev {
                let sv: Vec<f64> = x.iter().zip(xp).map(|(a, b)| a - b).collect();
                let yv: Vec<f64> = g.iter().zip(gp).map(|(a, b)| a - b).collect();
                let sy = dot(&sv, &yv);
                alpha = if sy > 0.0 { dot(&sv, &sv) / sy } else { 2.0 * alpha };
            }
            let mut accepted = None;
            let mut step = alpha;
            while step > 1e-20 * problem.scale {
                let mut trial = unpack(&x.iter().zip(&g).map(|(v, d)| v - step * d).collect::<Vec<_>>());
                problem.project(&mut trial);
                let xt = pack(&trial);
                let drop: f64 = g.iter().zip(x.iter().zip(&xt)).map(|(d, (u, v))| d * (u - v)).sum();
                if drop > 0.0 {
                    let (jt, gt) = gradient(&trial, mu);
                    if jt <= j - 1e-4 * drop {
                        accepted = Some((xt, jt, gt));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((xn, jn, gn)) = accepted else { break };
            prev = Some((std::mem::replace(&mut x, xn), std::mem::replace(&mut g, gn)));
            j = jn;
            history.push(j);
            if history.len() > window && history[history.len() - 1 - window] - j < opts.stall * j.abs() {
                break;
            }
        }
        sp = unpack(&x);
        let r = problem.closure(&sp);
        mu += r * w;
        if r.norm() < 1e-12 * problem.scale {
            break;
        }
    }
    sp
}

/// Cubic Hermite interpolant from the start to the end with end tangents
/// `σ0 k L d0` and `σ1 k L d1`, as `n` points.
fn hermite(bc: &BoundaryConditions, sign0: f64, sign1: f64, k: f64, n: usize) -> Vec<Point2> {
    let (p0, p1) = (bc.start_point, bc.end_point);
    let l = (p1 - p0).norm();
    let m0 = bc.start_dir.normalize() * (sign0 * k * l);
    let m1 = bc.end_dir.normalize() * (sign1 * k * l);
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let t2 = t * t;
            let t3 = t2 * t;
            p0 * (2.0 * t3 - 3.0 * t2 + 1.0)
                + m0 * (t3 - 2.0 * t2 + t)
                + p1 * (-2.0 * t3 + 3.0 * t2)
                + m1 * (t3 - t2)
        })
        .collect()
}

/// Initial spline for restart `k` with `m` arcs: signed Hermite
/// interpolants first, then random heading profiles in random winding
/// classes with random cusp positions.
pub(super) fn initializer(bc: &BoundaryConditions, k: usize, m: usize, seed: u64) -> (Problem, Spline) {
    let signs: &[(f64, f64)] = match bc.mode {
        Mode::Projective => &[(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)],
        Mode::Oriented => &[(1.0, 1.0)],
    };
    let scales = [1.0, 0.5, 2.0];
    let deterministic = match bc.mode {
        Mode::Projective => signs.len(),
        Mode::Oriented => scales.len(),
    };
    if k < deterministic {
        let (s0, s1) = signs[k % signs.len()];
        let scale = scales[k / signs.len()];
        return Problem::from_points(bc, &hermite(bc, s0, s1, scale, m + 1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
    let r = k - deterministic;
    let (period, cusps) = match bc.mode {
        Mode::Oriented => (TAU, 0),
        Mode::Projective => (PI, r % 3),
    };
    let turns = rng.gen_range(-1i32..=1) as f64 * period;
    let problem = Problem::new(bc, Problem::wound_end(bc, bc.start_angle() + turns));
    let amps: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.75..0.75)).collect();
    let heading = |u: f64| {
        let ramp = problem.theta_start + (problem.theta_end - problem.theta_start) * u;
        let bump: f64 = amps
            .iter()
            .enumerate()
            .map(|(j, a)| a * ((j + 1) as f64 * PI * u).sin())
            .sum();
        ramp + bump
    };
    // Minimizers often reverse briefly near an end, so cusp positions are
    // drawn with extra weight there.
    let mut flips: Vec<usize> = (0..cusps)
        .map(|_| {
            let u: f64 = rng.gen::<f64>().powi(2) * 0.5;
            let u = if rng.gen_bool(0.5) { u } else { 1.0 - u };
            ((u * m as f64).round() as usize).clamp(1, m - 1)
        })
        .collect();
    flips.sort_unstable();
    let first = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let a = (0..m)
        .map(|i| {
            let crossed = flips.iter().filter(|&&f| f <= i).count();
            let sign = if crossed % 2 == 0 { first } else { -first };
            let sign = if bc.mode == Mode::Oriented { 1.0 } else { sign };
            sign * problem.scale / m as f64
        })
        .collect();
    let tau = (0..m)
        .map(|i| heading((i + 1) as f64 / m as f64) - heading(i as f64 / m as f64))
        .collect();
    let mut sp = Spline { a, tau };
    problem.restore(&mut sp);
    (problem, sp)
}
