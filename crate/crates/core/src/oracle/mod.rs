//! Brute-force minimization of a discretized `J` over planar polylines.
//! Independent of the extremal machinery; used to bracket shooting results.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::PlanarCurve;
use crate::error::{Error, Result};
use crate::quadrature::linspace;
use crate::se2::{BoundaryConditions, Mode, Point2};

mod spline;

use spline::{Problem, Spline};

/// Shortest admissible segment.
const MIN_SEGMENT: f64 = 1e-9;
const MIN_POINTS: usize = 8;

/// `N` points on a uniform parameter grid over `[0, 1]`. In projective
/// mode turning angles are measured modulo `π`, so a reversal along the
/// same line (a cusp) costs no rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    pub points: Vec<Point2>,
    pub mode: Mode,
}

impl DiscreteCurve {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        Self::with_mode(points, Mode::Oriented)
    }

    pub fn with_mode(points: Vec<Point2>, mode: Mode) -> Result<Self> {
        if points.len() < MIN_POINTS {
            return Err(Error::InsufficientSamples {
                needed: MIN_POINTS,
                got: points.len(),
            });
        }
        let c = Self { points, mode };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        for (i, w) in self.points.windows(2).enumerate() {
            if !((w[1] - w[0]).norm() > MIN_SEGMENT) {
                return Err(Error::DegenerateSegment(i));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sum over segments of `√(ℓ² + τ²)`: the discrete `∫ √(v² + v²K²) dt`
    /// with `v h ≈ ℓ` and `v K h ≈ τ`, the turning angle.
    pub fn cost(&self) -> Result<f64> {
        self.check()?;
        self.evaluate(None)
    }

    /// Cost and its exact gradient with respect to every point.
    pub fn cost_and_gradient(&self) -> Result<(f64, Vec<Point2>)> {
        self.check()?;
        let mut g = vec![Point2::zeros(); self.points.len()];
        let j = self.evaluate(Some(&mut g))?;
        Ok((j, g))
    }

    // Per segment, `ℓ` approximates `v h` and the turning angle at a node
    // approximates `θ̇ h`. Each segment takes the root mean square of the
    // turning at its two ends, so turns of opposite sign cannot cancel, and
    // the speed term is exactly the polyline length. The turning at the end
    // nodes is copied from their neighbours, which keeps the sum second
    // order.
    fn evaluate(&self, mut grad: Option<&mut Vec<Point2>>) -> Result<f64> {
        let n = self.points.len();
        let p = &self.points;
        let e: Vec<Point2> = p.windows(2).map(|w| w[1] - w[0]).collect();
        let len: Vec<f64> = e.iter().map(|v| v.norm()).collect();
        let mut psi = vec![0.0; n];
        for i in 1..n - 1 {
            let c = e[i - 1].x * e[i].y - e[i - 1].y * e[i].x;
            let d = e[i - 1].dot(&e[i]);
            let mut a = c.atan2(d);
            if self.mode == Mode::Projective {
                if a > FRAC_PI_2 {
                    a -= PI;
                } else if a <= -FRAC_PI_2 {
                    a += PI;
                }
            }
            psi[i] = a;
        }
        let src = |i: usize| i.clamp(1, n - 2);
        let mut total = 0.0;
        let mut dpsi = vec![0.0; n];
        for j in 0..n - 1 {
            let (a, b) = (psi[src(j)], psi[src(j + 1)]);
            let tau2 = 0.5 * (a * a + b * b);
            let f = (len[j] * len[j] + tau2).sqrt();
            total += f;
            if let Some(g) = grad.as_deref_mut() {
                let dl = e[j] / f;
                g[j + 1] += dl;
                g[j] -= dl;
                dpsi[src(j)] += 0.5 * a / f;
                dpsi[src(j + 1)] += 0.5 * b / f;
            }
        }
        if let Some(g) = grad.as_deref_mut() {
            for i in 1..n - 1 {
                // ψ = angle(e_i) − angle(e_{i−1})
                let d_next = Point2::new(-e[i].y, e[i].x) / (len[i] * len[i]);
                let d_prev = Point2::new(-e[i - 1].y, e[i - 1].x) / (len[i - 1] * len[i - 1]);
                let k = dpsi[i];
                g[i + 1] += d_next * k;
                g[i] -= d_next * k;
                g[i] -= d_prev * k;
                g[i - 1] += d_prev * k;
            }
        }
        if !total.is_finite() {
            return Err(Error::NonIntegrable("discrete cost is not finite".into()));
        }
        Ok(total)
    }

    /// The polyline as a sampled planar curve on `[0, 1]`.
    pub fn to_planar_curve(&self) -> Result<PlanarCurve> {
        PlanarCurve::from_samples(linspace(0.0, 1.0, self.points.len() - 1), self.points.clone())
    }

}

/// `J` of a discrete curve.
#[allow(non_snake_case)]
pub fn discrete_cost_J(c: &DiscreteCurve) -> Result<f64> {
    c.cost()
}

/// Knobs for [`minimize`].
#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub n: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Iteration cap per resolution level.
    pub max_iterations: usize,
    /// Relative decrease over a window of iterations below which a level
    /// stops.
    pub stall: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            n: 200,
            restarts: 8,
            seed: 0,
            max_iterations: 6000,
            stall: 1e-11,
        }
    }
}

/// Arc counts from coarse to fine, ending at `n − 1`.
fn levels(n: usize) -> Vec<usize> {
    let mut out = vec![n - 1];
    while *out.last().unwrap() >= 48 {
        let next = out.last().unwrap() / 2;
        out.push(next);
    }
    out.reverse();
    out
}

/// Coarse-to-fine descent from one initializer.
fn run_restart(bc: &BoundaryConditions, k: usize, opts: &OracleOptions) -> Option<(DiscreteCurve, f64)> {
    let lv = levels(opts.n);
    let (problem, sp) = spline::initializer(bc, k, lv[0], opts.seed);
    solve_levels(bc, &problem, sp, &lv, opts)
}

fn solve_levels(
    bc: &BoundaryConditions,
    problem: &Problem,
    mut sp: Spline,
    lv: &[usize],
    opts: &OracleOptions,
) -> Option<(DiscreteCurve, f64)> {
    for (li, &m) in lv.iter().enumerate() {
        if li > 0 {
            sp = problem.prolong(&sp, m);
        }
        sp = spline::descend(problem, sp, opts);
        problem.restore(&mut sp);
    }
    if problem.closure(&sp).norm() > 1e-10 * problem.scale {
        return None;
    }
    let mut pts = problem.points(&sp);
    pts.dedup_by(|b, a| (*b - *a).norm() <= MIN_SEGMENT);
    *pts.last_mut()? = bc.end_point;
    let curve = DiscreteCurve::with_mode(pts, bc.mode).ok()?;
    Some((curve, Problem::cost(&sp)))
}

/// Descends from a given polyline, keeping its point count. The polyline
/// must start and end at the boundary points.
pub fn refine(bc: &BoundaryConditions, points: &[Point2], opts: &OracleOptions) -> Result<(DiscreteCurve, f64)> {
    bc.validate()?;
    if points.len() < MIN_POINTS {
        return Err(Error::InsufficientSamples {
            needed: MIN_POINTS,
            got: points.len(),
        });
    }
    let (problem, sp) = Problem::from_points(bc, points);
    solve_levels(bc, &problem, sp, &[points.len() - 1], opts).ok_or(Error::NoDescent)
}

/// Best discrete minimizer of `J` over `restarts` initializers. Restarts
/// run in parallel and the result depends only on `opts.seed`.
pub fn minimize(bc: &BoundaryConditions, opts: &OracleOptions) -> Result<(DiscreteCurve, f64)> {
    bc.validate()?;
    if opts.n < 16 {
        return Err(Error::InsufficientSamples {
            needed: 16,
            got: opts.n,
        });
    }
    let runs: Vec<Option<(DiscreteCurve, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..opts.restarts.max(1))
            .map(|k| scope.spawn(move || run_restart(bc, k, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("restart panicked")).collect()
    });
    let mut best: Option<(DiscreteCurve, f64)> = None;
    for (curve, j) in runs.into_iter().flatten() {
        if best.as_ref().map_or(true, |(_, b)| j < *b) {
            best = Some((curve, j));
        }
    }
    best.ok_or(Error::NoDescent)
}

/// Random projective conditions: start in `[−1, 1]²`, chord length in
/// `[0.5, 1.5]`, uniform directions.
pub fn validation_suite(seed: u64, count: usize) -> Vec<BoundaryConditions> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    (0..count)
        .map(|_| {
            let x0 = rng.gen_range(-1.0..1.0);
            let y0 = rng.gen_range(-1.0..1.0);
            let a0 = rng.gen_range(0.0..tau);
            let r = rng.gen_range(0.5..1.5);
            let phi = rng.gen_range(0.0..tau);
            let a1 = rng.gen_range(0.0..tau);
            BoundaryConditions::from_angles(
                (x0, y0, a0),
                (x0 + r * phi.cos(), y0 + r * phi.sin(), a1),
                Mode::Projective,
            )
            .expect("chord is at least 0.5")
        })
        .collect()
}

/// Oracle cost next to the shooting cost.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub oracle_cost: f64,
    pub shooting_cost: f64,
    pub rel_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl OracleReport {
    pub fn new(oracle_cost: f64, shooting_cost: f64, note: Option<String>) -> Self {
        Self {
            oracle_cost,
            shooting_cost,
            rel_gap: (oracle_cost - shooting_cost) / shooting_cost,
            note,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quarter_circle(n: usize) -> DiscreteCurve {
        let pts = linspace(0.0, std::f64::consts::FRAC_PI_2, n - 1)
            .into_iter()
            .map(|t| Point2::new(t.cos(), t.sin()))
            .collect();
        DiscreteCurve::new(pts).unwrap()
    }

    #[test]
    fn straight_polyline_costs_its_length() {
        let pts = (0..20).map(|i| Point2::new(0.1 * i as f64, 0.05 * i as f64)).collect();
        let c = DiscreteCurve::new(pts).unwrap();
        assert_abs_diff_eq!(c.cost().unwrap(), 1.9f64.hypot(0.95), epsilon = 1e-12);
    }

    #[test]
    fn quarter_circle_converges() {
        let exact = std::f64::consts::FRAC_PI_2 * 2f64.sqrt();
        let e1 = (quarter_circle(64).cost().unwrap() - exact).abs();
        let e2 = (quarter_circle(128).cost().unwrap() - exact).abs();
        assert!(e2 < e1 / 3.0, "{e1} {e2}");
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let pts: Vec<Point2> = (0..12)
                .map(|i| Point2::new(i as f64 * 0.1 + rng.gen_range(-0.02..0.02), rng.gen_range(-0.05..0.05)))
                .collect();
            let c = DiscreteCurve::new(pts).unwrap();
            let (_, g) = c.cost_and_gradient().unwrap();
            let h = 1e-6;
            for k in 0..c.len() {
                for axis in 0..2 {
                    let mut plus = c.clone();
                    let mut minus = c.clone();
                    plus.points[k][axis] += h;
                    minus.points[k][axis] -= h;
                    let fd = (plus.cost().unwrap() - minus.cost().unwrap()) / (2.0 * h);
                    let an = g[k][axis];
                    assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "{k} {axis}: {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn rejects_coincident_points() {
        let mut pts: Vec<Point2> = (0..10).map(|i| Point2::new(i as f64, 0.0)).collect();
        pts[4] = pts[3];
        assert_eq!(DiscreteCurve::new(pts), Err(Error::DegenerateSegment(3)));
    }

    #[test]
    fn collinear_bc_gives_the_segment() {
        let bc = BoundaryConditions::from_angles((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), Mode::Projective).unwrap();
        let opts = OracleOptions {
            n: 32,
            restarts: 2,
            ..OracleOptions::default()
        };
        let (_, j) = minimize(&bc, &opts).unwrap();
        assert!((j - 1.0).abs() < 1e-2, "{j}");
    }
}
