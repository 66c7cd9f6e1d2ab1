//! The length-curvature cost `J`, the control cost `C`, the elastica family
//! `E1` to `E4`, and the constant-speed reparametrization of trajectories.
//!
//! For a curve with speed `v` and curvature `K`,
//!
//! ```text
//! J  = ∫ √(v² + v²K²) dt          C  = ∫ √(u1² + u2²) dt
//! E1 = ∫ K² ds    E2 = ∫ (1 + K²) ds    E3 = ∫ (η + K²) ds    E4 = ∫ √(1 + K²) ds
//! ```
//!
//! `J` only needs `v√(1 + K²) = √(v² + θ̇²)`, which stays finite at cusps
//! where `K` blows up. The `E` family needs an arclength parameter and fails
//! with [`Error::VanishingVelocity`] when the speed vanishes.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::curve::{Jet, PlanarCurve, Sampled, Segment};
use crate::error::{Error, Result};
use crate::quadrature::{cumulative, simpson};
use crate::tolerances::Tolerances;
use crate::trajectory::{Arc, ControlTrajectory};

/// Samples slower than this fraction of the fastest one are treated as
/// sitting on a cusp: their `J` integrand is interpolated from neighbours.
const CUSP_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    J,
    C,
    E1,
    E2,
    E3 { eta: f64 },
    E4,
}

impl Functional {
    pub fn name(&self) -> &'static str {
        match self {
            Functional::J => "J",
            Functional::C => "C",
            Functional::E1 => "E1",
            Functional::E2 => "E2",
            Functional::E3 { .. } => "E3",
            Functional::E4 => "E4",
        }
    }

    /// Arclength density `f(K)` for the elastica family.
    fn density(&self, k: f64) -> Option<f64> {
        match *self {
            Functional::E1 => Some(k * k),
            Functional::E2 => Some(1.0 + k * k),
            Functional::E3 { eta } => Some(eta + k * k),
            Functional::E4 => Some((1.0 + k * k).sqrt()),
            Functional::J | Functional::C => None,
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Functional {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = Error;

    /// Parses `J`, `C`, `E1`, `E2`, `E4`; `E3` needs [`Functional::E3`]
    /// built with an explicit `eta`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "J" => Ok(Functional::J),
            "C" => Ok(Functional::C),
            "E1" => Ok(Functional::E1),
            "E2" => Ok(Functional::E2),
            "E4" => Ok(Functional::E4),
            "E3" => Err(Error::Parse("E3 needs an explicit eta".into())),
            other => Err(Error::Parse(format!("unknown functional `{other}`"))),
        }
    }
}

/// Value of a functional with one entry per segment (or arc).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub functional: Functional,
    pub value: f64,
    pub breakdown: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl CostReport {
    fn new(functional: Functional, breakdown: Vec<f64>) -> Self {
        let eta = match functional {
            Functional::E3 { eta } => Some(eta),
            _ => None,
        };
        Self {
            functional,
            value: breakdown.iter().sum(),
            breakdown,
            eta,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cost report serializes")
    }
}

/// Signed curvature `(ẋÿ − ẏẍ) / (ẋ² + ẏ²)^{3/2}` at `t`.
pub fn curvature(curve: &PlanarCurve, t: f64) -> Result<f64> {
    curvature_with(curve, t, &Tolerances::default())
}

pub fn curvature_with(curve: &PlanarCurve, t: f64, tol: &Tolerances) -> Result<f64> {
    let jet = curve.jet_at(t);
    jet_curvature(&jet, tol.vanishing_speed)
}

fn jet_curvature(jet: &Jet, threshold: f64) -> Result<f64> {
    let v = jet.speed();
    if !(v >= threshold) {
        return Err(Error::VanishingVelocity { t: jet.t, speed: v });
    }
    Ok(jet.cross() / (v * v * v))
}

/// `J` of a sampled piece with `(v, θ̇)` from its jets (or exact frames).
/// `weight` multiplies the curvature term: `√(v² + weight² θ̇²)`.
fn sampled_cost(s: &Sampled, weight: f64) -> Result<f64> {
    let integrand: Vec<f64> = match &s.frames {
        Some(frames) => frames
            .iter()
            .map(|f| f.u1.hypot(weight * f.u2))
            .collect(),
        None => {
            let jets = s.jets();
            let speeds: Vec<f64> = jets.iter().map(Jet::speed).collect();
            let vmax = speeds.iter().cloned().fold(0.0, f64::max);
            if vmax == 0.0 {
                return Ok(0.0);
            }
            let slow: Vec<bool> = speeds.iter().map(|&v| v < CUSP_FRACTION * vmax).collect();
            let raw: Vec<f64> = jets
                .iter()
                .zip(&speeds)
                .map(|(j, &v)| {
                    let rate = j.cross() / (v * v);
                    v.hypot(weight * rate)
                })
                .collect();
            patch(&s.times, &raw, &slow)?
        }
    };
    if integrand.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonIntegrable("integrand is not finite".into()));
    }
    Ok(simpson(&s.times, &integrand))
}

/// Replaces flagged values by the cubic through the two nearest good
/// samples on each side (fewer when the data runs out).
fn patch(t: &[f64], values: &[f64], flagged: &[bool]) -> Result<Vec<f64>> {
    if !flagged.iter().any(|&f| f) {
        return Ok(values.to_vec());
    }
    let good: Vec<usize> = (0..values.len()).filter(|&i| !flagged[i]).collect();
    if good.len() < 2 {
        return Err(Error::NonIntegrable("curve is stationary almost everywhere".into()));
    }
    let mut out = values.to_vec();
    for i in (0..values.len()).filter(|&i| flagged[i]) {
        let k = good.partition_point(|&g| g < i);
        let lo = k.saturating_sub(2);
        let hi = (k + 2).min(good.len());
        let idx = &good[lo..hi];
        let xs: Vec<f64> = idx.iter().map(|&j| t[j]).collect();
        let ys: Vec<f64> = idx.iter().map(|&j| values[j]).collect();
        out[i] = crate::quadrature::lagrange(&xs, &ys, t[i]);
    }
    Ok(out)
}

fn segment_cost(seg: &Segment, weight: f64) -> Result<f64> {
    match seg {
        Segment::Line(l) => Ok(l.length()),
        Segment::Arc(a) => Ok(a.sweep.abs() * a.radius.hypot(weight)),
        Segment::Sampled(s) => sampled_cost(s, weight),
    }
}

/// `J[γ] = ∫ √(‖γ̇‖² + ‖γ̇‖² K²) dt`, one breakdown entry per segment.
pub fn cost_j(curve: &PlanarCurve) -> Result<CostReport> {
    let parts = curve
        .segments()
        .iter()
        .map(|s| segment_cost(s, 1.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(CostReport::new(Functional::J, parts))
}

/// The cost adapted to the homothety `(x, y) ↦ (βx, βy)`:
/// `J_β[γ] = ∫ √(‖γ̇‖² + β² ‖γ̇‖² K²) dt`. It satisfies
/// `J_β[βγ] = |β| J[γ]`.
pub fn cost_j_weighted(curve: &PlanarCurve, beta: f64) -> Result<f64> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::ZeroScale);
    }
    curve
        .segments()
        .iter()
        .map(|s| segment_cost(s, beta.abs()))
        .sum()
}

/// `J` of the curve `t ↦ f(t)` on `[t0, t1]`, refining a uniform sampling
/// until successive values differ by less than `tol.quadrature`.
pub fn cost_j_adaptive(
    f: impl Fn(f64) -> crate::se2::Point2,
    t0: f64,
    t1: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let mut n = 64;
    let mut prev = cost_j(&PlanarCurve::sample_fn(&f, t0, t1, n)?)?.value;
    while n < 1 << 18 {
        n *= 2;
        let next = cost_j(&PlanarCurve::sample_fn(&f, t0, t1, n)?)?.value;
        if (next - prev).abs() < tol.quadrature {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonIntegrable(format!(
        "no convergence after {n} samples (last value {prev})"
    )))
}

/// `C[q] = ∫ √(u1² + u2²) dt`, one breakdown entry per arc.
pub fn cost_c(traj: &ControlTrajectory) -> CostReport {
    let parts = traj.arcs.iter().map(arc_cost).collect();
    CostReport::new(Functional::C, parts)
}

fn arc_cost(arc: &Arc) -> f64 {
    let t: Vec<f64> = arc.samples.iter().map(|s| s.t).collect();
    let f: Vec<f64> = arc.samples.iter().map(|s| s.control_norm()).collect();
    simpson(&t, &f)
}

/// One of `E1` to `E4`, integrated as `∫ f(K) v dt`, which equals the
/// arclength integral without resampling.
pub fn cost_e(curve: &PlanarCurve, which: Functional) -> Result<CostReport> {
    cost_e_with(curve, which, &Tolerances::default())
}

pub fn cost_e_with(curve: &PlanarCurve, which: Functional, tol: &Tolerances) -> Result<CostReport> {
    if which.density(0.0).is_none() {
        return Err(Error::Parse(format!("{which} is not in the elastica family")));
    }
    if let Functional::E3 { eta } = which {
        if !eta.is_finite() {
            return Err(Error::Parse("eta must be finite".into()));
        }
    }
    let density = |k: f64| which.density(k).unwrap();
    let mut parts = Vec::with_capacity(curve.segments().len());
    for seg in curve.segments() {
        let value = match seg {
            Segment::Line(l) => {
                if l.length() < tol.vanishing_speed * (l.t1 - l.t0) {
                    return Err(Error::VanishingVelocity { t: l.t0, speed: 0.0 });
                }
                density(0.0) * l.length()
            }
            Segment::Arc(a) => density(a.curvature()) * a.length(),
            Segment::Sampled(s) => {
                let jets = s.jets();
                // A reversal between neighbouring samples hides a zero of the
                // velocity (a cusp) that no sample lands on.
                if let Some(w) = jets.windows(2).find(|w| w[0].velocity.dot(&w[1].velocity) <= 0.0) {
                    return Err(Error::VanishingVelocity {
                        t: 0.5 * (w[0].t + w[1].t),
                        speed: w[0].speed().min(w[1].speed()),
                    });
                }
                let mut f = Vec::with_capacity(jets.len());
                for (j, frame) in jets.iter().zip(s.frames.iter().flatten().map(Some).chain(std::iter::repeat(None))) {
                    let v = j.speed();
                    if !(v >= tol.vanishing_speed) {
                        return Err(Error::VanishingVelocity { t: j.t, speed: v });
                    }
                    let k = match frame {
                        Some(fr) => fr.u2 / fr.u1.abs(),
                        None => j.cross() / (v * v * v),
                    };
                    f.push(density(k) * v);
                }
                simpson(&s.times, &f)
            }
        };
        parts.push(value);
    }
    Ok(CostReport::new(which, parts))
}

/// Evaluates any functional on a planar curve (`C` is taken on the lift).
pub fn evaluate(curve: &PlanarCurve, which: Functional, tol: &Tolerances) -> Result<CostReport> {
    match which {
        Functional::J => cost_j(curve),
        Functional::C => Ok(cost_c(&crate::lift::lift_with(curve, tol)?)),
        _ => cost_e_with(curve, which, tol),
    }
}

/// Constant-speed reparametrization on the same time interval.
///
/// With `f(t) = ∫₀ᵗ |u|` and `L = f(T)`, each sample moves to
/// `s = f(t) T / L` and its control becomes `u / |u| · L / T`. Stretches
/// where the trajectory idles (`f` flat) collapse; states are copied
/// unchanged, so endpoints are preserved exactly.
pub fn arclength_reparam(traj: &ControlTrajectory) -> Result<ControlTrajectory> {
    let t0 = traj.t_start();
    let total = traj.duration();
    let mut lengths = Vec::with_capacity(traj.arcs.len());
    let mut f_all = Vec::with_capacity(traj.arcs.len());
    let mut offset = 0.0;
    for arc in &traj.arcs {
        let t: Vec<f64> = arc.samples.iter().map(|s| s.t).collect();
        let norms: Vec<f64> = arc.samples.iter().map(|s| s.control_norm()).collect();
        let f = cumulative(&t, &norms);
        let arc_len = f.last().copied().unwrap_or(0.0).max(0.0);
        f_all.push(f.into_iter().map(|v| offset + v).collect::<Vec<_>>());
        lengths.push(arc_len);
        offset += arc_len;
    }
    let big_l = offset;
    if !(big_l > 0.0) {
        return Err(Error::ZeroCost);
    }
    let speed = big_l / total;
    let scale = total / big_l;
    let eps = 1e-12 * total;

    let mut arcs: Vec<Arc> = Vec::new();
    let mut last_s = f64::NEG_INFINITY;
    for (arc, f) in traj.arcs.iter().zip(&f_all) {
        let mut samples = Vec::with_capacity(arc.samples.len());
        for (i, (smp, &fi)) in arc.samples.iter().zip(f).enumerate() {
            let mut s = t0 + fi * scale;
            let first_of_arc = i == 0;
            if first_of_arc && last_s.is_finite() {
                // shared boundary with the previous arc, kept even when that
                // arc was idle and dropped
                s = last_s;
            } else if s <= last_s + eps {
                continue;
            }
            let dir = direction(&arc.samples, i);
            let mut out = *smp;
            out.t = s;
            out.u1 = dir.0 * speed;
            out.u2 = dir.1 * speed;
            samples.push(out);
            last_s = last_s.max(s);
        }
        // an idle arc collapses to its first state, which the previous arc
        // already ends on
        if samples.len() >= 2 {
            arcs.push(Arc {
                kind: arc.kind,
                samples,
            });
        }
    }
    if let Some(last) = arcs.last_mut().and_then(|a| a.samples.last_mut()) {
        last.t = t0 + total;
    }
    if arcs.is_empty() {
        return Err(Error::ZeroCost);
    }
    ControlTrajectory::new(traj.space, arcs)
}

/// Unit control direction at sample `i`, borrowed from the nearest moving
/// sample when the control vanishes there.
fn direction(samples: &[crate::trajectory::Sample], i: usize) -> (f64, f64) {
    let unit = |k: usize| {
        let s = &samples[k];
        let n = s.control_norm();
        (n > 0.0).then(|| (s.u1 / n, s.u2 / n))
    };
    if let Some(d) = unit(i) {
        return d;
    }
    for step in 1..samples.len() {
        if i + step < samples.len() {
            if let Some(d) = unit(i + step) {
                return d;
            }
        }
        if step <= i {
            if let Some(d) = unit(i - step) {
                return d;
            }
        }
    }
    (1.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CircularArc, Line};
    use crate::se2::{Mode, Point2};
    use crate::trajectory::{ArcKind, Sample};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn circle(r: f64, n: usize) -> PlanarCurve {
        PlanarCurve::sample_fn(|t| Point2::new(r * t.cos(), r * t.sin()), 0.0, 2.0 * PI, n).unwrap()
    }

    #[test]
    fn curvature_examples() {
        let line = PlanarCurve::line(Point2::zeros(), Point2::new(2.0, 1.0), 0.0, 1.0).unwrap();
        assert_eq!(curvature(&line, 0.3).unwrap(), 0.0);
        let c = circle(2.0, 2000);
        assert_relative_eq!(curvature(&c, 1.0).unwrap(), 0.5, epsilon = 1e-9);
        let p = PlanarCurve::sample_fn(|t| Point2::new(t, t * t), -1.0, 1.0, 40).unwrap();
        assert_relative_eq!(curvature(&p, 0.0).unwrap(), 2.0, epsilon = 1e-10);
        let still = PlanarCurve::sample_fn(|_| Point2::new(1.0, 1.0), 0.0, 1.0, 10).unwrap();
        assert!(matches!(curvature(&still, 0.5), Err(Error::VanishingVelocity { .. })));
    }

    #[test]
    fn j_closed_forms() {
        let line = PlanarCurve::line(Point2::zeros(), Point2::new(3.0, 4.0), 0.0, 2.0).unwrap();
        assert_eq!(cost_j(&line).unwrap().value, 5.0);
        for r in [0.5, 1.0, 3.0] {
            let exact = 2.0 * PI * (r * r + 1.0f64).sqrt();
            assert_relative_eq!(cost_j(&circle(r, 4000)).unwrap().value, exact, max_relative = 1e-10);
            let arc = PlanarCurve::new(vec![Segment::Arc(CircularArc::from_tangent(
                0.0,
                1.0,
                Point2::zeros(),
                0.0,
                r,
                2.0 * PI,
            ))])
            .unwrap();
            assert_relative_eq!(cost_j(&arc).unwrap().value, exact, max_relative = 1e-14);
        }
    }

    #[test]
    fn j_through_a_cusp_stays_finite() {
        // (t², t³) has a cusp at 0; J = ∫ √(v² + θ̇²) with θ̇ = 6/(4 + 9t²)·...
        let f = |t: f64| Point2::new(t * t, t * t * t);
        let exact = {
            let g = |t: f64| {
                let v = t.abs() * (4.0 + 9.0 * t * t).sqrt();
                let rate = 6.0 / (4.0 + 9.0 * t * t);
                v.hypot(rate)
            };
            let ts = crate::quadrature::linspace(-1.0, 1.0, 200_000);
            let fs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
            simpson(&ts, &fs)
        };
        let c = PlanarCurve::sample_fn(f, -1.0, 1.0, 4000).unwrap();
        let j = cost_j(&c).unwrap().value;
        assert!((j - exact).abs() < 1e-3, "{j} vs {exact}");
    }

    #[test]
    fn breakdown_sums_to_value() {
        let a = Segment::Line(Line { t0: 0.0, t1: 1.0, from: Point2::zeros(), to: Point2::new(1.0, 0.0) });
        let b = Segment::Arc(CircularArc::from_tangent(1.0, 2.0, Point2::new(1.0, 0.0), 0.0, 1.0, PI / 2.0));
        let c = PlanarCurve::new(vec![a, b]).unwrap();
        let r = cost_j(&c).unwrap();
        assert_eq!(r.breakdown.len(), 2);
        assert!((r.value - r.breakdown.iter().sum::<f64>()).abs() < 1e-12);
        let json = r.to_json();
        assert!(json.starts_with("{\"functional\":\"J\",\"value\":"));
    }

    #[test]
    fn elastica_family() {
        let r = 2.0;
        let arc = PlanarCurve::new(vec![Segment::Arc(CircularArc::from_tangent(0.0, 1.0, Point2::zeros(), 0.3, r, 1.2))])
            .unwrap();
        let s = 2.4;
        assert_relative_eq!(cost_e(&arc, Functional::E1).unwrap().value, s / (r * r), epsilon = 1e-14);
        let sampled = PlanarCurve::sample_fn(|t| Point2::new(r * t.cos(), r * t.sin()), 0.0, 1.2, 2000).unwrap();
        assert_relative_eq!(cost_e(&sampled, Functional::E1).unwrap().value, s / (r * r), max_relative = 1e-9);
        let e2 = cost_e(&sampled, Functional::E2).unwrap().value;
        let e3 = cost_e(&sampled, Functional::E3 { eta: 1.0 }).unwrap().value;
        assert_eq!(e2, e3);
        let e4 = cost_e(&sampled, Functional::E4).unwrap().value;
        assert_relative_eq!(e4, cost_j(&sampled).unwrap().value, max_relative = 1e-9);
        let line = PlanarCurve::line(Point2::zeros(), Point2::new(1.0, 0.0), 0.0, 1.0).unwrap();
        assert_eq!(cost_e(&line, Functional::E1).unwrap().value, 0.0);
    }

    #[test]
    fn elastica_family_rejects_cusps() {
        let c = PlanarCurve::sample_fn(|t| Point2::new(t * t, t * t * t), -1.0, 1.0, 200).unwrap();
        assert!(matches!(cost_e(&c, Functional::E4), Err(Error::VanishingVelocity { .. })));
        assert!(cost_j(&c).is_ok());
    }

    #[test]
    fn functional_parsing() {
        assert_eq!("j".parse::<Functional>().unwrap(), Functional::J);
        assert_eq!("E4".parse::<Functional>().unwrap(), Functional::E4);
        assert!("E3".parse::<Functional>().is_err());
        assert!("E7".parse::<Functional>().is_err());
    }

    fn constant_arc(kind: ArcKind, t0: f64, t1: f64, start: Sample, u: (f64, f64), n: usize) -> Arc {
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
                Sample { t, x, y, theta, u1: u.0, u2: u.1, covector: None }
            })
            .collect();
        Arc { kind, samples }
    }

    #[test]
    fn reparam_hand_example() {
        // u = (2, 0) on [0, 1], idle on [1, 2]: output u = (1, 0) on [0, 2]
        let origin = Sample { t: 0.0, x: 0.0, y: 0.0, theta: 0.0, u1: 0.0, u2: 0.0, covector: None };
        let a = constant_arc(ArcKind::Lifted, 0.0, 1.0, origin, (2.0, 0.0), 10);
        let b = constant_arc(ArcKind::Lifted, 1.0, 2.0, *a.last(), (0.0, 0.0), 10);
        let traj = ControlTrajectory::new(Mode::Oriented, vec![a, b]).unwrap();
        let out = arclength_reparam(&traj).unwrap();
        assert_eq!(out.t_start(), 0.0);
        assert_eq!(out.t_end(), 2.0);
        for s in out.samples() {
            assert!((s.u1 - 1.0).abs() < 1e-12 && s.u2 == 0.0);
            assert!((s.x - s.t).abs() < 1e-12);
        }
        assert_relative_eq!(cost_c(&out).value, 2.0, epsilon = 1e-12);
        assert_eq!(out.end().pose(), traj.end().pose());
    }

    #[test]
    fn reparam_with_leading_idle_keeps_the_start() {
        let origin = Sample { t: 0.0, x: 0.3, y: -0.2, theta: 0.4, u1: 0.0, u2: 0.0, covector: None };
        let a = constant_arc(ArcKind::Lifted, 0.0, 1.0, origin, (0.0, 0.0), 10);
        let b = constant_arc(ArcKind::Lifted, 1.0, 2.0, *a.last(), (1.0, 0.5), 10);
        let traj = ControlTrajectory::new(Mode::Oriented, vec![a, b]).unwrap();
        let out = arclength_reparam(&traj).unwrap();
        assert_eq!(out.t_start(), 0.0);
        assert_eq!(out.start().pose(), traj.start().pose());
        assert_eq!(out.end().pose(), traj.end().pose());
        assert_relative_eq!(cost_c(&out).value, cost_c(&traj).value, epsilon = 1e-12);
    }

    #[test]
    fn reparam_fixed_point() {
        let origin = Sample { t: 0.0, x: 0.0, y: 0.0, theta: 0.0, u1: 0.0, u2: 0.0, covector: None };
        let (s, c) = (0.6, 0.8);
        let a = constant_arc(ArcKind::Lifted, 0.0, 1.5, origin, (c, s), 30);
        let traj = ControlTrajectory::new(Mode::Oriented, vec![a]).unwrap();
        let out = arclength_reparam(&traj).unwrap();
        for (p, q) in out.samples().zip(traj.samples()) {
            assert!((p.t - q.t).abs() < 1e-10);
            assert!((p.u1 - q.u1).abs() < 1e-10 && (p.u2 - q.u2).abs() < 1e-10);
        }
    }

    #[test]
    fn reparam_of_a_point_fails() {
        let origin = Sample { t: 0.0, x: 0.0, y: 0.0, theta: 0.0, u1: 0.0, u2: 0.0, covector: None };
        let a = constant_arc(ArcKind::Lifted, 0.0, 1.0, origin, (0.0, 0.0), 5);
        let traj = ControlTrajectory::new(Mode::Oriented, vec![a]).unwrap();
        assert_eq!(arclength_reparam(&traj), Err(Error::ZeroCost));
    }

    #[test]
    fn weighted_cost_scales_linearly() {
        let arc = PlanarCurve::new(vec![Segment::Arc(CircularArc::from_tangent(0.0, 1.0, Point2::zeros(), 0.0, 1.5, 2.0))])
            .unwrap();
        let j = cost_j(&arc).unwrap().value;
        for beta in [0.5, 2.0, -3.0] {
            let scaled = arc.homothety(beta).unwrap();
            assert_relative_eq!(cost_j_weighted(&scaled, beta).unwrap(), beta.abs() * j, max_relative = 1e-13);
        }
        assert_eq!(cost_j_weighted(&arc, 0.0), Err(Error::ZeroScale));
    }
}
