//! Planar curves made of sampled pieces and exact primitives.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::quadrature::{lagrange, linspace};
use crate::se2::{Point2, Se2};

const CONTIGUITY: f64 = 1e-10;

/// Tangent angle, signed speed and angular rate at one sample. `u1` may be
/// negative when the curve is the projection of a reversing trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub theta: f64,
    pub u1: f64,
    pub u2: f64,
}

/// Uniformly (or at least increasingly) time-stamped points. When `frames`
/// is present the derivatives come from it instead of finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub times: Vec<f64>,
    pub points: Vec<Point2>,
    pub frames: Option<Vec<Frame>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub t0: f64,
    pub t1: f64,
    pub from: Point2,
    pub to: Point2,
}

/// Circular arc traversed at constant speed; `sweep > 0` is counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularArc {
    pub t0: f64,
    pub t1: f64,
    pub center: Point2,
    pub radius: f64,
    /// Polar angle of the start point around `center`.
    pub start_angle: f64,
    pub sweep: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Sampled(Sampled),
    Line(Line),
    Arc(CircularArc),
}

/// Position, velocity and acceleration at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub t: f64,
    pub point: Point2,
    pub velocity: Point2,
    pub acceleration: Point2,
}

impl Jet {
    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }

    /// `ẋÿ − ẏẍ`.
    pub fn cross(&self) -> f64 {
        self.velocity.x * self.acceleration.y - self.velocity.y * self.acceleration.x
    }
}

impl CircularArc {
    /// Arc tangent to `start_dir` at `start`, turning by `sweep` on a circle
    /// of the given radius.
    pub fn from_tangent(
        t0: f64,
        t1: f64,
        start: Point2,
        start_dir: f64,
        radius: f64,
        sweep: f64,
    ) -> Self {
        let side = sweep.signum();
        let normal = Point2::new(-start_dir.sin(), start_dir.cos()) * side;
        let center = start + normal * radius;
        let start_angle = start_dir - side * FRAC_PI_2;
        Self {
            t0,
            t1,
            center,
            radius,
            start_angle,
            sweep,
        }
    }

    fn phase(&self, t: f64) -> f64 {
        self.start_angle + self.sweep * (t - self.t0) / (self.t1 - self.t0)
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        let phi = self.phase(t);
        self.center + Point2::new(phi.cos(), phi.sin()) * self.radius
    }

    pub fn tangent_angle_at(&self, t: f64) -> f64 {
        self.phase(t) + self.sweep.signum() * FRAC_PI_2
    }

    pub fn length(&self) -> f64 {
        self.radius * self.sweep.abs()
    }

    pub fn curvature(&self) -> f64 {
        self.sweep.signum() / self.radius
    }
}

impl Line {
    pub fn length(&self) -> f64 {
        (self.to - self.from).norm()
    }

    pub fn direction(&self) -> Point2 {
        (self.to - self.from) / self.length()
    }
}

impl Sampled {
    pub fn new(times: Vec<f64>, points: Vec<Point2>) -> Result<Self> {
        let s = Self {
            times,
            points,
            frames: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_frames(times: Vec<f64>, points: Vec<Point2>, frames: Vec<Frame>) -> Result<Self> {
        let s = Self {
            times,
            points,
            frames: Some(frames),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.times.len() != self.points.len() {
            return Err(Error::InvalidCurve("times and points differ in length".into()));
        }
        if let Some(f) = &self.frames {
            if f.len() != self.times.len() {
                return Err(Error::InvalidCurve("frames and points differ in length".into()));
            }
        }
        if self.times.len() < 4 {
            return Err(Error::InsufficientSamples {
                needed: 4,
                got: self.times.len(),
            });
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCurve("sample times must increase strictly".into()));
        }
        Ok(())
    }

    /// Velocity and acceleration at every sample by five-point differences.
    /// Exact frames take precedence.
    pub fn jets(&self) -> Vec<Jet> {
        let n = self.times.len();
        if let Some(frames) = &self.frames {
            // acceleration = u̇1 e(θ) + u1 u2 e⊥(θ); u̇1 by differences
            let u1: Vec<f64> = frames.iter().map(|f| f.u1).collect();
            let du1: Vec<f64> = (0..n).map(|i| self.derivative(&u1, i).0).collect();
            return (0..n)
                .map(|i| {
                    let f = frames[i];
                    let (s, c) = f.theta.sin_cos();
                    let e = Point2::new(c, s);
                    let e_perp = Point2::new(-s, c);
                    Jet {
                        t: self.times[i],
                        point: self.points[i],
                        velocity: e * f.u1,
                        acceleration: e * du1[i] + e_perp * (f.u1 * f.u2),
                    }
                })
                .collect();
        }
        let xs: Vec<f64> = self.points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p.y).collect();
        (0..n)
            .map(|i| {
                let (dx, ddx) = self.derivative(&xs, i);
                let (dy, ddy) = self.derivative(&ys, i);
                Jet {
                    t: self.times[i],
                    point: self.points[i],
                    velocity: Point2::new(dx, dy),
                    acceleration: Point2::new(ddx, ddy),
                }
            })
            .collect()
    }

    /// First and second derivative of `values` at sample `i` from the five
    /// nearest samples (one-sided near the ends).
    fn derivative(&self, values: &[f64], i: usize) -> (f64, f64) {
        let n = self.times.len();
        let width = n.min(5);
        let lo = i.saturating_sub(2).min(n - width);
        let r = lo..lo + width;
        let w = fd_weights(&self.times[r.clone()], self.times[i]);
        (dot(&w[1], &values[r.clone()]), dot(&w[2], &values[r]))
    }

    fn point_at(&self, t: f64) -> Point2 {
        let n = self.times.len();
        let k = self.times.partition_point(|&x| x < t).clamp(1, n - 1);
        let lo = (k as isize - 2).clamp(0, n as isize - 4) as usize;
        let ts = &self.times[lo..lo + 4];
        let xs: Vec<f64> = self.points[lo..lo + 4].iter().map(|p| p.x).collect();
        let ys: Vec<f64> = self.points[lo..lo + 4].iter().map(|p| p.y).collect();
        Point2::new(lagrange(ts, &xs, t), lagrange(ts, &ys, t))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fornberg's finite-difference weights for derivatives 0..=2 at `z`.
pub(crate) fn fd_weights(x: &[f64], z: f64) -> [Vec<f64>; 3] {
    let n = x.len();
    let m = 2;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    let col = |k: usize| c.iter().map(|row| row[k]).collect::<Vec<_>>();
    [col(0), col(1), col(2)]
}

impl Segment {
    pub fn t_start(&self) -> f64 {
        match self {
            Segment::Sampled(s) => s.times[0],
            Segment::Line(l) => l.t0,
            Segment::Arc(a) => a.t0,
        }
    }

    pub fn t_end(&self) -> f64 {
        match self {
            Segment::Sampled(s) => *s.times.last().unwrap(),
            Segment::Line(l) => l.t1,
            Segment::Arc(a) => a.t1,
        }
    }

    pub fn start_point(&self) -> Point2 {
        match self {
            Segment::Sampled(s) => s.points[0],
            Segment::Line(l) => l.from,
            Segment::Arc(a) => a.point_at(a.t0),
        }
    }

    pub fn end_point(&self) -> Point2 {
        match self {
            Segment::Sampled(s) => *s.points.last().unwrap(),
            Segment::Line(l) => l.to,
            Segment::Arc(a) => a.point_at(a.t1),
        }
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        match self {
            Segment::Sampled(s) => s.point_at(t),
            Segment::Line(l) => {
                let r = (t - l.t0) / (l.t1 - l.t0);
                l.from + (l.to - l.from) * r
            }
            Segment::Arc(a) => a.point_at(t),
        }
    }

    /// Exact jet for primitives; for sampled pieces the jet at the nearest
    /// sample.
    pub fn jet_at(&self, t: f64) -> Jet {
        match self {
            Segment::Line(l) => Jet {
                t,
                point: self.point_at(t),
                velocity: (l.to - l.from) / (l.t1 - l.t0),
                acceleration: Point2::zeros(),
            },
            Segment::Arc(a) => {
                let omega = a.sweep / (a.t1 - a.t0);
                let phi = a.phase(t);
                let radial = Point2::new(phi.cos(), phi.sin());
                let tangential = Point2::new(-phi.sin(), phi.cos());
                Jet {
                    t,
                    point: a.center + radial * a.radius,
                    velocity: tangential * (a.radius * omega),
                    acceleration: -radial * (a.radius * omega * omega),
                }
            }
            Segment::Sampled(s) => {
                let jets = s.jets();
                let k = s.times.partition_point(|&x| x < t).min(s.times.len() - 1);
                let k = if k > 0 && (t - s.times[k - 1]).abs() < (s.times[k] - t).abs() {
                    k - 1
                } else {
                    k
                };
                jets[k]
            }
        }
    }

    pub fn start_tangent(&self) -> Point2 {
        match self {
            Segment::Sampled(s) => s.jets()[0].velocity,
            _ => self.jet_at(self.t_start()).velocity,
        }
    }

    pub fn end_tangent(&self) -> Point2 {
        match self {
            Segment::Sampled(s) => s.jets().last().unwrap().velocity,
            _ => self.jet_at(self.t_end()).velocity,
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Segment::Line(l) => l.length(),
            Segment::Arc(a) => a.length(),
            Segment::Sampled(s) => {
                let speeds: Vec<f64> = s.jets().iter().map(|j| j.speed()).collect();
                crate::quadrature::simpson(&s.times, &speeds)
            }
        }
    }

    fn map_points(&self, f: &dyn Fn(Point2) -> Point2, angle: f64, scale: f64) -> Segment {
        match self {
            Segment::Sampled(s) => Segment::Sampled(Sampled {
                times: s.times.clone(),
                points: s.points.iter().map(|p| f(*p)).collect(),
                frames: s.frames.as_ref().map(|fr| {
                    fr.iter()
                        .map(|fm| Frame {
                            theta: fm.theta + angle,
                            u1: fm.u1 * scale,
                            u2: fm.u2,
                        })
                        .collect()
                }),
            }),
            Segment::Line(l) => Segment::Line(Line {
                from: f(l.from),
                to: f(l.to),
                ..*l
            }),
            Segment::Arc(a) => Segment::Arc(CircularArc {
                center: f(a.center),
                radius: a.radius * scale,
                start_angle: a.start_angle + angle,
                ..*a
            }),
        }
    }
}

/// A C⁰ concatenation of segments over consecutive time intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    segments: Vec<Segment>,
}

impl PlanarCurve {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidCurve("curve has no segments".into()));
        }
        for seg in &segments {
            if let Segment::Sampled(s) = seg {
                s.validate()?;
            }
            if !(seg.t_end() > seg.t_start()) {
                return Err(Error::InvalidCurve("segment has empty time interval".into()));
            }
            if let Segment::Arc(a) = seg {
                if !(a.radius > 0.0) {
                    return Err(Error::InvalidCurve("arc radius must be positive".into()));
                }
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            let gap = (w[0].end_point() - w[1].start_point()).norm();
            if gap > CONTIGUITY {
                return Err(Error::InvalidCurve(format!(
                    "segments {i} and {} are {gap:e} apart",
                    i + 1
                )));
            }
            let dt = (w[0].t_end() - w[1].t_start()).abs();
            if dt > CONTIGUITY * (1.0 + w[0].t_end().abs()) {
                return Err(Error::InvalidCurve(format!(
                    "segments {i} and {} are not contiguous in time",
                    i + 1
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn from_samples(times: Vec<f64>, points: Vec<Point2>) -> Result<Self> {
        Self::new(vec![Segment::Sampled(Sampled::new(times, points)?)])
    }

    /// Samples `f` at `n + 1` equally spaced times on `[t0, t1]`.
    pub fn sample_fn(f: impl Fn(f64) -> Point2, t0: f64, t1: f64, n: usize) -> Result<Self> {
        let times = linspace(t0, t1, n);
        let points = times.iter().map(|&t| f(t)).collect();
        Self::from_samples(times, points)
    }

    pub fn line(from: Point2, to: Point2, t0: f64, t1: f64) -> Result<Self> {
        Self::new(vec![Segment::Line(Line { t0, t1, from, to })])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn t_start(&self) -> f64 {
        self.segments[0].t_start()
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().unwrap().t_end()
    }

    pub fn start_point(&self) -> Point2 {
        self.segments[0].start_point()
    }

    pub fn end_point(&self) -> Point2 {
        self.segments.last().unwrap().end_point()
    }

    pub fn start_tangent(&self) -> Point2 {
        self.segments[0].start_tangent()
    }

    pub fn end_tangent(&self) -> Point2 {
        self.segments.last().unwrap().end_tangent()
    }

    fn segment_at(&self, t: f64) -> &Segment {
        self.segments
            .iter()
            .find(|s| t <= s.t_end())
            .unwrap_or_else(|| self.segments.last().unwrap())
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.segment_at(t).point_at(t)
    }

    pub fn jet_at(&self, t: f64) -> Jet {
        self.segment_at(t).jet_at(t)
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// True when every point coincides (the projection of a pure rotation).
    pub fn is_degenerate(&self) -> bool {
        let p0 = self.start_point();
        self.segments.iter().all(|s| match s {
            Segment::Sampled(sm) => sm.points.iter().all(|p| (p - p0).norm() <= CONTIGUITY),
            Segment::Line(l) => l.length() <= CONTIGUITY && (l.from - p0).norm() <= CONTIGUITY,
            Segment::Arc(_) => false,
        })
    }

    /// Appends another curve whose start coincides with this curve's end.
    pub fn concat(&self, other: &PlanarCurve) -> Result<PlanarCurve> {
        let mut segs = self.segments.clone();
        segs.extend(other.segments.iter().cloned());
        PlanarCurve::new(segs)
    }

    /// Image under a rigid motion.
    pub fn transformed(&self, g: &Se2) -> PlanarCurve {
        let f = |p: Point2| g.act(&p);
        PlanarCurve {
            segments: self
                .segments
                .iter()
                .map(|s| s.map_points(&f, g.theta, 1.0))
                .collect(),
        }
    }

    /// Image under `(x, y) ↦ (βx, βy)`. Radii scale by `|β|`.
    pub fn homothety(&self, beta: f64) -> Result<PlanarCurve> {
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::ZeroScale);
        }
        let angle = if beta < 0.0 { std::f64::consts::PI } else { 0.0 };
        let f = |p: Point2| p * beta;
        Ok(PlanarCurve {
            segments: self
                .segments
                .iter()
                .map(|s| s.map_points(&f, angle, beta.abs()))
                .collect(),
        })
    }

    /// Dense `(t, point)` samples, at least `per_segment` per primitive.
    pub fn dense_samples(&self, per_segment: usize) -> Vec<(f64, Point2)> {
        let mut out: Vec<(f64, Point2)> = Vec::new();
        for seg in &self.segments {
            let pts: Vec<(f64, Point2)> = match seg {
                Segment::Sampled(s) => s.times.iter().copied().zip(s.points.iter().copied()).collect(),
                _ => linspace(seg.t_start(), seg.t_end(), per_segment.max(1))
                    .into_iter()
                    .map(|t| (t, seg.point_at(t)))
                    .collect(),
            };
            for (t, p) in pts {
                if out.last().map_or(true, |(tl, _)| t > *tl) {
                    out.push((t, p));
                }
            }
        }
        out
    }

    /// Resamples onto a single uniform grid of `n + 1` points.
    pub fn resampled(&self, n: usize) -> Result<PlanarCurve> {
        PlanarCurve::sample_fn(|t| self.point_at(t), self.t_start(), self.t_end(), n)
    }

    /// Writes the curve CSV format: `t,x,y`, or `t,x,y,theta,u1,u2` when
    /// every piece carries exact frames.
    pub fn to_csv(&self, per_segment: usize) -> String {
        let framed: Option<Vec<&Sampled>> = self
            .segments
            .iter()
            .map(|seg| match seg {
                Segment::Sampled(s) if s.frames.is_some() => Some(s),
                _ => None,
            })
            .collect();
        let Some(pieces) = framed else {
            let mut s = String::from("t,x,y\n");
            for (t, p) in self.dense_samples(per_segment) {
                let _ = writeln!(s, "{t},{},{}", p.x, p.y);
            }
            return s;
        };
        let mut s = String::from("t,x,y,theta,u1,u2\n");
        let mut last = f64::NEG_INFINITY;
        for piece in pieces {
            let frames = piece.frames.as_ref().expect("framed");
            for ((t, p), f) in piece.times.iter().zip(&piece.points).zip(frames) {
                if *t > last {
                    let _ = writeln!(s, "{t},{},{},{},{},{}", p.x, p.y, f.theta, f.u1, f.u2);
                    last = *t;
                }
            }
        }
        s
    }

    /// Reads the curve CSV format into a single sampled segment.
    pub fn from_csv(reader: impl BufRead) -> Result<PlanarCurve> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty curve file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let width = match cols.as_slice() {
            ["t", "x", "y"] => 3,
            ["t", "x", "y", "theta", "u1", "u2"] => 6,
            _ => {
                return Err(Error::Parse(format!(
                    "expected header `t,x,y` or `t,x,y,theta,u1,u2`, got `{header}`"
                )))
            }
        };
        let mut times = Vec::new();
        let mut points = Vec::new();
        let mut frames = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
            if vals.len() != width {
                return Err(Error::Parse(format!("line {}: expected {width} columns", lineno + 2)));
            }
            if let Some(&last) = times.last() {
                if !(vals[0] > last) {
                    return Err(Error::Parse(format!(
                        "line {}: t must increase strictly",
                        lineno + 2
                    )));
                }
            }
            times.push(vals[0]);
            points.push(Point2::new(vals[1], vals[2]));
            if width == 6 {
                frames.push(Frame {
                    theta: vals[3],
                    u1: vals[4],
                    u2: vals[5],
                });
            }
        }
        if width == 6 {
            return PlanarCurve::new(vec![Segment::Sampled(Sampled::with_frames(times, points, frames)?)]);
        }
        PlanarCurve::from_samples(times, points)
    }
}
