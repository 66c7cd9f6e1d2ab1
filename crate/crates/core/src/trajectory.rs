//! Time-sampled control trajectories on SE(2) or its projective quotient.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::Covector;
use crate::se2::{Mode, Point2, Pse2, Se2};

/// How an arc of a trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcKind {
    /// Normal extremal arc with `u = (h1, h2)`; the angle obeys the pendulum
    /// equation.
    Pendulum,
    /// Normal extremal arc with `u1 = 0`, `u2 = sign(h2)`.
    PureRotation,
    AbnormalLine,
    AbnormalRotation,
    /// Lift of a planar curve; no covector.
    Lifted,
}

impl ArcKind {
    pub fn name(&self) -> &'static str {
        match self {
            ArcKind::Pendulum => "pendulum",
            ArcKind::PureRotation => "pure_rotation",
            ArcKind::AbnormalLine => "abnormal_line",
            ArcKind::AbnormalRotation => "abnormal_rotation",
            ArcKind::Lifted => "lifted",
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, ArcKind::PureRotation | ArcKind::AbnormalRotation)
    }
}

/// One time sample. `theta` is kept continuous (not reduced) so that
/// differences along the trajectory are meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub u1: f64,
    pub u2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covector: Option<Covector>,
}

impl Sample {
    pub fn pose(&self) -> Se2 {
        Se2::new(self.x, self.y, self.theta)
    }

    pub fn point(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn control_norm(&self) -> f64 {
        self.u1.hypot(self.u2)
    }
}

/// A smooth piece of a trajectory. Sample times increase strictly inside an
/// arc; consecutive arcs share their boundary time and state, while the
/// controls may jump there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arc {
    pub kind: ArcKind,
    pub samples: Vec<Sample>,
}

impl Arc {
    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().unwrap().t
    }

    pub fn duration(&self) -> f64 {
        self.t_end() - self.t_start()
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().unwrap()
    }
}

/// Interval annotation `(t_start, t_end, kind)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcMark {
    pub t_start: f64,
    pub t_end: f64,
    pub kind: ArcKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlTrajectory {
    pub space: Mode,
    pub arcs: Vec<Arc>,
}

impl ControlTrajectory {
    pub fn new(space: Mode, arcs: Vec<Arc>) -> Result<Self> {
        let traj = Self { space, arcs };
        traj.validate()?;
        Ok(traj)
    }

    fn validate(&self) -> Result<()> {
        if self.arcs.is_empty() {
            return Err(Error::InvalidCurve("trajectory has no arcs".into()));
        }
        for arc in &self.arcs {
            if arc.samples.len() < 2 {
                return Err(Error::InsufficientSamples {
                    needed: 2,
                    got: arc.samples.len(),
                });
            }
            if arc.samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
                return Err(Error::InvalidCurve("arc times must increase strictly".into()));
            }
        }
        for w in self.arcs.windows(2) {
            let (a, b) = (w[0].last(), w[1].first());
            if (a.t - b.t).abs() > 1e-12 * (1.0 + a.t.abs())
                || (a.point() - b.point()).norm() > 1e-9
                || (a.theta - b.theta).abs() > 1e-9
            {
                return Err(Error::InvalidCurve("arcs are not contiguous".into()));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> &Sample {
        self.arcs[0].first()
    }

    pub fn end(&self) -> &Sample {
        self.arcs.last().unwrap().last()
    }

    pub fn t_start(&self) -> f64 {
        self.start().t
    }

    pub fn t_end(&self) -> f64 {
        self.end().t
    }

    pub fn duration(&self) -> f64 {
        self.t_end() - self.t_start()
    }

    pub fn start_se2(&self) -> Se2 {
        self.start().pose()
    }

    pub fn end_se2(&self) -> Se2 {
        self.end().pose()
    }

    pub fn end_pse2(&self) -> Pse2 {
        self.end().pose().to_projective()
    }

    pub fn arc_marks(&self) -> Vec<ArcMark> {
        self.arcs
            .iter()
            .map(|a| ArcMark {
                t_start: a.t_start(),
                t_end: a.t_end(),
                kind: a.kind,
            })
            .collect()
    }

    /// Every sample in time order; arc boundaries appear once per arc.
    pub fn samples(&self) -> impl Iterator<Item = &Sample> {
        self.arcs.iter().flat_map(|a| a.samples.iter())
    }

    pub fn sample_count(&self) -> usize {
        self.arcs.iter().map(|a| a.samples.len()).sum()
    }

    /// Left translation `g · q(t)`. Covectors rotate with the frame so that
    /// `h1` and `h2` are unchanged.
    pub fn left_translated(&self, g: &Se2) -> ControlTrajectory {
        let (s, c) = g.theta.sin_cos();
        let arcs = self
            .arcs
            .iter()
            .map(|arc| Arc {
                kind: arc.kind,
                samples: arc
                    .samples
                    .iter()
                    .map(|smp| {
                        let p = g.act(&smp.point());
                        Sample {
                            x: p.x,
                            y: p.y,
                            theta: smp.theta + g.theta,
                            covector: smp.covector.map(|l| Covector {
                                lambda_x: c * l.lambda_x - s * l.lambda_y,
                                lambda_y: s * l.lambda_x + c * l.lambda_y,
                                lambda_theta: l.lambda_theta,
                            }),
                            ..*smp
                        }
                    })
                    .collect(),
            })
            .collect();
        ControlTrajectory {
            space: self.space,
            arcs,
        }
    }

    pub fn time_shifted(&self, dt: f64) -> ControlTrajectory {
        let mut out = self.clone();
        for arc in &mut out.arcs {
            for s in &mut arc.samples {
                s.t += dt;
            }
        }
        out
    }

    /// Restriction to `[ta, tb]`. Both ends must coincide with sample times
    /// (within `1e-9`).
    pub fn window(&self, ta: f64, tb: f64) -> Result<ControlTrajectory> {
        let tol = 1e-9;
        let mut arcs = Vec::new();
        for arc in &self.arcs {
            if arc.t_end() <= ta + tol || arc.t_start() >= tb - tol {
                continue;
            }
            let samples: Vec<Sample> = arc
                .samples
                .iter()
                .filter(|s| s.t >= ta - tol && s.t <= tb + tol)
                .copied()
                .collect();
            if samples.len() >= 2 {
                arcs.push(Arc {
                    kind: arc.kind,
                    samples,
                });
            }
        }
        let traj = ControlTrajectory::new(self.space, arcs)?;
        if (traj.t_start() - ta).abs() > tol || (traj.t_end() - tb).abs() > tol {
            return Err(Error::InvalidCurve(format!(
                "window [{ta}, {tb}] does not fall on sample times"
            )));
        }
        Ok(traj)
    }

    /// Concatenates trajectories that meet end to start.
    pub fn concat(parts: &[ControlTrajectory]) -> Result<ControlTrajectory> {
        let space = parts
            .first()
            .ok_or_else(|| Error::InvalidCurve("nothing to concatenate".into()))?
            .space;
        let arcs = parts.iter().flat_map(|p| p.arcs.iter().cloned()).collect();
        ControlTrajectory::new(space, arcs)
    }

    /// Largest deviation of finite-difference state velocities from the
    /// control system `(u1 cos θ, u1 sin θ, u2)`, using midpoint values.
    pub fn dynamics_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for arc in &self.arcs {
            for w in arc.samples.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                let dt = b.t - a.t;
                let th = 0.5 * (a.theta + b.theta);
                let u1 = 0.5 * (a.u1 + b.u1);
                let u2 = 0.5 * (a.u2 + b.u2);
                let rx = (b.x - a.x) / dt - u1 * th.cos();
                let ry = (b.y - a.y) / dt - u1 * th.sin();
                let rt = (b.theta - a.theta) / dt - u2;
                worst = worst.max(rx.abs()).max(ry.abs()).max(rt.abs());
            }
        }
        worst
    }

    /// CSV dump `t,x,y,theta,u1,u2,lx,ly,lth,arc_kind`; covector columns are
    /// empty when absent.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,y,theta,u1,u2,lx,ly,lth,arc_kind\n");
        for arc in &self.arcs {
            for p in &arc.samples {
                let (lx, ly, lt) = match p.covector {
                    Some(c) => (
                        c.lambda_x.to_string(),
                        c.lambda_y.to_string(),
                        c.lambda_theta.to_string(),
                    ),
                    None => (String::new(), String::new(), String::new()),
                };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{lx},{ly},{lt},{}",
                    p.t,
                    p.x,
                    p.y,
                    p.theta,
                    p.u1,
                    p.u2,
                    arc.kind.name()
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation_then_line() -> ControlTrajectory {
        let rot = Arc {
            kind: ArcKind::AbnormalRotation,
            samples: (0..=4)
                .map(|i| {
                    let t = i as f64 * 0.25;
                    Sample { t, x: 0.0, y: 0.0, theta: t, u1: 0.0, u2: 1.0, covector: None }
                })
                .collect(),
        };
        let line = Arc {
            kind: ArcKind::AbnormalLine,
            samples: (0..=4)
                .map(|i| {
                    let s = i as f64 * 0.25;
                    Sample {
                        t: 1.0 + s,
                        x: s * 1f64.cos(),
                        y: s * 1f64.sin(),
                        theta: 1.0,
                        u1: 1.0,
                        u2: 0.0,
                        covector: None,
                    }
                })
                .collect(),
        };
        ControlTrajectory::new(Mode::Oriented, vec![rot, line]).unwrap()
    }

    #[test]
    fn csv_has_header_and_kinds() {
        let csv = rotation_then_line().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x,y,theta,u1,u2,lx,ly,lth,arc_kind"));
        assert!(csv.contains("abnormal_rotation"));
        assert_eq!(csv.lines().count(), 11);
    }

    #[test]
    fn window_and_marks() {
        let traj = rotation_then_line();
        let marks = traj.arc_marks();
        assert_eq!(marks.len(), 2);
        assert_eq!(marks[1].kind, ArcKind::AbnormalLine);
        let w = traj.window(0.5, 1.5).unwrap();
        assert_eq!(w.t_start(), 0.5);
        assert_eq!(w.t_end(), 1.5);
        assert!(traj.window(0.3, 1.5).is_err());
    }

    #[test]
    fn dynamics_residual_small_on_exact_motion() {
        assert!(rotation_then_line().dynamics_residual() < 1e-12);
    }

    #[test]
    fn discontiguous_arcs_rejected() {
        let mut traj = rotation_then_line();
        traj.arcs[1].samples[0].x = 0.1;
        assert!(ControlTrajectory::new(Mode::Oriented, traj.arcs).is_err());
    }
}
