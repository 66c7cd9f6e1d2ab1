//! The group of planar motions SE(2), its projective quotient, and
//! boundary-condition canonicalization.
//!
//! An element `(x, y, theta)` stands for the matrix
//!
//! ```text
//! | cos θ  -sin θ  x |
//! | sin θ   cos θ  y |
//! |   0       0    1 |
//! ```
//!
//! and composition is the matrix product. The projective quotient identifies
//! `(x, y, θ)` with `(x, y, θ + π)`; it is the left coset space of the
//! subgroup `{Id, R_π}`, so SE(2) acts on it from the left but it is not
//! itself a group.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = Vector2<f64>;

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_2pi(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces an angle to `[0, π)`.
pub fn wrap_pi(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Shortest signed angular distance `a - b` modulo `2π`, in `[-π, π)`.
pub fn angle_diff_2pi(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(TAU) - PI
}

/// Shortest signed angular distance `a - b` modulo `π`, in `[-π/2, π/2)`.
pub fn angle_diff_pi(a: f64, b: f64) -> f64 {
    (a - b + PI / 2.0).rem_euclid(PI) - PI / 2.0
}

/// Element of SE(2) with `theta` stored in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Se2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Se2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_2pi(theta),
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn translation(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Se2) -> Se2 {
        let (s, c) = self.theta.sin_cos();
        Se2::new(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )
    }

    pub fn inverse(&self) -> Se2 {
        let (s, c) = self.theta.sin_cos();
        Se2::new(
            -c * self.x - s * self.y,
            s * self.x - c * self.y,
            -self.theta,
        )
    }

    /// Applies the rigid motion to a planar point.
    pub fn act(&self, p: &Point2) -> Point2 {
        let (s, c) = self.theta.sin_cos();
        Point2::new(self.x + c * p.x - s * p.y, self.y + s * p.x + c * p.y)
    }

    /// Rotates a vector (no translation).
    pub fn rotate(&self, v: &Point2) -> Point2 {
        let (s, c) = self.theta.sin_cos();
        Point2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }

    pub fn to_projective(&self) -> Pse2 {
        Pse2::new(self.x, self.y, self.theta)
    }

    /// Componentwise distance with the angle compared modulo `2π`.
    pub fn distance(&self, other: &Se2) -> f64 {
        let dth = angle_diff_2pi(self.theta, other.theta);
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + dth * dth).sqrt()
    }
}

impl std::ops::Mul for Se2 {
    type Output = Se2;
    fn mul(self, rhs: Se2) -> Se2 {
        self.compose(&rhs)
    }
}

/// Element of SE(2)/≃ with `theta` stored in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pse2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pse2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_pi(theta),
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// Representative in SE(2) with the stored angle.
    pub fn representative(&self) -> Se2 {
        Se2::new(self.x, self.y, self.theta)
    }

    /// Left action of a rigid motion on the quotient.
    pub fn left_mul(g: &Se2, p: &Pse2) -> Pse2 {
        g.compose(&p.representative()).to_projective()
    }
}

/// Whether endpoint directions are compared with orientation (`∼`) or up to
/// sign (`≈`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Oriented,
    Projective,
}

/// Start/end points with start/end tangent directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub start_point: Point2,
    pub end_point: Point2,
    pub start_dir: Point2,
    pub end_dir: Point2,
    pub mode: Mode,
}

/// A canonicalized problem: start at the identity, reach `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Canonical {
    Oriented { start: Se2, target: Se2 },
    Projective { start: Pse2, target: Pse2 },
}

impl Canonical {
    /// The target as an SE(2) representative (angle in `[0, 2π)` or `[0, π)`).
    pub fn target_representative(&self) -> Se2 {
        match self {
            Canonical::Oriented { target, .. } => *target,
            Canonical::Projective { target, .. } => target.representative(),
        }
    }
}

impl BoundaryConditions {
    pub fn new(
        start_point: Point2,
        start_dir: Point2,
        end_point: Point2,
        end_dir: Point2,
        mode: Mode,
    ) -> Result<Self> {
        let bc = Self {
            start_point,
            end_point,
            start_dir,
            end_dir,
            mode,
        };
        bc.validate()?;
        Ok(bc)
    }

    /// Builds conditions from points and direction angles in radians.
    pub fn from_angles(
        start: (f64, f64, f64),
        end: (f64, f64, f64),
        mode: Mode,
    ) -> Result<Self> {
        Self::new(
            Point2::new(start.0, start.1),
            Point2::new(start.2.cos(), start.2.sin()),
            Point2::new(end.0, end.1),
            Point2::new(end.2.cos(), end.2.sin()),
            mode,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.start_point, self.end_point, self.start_dir, self.end_dir];
        if all.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::DegenerateBoundary("non-finite coordinate".into()));
        }
        if (self.end_point - self.start_point).norm() == 0.0 {
            return Err(Error::DegenerateBoundary(
                "start and end points coincide".into(),
            ));
        }
        if self.start_dir.norm() == 0.0 || self.end_dir.norm() == 0.0 {
            return Err(Error::DegenerateBoundary("direction vector vanishes".into()));
        }
        Ok(())
    }

    pub fn start_angle(&self) -> f64 {
        self.start_dir.y.atan2(self.start_dir.x)
    }

    pub fn end_angle(&self) -> f64 {
        self.end_dir.y.atan2(self.end_dir.x)
    }

    pub fn start_pose(&self) -> Se2 {
        Se2::new(self.start_point.x, self.start_point.y, self.start_angle())
    }

    pub fn end_pose(&self) -> Se2 {
        Se2::new(self.end_point.x, self.end_point.y, self.end_angle())
    }

    /// The pose `q0` whose inverse maps the problem to the identity. In
    /// projective mode its angle is reduced modulo `π`.
    pub fn frame(&self) -> Se2 {
        let p = self.start_pose();
        match self.mode {
            Mode::Oriented => p,
            Mode::Projective => Se2::new(p.x, p.y, wrap_pi(p.theta)),
        }
    }

    /// Translates the problem to one starting at the identity: returns
    /// `(Id, q0⁻¹ q1)`. In projective mode the start angle is first reduced
    /// modulo `π`, so the result does not depend on the sign of either
    /// direction vector.
    pub fn canonicalize(&self) -> Result<Canonical> {
        self.validate()?;
        let rel = self.frame().inverse().compose(&self.end_pose());
        Ok(match self.mode {
            Mode::Oriented => Canonical::Oriented {
                start: Se2::identity(),
                target: rel,
            },
            Mode::Projective => Canonical::Projective {
                start: Pse2::identity(),
                target: rel.to_projective(),
            },
        })
    }

    /// Applies a rigid motion to every datum.
    pub fn transformed(&self, g: &Se2) -> Self {
        Self {
            start_point: g.act(&self.start_point),
            end_point: g.act(&self.end_point),
            start_dir: g.rotate(&self.start_dir),
            end_dir: g.rotate(&self.end_dir),
            mode: self.mode,
        }
    }

    /// Straight-line distance between the endpoints.
    pub fn chord(&self) -> f64 {
        (self.end_point - self.start_point).norm()
    }
}
