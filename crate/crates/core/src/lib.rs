//! Completion of planar curves by minimizing the length-curvature cost
//! `J[γ] = ∫ √(‖γ̇‖² + ‖γ̇‖² K²) dt`. Curves are lifted to sub-Riemannian
//! trajectories in SE(2), where minimizers are extremals of a pendulum
//! system found by shooting.
//!
//! ```
//! use sr_elastica::se2::{BoundaryConditions, Mode};
//! use sr_elastica::shooting::solve_projective;
//!
//! let bc = BoundaryConditions::from_angles((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), Mode::Projective)?;
//! let best = &solve_projective(&bc)?[0];
//! assert!((best.cost - 1.0).abs() < 1e-6);
//! # Ok::<(), sr_elastica::Error>(())
//! ```

pub mod cost;
pub mod curve;
pub mod error;
pub mod extremal;
pub mod lift;
pub mod nonexistence;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod se2;
pub mod shooting;
pub mod tolerances;
pub mod trajectory;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

/// Guide chapters compiled as doc-tests so their snippets stay current.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/poses-and-lifts.md")]
    mod poses_and_lifts {}
    #[doc = include_str!("../../../book/src/costs.md")]
    mod costs {}
    #[doc = include_str!("../../../book/src/extremals.md")]
    mod extremals {}
    #[doc = include_str!("../../../book/src/shooting.md")]
    mod shooting {}
    #[doc = include_str!("../../../book/src/nonexistence.md")]
    mod nonexistence {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
