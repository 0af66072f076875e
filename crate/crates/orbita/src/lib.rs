//! Central-force dynamics with built-in cross-checks.
//!
//! The crate connects three views of the Kepler problem and verifies each
//! against the others numerically:
//!
//! * [`geometry`]: focal geometry of ellipses and conics, including the
//!   curvature and tangent-angle relations that make the force inference
//!   work;
//! * [`dynamics`]: direct integration of planar central-force motion with
//!   conserved-quantity diagnostics;
//! * [`inference`]: recovery of the inverse-square law from a Kepler
//!   ellipse by three independent routes (hodograph, curvature, orbital
//!   ODE);
//! * [`solver`]: the converse direction, solving the inverse-square
//!   problem in closed form from initial conditions;
//! * [`shell`]: the shell theorem checked by surface quadrature.
//!
//! All numerics are deterministic: fixed evaluation orders, no
//! platform-dependent reductions.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod inference;
pub mod ode;
pub mod quadrature;
pub mod shell;
pub mod solver;
pub mod vec;

pub use error::{Error, Result};
pub use geometry::{ConicClass, ConicOrbit, Ellipse, Sense, TangentData};
pub use vec::{Vec2, Vec3};
