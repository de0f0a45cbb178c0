//! Curvature-driven evolution of families of interacting closed curves in 3D.
//!
//! Each curve moves with a normal velocity proportional to its curvature, a
//! binormal (vortex filament) velocity, and a nonlocal Biot-Savart force
//! induced by every other curve. Space is discretized with flowing finite
//! volumes on closed polygons, nodes are redistributed tangentially, and time
//! is advanced with an adaptive Runge-Kutta-Merson integrator.
//!
//! The [`reduced`] module carries the exact reduction to vertically concentric
//! circles, which serves as an independent oracle for the full solver.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forces;
pub mod geometry;
pub mod integrator;
pub mod output;
pub mod parse;
pub mod redistribution;
pub mod reduced;
pub mod run;
pub mod scenario;
pub mod scheme;
pub mod vec3;

pub use error::{Error, Result};
pub use forces::{BiotSavartSpec, ForceField};
pub use geometry::{DiscreteCurve, GeometryCache};
pub use integrator::{IntegratorConfig, Trajectory};
pub use redistribution::RedistParams;
pub use reduced::CircleSystemState;
pub use scenario::Scenario;
pub use scheme::{CurveParams, SystemState};
pub use vec3::Vec3;
