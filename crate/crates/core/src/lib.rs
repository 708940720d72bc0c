//! Differentiable collision detection between convex and concave triangle meshes.
//!
//! The forward pass computes witness points (closest points when separated,
//! deepest-penetration points when overlapping) with GJK + EPA over unions of
//! convex pieces. The backward pass replaces the non-smooth witness map with a
//! distance-based softmax over surface candidate points, which yields pose
//! derivatives in se(3) coordinates, and transports gradients between object
//! poses so that updating one pose reproduces the relative-pose update of the
//! other.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature and enable `libm` for embedded targets. File formats, the
//! benchmark harness, and the command-line front end live in the companion
//! `diffwitness` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod flt;
pub mod geom;
pub mod gradient;
pub mod math;
pub mod narrowphase;
pub mod random;
pub mod se3;
pub mod smoothing;

pub use geom::{CompositeShape, ConvexPiece, SurfacePointBank, TriMesh};
pub use math::{Mat3, Mat4, Vec3};
pub use narrowphase::WitnessResult;
pub use se3::{Pose, Twist};
