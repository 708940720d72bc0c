//! Benchmark harness, file formats, and shape bundle for the differentiable
//! collision detection library.
//!
//! The numerical kernels live in `diffwitness-core`; this crate adds
//! everything that needs an operating system: OBJ loading, pose JSON, the
//! target-point-matching benchmark with its thread pool and timers, sweep
//! drivers, and report files.

pub mod bench;
pub mod config;
pub mod gradcheck;
pub mod io;
pub mod report;
pub mod shapes;
