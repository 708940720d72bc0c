//! Bundled procedural shapes, normalized to benchmark scale.
//!
//! Convex: cube, icosahedron, 162- and 642-vertex spheres. Concave:
//! an L-shaped 2-piece composite and a torus-like 8-piece ring. Everything
//! is generated, so no external assets are required.

use anyhow::{bail, Result};
use diffwitness_core::geom::{normalize_scale, primitives, CompositeShape};

/// Default bounding-box diagonal for bundled shapes (meters); the benchmark
/// protocol keeps diagonals within [0.01, 0.2] m.
pub const DEFAULT_DIAG: f64 = 0.1;

pub const BUNDLED_NAMES: &[&str] = &[
    "cube",
    "icosahedron",
    "sphere162",
    "sphere642",
    "l_shape",
    "torus8",
];

/// Look up a bundled shape by name, normalized so its bounding-box diagonal
/// equals `target_diag`.
pub fn bundled(name: &str, target_diag: f64) -> Result<CompositeShape> {
    if !(0.01..=0.2).contains(&target_diag) {
        bail!("target diagonal {target_diag} outside [0.01, 0.2] m");
    }
    let raw = match name {
        "cube" => primitives::convex_composite(primitives::cube(1.0)),
        "icosahedron" => primitives::convex_composite(primitives::icosahedron(1.0)),
        "sphere162" => primitives::convex_composite(primitives::icosphere(1.0, 2)),
        "sphere642" => primitives::convex_composite(primitives::icosphere(1.0, 3)),
        "l_shape" => primitives::l_shape(),
        "torus8" => primitives::torus8(),
        _ => bail!(
            "unknown bundled shape `{name}` (available: {})",
            BUNDLED_NAMES.join(", ")
        ),
    };
    Ok(normalize_scale(&raw, target_diag)?)
}
