//! Pre-sampled surface candidate banks.
//!
//! A bank holds every mesh vertex plus a configurable number of area-weighted
//! uniform surface samples; candidate selection for smoothing filters it at
//! each iteration.

use alloc::vec::Vec;

use rand::Rng;

use super::composite::CompositeShape;
use super::mesh::TriMesh;
use crate::flt;
use crate::math::Vec3;
use crate::random::rng_from_seed;

/// Default number of surface samples added on top of the mesh vertices.
pub const DEFAULT_SURFACE_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointOrigin {
    Vertex,
    SurfaceSample,
}

#[derive(Clone, Copy, Debug)]
pub struct BankPoint {
    pub position: Vec3,
    /// Index of the convex piece this point belongs to.
    pub piece: usize,
    pub origin: PointOrigin,
}

#[derive(Clone, Debug)]
pub struct SurfacePointBank {
    pub points: Vec<BankPoint>,
}

impl SurfacePointBank {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.origin == PointOrigin::Vertex)
            .count()
    }
}

/// Sample a bank from a single mesh; all points are owned by piece 0.
///
/// The bank always contains every mesh vertex exactly once, followed by
/// `n_samples` area-weighted uniform triangle samples. Deterministic in
/// `seed`.
pub fn sample_surface_bank(mesh: &TriMesh, n_samples: usize, seed: u64) -> SurfacePointBank {
    let mut points: Vec<BankPoint> = mesh
        .vertices
        .iter()
        .map(|&position| BankPoint {
            position,
            piece: 0,
            origin: PointOrigin::Vertex,
        })
        .collect();

    if n_samples > 0 && mesh.triangle_count() > 0 {
        let mut cumulative = Vec::with_capacity(mesh.triangle_count());
        let mut total = 0.0;
        for t in 0..mesh.triangle_count() {
            total += mesh.triangle_area(t);
            cumulative.push(total);
        }
        let mut rng = rng_from_seed(seed);
        for _ in 0..n_samples {
            let u: f64 = rng.gen_range(0.0..total);
            let tri = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
            let (a, b, c) = mesh.triangle_points(tri);
            // Uniform barycentric sample via the square-root trick.
            let r1: f64 = rng.gen_range(0.0..1.0);
            let r2: f64 = rng.gen_range(0.0..1.0);
            let su = flt::sqrt(r1);
            let position = a * (1.0 - su) + b * (su * (1.0 - r2)) + c * (su * r2);
            points.push(BankPoint {
                position,
                piece: 0,
                origin: PointOrigin::SurfaceSample,
            });
        }
    }

    SurfacePointBank { points }
}

impl CompositeShape {
    /// Bank over the source mesh with owning pieces resolved by proximity.
    pub fn surface_bank(&self, n_samples: usize, seed: u64) -> SurfacePointBank {
        let mut bank = sample_surface_bank(&self.source_mesh, n_samples, seed);
        if self.pieces.len() > 1 {
            for point in &mut bank.points {
                point.piece = self.owning_piece(point.position);
            }
        }
        bank
    }
}
