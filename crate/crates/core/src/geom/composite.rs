//! Composite shapes: unions of convex pieces sharing one local frame.

use alloc::vec::Vec;

use super::hull::ConvexPiece;
use super::mesh::{bounding_box, TriMesh};
use crate::math::Vec3;

/// A shape as a union of convex pieces plus the source mesh they decompose.
/// Convex objects are the single-piece case.
#[derive(Clone, Debug)]
pub struct CompositeShape {
    pub pieces: Vec<ConvexPiece>,
    pub source_mesh: TriMesh,
    /// Bounding-box diagonal (meters).
    pub diag: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScaleError {
    ZeroExtent,
}

impl core::fmt::Display for ScaleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScaleError::ZeroExtent => write!(f, "shape has zero spatial extent"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScaleError {}

impl CompositeShape {
    pub fn new(pieces: Vec<ConvexPiece>, source_mesh: TriMesh) -> Self {
        assert!(!pieces.is_empty(), "composite needs at least one piece");
        let (lo, hi) = Self::joint_bounds(&pieces, &source_mesh);
        CompositeShape {
            pieces,
            source_mesh,
            diag: (hi - lo).norm(),
        }
    }

    fn joint_bounds(pieces: &[ConvexPiece], mesh: &TriMesh) -> (Vec3, Vec3) {
        let (mut lo, mut hi) = bounding_box(&mesh.vertices);
        for piece in pieces {
            let (plo, phi) = bounding_box(&piece.vertices);
            lo = lo.min_by_component(plo);
            hi = hi.max_by_component(phi);
        }
        (lo, hi)
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        Self::joint_bounds(&self.pieces, &self.source_mesh)
    }

    /// Center of the bounding box.
    pub fn bbox_center(&self) -> Vec3 {
        let (lo, hi) = self.bounding_box();
        (lo + hi) * 0.5
    }

    /// Smallest distance from `p` to any piece surface (negative inside).
    pub fn signed_surface_distance(&self, p: Vec3) -> f64 {
        self.pieces
            .iter()
            .map(|piece| piece.signed_surface_distance(p))
            .fold(f64::INFINITY, crate::flt::min)
    }

    /// Piece whose surface is nearest to `p`; ties break to the lowest index.
    pub fn owning_piece(&self, p: Vec3) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, piece) in self.pieces.iter().enumerate() {
            let d = piece.signed_surface_distance(p);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

/// Uniformly rescale so the bounding-box diagonal equals `target_diag` and
/// the bounding-box center sits at the origin.
pub fn normalize_scale(
    shape: &CompositeShape,
    target_diag: f64,
) -> Result<CompositeShape, ScaleError> {
    if shape.diag <= 0.0 {
        return Err(ScaleError::ZeroExtent);
    }
    let center = shape.bbox_center();
    let scale = target_diag / shape.diag;
    let pieces = shape
        .pieces
        .iter()
        .map(|p| p.rescaled(center, scale))
        .collect();
    let source_mesh = shape.source_mesh.rescaled(center, scale);
    Ok(CompositeShape::new(pieces, source_mesh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;

    #[test]
    fn unit_cube_scales_uniformly() {
        let shape = primitives::convex_composite(primitives::cube(1.0));
        let scaled = normalize_scale(&shape, 0.1).unwrap();
        let expected = 0.1 / 3f64.sqrt();
        for v in &scaled.source_mesh.vertices {
            for axis in 0..3 {
                assert!((v[axis].abs() - 0.5 * expected).abs() < 1e-15);
            }
        }
        assert!((scaled.diag - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rescaling_to_current_diag_is_identity() {
        let shape = primitives::convex_composite(primitives::icosahedron(0.04));
        let same = normalize_scale(&shape, shape.diag).unwrap();
        for (a, b) in shape
            .source_mesh
            .vertices
            .iter()
            .zip(same.source_mesh.vertices.iter())
        {
            assert!((*a - *b).norm() < 1e-12);
        }
    }

    #[test]
    fn composite_pieces_share_the_scale_factor() {
        let shape = primitives::l_shape();
        let scaled = normalize_scale(&shape, 0.15).unwrap();
        let factor = 0.15 / shape.diag;
        // Relative offsets between piece centroids scale rigidly.
        let before = shape.pieces[1].centroid - shape.pieces[0].centroid;
        let after = scaled.pieces[1].centroid - scaled.pieces[0].centroid;
        assert!((after - before * factor).norm() < 1e-12);
        assert!((scaled.diag - 0.15).abs() < 1e-12);
    }

    #[test]
    fn diag_measurement_hits_target() {
        for target in [0.01, 0.05, 0.2] {
            let shape = primitives::torus8();
            let scaled = normalize_scale(&shape, target).unwrap();
            assert!((scaled.diag - target).abs() / target < 1e-9);
        }
    }

    #[test]
    fn pieces_stay_inside_bounding_box() {
        let shape = normalize_scale(&primitives::torus8(), 0.1).unwrap();
        let (lo, hi) = shape.bounding_box();
        for piece in &shape.pieces {
            for v in &piece.vertices {
                for axis in 0..3 {
                    assert!(v[axis] >= lo[axis] - 1e-12 && v[axis] <= hi[axis] + 1e-12);
                }
            }
        }
    }
}
