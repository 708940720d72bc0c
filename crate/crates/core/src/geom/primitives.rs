//! Procedurally built meshes and composites used by tests and the bundled
//! shape registry: no external assets required.

use alloc::vec;
use alloc::vec::Vec;

use super::composite::CompositeShape;
use super::hull::ConvexPiece;
use super::mesh::TriMesh;
use crate::flt;
use crate::math::Vec3;

/// Axis-aligned box mesh spanning `lo..hi`, 8 vertices and 12 triangles with
/// outward winding.
pub fn box_mesh(lo: Vec3, hi: Vec3) -> TriMesh {
    let v = vec![
        Vec3::new(lo.x, lo.y, lo.z),
        Vec3::new(hi.x, lo.y, lo.z),
        Vec3::new(hi.x, hi.y, lo.z),
        Vec3::new(lo.x, hi.y, lo.z),
        Vec3::new(lo.x, lo.y, hi.z),
        Vec3::new(hi.x, lo.y, hi.z),
        Vec3::new(hi.x, hi.y, hi.z),
        Vec3::new(lo.x, hi.y, hi.z),
    ];
    let t = vec![
        [0, 3, 2],
        [0, 2, 1],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [1, 2, 6],
        [1, 6, 5],
        [2, 3, 7],
        [2, 7, 6],
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriMesh::new(v, t)
}

/// Cube with side `size` centered at the origin.
pub fn cube(size: f64) -> TriMesh {
    let h = size * 0.5;
    box_mesh(Vec3::splat(-h), Vec3::splat(h))
}

/// Regular icosahedron with circumradius `radius`.
pub fn icosahedron(radius: f64) -> TriMesh {
    let phi = (1.0 + flt::sqrt(5.0)) / 2.0;
    let scale = radius / flt::sqrt(1.0 + phi * phi);
    let a = scale;
    let b = phi * scale;
    let vertices = vec![
        Vec3::new(-a, b, 0.0),
        Vec3::new(a, b, 0.0),
        Vec3::new(-a, -b, 0.0),
        Vec3::new(a, -b, 0.0),
        Vec3::new(0.0, -a, b),
        Vec3::new(0.0, a, b),
        Vec3::new(0.0, -a, -b),
        Vec3::new(0.0, a, -b),
        Vec3::new(b, 0.0, -a),
        Vec3::new(b, 0.0, a),
        Vec3::new(-b, 0.0, -a),
        Vec3::new(-b, 0.0, a),
    ];
    let triangles = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    TriMesh::new(vertices, triangles)
}

/// Icosphere: icosahedron subdivided `subdivisions` times with vertices
/// projected to radius `radius`. 0 → 12 vertices, 2 → 162, 3 → 642.
pub fn icosphere(radius: f64, subdivisions: usize) -> TriMesh {
    let base = icosahedron(radius);
    let mut vertices = base.vertices.clone();
    let mut triangles = base.triangles.clone();

    for _ in 0..subdivisions {
        let mut midpoint_cache: alloc::collections::BTreeMap<(usize, usize), usize> =
            alloc::collections::BTreeMap::new();
        let mut next_tris = Vec::with_capacity(triangles.len() * 4);
        for tri in &triangles {
            let mut mids = [0usize; 3];
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                let key = if a < b { (a, b) } else { (b, a) };
                mids[k] = *midpoint_cache.entry(key).or_insert_with(|| {
                    let m = ((vertices[a] + vertices[b]) * 0.5).normalized() * radius;
                    vertices.push(m);
                    vertices.len() - 1
                });
            }
            next_tris.push([tri[0], mids[0], mids[2]]);
            next_tris.push([tri[1], mids[1], mids[0]]);
            next_tris.push([tri[2], mids[2], mids[1]]);
            next_tris.push([mids[0], mids[1], mids[2]]);
        }
        triangles = next_tris;
    }
    TriMesh::new(vertices, triangles)
}

/// Merge meshes into one (vertices concatenated; seams stay unwelded).
pub fn merge_meshes(meshes: &[TriMesh]) -> TriMesh {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for mesh in meshes {
        let base = vertices.len();
        vertices.extend_from_slice(&mesh.vertices);
        triangles.extend(
            mesh.triangles
                .iter()
                .map(|t| [t[0] + base, t[1] + base, t[2] + base]),
        );
    }
    TriMesh::new(vertices, triangles)
}

/// L-shaped two-piece composite: a horizontal bar and a vertical bar meeting
/// at a concave inner corner.
pub fn l_shape() -> CompositeShape {
    let bar_a = box_mesh(Vec3::new(-0.5, -0.5, -0.2), Vec3::new(0.5, -0.1, 0.2));
    let bar_b = box_mesh(Vec3::new(-0.5, -0.1, -0.2), Vec3::new(-0.1, 0.5, 0.2));
    let pieces = vec![
        ConvexPiece::from_mesh(&bar_a).unwrap(),
        ConvexPiece::from_mesh(&bar_b).unwrap(),
    ];
    let source = merge_meshes(&[bar_a, bar_b]);
    CompositeShape::new(pieces, source)
}

/// Torus-like ring of 8 convex wedge pieces (major radius 0.3, minor 0.18).
pub fn torus8() -> CompositeShape {
    let major = 0.3;
    let minor = 0.18;
    let segments = 8usize;
    let mut pieces = Vec::new();
    let mut piece_meshes = Vec::new();
    for k in 0..segments {
        let t0 = 2.0 * core::f64::consts::PI * k as f64 / segments as f64;
        let t1 = 2.0 * core::f64::consts::PI * (k + 1) as f64 / segments as f64;
        let mut pts = Vec::with_capacity(8);
        for t in [t0, t1] {
            let (c, s) = (flt::cos(t), flt::sin(t));
            for (dr, dz) in [(-minor, -minor), (minor, -minor), (minor, minor), (-minor, minor)]
            {
                let r = major + dr;
                pts.push(Vec3::new(c * r, s * r, dz));
            }
        }
        let piece = ConvexPiece::from_points(&pts).unwrap();
        piece_meshes.push(piece.as_mesh());
        pieces.push(piece);
    }
    let source = merge_meshes(&piece_meshes);
    CompositeShape::new(pieces, source)
}

/// Single-piece composite from any mesh (hull of its vertices).
pub fn convex_composite(mesh: TriMesh) -> CompositeShape {
    let piece = ConvexPiece::from_mesh(&mesh).unwrap();
    CompositeShape::new(vec![piece], mesh)
}
