//! Triangle mesh with derived vertex adjacency.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::Vec3;

/// Indexed triangle mesh in the object's local frame.
///
/// Adjacency (vertex → neighboring vertices) is derived from the triangle
/// list at construction and kept symmetric.
#[derive(Clone, Debug)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    adjacency: Vec<Vec<usize>>,
}

impl TriMesh {
    /// Build a mesh; panics if a triangle index is out of range (callers
    /// going through the OBJ parser get a proper error instead).
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        for tri in &triangles {
            for &i in tri {
                assert!(i < vertices.len(), "triangle index {i} out of range");
            }
        }
        let adjacency = build_adjacency(vertices.len(), &triangles);
        TriMesh {
            vertices,
            triangles,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn neighbors(&self, vertex: usize) -> &[usize] {
        &self.adjacency[vertex]
    }

    pub fn triangle_points(&self, tri: usize) -> (Vec3, Vec3, Vec3) {
        let [a, b, c] = self.triangles[tri];
        (self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn triangle_area(&self, tri: usize) -> f64 {
        let (a, b, c) = self.triangle_points(tri);
        (b - a).cross(c - a).norm() * 0.5
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        bounding_box(&self.vertices)
    }

    /// Bounding-box diagonal length.
    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    /// Index of the vertex closest to `p`.
    pub fn nearest_vertex(&self, p: Vec3) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, v) in self.vertices.iter().enumerate() {
            let d = (*v - p).norm_squared();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Distance from `p` to the closest mesh triangle.
    pub fn surface_distance(&self, p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let (a, b, c) = self.triangle_points(t);
            let d = super::point_triangle_distance(p, a, b, c);
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Uniformly scale and translate all vertices: `x → (x − center) * scale`.
    pub fn rescaled(&self, center: Vec3, scale: f64) -> TriMesh {
        let vertices = self
            .vertices
            .iter()
            .map(|&v| (v - center) * scale)
            .collect();
        TriMesh {
            vertices,
            triangles: self.triangles.clone(),
            adjacency: self.adjacency.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.vertices.iter().all(|v| v.is_finite())
    }
}

fn build_adjacency(vertex_count: usize, triangles: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); vertex_count];
    let link = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        if !adj[a].contains(&b) {
            adj[a].push(b);
        }
    };
    for tri in triangles {
        for k in 0..3 {
            let a = tri[k];
            let b = tri[(k + 1) % 3];
            link(a, b, &mut adjacency);
            link(b, a, &mut adjacency);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    adjacency
}

/// Bounding box of a point set as (min, max); (0, 0) for empty input.
pub fn bounding_box(points: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = Vec3::splat(f64::INFINITY);
    let mut hi = Vec3::splat(f64::NEG_INFINITY);
    for &p in points {
        lo = lo.min_by_component(p);
        hi = hi.max_by_component(p);
    }
    if points.is_empty() {
        (Vec3::ZERO, Vec3::ZERO)
    } else {
        (lo, hi)
    }
}
