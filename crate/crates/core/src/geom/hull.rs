//! Incremental quickhull and the convex piece type built on it.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::mesh::{bounding_box, TriMesh};
use crate::flt;
use crate::math::Vec3;

/// Convex polytope in the shape's local frame.
///
/// The vertex set equals its own convex hull, faces are outward-oriented
/// triangles, and `bounding_radius` covers every vertex from `centroid`.
#[derive(Clone, Debug)]
pub struct ConvexPiece {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    pub centroid: Vec3,
    pub bounding_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HullError {
    /// Fewer than 4 points.
    TooFewPoints,
    /// Input is collinear or coplanar within tolerance.
    DegenerateHull,
}

impl core::fmt::Display for HullError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HullError::TooFewPoints => write!(f, "convex hull needs at least 4 points"),
            HullError::DegenerateHull => write!(f, "input points are collinear or coplanar"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for HullError {}

impl ConvexPiece {
    /// Hull of a mesh's vertex set.
    pub fn from_mesh(mesh: &TriMesh) -> Result<Self, HullError> {
        Self::from_points(&mesh.vertices)
    }

    pub fn from_points(points: &[Vec3]) -> Result<Self, HullError> {
        let (vertices, faces) = quickhull(points)?;
        Ok(Self::from_hull_parts(vertices, faces))
    }

    fn from_hull_parts(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Self {
        let mut centroid = Vec3::ZERO;
        for v in &vertices {
            centroid += *v;
        }
        centroid = centroid / vertices.len() as f64;
        let bounding_radius = vertices
            .iter()
            .map(|v| (*v - centroid).norm())
            .fold(0.0, flt::max);
        ConvexPiece {
            vertices,
            faces,
            centroid,
            bounding_radius,
        }
    }

    pub fn as_mesh(&self) -> TriMesh {
        TriMesh::new(self.vertices.clone(), self.faces.clone())
    }

    /// Volume via the divergence theorem over outward faces.
    pub fn volume(&self) -> f64 {
        let mut six_vol = 0.0;
        for f in &self.faces {
            let a = self.vertices[f[0]] - self.centroid;
            let b = self.vertices[f[1]] - self.centroid;
            let c = self.vertices[f[2]] - self.centroid;
            six_vol += a.dot(b.cross(c));
        }
        six_vol / 6.0
    }

    /// Outward unit normal and plane offset (`n·x = d`) of face `i`.
    pub fn face_plane(&self, i: usize) -> (Vec3, f64) {
        let [a, b, c] = self.faces[i];
        let n = (self.vertices[b] - self.vertices[a])
            .cross(self.vertices[c] - self.vertices[a])
            .normalized();
        let center =
            (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0;
        (n, n.dot(center))
    }

    /// Signed distance from `p` to the hull boundary: negative inside,
    /// max-over-planes inside, min face distance outside.
    pub fn signed_surface_distance(&self, p: Vec3) -> f64 {
        let mut max_plane = f64::NEG_INFINITY;
        for i in 0..self.faces.len() {
            let (n, d) = self.face_plane(i);
            max_plane = flt::max(max_plane, n.dot(p) - d);
        }
        if max_plane <= 0.0 {
            return max_plane;
        }
        let mut best = f64::INFINITY;
        for f in &self.faces {
            let d = super::point_triangle_distance(
                p,
                self.vertices[f[0]],
                self.vertices[f[1]],
                self.vertices[f[2]],
            );
            best = flt::min(best, d);
        }
        best
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        self.signed_surface_distance(p) <= tol
    }

    /// Uniform scale about `center`, shared with the owning composite.
    pub fn rescaled(&self, center: Vec3, scale: f64) -> ConvexPiece {
        let vertices: Vec<Vec3> = self
            .vertices
            .iter()
            .map(|&v| (v - center) * scale)
            .collect();
        ConvexPiece::from_hull_parts(vertices, self.faces.clone())
    }
}

/// Convex hull of a mesh's vertices as a `ConvexPiece`.
pub fn convex_hull(mesh: &TriMesh) -> Result<ConvexPiece, HullError> {
    ConvexPiece::from_mesh(mesh)
}

#[derive(Clone, Debug)]
struct Face {
    verts: [usize; 3],
    normal: Vec3,
    offset: f64,
    conflicts: Vec<usize>,
    alive: bool,
}

impl Face {
    fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Incremental quickhull with plane tolerance `1e-9 · bbox diagonal`.
///
/// Returns compacted hull vertices (a subset of the input, order by first
/// appearance) and outward-oriented triangular faces.
pub fn quickhull(points: &[Vec3]) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), HullError> {
    if points.len() < 4 {
        return Err(HullError::TooFewPoints);
    }
    let (lo, hi) = bounding_box(points);
    let diag = (hi - lo).norm();
    if diag <= 0.0 {
        return Err(HullError::DegenerateHull);
    }
    let eps = 1e-9 * diag;

    let [i0, i1, i2, i3] = initial_tetrahedron(points, eps)?;
    let interior = (points[i0] + points[i1] + points[i2] + points[i3]) * 0.25;

    let mut faces: Vec<Face> = Vec::new();
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        faces.push(make_face(points, tri, interior));
    }

    // Conflict lists: every point strictly outside some face.
    let hull_seed = [i0, i1, i2, i3];
    for (pi, &p) in points.iter().enumerate() {
        if hull_seed.contains(&pi) {
            continue;
        }
        assign_conflict(&mut faces, 0..4, pi, p, eps);
    }

    loop {
        // Furthest conflict point over all live faces.
        let mut apex: Option<(usize, f64)> = None;
        for face in faces.iter().filter(|f| f.alive) {
            for &pi in &face.conflicts {
                let d = face.signed_distance(points[pi]);
                if apex.map_or(true, |(_, best)| d > best) {
                    apex = Some((pi, d));
                }
            }
        }
        let Some((apex_idx, _)) = apex else {
            break;
        };
        let apex_point = points[apex_idx];

        // Visible faces, connected to the best-seen face through shared edges.
        let edge_map = build_edge_map(&faces);
        let start = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.signed_distance(apex_point) > eps)
            .max_by(|a, b| {
                a.1.signed_distance(apex_point)
                    .partial_cmp(&b.1.signed_distance(apex_point))
                    .unwrap()
            })
            .map(|(i, _)| i)
            .expect("apex must see at least one face");

        let mut visible = vec![false; faces.len()];
        let mut stack = vec![start];
        visible[start] = true;
        while let Some(fi) = stack.pop() {
            for k in 0..3 {
                let a = faces[fi].verts[k];
                let b = faces[fi].verts[(k + 1) % 3];
                if let Some(&[fa, fb]) = edge_map.get(&ordered(a, b)) {
                    let other = if fa == fi { fb } else { fa };
                    if !visible[other]
                        && faces[other].alive
                        && faces[other].signed_distance(apex_point) > eps
                    {
                        visible[other] = true;
                        stack.push(other);
                    }
                }
            }
        }

        // Horizon: directed edges of visible faces bordering non-visible ones.
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for (fi, face) in faces.iter().enumerate() {
            if !face.alive || !visible[fi] {
                continue;
            }
            for k in 0..3 {
                let a = face.verts[k];
                let b = face.verts[(k + 1) % 3];
                let neighbors = edge_map
                    .get(&ordered(a, b))
                    .expect("hull must stay watertight");
                let other = if neighbors[0] == fi {
                    neighbors[1]
                } else {
                    neighbors[0]
                };
                if !visible[other] {
                    horizon.push((a, b));
                }
            }
        }

        // Collect orphaned conflict points, retire visible faces.
        let mut orphans: Vec<usize> = Vec::new();
        for (fi, face) in faces.iter_mut().enumerate() {
            if face.alive && visible[fi] {
                face.alive = false;
                orphans.append(&mut face.conflicts);
            }
        }
        orphans.sort_unstable();
        orphans.dedup();

        // Stitch the cone from the horizon to the apex.
        let first_new = faces.len();
        for &(a, b) in &horizon {
            faces.push(make_face(points, [a, b, apex_idx], interior));
        }
        let new_range = first_new..faces.len();
        for pi in orphans {
            if pi == apex_idx {
                continue;
            }
            assign_conflict(&mut faces, new_range.clone(), pi, points[pi], eps);
        }
    }

    // Compact: vertices referenced by live faces, in first-use order.
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut tris = Vec::new();
    let mut order: Vec<usize> = Vec::new();
    for face in faces.iter().filter(|f| f.alive) {
        for &v in &face.verts {
            if !remap.contains_key(&v) {
                order.push(v);
                remap.insert(v, 0);
            }
        }
    }
    order.sort_unstable();
    for (new_idx, &old) in order.iter().enumerate() {
        remap.insert(old, new_idx);
        vertices.push(points[old]);
    }
    for face in faces.iter().filter(|f| f.alive) {
        tris.push([
            remap[&face.verts[0]],
            remap[&face.verts[1]],
            remap[&face.verts[2]],
        ]);
    }
    Ok((vertices, tris))
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn build_edge_map(faces: &[Face]) -> BTreeMap<(usize, usize), [usize; 2]> {
    let mut map: BTreeMap<(usize, usize), [usize; 2]> = BTreeMap::new();
    for (fi, face) in faces.iter().enumerate() {
        if !face.alive {
            continue;
        }
        for k in 0..3 {
            let key = ordered(face.verts[k], face.verts[(k + 1) % 3]);
            map.entry(key)
                .and_modify(|pair| pair[1] = fi)
                .or_insert([fi, fi]);
        }
    }
    map
}

fn make_face(points: &[Vec3], mut verts: [usize; 3], interior: Vec3) -> Face {
    let mut normal = (points[verts[1]] - points[verts[0]])
        .cross(points[verts[2]] - points[verts[0]]);
    let n = normal.norm();
    if n > 0.0 {
        normal = normal / n;
    }
    let center = (points[verts[0]] + points[verts[1]] + points[verts[2]]) / 3.0;
    if normal.dot(interior - center) > 0.0 {
        verts.swap(1, 2);
        normal = -normal;
    }
    Face {
        verts,
        normal,
        offset: normal.dot(center),
        conflicts: Vec::new(),
        alive: true,
    }
}

fn assign_conflict(
    faces: &mut [Face],
    range: core::ops::Range<usize>,
    pi: usize,
    p: Vec3,
    eps: f64,
) {
    let mut best: Option<(usize, f64)> = None;
    for fi in range {
        if !faces[fi].alive {
            continue;
        }
        let d = faces[fi].signed_distance(p);
        if d > eps && best.map_or(true, |(_, bd)| d > bd) {
            best = Some((fi, d));
        }
    }
    if let Some((fi, _)) = best {
        faces[fi].conflicts.push(pi);
    }
}

fn initial_tetrahedron(points: &[Vec3], eps: f64) -> Result<[usize; 4], HullError> {
    // Most distant pair among the six axis extremes.
    let mut extremes = [0usize; 6];
    for (pi, p) in points.iter().enumerate() {
        for axis in 0..3 {
            if p[axis] < points[extremes[axis]][axis] {
                extremes[axis] = pi;
            }
            if p[axis] > points[extremes[axis + 3]][axis] {
                extremes[axis + 3] = pi;
            }
        }
    }
    let (mut a, mut b, mut best) = (extremes[0], extremes[3], -1.0);
    for i in 0..6 {
        for j in i + 1..6 {
            let d = (points[extremes[i]] - points[extremes[j]]).norm_squared();
            if d > best {
                best = d;
                a = extremes[i];
                b = extremes[j];
            }
        }
    }
    if best <= eps * eps {
        return Err(HullError::DegenerateHull);
    }

    // Furthest from the a-b line.
    let dir = (points[b] - points[a]).normalized();
    let mut c = a;
    let mut best = -1.0;
    for (pi, p) in points.iter().enumerate() {
        let rel = *p - points[a];
        let d = (rel - dir * rel.dot(dir)).norm_squared();
        if d > best {
            best = d;
            c = pi;
        }
    }
    if best <= eps * eps {
        return Err(HullError::DegenerateHull);
    }

    // Furthest from the a-b-c plane.
    let n = (points[b] - points[a])
        .cross(points[c] - points[a])
        .normalized();
    let mut d_idx = a;
    let mut best = -1.0;
    for (pi, p) in points.iter().enumerate() {
        let d = flt::abs(n.dot(*p - points[a]));
        if d > best {
            best = d;
            d_idx = pi;
        }
    }
    if best <= eps {
        return Err(HullError::DegenerateHull);
    }
    Ok([a, b, c, d_idx])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;
    use crate::random::{rng_from_seed, unit_vector};

    #[test]
    fn cube_is_its_own_hull() {
        let mesh = primitives::cube(1.0);
        let piece = convex_hull(&mesh).unwrap();
        assert_eq!(piece.vertices.len(), 8);
        assert!((piece.volume() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn interior_point_is_eliminated() {
        let mesh = primitives::cube(1.0);
        let mut points = mesh.vertices.clone();
        points.push(Vec3::ZERO);
        let piece = ConvexPiece::from_points(&points).unwrap();
        assert_eq!(piece.vertices.len(), 8);
        assert!(!piece.vertices.iter().any(|v| v.norm() < 1e-12));
    }

    #[test]
    fn sphere_points_hull_volume_matches_tetra_sum() {
        let mut rng = rng_from_seed(99);
        let points: Vec<Vec3> = (0..50).map(|_| unit_vector(&mut rng)).collect();
        let piece = ConvexPiece::from_points(&points).unwrap();
        // Every input point is extreme on a sphere, so none may be dropped.
        assert_eq!(piece.vertices.len(), 50);

        // Independent volume: signed tetrahedra against the origin.
        let mut six_vol = 0.0;
        for f in &piece.faces {
            let a = piece.vertices[f[0]];
            let b = piece.vertices[f[1]];
            let c = piece.vertices[f[2]];
            six_vol += a.dot(b.cross(c));
        }
        assert!((piece.volume() - six_vol / 6.0).abs() < 1e-9);

        // All inputs on or inside the hull.
        for p in &points {
            assert!(piece.signed_surface_distance(*p) < 1e-9);
        }
    }

    #[test]
    fn random_cloud_hull_contains_all_points() {
        use rand::Rng;
        let mut rng = rng_from_seed(123);
        for trial in 0..20 {
            let n = rng.gen_range(8..200);
            let points: Vec<Vec3> = (0..n)
                .map(|_| unit_vector(&mut rng) * rng.gen_range(0.05..1.0))
                .collect();
            let piece = ConvexPiece::from_points(&points).unwrap();
            for p in &points {
                assert!(
                    piece.signed_surface_distance(*p) < 1e-9,
                    "trial {trial}: point outside hull"
                );
            }
            // Euler characteristic for a closed triangulated sphere:
            // F = 2V - 4.
            assert_eq!(piece.faces.len(), 2 * piece.vertices.len() - 4);
            // Hull vertices are extreme: each must be strictly outside the
            // hull of the others.
            assert!(piece.volume() > 0.0);
        }
    }

    #[test]
    fn hull_is_idempotent() {
        let mut rng = rng_from_seed(7);
        let points: Vec<Vec3> = (0..64).map(|_| unit_vector(&mut rng)).collect();
        let piece = ConvexPiece::from_points(&points).unwrap();
        let again = convex_hull(&piece.as_mesh()).unwrap();
        assert_eq!(piece.vertices.len(), again.vertices.len());
        let mut a: Vec<[f64; 3]> = piece.vertices.iter().map(|v| v.to_array()).collect();
        let mut b: Vec<[f64; 3]> = again.vertices.iter().map(|v| v.to_array()).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn coplanar_input_is_rejected() {
        let points = [
            Vec3::ZERO,
            Vec3::X,
            Vec3::Y,
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.25, 0.75, 0.0),
        ];
        assert_eq!(
            ConvexPiece::from_points(&points).unwrap_err(),
            HullError::DegenerateHull
        );
    }

    #[test]
    fn face_normals_point_away_from_centroid() {
        let mut rng = rng_from_seed(55);
        let points: Vec<Vec3> = (0..40).map(|_| unit_vector(&mut rng)).collect();
        let piece = ConvexPiece::from_points(&points).unwrap();
        for i in 0..piece.faces.len() {
            let (n, d) = piece.face_plane(i);
            assert!(n.dot(piece.centroid) - d < 0.0);
        }
    }
}
