//! Expanding Polytope Algorithm: penetration depth and witness points for
//! overlapping convex pieces.

use alloc::vec;
use alloc::vec::Vec;

use super::gjk::{feature_of, minkowski_support, SupportPoint};
use super::PairWitness;
use crate::geom::ConvexPiece;
use crate::math::Vec3;
use crate::se3::Pose;

const MAX_EXPANSIONS: usize = 255;

struct EpaFace {
    verts: [usize; 3],
    normal: Vec3,
    /// Distance from the origin to the face plane along `normal`.
    dist: f64,
    alive: bool,
}

/// Penetration query seeded with a GJK terminal simplex that contains (or
/// touches) the origin in Minkowski-difference space.
///
/// `signed_distance` comes back as minus the depth; on a degenerate
/// (coplanar) expansion the best face so far is used and the result is
/// flagged non-converged.
pub fn epa_penetration(
    p1: &ConvexPiece,
    t1: &Pose,
    p2: &ConvexPiece,
    t2: &Pose,
    seed: Vec<SupportPoint>,
) -> PairWitness {
    let scale = p1.bounding_radius + p2.bounding_radius;
    let tol = 1e-9 * scale;

    let mut pts = seed;
    let mut converged = inflate_to_tetrahedron(p1, t1, p2, t2, &mut pts, scale);

    let interior = (pts[0].w + pts[1].w + pts[2].w + pts[3].w) * 0.25;
    let mut faces = vec![
        make_face(&pts, [0, 1, 2], interior),
        make_face(&pts, [0, 1, 3], interior),
        make_face(&pts, [0, 2, 3], interior),
        make_face(&pts, [1, 2, 3], interior),
    ];

    for _ in 0..MAX_EXPANSIONS {
        let Some(best) = closest_face(&faces) else {
            converged = false;
            break;
        };
        let normal = faces[best].normal;
        let w = minkowski_support(p1, t1, p2, t2, normal);
        let growth = normal.dot(w.w) - faces[best].dist;
        if growth <= tol {
            break;
        }
        if pts.iter().any(|s| s.i1 == w.i1 && s.i2 == w.i2) {
            // Support already known: the polytope cannot expand further.
            break;
        }
        let new_idx = pts.len();
        pts.push(w);

        // Retire every face visible from the new point and collect the
        // horizon (edges between visible and hidden faces).
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut edge_count: alloc::collections::BTreeMap<(usize, usize), isize> =
            alloc::collections::BTreeMap::new();
        let mut any_visible = false;
        for face in faces.iter_mut().filter(|f| f.alive) {
            if face.normal.dot(w.w) - face.dist > tol * 0.5 {
                any_visible = true;
                face.alive = false;
                for k in 0..3 {
                    let a = face.verts[k];
                    let b = face.verts[(k + 1) % 3];
                    let key = if a < b { (a, b) } else { (b, a) };
                    // Interior edges appear twice and cancel.
                    *edge_count.entry(key).or_insert(0) += if a < b { 1 } else { -1 };
                    horizon.push((a, b));
                }
            }
        }
        if !any_visible {
            // Numerically stuck: supposed growth but no visible face.
            converged = false;
            break;
        }
        horizon.retain(|&(a, b)| {
            let key = if a < b { (a, b) } else { (b, a) };
            edge_count.get(&key).map_or(false, |&c| c != 0)
        });
        if horizon.is_empty() {
            converged = false;
            break;
        }
        let mut stitched = true;
        for &(a, b) in &horizon {
            let face = make_face(&pts, [a, b, new_idx], interior);
            if face.normal.norm_squared() < 0.5 {
                // Degenerate sliver (zero-area face): bail out with what we
                // have rather than corrupting the polytope.
                stitched = false;
                break;
            }
            faces.push(face);
        }
        if !stitched {
            converged = false;
            break;
        }
    }

    // The depth is the distance from the origin to the polytope boundary,
    // which is attained on the face triangle actually containing the
    // projection; selecting by plane distance alone can hand back a
    // coplanar triangle whose closest point lies on its rim.
    let Some((best, closest)) = boundary_face(&pts, &faces) else {
        // Completely degenerate polytope: zero-depth touching contact.
        return touching_fallback(&pts);
    };
    witness_from_face(&pts, &faces[best], closest, converged)
}

/// Face minimizing the origin-to-triangle distance, with its closest point.
fn boundary_face(pts: &[SupportPoint], faces: &[EpaFace]) -> Option<(usize, Vec3)> {
    let mut best: Option<(usize, Vec3, f64)> = None;
    for (i, f) in faces.iter().enumerate() {
        if !f.alive {
            continue;
        }
        let closest = crate::geom::closest_point_on_triangle(
            Vec3::ZERO,
            pts[f.verts[0]].w,
            pts[f.verts[1]].w,
            pts[f.verts[2]].w,
        );
        let d = closest.norm_squared();
        if best.map_or(true, |(_, _, bd)| d < bd) {
            best = Some((i, closest, d));
        }
    }
    best.map(|(i, c, _)| (i, c))
}

fn closest_face(faces: &[EpaFace]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, f) in faces.iter().enumerate() {
        if !f.alive {
            continue;
        }
        if best.map_or(true, |b| f.dist < faces[b].dist) {
            best = Some(i);
        }
    }
    best
}

fn make_face(pts: &[SupportPoint], mut verts: [usize; 3], interior: Vec3) -> EpaFace {
    let a = pts[verts[0]].w;
    let b = pts[verts[1]].w;
    let c = pts[verts[2]].w;
    let mut normal = (b - a).cross(c - a);
    let n = normal.norm();
    if n < 1e-300 {
        return EpaFace {
            verts,
            normal: Vec3::ZERO,
            dist: f64::INFINITY,
            alive: false,
        };
    }
    normal = normal / n;
    let center = (a + b + c) / 3.0;
    if normal.dot(center - interior) < 0.0 {
        normal = -normal;
        verts.swap(1, 2);
    }
    EpaFace {
        verts,
        normal,
        dist: normal.dot(center),
        alive: true,
    }
}

/// Ensure the seed simplex is a full tetrahedron with nonzero volume,
/// adding supports along perpendicular directions when needed. Returns
/// whether the expansion looks healthy.
fn inflate_to_tetrahedron(
    p1: &ConvexPiece,
    t1: &Pose,
    p2: &ConvexPiece,
    t2: &Pose,
    pts: &mut Vec<SupportPoint>,
    scale: f64,
) -> bool {
    let axes = [Vec3::X, Vec3::Y, Vec3::Z, -Vec3::X, -Vec3::Y, -Vec3::Z];
    let distinct = |pts: &[SupportPoint], w: &SupportPoint| {
        !pts.iter().any(|s| s.i1 == w.i1 && s.i2 == w.i2)
    };

    if pts.len() == 1 {
        for dir in axes {
            let w = minkowski_support(p1, t1, p2, t2, dir);
            if distinct(pts, &w) && (w.w - pts[0].w).norm() > 1e-12 * scale {
                pts.push(w);
                break;
            }
        }
    }
    if pts.len() == 2 {
        let axis = (pts[1].w - pts[0].w).normalized_or_zero(1e-300);
        let u = axis.any_orthonormal();
        let v = axis.cross(u);
        for dir in [u, v, -u, -v] {
            let w = minkowski_support(p1, t1, p2, t2, dir);
            if distinct(pts, &w) {
                let area = (pts[1].w - pts[0].w).cross(w.w - pts[0].w).norm();
                if area > 1e-20 * scale * scale {
                    pts.push(w);
                    break;
                }
            }
        }
    }
    if pts.len() == 3 {
        let n = (pts[1].w - pts[0].w).cross(pts[2].w - pts[0].w);
        for dir in [n, -n] {
            let w = minkowski_support(p1, t1, p2, t2, dir);
            if distinct(pts, &w) {
                let vol = (pts[1].w - pts[0].w)
                    .cross(pts[2].w - pts[0].w)
                    .dot(w.w - pts[0].w);
                if vol.abs() > 1e-30 * scale * scale * scale {
                    pts.push(w);
                    break;
                }
            }
        }
    }
    if pts.len() == 4 {
        let vol = (pts[1].w - pts[0].w)
            .cross(pts[2].w - pts[0].w)
            .dot(pts[3].w - pts[0].w);
        vol.abs() > 1e-30 * scale * scale * scale
    } else {
        false
    }
}

fn witness_from_face(
    pts: &[SupportPoint],
    face: &EpaFace,
    closest: Vec3,
    converged: bool,
) -> PairWitness {
    let a = pts[face.verts[0]].w;
    let b = pts[face.verts[1]].w;
    let c = pts[face.verts[2]].w;
    let bary = barycentric(closest, a, b, c);

    let mut x1 = Vec3::ZERO;
    let mut x2 = Vec3::ZERO;
    let mut l1 = Vec3::ZERO;
    let mut l2 = Vec3::ZERO;
    let support_set: Vec<SupportPoint> =
        face.verts.iter().map(|&i| pts[i]).collect();
    for (s, &w) in support_set.iter().zip(bary.iter()) {
        x1 += s.p1 * w;
        x2 += s.p2 * w;
        l1 += s.l1 * w;
        l2 += s.l2 * w;
    }

    let depth = closest.norm();
    PairWitness {
        x1_world: x1,
        x2_world: x2,
        x1_local: l1,
        x2_local: l2,
        signed_distance: -depth,
        penetrating: depth > 0.0,
        // Face normal points from the origin into the difference polytope,
        // i.e. along x1 − x2; report the 1→2 convention.
        normal: -face.normal,
        feature1: feature_of(&support_set, &bary, |s| s.i1),
        feature2: feature_of(&support_set, &bary, |s| s.i2),
        converged,
    }
}

fn touching_fallback(pts: &[SupportPoint]) -> PairWitness {
    let s = &pts[0];
    PairWitness {
        x1_world: s.p1,
        x2_world: s.p2,
        x1_local: s.l1,
        x2_local: s.l2,
        signed_distance: 0.0,
        penetrating: false,
        normal: Vec3::X,
        feature1: super::Feature::Vertex(s.i1),
        feature2: super::Feature::Vertex(s.i2),
        converged: false,
    }
}

fn barycentric(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> [f64; 3] {
    let v0 = b - a;
    let v1 = c - a;
    let v2 = p - a;
    let d00 = v0.dot(v0);
    let d01 = v0.dot(v1);
    let d11 = v1.dot(v1);
    let d20 = v2.dot(v0);
    let d21 = v2.dot(v1);
    let denom = d00 * d11 - d01 * d01;
    if denom.abs() < 1e-300 {
        return [1.0, 0.0, 0.0];
    }
    let v = (d11 * d20 - d01 * d21) / denom;
    let w = (d00 * d21 - d01 * d20) / denom;
    [1.0 - v - w, v, w]
}
