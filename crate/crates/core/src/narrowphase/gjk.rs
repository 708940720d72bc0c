//! GJK distance query with witness points.
//!
//! The distance sub-algorithm solves the closest-point-to-origin problem on
//! the working simplex via signed-volume/Voronoi-region tests, keeping
//! barycentric coordinates so witness points fall out of the final simplex.

use alloc::vec;
use alloc::vec::Vec;

use super::{Feature, PairWitness};
use crate::geom::ConvexPiece;
use crate::math::Vec3;
use crate::se3::Pose;

pub const MAX_ITERATIONS: usize = 128;
/// Relative duality-gap termination on the squared distance.
const REL_TOLERANCE: f64 = 1e-10;
/// Barycentric weight below which a vertex does not count toward a feature.
const FEATURE_WEIGHT_TOL: f64 = 1e-7;

/// World-frame support point of a posed piece: the vertex maximizing
/// `⟨v, direction⟩`, ties broken by lowest index.
pub fn support(piece: &ConvexPiece, pose: &Pose, direction: Vec3) -> (Vec3, usize) {
    let local_dir = pose.rotation.transpose() * direction;
    let mut best = 0usize;
    let mut best_dot = f64::NEG_INFINITY;
    for (i, v) in piece.vertices.iter().enumerate() {
        let d = v.dot(local_dir);
        if d > best_dot {
            best_dot = d;
            best = i;
        }
    }
    (pose.act(piece.vertices[best]), best)
}

/// One vertex of the Minkowski difference `T₁(P₁) − T₂(P₂)`.
#[derive(Clone, Copy, Debug)]
pub struct SupportPoint {
    /// Minkowski point `p1 − p2` (world frame).
    pub w: Vec3,
    pub p1: Vec3,
    pub p2: Vec3,
    /// Local-frame source points.
    pub l1: Vec3,
    pub l2: Vec3,
    pub i1: usize,
    pub i2: usize,
}

pub(crate) fn minkowski_support(
    p1: &ConvexPiece,
    t1: &Pose,
    p2: &ConvexPiece,
    t2: &Pose,
    direction: Vec3,
) -> SupportPoint {
    let (w1, i1) = support(p1, t1, direction);
    let (w2, i2) = support(p2, t2, -direction);
    SupportPoint {
        w: w1 - w2,
        p1: w1,
        p2: w2,
        l1: p1.vertices[i1],
        l2: p2.vertices[i2],
        i1,
        i2,
    }
}

pub enum GjkOutcome {
    Separated(PairWitness),
    /// Terminal simplex for EPA seeding (origin contained or touching).
    Intersecting(Vec<SupportPoint>),
}

struct SimplexClosest {
    point: Vec3,
    lambdas: [f64; 4],
    keep: [usize; 4],
    keep_count: usize,
}

enum SimplexOutcome {
    Closest(SimplexClosest),
    ContainsOrigin,
}

pub fn gjk_distance(
    p1: &ConvexPiece,
    t1: &Pose,
    p2: &ConvexPiece,
    t2: &Pose,
) -> GjkOutcome {
    let c1 = t1.act(p1.centroid);
    let c2 = t2.act(p2.centroid);
    let scale =
        p1.bounding_radius + p2.bounding_radius + (c1 - c2).norm();
    let touch_tol_sq = (1e-13 * scale) * (1e-13 * scale);

    let mut dir = c2 - c1;
    if dir.norm_squared() < 1e-30 {
        dir = Vec3::X;
    }
    let mut simplex = vec![minkowski_support(p1, t1, p2, t2, -dir)];

    let mut last_dir = dir;
    for iter in 0..MAX_ITERATIONS {
        let closest = match closest_to_origin(&simplex, scale) {
            SimplexOutcome::ContainsOrigin => return GjkOutcome::Intersecting(simplex),
            SimplexOutcome::Closest(c) => c,
        };

        // Reduce to the supporting sub-simplex.
        let mut reduced = Vec::with_capacity(4);
        let mut lambdas = Vec::with_capacity(4);
        for k in 0..closest.keep_count {
            reduced.push(simplex[closest.keep[k]]);
            lambdas.push(closest.lambdas[closest.keep[k]]);
        }
        simplex = reduced;

        let v = closest.point;
        let v_sq = v.norm_squared();
        if v_sq <= touch_tol_sq {
            // Touching contact: hand the simplex to EPA, which blows it up.
            return GjkOutcome::Intersecting(simplex);
        }
        last_dir = -v;

        let w = minkowski_support(p1, t1, p2, t2, -v);
        let gap = v_sq - v.dot(w.w);
        if gap <= REL_TOLERANCE * v_sq {
            return GjkOutcome::Separated(build_witness(
                &simplex, &lambdas, v, last_dir, true,
            ));
        }
        if simplex.iter().any(|s| s.i1 == w.i1 && s.i2 == w.i2) {
            // The best support is already in the simplex: optimal.
            return GjkOutcome::Separated(build_witness(
                &simplex, &lambdas, v, last_dir, true,
            ));
        }
        simplex.push(w);
        let _ = iter;
    }

    // Iteration cap: report best-so-far, flagged non-converged.
    match closest_to_origin(&simplex, scale) {
        SimplexOutcome::ContainsOrigin => GjkOutcome::Intersecting(simplex),
        SimplexOutcome::Closest(c) => {
            let mut reduced = Vec::with_capacity(4);
            let mut lambdas = Vec::with_capacity(4);
            for k in 0..c.keep_count {
                reduced.push(simplex[c.keep[k]]);
                lambdas.push(c.lambdas[c.keep[k]]);
            }
            GjkOutcome::Separated(build_witness(&reduced, &lambdas, c.point, last_dir, false))
        }
    }
}

fn build_witness(
    simplex: &[SupportPoint],
    lambdas: &[f64],
    v: Vec3,
    last_dir: Vec3,
    converged: bool,
) -> PairWitness {
    let mut x1 = Vec3::ZERO;
    let mut x2 = Vec3::ZERO;
    let mut l1 = Vec3::ZERO;
    let mut l2 = Vec3::ZERO;
    for (s, &lam) in simplex.iter().zip(lambdas) {
        x1 += s.p1 * lam;
        x2 += s.p2 * lam;
        l1 += s.l1 * lam;
        l2 += s.l2 * lam;
    }
    let dist = v.norm();
    let normal = if dist > 1e-12 {
        // v = x1 − x2, so the 1→2 direction is −v.
        -(v / dist)
    } else {
        last_dir.normalized_or_zero(1e-30)
    };
    PairWitness {
        x1_world: x1,
        x2_world: x2,
        x1_local: l1,
        x2_local: l2,
        signed_distance: dist,
        penetrating: false,
        normal,
        feature1: feature_of(simplex, lambdas, |s| s.i1),
        feature2: feature_of(simplex, lambdas, |s| s.i2),
        converged,
    }
}

pub(crate) fn feature_of(
    simplex: &[SupportPoint],
    lambdas: &[f64],
    index: impl Fn(&SupportPoint) -> usize,
) -> Feature {
    let mut ids = Vec::with_capacity(simplex.len());
    for (s, &lam) in simplex.iter().zip(lambdas) {
        if lam > FEATURE_WEIGHT_TOL {
            ids.push(index(s));
        }
    }
    if ids.is_empty() {
        // All weights tiny: fall back to the heaviest vertex.
        let mut best = 0usize;
        let mut best_l = f64::NEG_INFINITY;
        for (k, &lam) in lambdas.iter().enumerate() {
            if lam > best_l {
                best_l = lam;
                best = k;
            }
        }
        ids.push(index(&simplex[best]));
    }
    Feature::from_indices(ids)
}

fn closest_to_origin(simplex: &[SupportPoint], scale: f64) -> SimplexOutcome {
    match simplex.len() {
        1 => SimplexOutcome::Closest(SimplexClosest {
            point: simplex[0].w,
            lambdas: [1.0, 0.0, 0.0, 0.0],
            keep: [0, 0, 0, 0],
            keep_count: 1,
        }),
        2 => SimplexOutcome::Closest(closest_on_segment(simplex[0].w, simplex[1].w)),
        3 => SimplexOutcome::Closest(closest_on_triangle(
            [simplex[0].w, simplex[1].w, simplex[2].w],
            [0, 1, 2],
        )),
        4 => closest_on_tetrahedron(
            [simplex[0].w, simplex[1].w, simplex[2].w, simplex[3].w],
            scale,
        ),
        _ => unreachable!("simplex size is 1..=4"),
    }
}

fn closest_on_segment(a: Vec3, b: Vec3) -> SimplexClosest {
    let ab = b - a;
    let len_sq = ab.norm_squared();
    if len_sq <= 0.0 {
        return SimplexClosest {
            point: a,
            lambdas: [1.0, 0.0, 0.0, 0.0],
            keep: [0, 0, 0, 0],
            keep_count: 1,
        };
    }
    let t = -a.dot(ab) / len_sq;
    if t <= 0.0 {
        SimplexClosest {
            point: a,
            lambdas: [1.0, 0.0, 0.0, 0.0],
            keep: [0, 0, 0, 0],
            keep_count: 1,
        }
    } else if t >= 1.0 {
        SimplexClosest {
            point: b,
            lambdas: [0.0, 1.0, 0.0, 0.0],
            keep: [1, 0, 0, 0],
            keep_count: 1,
        }
    } else {
        SimplexClosest {
            point: a + ab * t,
            lambdas: [1.0 - t, t, 0.0, 0.0],
            keep: [0, 1, 0, 0],
            keep_count: 2,
        }
    }
}

/// Closest point of triangle `pts` to the origin; `ids` maps the triangle's
/// local vertex slots back to simplex slots.
fn closest_on_triangle(pts: [Vec3; 3], ids: [usize; 3]) -> SimplexClosest {
    let [a, b, c] = pts;
    let ab = b - a;
    let ac = c - a;
    let ap = -a;

    let out = |point: Vec3, bary: [f64; 3], used: &[usize]| {
        let mut lambdas = [0.0; 4];
        let mut keep = [0usize; 4];
        for (n, &slot) in used.iter().enumerate() {
            lambdas[ids[slot]] = bary[slot];
            keep[n] = ids[slot];
        }
        SimplexClosest {
            point,
            lambdas,
            keep,
            keep_count: used.len(),
        }
    };

    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return out(a, [1.0, 0.0, 0.0], &[0]);
    }

    let bp = -b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return out(b, [0.0, 1.0, 0.0], &[1]);
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 && d1 - d3 > 0.0 {
        let t = d1 / (d1 - d3);
        return out(a + ab * t, [1.0 - t, t, 0.0], &[0, 1]);
    }

    let cp = -c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return out(c, [0.0, 0.0, 1.0], &[2]);
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 && d2 - d6 > 0.0 {
        let t = d2 / (d2 - d6);
        return out(a + ac * t, [1.0 - t, 0.0, t], &[0, 2]);
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 && (d4 - d3) + (d5 - d6) > 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return out(b + (c - b) * t, [0.0, 1.0 - t, t], &[1, 2]);
    }

    let denom_sum = va + vb + vc;
    if denom_sum.abs() <= f64::MIN_POSITIVE {
        // Degenerate (collinear) triangle: best of the three edges.
        let cands = [
            closest_on_segment_mapped(a, b, ids[0], ids[1]),
            closest_on_segment_mapped(a, c, ids[0], ids[2]),
            closest_on_segment_mapped(b, c, ids[1], ids[2]),
        ];
        return cands
            .into_iter()
            .min_by(|x, y| {
                x.point
                    .norm_squared()
                    .partial_cmp(&y.point.norm_squared())
                    .unwrap()
            })
            .unwrap();
    }
    let denom = 1.0 / denom_sum;
    let v = vb * denom;
    let w = vc * denom;
    out(a + ab * v + ac * w, [1.0 - v - w, v, w], &[0, 1, 2])
}

fn closest_on_segment_mapped(a: Vec3, b: Vec3, ia: usize, ib: usize) -> SimplexClosest {
    let base = closest_on_segment(a, b);
    let mut lambdas = [0.0; 4];
    let mut keep = [0usize; 4];
    let map = [ia, ib];
    for k in 0..base.keep_count {
        let slot = map[base.keep[k]];
        lambdas[slot] = base.lambdas[base.keep[k]];
        keep[k] = slot;
    }
    SimplexClosest {
        point: base.point,
        lambdas,
        keep,
        keep_count: base.keep_count,
    }
}

fn closest_on_tetrahedron(pts: [Vec3; 4], scale: f64) -> SimplexOutcome {
    // Faces listed with the opposite vertex for orientation.
    const FACES: [([usize; 3], usize); 4] = [
        ([0, 1, 2], 3),
        ([0, 1, 3], 2),
        ([0, 2, 3], 1),
        ([1, 2, 3], 0),
    ];
    let mut best: Option<SimplexClosest> = None;
    let mut any_outside = false;
    for (tri, opp) in FACES {
        let [i, j, k] = tri;
        let n = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        let side_opp = n.dot(pts[opp] - pts[i]);
        let side_origin = n.dot(-pts[i]);
        let degenerate = side_opp.abs() <= 1e-14 * n.norm() * scale;
        // Origin strictly on the far side of this face from the opposite
        // vertex, or the tetrahedron is flat: handle via the face triangle.
        if degenerate || side_opp * side_origin < 0.0 {
            any_outside = true;
            let cand = closest_on_triangle([pts[i], pts[j], pts[k]], tri);
            if best.as_ref().map_or(true, |b| {
                cand.point.norm_squared() < b.point.norm_squared()
            }) {
                best = Some(cand);
            }
        }
    }
    match best {
        Some(c) if any_outside => SimplexOutcome::Closest(c),
        _ => SimplexOutcome::ContainsOrigin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;
    use crate::random::{rng_from_seed, uniform_rotation, unit_vector};
    use rand::Rng;

    fn cube_piece() -> ConvexPiece {
        ConvexPiece::from_mesh(&primitives::cube(1.0)).unwrap()
    }

    #[test]
    fn support_picks_axis_extreme() {
        let piece = cube_piece();
        let (p, _) = support(&piece, &Pose::IDENTITY, Vec3::X);
        assert!((p.x - 0.5).abs() < 1e-15);
    }

    #[test]
    fn support_matches_brute_force_on_random_polytopes() {
        let mut rng = rng_from_seed(21);
        for _ in 0..50 {
            let pts: Vec<Vec3> = (0..rng.gen_range(8..40))
                .map(|_| unit_vector(&mut rng) * rng.gen_range(0.2..1.0))
                .collect();
            let piece = ConvexPiece::from_points(&pts).unwrap();
            let pose = Pose::new(uniform_rotation(&mut rng), unit_vector(&mut rng));
            let dir = unit_vector(&mut rng);
            let (p, idx) = support(&piece, &pose, dir);
            let brute = piece
                .vertices
                .iter()
                .map(|&v| pose.act(v).dot(dir))
                .fold(f64::NEG_INFINITY, crate::flt::max);
            assert!((p.dot(dir) - brute).abs() < 1e-12);
            assert_eq!(p, pose.act(piece.vertices[idx]));
        }
    }

    #[test]
    fn separated_cubes_axis_aligned() {
        let a = cube_piece();
        let b = cube_piece();
        let t2 = Pose::from_translation(Vec3::new(3.0, 0.0, 0.0));
        match gjk_distance(&a, &Pose::IDENTITY, &b, &t2) {
            GjkOutcome::Separated(w) => {
                assert!((w.signed_distance - 2.0).abs() < 1e-9);
                assert!((w.x1_world.x - 0.5).abs() < 1e-9);
                assert!((w.x2_world.x - 2.5).abs() < 1e-9);
                assert!(w.converged);
            }
            GjkOutcome::Intersecting(_) => panic!("should be separated"),
        }
    }

    #[test]
    fn overlapping_cubes_intersect() {
        let a = cube_piece();
        let b = cube_piece();
        let t2 = Pose::from_translation(Vec3::new(0.8, 0.0, 0.0));
        assert!(matches!(
            gjk_distance(&a, &Pose::IDENTITY, &b, &t2),
            GjkOutcome::Intersecting(_)
        ));
    }

    #[test]
    fn witness_locals_are_consistent_with_worlds() {
        let mut rng = rng_from_seed(77);
        let a = ConvexPiece::from_mesh(&primitives::icosahedron(0.6)).unwrap();
        let b = cube_piece();
        for _ in 0..100 {
            let t1 = Pose::new(uniform_rotation(&mut rng), unit_vector(&mut rng) * 0.2);
            let t2 = Pose::new(
                uniform_rotation(&mut rng),
                unit_vector(&mut rng) * rng.gen_range(1.5..3.0),
            );
            if let GjkOutcome::Separated(w) = gjk_distance(&a, &t1, &b, &t2) {
                assert!((t1.act(w.x1_local) - w.x1_world).norm() < 1e-9);
                assert!((t2.act(w.x2_local) - w.x2_world).norm() < 1e-9);
                assert!(
                    ((w.x1_world - w.x2_world).norm() - w.signed_distance).abs() < 1e-7
                );
            } else {
                panic!("expected separation");
            }
        }
    }
}
