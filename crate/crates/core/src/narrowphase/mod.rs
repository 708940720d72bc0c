//! Forward (non-differentiable) collision detection.
//!
//! GJK computes the closest points between separated convex pieces, EPA the
//! deepest-penetration pair when they overlap, and the composite layer runs
//! a bounding-sphere broad phase over piece pairs.

mod epa;
mod gjk;

pub use epa::epa_penetration;
pub use gjk::{gjk_distance, support, GjkOutcome, SupportPoint};

use alloc::vec::Vec;

use crate::geom::{CompositeShape, ConvexPiece};
use crate::math::Vec3;
use crate::se3::Pose;

/// Contributing feature of a witness point on one piece, as vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feature {
    Vertex(usize),
    Edge(usize, usize),
    Face(usize, usize, usize),
}

impl Feature {
    pub(crate) fn from_indices(mut ids: Vec<usize>) -> Feature {
        ids.sort_unstable();
        ids.dedup();
        match ids.len() {
            1 => Feature::Vertex(ids[0]),
            2 => Feature::Edge(ids[0], ids[1]),
            _ => Feature::Face(ids[0], ids[1], ids[2]),
        }
    }
}

/// Witness pair between two convex pieces (local coords in the shape frame).
#[derive(Clone, Copy, Debug)]
pub struct PairWitness {
    pub x1_world: Vec3,
    pub x2_world: Vec3,
    pub x1_local: Vec3,
    pub x2_local: Vec3,
    /// Separation distance (positive) or minus the penetration depth.
    pub signed_distance: f64,
    pub penetrating: bool,
    /// Unit direction from witness 1 toward witness 2 when separated; the
    /// EPA face normal when penetrating; the last GJK direction at touching
    /// contact.
    pub normal: Vec3,
    pub feature1: Feature,
    pub feature2: Feature,
    pub converged: bool,
}

/// Witness pair between two composite shapes.
#[derive(Clone, Copy, Debug)]
pub struct WitnessResult {
    pub x1_world: Vec3,
    pub x2_world: Vec3,
    pub x1_local: Vec3,
    pub x2_local: Vec3,
    pub piece1: usize,
    pub piece2: usize,
    pub signed_distance: f64,
    pub penetrating: bool,
    pub normal: Vec3,
    pub feature1: Feature,
    pub feature2: Feature,
    pub converged: bool,
}

impl WitnessResult {
    fn from_pair(pair: PairWitness, piece1: usize, piece2: usize) -> Self {
        WitnessResult {
            x1_world: pair.x1_world,
            x2_world: pair.x2_world,
            x1_local: pair.x1_local,
            x2_local: pair.x2_local,
            piece1,
            piece2,
            signed_distance: pair.signed_distance,
            penetrating: pair.penetrating,
            normal: pair.normal,
            feature1: pair.feature1,
            feature2: pair.feature2,
            converged: pair.converged,
        }
    }
}

/// GJK, falling back to EPA on overlap: full witness query for one piece pair.
pub fn pair_witness(p1: &ConvexPiece, t1: &Pose, p2: &ConvexPiece, t2: &Pose) -> PairWitness {
    match gjk_distance(p1, t1, p2, t2) {
        GjkOutcome::Separated(pair) => pair,
        GjkOutcome::Intersecting(simplex) => epa_penetration(p1, t1, p2, t2, simplex),
    }
}

/// Broad-phase statistics, used to verify pruning behavior.
#[derive(Clone, Copy, Debug, Default)]
pub struct BroadPhaseStats {
    pub narrow_phase_calls: usize,
    pub pairs_total: usize,
}

/// Witness query between composite shapes with bounding-sphere pruning.
///
/// Piece pairs are visited in ascending order of their sphere-distance lower
/// bound; a pair is skipped once its lower bound cannot beat the best signed
/// distance found. Deepest penetration wins when any pair overlaps, smallest
/// distance otherwise; ties break to the lexicographically smallest
/// `(piece1, piece2)`.
pub fn composite_witness(
    s1: &CompositeShape,
    t1: &Pose,
    s2: &CompositeShape,
    t2: &Pose,
) -> WitnessResult {
    composite_witness_with_stats(s1, t1, s2, t2).0
}

pub fn composite_witness_with_stats(
    s1: &CompositeShape,
    t1: &Pose,
    s2: &CompositeShape,
    t2: &Pose,
) -> (WitnessResult, BroadPhaseStats) {
    assert!(!s1.pieces.is_empty() && !s2.pieces.is_empty());

    let centers1: Vec<Vec3> = s1.pieces.iter().map(|p| t1.act(p.centroid)).collect();
    let centers2: Vec<Vec3> = s2.pieces.iter().map(|p| t2.act(p.centroid)).collect();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(s1.pieces.len() * s2.pieces.len());
    for (i, p1) in s1.pieces.iter().enumerate() {
        for (j, p2) in s2.pieces.iter().enumerate() {
            let lb = (centers1[i] - centers2[j]).norm() - p1.bounding_radius - p2.bounding_radius;
            pairs.push((lb, i, j));
        }
    }
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut stats = BroadPhaseStats {
        narrow_phase_calls: 0,
        pairs_total: pairs.len(),
    };
    let mut best: Option<(PairWitness, usize, usize)> = None;
    for &(lb, i, j) in &pairs {
        if let Some((ref w, bi, bj)) = best {
            if lb >= w.signed_distance {
                continue;
            }
            let _ = (bi, bj);
        }
        stats.narrow_phase_calls += 1;
        let pair = pair_witness(&s1.pieces[i], t1, &s2.pieces[j], t2);
        let replace = match best {
            None => true,
            Some((ref w, bi, bj)) => {
                pair.signed_distance < w.signed_distance
                    || (pair.signed_distance == w.signed_distance && (i, j) < (bi, bj))
            }
        };
        if replace {
            best = Some((pair, i, j));
        }
    }

    let (pair, i, j) = best.expect("at least one pair evaluated");
    (WitnessResult::from_pair(pair, i, j), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;
    use crate::geom::CompositeShape;
    use crate::random::{rng_from_seed, uniform_rotation, unit_vector};
    use crate::se3::{exp_map, Twist};
    use alloc::vec;
    use rand::Rng;

    fn cube_shape() -> CompositeShape {
        primitives::convex_composite(primitives::cube(1.0))
    }

    #[test]
    fn single_piece_reduces_to_pair_query() {
        let a = cube_shape();
        let b = cube_shape();
        let t2 = Pose::from_translation(Vec3::new(3.0, 0.0, 0.0));
        let composite = composite_witness(&a, &Pose::IDENTITY, &b, &t2);
        let pair = pair_witness(&a.pieces[0], &Pose::IDENTITY, &b.pieces[0], &t2);
        assert_eq!(composite.signed_distance, pair.signed_distance);
        assert_eq!(composite.x1_world, pair.x1_world);
        assert_eq!(composite.piece1, 0);
        assert_eq!(composite.piece2, 0);
    }

    #[test]
    fn l_shape_concavity_witness_matches_exhaustive() {
        let l = primitives::l_shape();
        // Small box nested in the inner corner, offset so the nearest
        // feature is on the inner faces.
        let small = primitives::convex_composite(primitives::box_mesh(
            Vec3::new(0.0, 0.0, -0.1),
            Vec3::new(0.2, 0.2, 0.1),
        ));
        let t2 = Pose::from_translation(Vec3::new(0.05, 0.05, 0.0));
        let got = composite_witness(&l, &Pose::IDENTITY, &small, &t2);

        // Exhaustive all-pairs reference.
        let mut best: Option<PairWitness> = None;
        let mut best_pair = (0usize, 0usize);
        for (i, p1) in l.pieces.iter().enumerate() {
            for (j, p2) in small.pieces.iter().enumerate() {
                let w = pair_witness(p1, &Pose::IDENTITY, p2, &t2);
                if best
                    .as_ref()
                    .map_or(true, |b| w.signed_distance < b.signed_distance)
                {
                    best = Some(w);
                    best_pair = (i, j);
                }
            }
        }
        let best = best.unwrap();
        assert!((got.signed_distance - best.signed_distance).abs() < 1e-12);
        assert_eq!((got.piece1, got.piece2), best_pair);
        // The witness on the L belongs to one of the two inner faces.
        assert!(
            got.x1_world.y.abs() < 0.1 + 1e-9 || got.x1_world.x.abs() < 0.1 + 1e-9,
            "witness {:?}",
            got.x1_world
        );
    }

    #[test]
    fn far_separation_evaluates_one_pair() {
        // Two pieces per shape, strung far apart so sphere bounds prune all
        // but the seeding pair.
        let piece_at = |x: f64| {
            crate::geom::ConvexPiece::from_mesh(&primitives::box_mesh(
                Vec3::new(x - 0.5, -0.5, -0.5),
                Vec3::new(x + 0.5, 0.5, 0.5),
            ))
            .unwrap()
        };
        let mesh1 = primitives::merge_meshes(&[
            primitives::box_mesh(Vec3::new(-0.5, -0.5, -0.5), Vec3::new(0.5, 0.5, 0.5)),
            primitives::box_mesh(Vec3::new(-10.5, -0.5, -0.5), Vec3::new(-9.5, 0.5, 0.5)),
        ]);
        let shape1 = CompositeShape::new(vec![piece_at(0.0), piece_at(-10.0)], mesh1.clone());
        let shape2 = CompositeShape::new(vec![piece_at(0.0), piece_at(10.0)], mesh1);
        let t2 = Pose::from_translation(Vec3::new(5.0, 0.0, 0.0));
        let (result, stats) =
            composite_witness_with_stats(&shape1, &Pose::IDENTITY, &shape2, &t2);
        assert_eq!(stats.narrow_phase_calls, 1);
        assert!((result.signed_distance - 4.0).abs() < 1e-9);
    }

    #[test]
    fn broad_phase_matches_exhaustive_on_random_composites() {
        let mut rng = rng_from_seed(2025);
        let torus = primitives::torus8();
        let l = primitives::l_shape();
        for _ in 0..250 {
            let t1 = Pose::new(uniform_rotation(&mut rng), unit_vector(&mut rng) * 0.3);
            let t2 = Pose::new(
                uniform_rotation(&mut rng),
                unit_vector(&mut rng) * rng.gen_range(0.0..1.5),
            );
            let pruned = composite_witness(&torus, &t1, &l, &t2);

            let mut best = f64::INFINITY;
            let mut best_pair = (usize::MAX, usize::MAX);
            for (i, p1) in torus.pieces.iter().enumerate() {
                for (j, p2) in l.pieces.iter().enumerate() {
                    let w = pair_witness(p1, &t1, p2, &t2);
                    if w.signed_distance < best
                        || (w.signed_distance == best && (i, j) < best_pair)
                    {
                        best = w.signed_distance;
                        best_pair = (i, j);
                    }
                }
            }
            assert!(
                (pruned.signed_distance - best).abs() < 1e-12,
                "pruned {} vs exhaustive {}",
                pruned.signed_distance,
                best
            );
            assert_eq!((pruned.piece1, pruned.piece2), best_pair);
        }
    }

    #[test]
    fn witness_symmetry_under_argument_swap() {
        let mut rng = rng_from_seed(31);
        let a = primitives::convex_composite(primitives::icosahedron(0.6));
        let b = primitives::l_shape();
        for _ in 0..100 {
            let t1 = Pose::new(uniform_rotation(&mut rng), unit_vector(&mut rng) * 0.2);
            let t2 = Pose::new(
                uniform_rotation(&mut rng),
                unit_vector(&mut rng) * rng.gen_range(0.8..2.0),
            );
            let ab = composite_witness(&a, &t1, &b, &t2);
            let ba = composite_witness(&b, &t2, &a, &t1);
            assert!(
                (ab.signed_distance - ba.signed_distance).abs() < 1e-9,
                "sd {} vs {} (pen {} {}, conv {} {}, pieces {:?} {:?})",
                ab.signed_distance,
                ba.signed_distance,
                ab.penetrating,
                ba.penetrating,
                ab.converged,
                ba.converged,
                (ab.piece1, ab.piece2),
                (ba.piece1, ba.piece2)
            );
            assert!((ab.x1_world - ba.x2_world).norm() < 1e-7);
            assert!((ab.x2_world - ba.x1_world).norm() < 1e-7);
        }
    }

    #[test]
    fn witness_rigid_invariance() {
        let mut rng = rng_from_seed(37);
        let a = primitives::convex_composite(primitives::icosphere(0.8, 1));
        let b = primitives::torus8();
        for _ in 0..100 {
            let t1 = Pose::new(uniform_rotation(&mut rng), unit_vector(&mut rng) * 0.1);
            let t2 = Pose::new(
                uniform_rotation(&mut rng),
                unit_vector(&mut rng) * rng.gen_range(1.2..2.5),
            );
            let q = Pose::new(uniform_rotation(&mut rng), unit_vector(&mut rng) * 2.0);
            let base = composite_witness(&a, &t1, &b, &t2);
            let moved = composite_witness(&a, &q.compose(&t1), &b, &q.compose(&t2));
            assert!((base.signed_distance - moved.signed_distance).abs() < 1e-9);
            assert!((q.act(base.x1_world) - moved.x1_world).norm() < 1e-7);
            assert!((q.act(base.x2_world) - moved.x2_world).norm() < 1e-7);
        }
    }

    #[test]
    fn separated_witnesses_are_normal_to_face_interiors() {
        let mut rng = rng_from_seed(41);
        let a = primitives::convex_composite(primitives::icosahedron(0.7));
        let b = primitives::convex_composite(primitives::icosahedron(0.5));
        let mut face_cases = 0;
        for _ in 0..200 {
            let t1 = Pose::new(uniform_rotation(&mut rng), Vec3::ZERO);
            let t2 = Pose::new(
                uniform_rotation(&mut rng),
                unit_vector(&mut rng) * rng.gen_range(1.5..3.0),
            );
            let w = composite_witness(&a, &t1, &b, &t2);
            assert!(!w.penetrating);
            let gap = w.x2_world - w.x1_world;
            if gap.norm() < 1e-9 {
                continue;
            }
            let dir = gap.normalized();
            // When the witness sits on a face interior, the gap must align
            // with that face's normal.
            if let Feature::Face(i, j, k) = w.feature1 {
                face_cases += 1;
                let piece = &a.pieces[0];
                let n = t1
                    .rotate(
                        (piece.vertices[j] - piece.vertices[i])
                            .cross(piece.vertices[k] - piece.vertices[i]),
                    )
                    .normalized();
                let tangent_component = (dir - n * n.dot(dir)).norm();
                assert!(
                    tangent_component < 1e-6,
                    "gap not normal to face: {tangent_component}"
                );
            }
        }
        assert!(face_cases > 10, "want face-interior cases, got {face_cases}");
    }

    #[test]
    fn deterministic_tie_break_is_lexicographic() {
        // Two identical pieces stacked on each other in shape 1 produce
        // exactly equal distances; the lex-smallest pair must win.
        let piece = crate::geom::ConvexPiece::from_mesh(&primitives::cube(1.0)).unwrap();
        let mesh = primitives::cube(1.0);
        let s1 = CompositeShape::new(vec![piece.clone(), piece.clone()], mesh.clone());
        let s2 = CompositeShape::new(vec![piece], mesh);
        let t2 = Pose::from_translation(Vec3::new(4.0, 0.0, 0.0));
        let w = composite_witness(&s1, &Pose::IDENTITY, &s2, &t2);
        assert_eq!((w.piece1, w.piece2), (0, 0));
    }

    #[test]
    fn rotated_support_stays_covariant() {
        let piece = crate::geom::ConvexPiece::from_mesh(&primitives::cube(1.0)).unwrap();
        let pose = exp_map(Twist::new(
            Vec3::new(0.0, 0.0, core::f64::consts::FRAC_PI_2),
            Vec3::ZERO,
        ));
        let (point, _) = support(&piece, &pose, Vec3::X);
        assert!((point.x - 0.5).abs() < 1e-12);
    }
}
