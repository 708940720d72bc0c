//! Candidate selection strategies.

use alloc::vec::Vec;

use rand::Rng;

use crate::geom::{CompositeShape, SurfacePointBank, TriMesh};
use crate::math::Vec3;
use crate::random::rng_from_seed;
use crate::se3::Pose;

/// Default candidate budget per smoothing evaluation.
pub const DEFAULT_MAX_CANDIDATES: usize = 16;
/// Default stability floor for the adaptive radius (meters).
pub const DEFAULT_ADAPTIVE_EPSILON: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplingStrategy {
    /// BFS over mesh vertex adjacency around the witness vertex.
    Neighbor { k_ring: usize, subsample: usize },
    /// Keep bank points within a constant radius of the witness.
    Fixed { alpha: f64 },
    /// Radius follows the target miss distance: `α = max(‖t − x‖, ε)`.
    Adaptive { epsilon: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingConfig {
    pub strategy: SamplingStrategy,
    pub max_candidates: usize,
}

impl SamplingConfig {
    pub fn adaptive() -> Self {
        SamplingConfig {
            strategy: SamplingStrategy::Adaptive {
                epsilon: DEFAULT_ADAPTIVE_EPSILON,
            },
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }

    pub fn fixed(alpha: f64) -> Self {
        SamplingConfig {
            strategy: SamplingStrategy::Fixed { alpha },
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }

    pub fn neighbor(k_ring: usize, subsample: usize) -> Self {
        SamplingConfig {
            strategy: SamplingStrategy::Neighbor { k_ring, subsample },
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmoothingError {
    EmptyBank,
}

/// Points approximating the surface near one witness.
///
/// Element 0 is always the witness's own local point; world points satisfy
/// `points_world[i] = pose.act(points_local[i])`.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub points_local: Vec<Vec3>,
    pub points_world: Vec<Vec3>,
    pub piece: usize,
    pub strategy: &'static str,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.points_local.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points_local.is_empty()
    }

    /// Rebuild world points under a different pose (for perturbation tests).
    pub fn reposed(&self, pose: &Pose) -> CandidateSet {
        CandidateSet {
            points_local: self.points_local.clone(),
            points_world: self.points_local.iter().map(|&p| pose.act(p)).collect(),
            piece: self.piece,
            strategy: self.strategy,
        }
    }
}

/// Index of the bank point nearest to `p`, restricted to `allowed` pieces.
pub fn nearest_bank_index(
    bank: &SurfacePointBank,
    p: Vec3,
    allowed: impl Fn(usize) -> bool,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, point) in bank.points.iter().enumerate() {
        if !allowed(point.piece) {
            continue;
        }
        let d = (point.position - p).norm_squared();
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Distance-filtered candidate selection (fixed or adaptive radius).
///
/// The bank is restricted to the witness's piece plus pieces whose bounding
/// spheres intersect the α-ball; the witness point is prepended, and the
/// result is truncated to the `max_candidates` nearest.
#[allow(clippy::too_many_arguments)]
pub fn select_candidates(
    shape: &CompositeShape,
    bank: &SurfacePointBank,
    piece: usize,
    witness_local: Vec3,
    witness_world: Vec3,
    target_world: Vec3,
    pose: &Pose,
    cfg: &SamplingConfig,
    seed: u64,
) -> Result<CandidateSet, SmoothingError> {
    if bank.is_empty() {
        return Err(SmoothingError::EmptyBank);
    }
    let (alpha, tag) = match cfg.strategy {
        SamplingStrategy::Fixed { alpha } => (alpha, "fixed"),
        SamplingStrategy::Adaptive { epsilon } => (
            crate::flt::max((target_world - witness_world).norm(), epsilon),
            "adaptive",
        ),
        SamplingStrategy::Neighbor { .. } => {
            unreachable!("neighbor strategy goes through select_candidates_neighbor")
        }
    };

    // Pieces reachable by the α-ball around the witness.
    let allowed = |k: usize| {
        k == piece || {
            let pc = &shape.pieces[k];
            (pc.centroid - witness_local).norm() <= pc.bounding_radius + alpha
        }
    };

    let mut picked: Vec<(f64, usize)> = Vec::new();
    for (i, point) in bank.points.iter().enumerate() {
        if !allowed(point.piece) {
            continue;
        }
        let d = (point.position - witness_local).norm();
        if d <= alpha {
            picked.push((d, i));
        }
    }
    picked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    if picked.is_empty() {
        // Only the witness survives: add its nearest bank neighbor so the
        // softmax has a nontrivial support.
        if let Some(i) = nearest_bank_index(bank, witness_local, allowed) {
            picked.push(((bank.points[i].position - witness_local).norm(), i));
        } else if let Some(i) = nearest_bank_index(bank, witness_local, |_| true) {
            picked.push(((bank.points[i].position - witness_local).norm(), i));
        }
    }
    picked.truncate(cfg.max_candidates.saturating_sub(1).max(1));
    let _ = seed;

    let mut points_local = Vec::with_capacity(picked.len() + 1);
    points_local.push(witness_local);
    points_local.extend(picked.iter().map(|&(_, i)| bank.points[i].position));
    let points_world = points_local.iter().map(|&p| pose.act(p)).collect();
    Ok(CandidateSet {
        points_local,
        points_world,
        piece,
        strategy: tag,
    })
}

/// Neighbor-based baseline: BFS over vertex adjacency up to `k_ring` hops,
/// then a deterministic uniform subsample.
pub fn select_candidates_neighbor(
    mesh: &TriMesh,
    witness_vertex: usize,
    k_ring: usize,
    subsample: usize,
    seed: u64,
    pose: &Pose,
    piece: usize,
) -> CandidateSet {
    let mut depth = alloc::vec![usize::MAX; mesh.vertex_count()];
    depth[witness_vertex] = 0;
    let mut frontier = alloc::vec![witness_vertex];
    let mut reached: Vec<usize> = Vec::new();
    for ring in 1..=k_ring {
        let mut next = Vec::new();
        for &v in &frontier {
            for &n in mesh.neighbors(v) {
                if depth[n] == usize::MAX {
                    depth[n] = ring;
                    next.push(n);
                    reached.push(n);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    if reached.len() > subsample {
        // Partial Fisher-Yates keyed by the seed.
        let mut rng = rng_from_seed(seed);
        for k in 0..subsample {
            let pick = rng.gen_range(k..reached.len());
            reached.swap(k, pick);
        }
        reached.truncate(subsample);
    }

    let mut points_local = Vec::with_capacity(reached.len() + 1);
    points_local.push(mesh.vertices[witness_vertex]);
    points_local.extend(reached.iter().map(|&v| mesh.vertices[v]));
    let points_world = points_local.iter().map(|&p| pose.act(p)).collect();
    CandidateSet {
        points_local,
        points_world,
        piece,
        strategy: "neighbor",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;

    fn cube_setup() -> (CompositeShape, SurfacePointBank) {
        let shape = primitives::convex_composite(primitives::cube(1.0));
        let bank = shape.surface_bank(128, 7);
        (shape, bank)
    }

    #[test]
    fn huge_alpha_keeps_everything_up_to_cap() {
        let (shape, bank) = cube_setup();
        let cfg = SamplingConfig {
            strategy: SamplingStrategy::Fixed { alpha: 100.0 },
            max_candidates: 1000,
        };
        let set = select_candidates(
            &shape,
            &bank,
            0,
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::ZERO,
            &Pose::IDENTITY,
            &cfg,
            1,
        )
        .unwrap();
        assert_eq!(set.len(), bank.len() + 1);

        let capped = select_candidates(
            &shape,
            &bank,
            0,
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::ZERO,
            &Pose::IDENTITY,
            &SamplingConfig {
                strategy: SamplingStrategy::Fixed { alpha: 100.0 },
                max_candidates: 16,
            },
            1,
        )
        .unwrap();
        assert_eq!(capped.len(), 16);
    }

    #[test]
    fn adaptive_collapses_to_epsilon_ball_at_target() {
        let (shape, bank) = cube_setup();
        let witness = Vec3::new(0.5, 0.0, 0.0);
        let cfg = SamplingConfig {
            strategy: SamplingStrategy::Adaptive { epsilon: 1e-3 },
            max_candidates: 16,
        };
        // Target coincides with the witness → α = ε; expect the witness plus
        // its nearest neighbor only (no bank point within 1 mm on this bank).
        let set = select_candidates(
            &shape, &bank, 0, witness, witness, witness, &Pose::IDENTITY, &cfg, 1,
        )
        .unwrap();
        assert_eq!(set.points_local[0], witness);
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn fixed_filter_matches_brute_force() {
        let (shape, bank) = cube_setup();
        let witness = Vec3::new(0.5, 0.0, 0.0);
        let alpha = 0.3;
        let cfg = SamplingConfig {
            strategy: SamplingStrategy::Fixed { alpha },
            max_candidates: 10_000,
        };
        let set = select_candidates(
            &shape, &bank, 0, witness, witness, Vec3::ZERO, &Pose::IDENTITY, &cfg, 1,
        )
        .unwrap();
        let brute: Vec<Vec3> = bank
            .points
            .iter()
            .filter(|p| (p.position - witness).norm() <= alpha)
            .map(|p| p.position)
            .collect();
        assert_eq!(set.len(), brute.len() + 1);
        for p in &brute {
            assert!(set.points_local.iter().any(|q| (*q - *p).norm() == 0.0));
        }
    }

    #[test]
    fn candidates_world_points_follow_pose() {
        let (shape, bank) = cube_setup();
        let pose = Pose::from_translation(Vec3::new(1.0, 2.0, 3.0));
        let set = select_candidates(
            &shape,
            &bank,
            0,
            Vec3::new(0.5, 0.0, 0.0),
            pose.act(Vec3::new(0.5, 0.0, 0.0)),
            Vec3::ZERO,
            &pose,
            &SamplingConfig::fixed(0.4),
            1,
        )
        .unwrap();
        for (l, w) in set.points_local.iter().zip(set.points_world.iter()) {
            assert!((pose.act(*l) - *w).norm() < 1e-15);
        }
    }

    #[test]
    fn empty_bank_errors() {
        let shape = primitives::convex_composite(primitives::cube(1.0));
        let bank = SurfacePointBank { points: alloc::vec::Vec::new() };
        let out = select_candidates(
            &shape,
            &bank,
            0,
            Vec3::ZERO,
            Vec3::ZERO,
            Vec3::ZERO,
            &Pose::IDENTITY,
            &SamplingConfig::fixed(0.1),
            1,
        );
        assert_eq!(out.unwrap_err(), SmoothingError::EmptyBank);
    }

    #[test]
    fn neighbor_zero_ring_is_singleton() {
        let mesh = primitives::icosahedron(1.0);
        let set =
            select_candidates_neighbor(&mesh, 3, 0, 10, 1, &Pose::IDENTITY, 0);
        assert_eq!(set.len(), 1);
        assert_eq!(set.points_local[0], mesh.vertices[3]);
    }

    #[test]
    fn neighbor_saturates_at_graph_diameter() {
        let mesh = primitives::icosahedron(1.0);
        let set = select_candidates_neighbor(
            &mesh,
            0,
            10,
            usize::MAX,
            1,
            &Pose::IDENTITY,
            0,
        );
        assert_eq!(set.len(), mesh.vertex_count());
    }

    #[test]
    fn icosahedron_one_ring_matches_adjacency() {
        let mesh = primitives::icosahedron(1.0);
        let set = select_candidates_neighbor(
            &mesh,
            0,
            1,
            usize::MAX,
            1,
            &Pose::IDENTITY,
            0,
        );
        assert_eq!(set.len(), 6); // witness + its 5 neighbors
        for &n in mesh.neighbors(0) {
            let v = mesh.vertices[n];
            assert!(set.points_local.iter().any(|q| (*q - v).norm() == 0.0));
        }
    }

    #[test]
    fn neighbor_subsample_is_deterministic() {
        let mesh = primitives::icosphere(1.0, 2);
        let a = select_candidates_neighbor(&mesh, 5, 3, 12, 99, &Pose::IDENTITY, 0);
        let b = select_candidates_neighbor(&mesh, 5, 3, 12, 99, &Pose::IDENTITY, 0);
        assert_eq!(a.points_local, b.points_local);
        assert_eq!(a.len(), 13);
    }

    #[test]
    fn cross_piece_candidates_near_piece_boundary() {
        let shape = primitives::l_shape();
        let bank = shape.surface_bank(256, 11);
        // Witness near the junction of the two bars.
        let witness = Vec3::new(-0.3, -0.1, 0.0);
        let piece = shape.owning_piece(witness);
        let set = select_candidates(
            &shape,
            &bank,
            piece,
            witness,
            witness,
            Vec3::new(0.3, 0.3, 0.0),
            &Pose::IDENTITY,
            &SamplingConfig {
                strategy: SamplingStrategy::Fixed { alpha: 0.3 },
                max_candidates: 64,
            },
            1,
        )
        .unwrap();
        // Points from both pieces make it into the set.
        let mut pieces_seen = [false; 2];
        for p in set.points_local.iter().skip(1) {
            let owner = bank
                .points
                .iter()
                .find(|bp| (bp.position - *p).norm() == 0.0)
                .unwrap()
                .piece;
            pieces_seen[owner] = true;
        }
        assert!(pieces_seen[0] && pieces_seen[1]);
    }
}
