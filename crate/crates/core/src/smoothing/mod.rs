//! Differentiable surrogate of witness points.
//!
//! The non-smooth witness map is replaced by a softmax-weighted combination
//! of surface candidate points. Candidates come from a pre-sampled bank
//! filtered by distance to the forward witness (fixed or adaptive radius) or
//! from a mesh-neighborhood BFS (the baseline strategy); scores are either
//! negative squared distances to the other witness or inner products with
//! the witness-gap direction.

mod candidates;
mod softmax;

pub use candidates::{
    nearest_bank_index, select_candidates, select_candidates_neighbor, CandidateSet,
    SamplingConfig, SamplingStrategy, SmoothingError, DEFAULT_ADAPTIVE_EPSILON,
    DEFAULT_MAX_CANDIDATES,
};
pub use softmax::{
    gap_direction, population_std, score_direction, score_distance, softmax_smooth,
    softmax_smooth_with_tau, SmoothingState, TAU_FLOOR,
};

use alloc::string::String;

use crate::geom::{CompositeShape, SurfacePointBank};
use crate::math::Vec3;
use crate::narrowphase::WitnessResult;
use crate::se3::Pose;

/// Which score vector drives the softmax.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreKind {
    /// Negative squared distance to the other object's witness.
    Distance,
    /// Inner product with the witness-gap direction.
    Direction,
}

/// Everything the smoothing pass needs besides the scene itself.
#[derive(Clone, Debug)]
pub struct SmoothingConfig {
    pub sampling: SamplingConfig,
    pub score: ScoreKind,
    /// Seed for the neighbor-subsampling stream.
    pub seed: u64,
    /// Fixed softmax temperature for the direction score, per the original
    /// formulation of that baseline (distance scores use the adaptive
    /// `std(u)` temperature instead). `None` falls back to `std(u)`.
    pub direction_tau: Option<f64>,
}

/// Smoothed witnesses for both objects plus their candidate sets.
#[derive(Clone, Debug)]
pub struct SmoothedPair {
    pub set1: CandidateSet,
    pub state1: SmoothingState,
    pub set2: CandidateSet,
    pub state2: SmoothingState,
}

/// Run candidate selection, scoring, and softmax for both objects.
///
/// Scoring object 1 treats the forward witness of object 2 as the reference
/// point, and vice versa; the two sides are otherwise independent.
#[allow(clippy::too_many_arguments)]
pub fn smoothed_witness(
    s1: &CompositeShape,
    t1: &Pose,
    s2: &CompositeShape,
    t2: &Pose,
    forward: &WitnessResult,
    bank1: &SurfacePointBank,
    bank2: &SurfacePointBank,
    cfg: &SmoothingConfig,
    target1_world: Vec3,
    target2_world: Vec3,
) -> Result<SmoothedPair, SmoothingError> {
    let set1 = select_for_object(
        s1,
        t1,
        bank1,
        forward.piece1,
        forward.x1_local,
        forward.x1_world,
        target1_world,
        cfg,
        0,
    )?;
    let set2 = select_for_object(
        s2,
        t2,
        bank2,
        forward.piece2,
        forward.x2_local,
        forward.x2_world,
        target2_world,
        cfg,
        1,
    )?;

    let state1 = score_and_smooth(
        &set1,
        forward.x1_world,
        forward.x2_world,
        forward.penetrating,
        cfg,
    );
    let state2 = score_and_smooth(
        &set2,
        forward.x2_world,
        forward.x1_world,
        forward.penetrating,
        cfg,
    );

    Ok(SmoothedPair {
        set1,
        state1,
        set2,
        state2,
    })
}

fn score_and_smooth(
    set: &CandidateSet,
    own_witness: Vec3,
    other_witness: Vec3,
    penetrating: bool,
    cfg: &SmoothingConfig,
) -> SmoothingState {
    match cfg.score {
        ScoreKind::Distance => softmax_smooth(set, score_distance(set, other_witness)),
        ScoreKind::Direction => {
            let u = score_direction(set, own_witness, other_witness, penetrating);
            match cfg.direction_tau {
                Some(tau) => softmax_smooth_with_tau(set, u, crate::flt::max(tau, TAU_FLOOR)),
                None => softmax_smooth(set, u),
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn select_for_object(
    shape: &CompositeShape,
    pose: &Pose,
    bank: &SurfacePointBank,
    piece: usize,
    witness_local: Vec3,
    witness_world: Vec3,
    target_world: Vec3,
    cfg: &SmoothingConfig,
    side: u64,
) -> Result<CandidateSet, SmoothingError> {
    match cfg.sampling.strategy {
        SamplingStrategy::Neighbor { k_ring, subsample } => {
            let vertex = shape.source_mesh.nearest_vertex(witness_local);
            Ok(select_candidates_neighbor(
                &shape.source_mesh,
                vertex,
                k_ring,
                subsample,
                crate::random::derive_seed(cfg.seed, side),
                pose,
                piece,
            ))
        }
        _ => select_candidates(
            shape,
            bank,
            piece,
            witness_local,
            witness_world,
            target_world,
            pose,
            &cfg.sampling,
            crate::random::derive_seed(cfg.seed, 0x5e1ec7 ^ side),
        ),
    }
}

impl core::fmt::Display for SmoothingError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SmoothingError::EmptyBank => write!(f, "candidate bank is empty"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SmoothingError {}

/// Human-readable tag for reports.
pub fn strategy_name(s: &SamplingStrategy) -> String {
    match s {
        SamplingStrategy::Neighbor { .. } => String::from("neighbor"),
        SamplingStrategy::Fixed { .. } => String::from("fixed"),
        SamplingStrategy::Adaptive { .. } => String::from("adaptive"),
    }
}
