//! Score vectors and the adaptive-temperature softmax combination.

use alloc::vec::Vec;

use super::candidates::CandidateSet;
use crate::flt;
use crate::math::Vec3;

/// Temperature floor guarding the all-equal-scores case (std = 0).
pub const TAU_FLOOR: f64 = 1e-12;

/// One smoothing evaluation: scores, temperature, weights, and the smoothed
/// point `x* = Σ wᵢ vᵢ`.
#[derive(Clone, Debug)]
pub struct SmoothingState {
    pub u: Vec<f64>,
    pub tau: f64,
    pub w: Vec<f64>,
    pub x_star: Vec3,
    /// Whether `tau` is an externally fixed constant (as opposed to the
    /// adaptive `std(u)`); a fixed temperature never propagates gradients.
    pub tau_fixed: bool,
}

/// Distance-based scores: `uᵢ = −‖vᵢ − x₂‖²`.
pub fn score_distance(candidates: &CandidateSet, other_witness_world: Vec3) -> Vec<f64> {
    candidates
        .points_world
        .iter()
        .map(|&v| -(v - other_witness_world).norm_squared())
        .collect()
}

/// Gap direction for the direction-based score: the unit vector from the
/// own witness toward the other, flipped under penetration; zero when the
/// witnesses coincide (the direction is then undefined).
pub fn gap_direction(
    own_witness_world: Vec3,
    other_witness_world: Vec3,
    penetrating: bool,
) -> Vec3 {
    let gap = other_witness_world - own_witness_world;
    let n = gap.norm();
    if n < 1e-12 {
        Vec3::ZERO
    } else if penetrating {
        -(gap / n)
    } else {
        gap / n
    }
}

/// Direction-based scores: `u'ᵢ = ⟨vᵢ, ŷ⟩` against the unit gap direction.
pub fn score_direction(
    candidates: &CandidateSet,
    own_witness_world: Vec3,
    other_witness_world: Vec3,
    penetrating: bool,
) -> Vec<f64> {
    let y = gap_direction(own_witness_world, other_witness_world, penetrating);
    candidates.points_world.iter().map(|&v| v.dot(y)).collect()
}

/// Population standard deviation.
pub fn population_std(u: &[f64]) -> f64 {
    if u.is_empty() {
        return 0.0;
    }
    let n = u.len() as f64;
    let mean = u.iter().sum::<f64>() / n;
    let var = u.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
    flt::sqrt(var)
}

/// Softmax with the adaptive temperature `τ = max(std(u), TAU_FLOOR)`.
pub fn softmax_smooth(candidates: &CandidateSet, u: Vec<f64>) -> SmoothingState {
    let tau = flt::max(population_std(&u), TAU_FLOOR);
    softmax_inner(candidates, u, tau, false)
}

/// Softmax at an explicit, fixed temperature (max-shifted for stability).
pub fn softmax_smooth_with_tau(
    candidates: &CandidateSet,
    u: Vec<f64>,
    tau: f64,
) -> SmoothingState {
    softmax_inner(candidates, u, tau, true)
}

fn softmax_inner(
    candidates: &CandidateSet,
    u: Vec<f64>,
    tau: f64,
    tau_fixed: bool,
) -> SmoothingState {
    assert!(!u.is_empty(), "softmax needs at least one candidate");
    assert_eq!(u.len(), candidates.len());
    let max_u = u.iter().fold(f64::NEG_INFINITY, |a, &b| flt::max(a, b));
    let mut w: Vec<f64> = u.iter().map(|&ui| flt::exp((ui - max_u) / tau)).collect();
    let z: f64 = w.iter().sum();
    for wi in &mut w {
        *wi /= z;
    }
    let mut x_star = Vec3::ZERO;
    for (&wi, &v) in w.iter().zip(candidates.points_world.iter()) {
        x_star += v * wi;
    }
    SmoothingState {
        u,
        tau,
        w,
        x_star,
        tau_fixed,
    }
}
