//! Analytic Jacobians of the smoothed witnesses.
//!
//! All four 3×6 blocks {∂x₁/∂ξ₁, ∂x₂/∂ξ₂, ∂x₁/∂ξ₂, ∂x₂/∂ξ₁} in
//! right-perturbation coordinates. The self blocks differentiate the softmax
//! combination holding the other object's reference point fixed; the cross
//! blocks chain ∂x*/∂w · ∂w/∂x_ref through the already-computed self block of
//! the other object.

use alloc::vec::Vec;

use crate::math::{Mat3, Mat3x6, Vec3};
use crate::narrowphase::WitnessResult;
use crate::se3::Pose;
use crate::smoothing::{CandidateSet, ScoreKind, SmoothedPair, SmoothingState};

/// Whether the adaptive temperature `τ = std(u)` is differentiated through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TauMode {
    /// τ is a forward-computed constant (the default).
    #[default]
    StopGradient,
    /// τ's dependence on the scores propagates into the weights.
    Propagate,
}

#[derive(Clone, Copy, Debug)]
pub struct WitnessJacobians {
    pub dx1_dxi1: Mat3x6,
    pub dx2_dxi2: Mat3x6,
    pub dx1_dxi2: Mat3x6,
    pub dx2_dxi1: Mat3x6,
}

/// Differential of the softmax weights contracted with arbitrary per-score
/// rows: given `du_i/dp` as rows of width `P`, accumulates
/// `Σ_i w_i (v_i − x*) ⊗ dz_i/dp` where `z = u/τ`.
fn weight_path<const P: usize>(
    state: &SmoothingState,
    set: &CandidateSet,
    du: &[[f64; P]],
    tau_mode: TauMode,
) -> [[f64; P]; 3] {
    let n = state.u.len();
    let tau = state.tau;
    let mean = state.u.iter().sum::<f64>() / n as f64;
    let mut dtau = [0.0; P];
    if tau_mode == TauMode::Propagate && !state.tau_fixed {
        for (ui, dui) in state.u.iter().zip(du.iter()) {
            let c = (ui - mean) / (n as f64 * tau);
            for k in 0..P {
                dtau[k] += c * dui[k];
            }
        }
    }

    let mut out = [[0.0; P]; 3];
    for i in 0..n {
        let dir = set.points_world[i] - state.x_star;
        let wi = state.w[i];
        for k in 0..P {
            // dz_i = du_i/τ − u_i dτ/τ². Any constant shift of dz across i
            // cancels in Σ wᵢ(vᵢ − x*)dzᵢ, so the τ-term uses centered
            // scores: the raw uᵢ carry a common offset vastly larger than
            // their spread and would cancel catastrophically.
            let dz = du[i][k] / tau - (state.u[i] - mean) * dtau[k] / (tau * tau);
            let scale = wi * dz;
            out[0][k] += dir.x * scale;
            out[1][k] += dir.y * scale;
            out[2][k] += dir.z * scale;
        }
    }
    out
}

/// Self block for distance scoring: ∂x*/∂ξ of the object that owns the
/// candidates, holding the other object's reference point fixed.
fn self_jacobian_distance(
    set: &CandidateSet,
    state: &SmoothingState,
    pose: &Pose,
    x_ref: Vec3,
    tau_mode: TauMode,
) -> Mat3x6 {
    let n = set.len();
    let mut point_jacs: Vec<Mat3x6> = Vec::with_capacity(n);
    for &local in &set.points_local {
        point_jacs.push(pose.point_jacobian(local));
    }

    // Rigid transport term Σ w_i ∂v_i/∂ξ.
    let mut total = Mat3x6::ZERO;
    for i in 0..n {
        for r in 0..3 {
            for c in 0..6 {
                total.m[r][c] += state.w[i] * point_jacs[i].m[r][c];
            }
        }
    }

    let mut du: Vec<[f64; 6]> = Vec::with_capacity(n);
    for i in 0..n {
        du.push(point_jacs[i].transpose_mul((set.points_world[i] - x_ref) * -2.0));
    }
    let weight_term = weight_path::<6>(state, set, &du, tau_mode);
    for r in 0..3 {
        for c in 0..6 {
            total.m[r][c] += weight_term[r][c];
        }
    }
    total
}

/// ∂x*/∂x_ref for distance scoring (3×3).
fn reference_jacobian(
    set: &CandidateSet,
    state: &SmoothingState,
    x_ref: Vec3,
    tau_mode: TauMode,
) -> Mat3 {
    let n = set.len();
    let mut du: Vec<[f64; 3]> = Vec::with_capacity(n);
    for i in 0..n {
        let g = (set.points_world[i] - x_ref) * 2.0;
        du.push([g.x, g.y, g.z]);
    }
    let rows = weight_path::<3>(state, set, &du, tau_mode);
    Mat3 { m: rows }
}

/// Direction-score blocks. The scores are `uᵢ = ⟨vᵢ, ±ĝ⟩` with
/// `ĝ = (x̄₂ − x̄₁)/‖x̄₂ − x̄₁‖` built from the rigidly transported forward
/// witnesses, so differentiating the unit direction contributes
/// `(I − ĝĝᵀ)/‖g‖` terms that blow up as the witnesses approach each other.
struct DirectionBlocks {
    self1: Mat3x6,
    self2: Mat3x6,
    cross12: Mat3x6,
    cross21: Mat3x6,
}

#[allow(clippy::too_many_arguments)]
fn direction_jacobians(
    pair: &SmoothedPair,
    forward: &WitnessResult,
    t1: &Pose,
    t2: &Pose,
    tau_mode: TauMode,
) -> DirectionBlocks {
    let g = forward.x2_world - forward.x1_world;
    let norm = g.norm();
    let sigma = if forward.penetrating { -1.0 } else { 1.0 };
    let anchor1 = t1.point_jacobian(forward.x1_local);
    let anchor2 = t2.point_jacobian(forward.x2_local);

    // dĝ = (I − ĝĝᵀ)/‖g‖ · dg with dg/dξ₁ = −D(x₁ₒ), dg/dξ₂ = +D(x₂ₒ).
    let (dg_dxi1, dg_dxi2) = if norm < 1e-12 {
        (Mat3x6::ZERO, Mat3x6::ZERO)
    } else {
        let ghat = g / norm;
        let projector = (Mat3::IDENTITY - Mat3::outer(ghat, ghat)) * (1.0 / norm);
        (
            anchor1.left_mul(&projector).scale(-1.0),
            anchor2.left_mul(&projector),
        )
    };

    let side = |set: &CandidateSet,
                state: &SmoothingState,
                pose: &Pose,
                y_sign: f64,
                dghat_own: &Mat3x6,
                dghat_other: &Mat3x6|
     -> (Mat3x6, Mat3x6) {
        let n = set.len();
        let mut point_jacs: Vec<Mat3x6> = Vec::with_capacity(n);
        for &local in &set.points_local {
            point_jacs.push(pose.point_jacobian(local));
        }
        let yhat = if norm < 1e-12 {
            Vec3::ZERO
        } else {
            (g / norm) * (sigma * y_sign)
        };

        let mut total = Mat3x6::ZERO;
        for i in 0..n {
            for r in 0..3 {
                for c in 0..6 {
                    total.m[r][c] += state.w[i] * point_jacs[i].m[r][c];
                }
            }
        }
        // du_i/dξ_own = D_iᵀ ŷ + v_iᵀ dŷ/dξ_own.
        let mut du_own: Vec<[f64; 6]> = Vec::with_capacity(n);
        let mut du_other: Vec<[f64; 6]> = Vec::with_capacity(n);
        let scale = sigma * y_sign;
        for i in 0..n {
            let v = set.points_world[i];
            let mut own = point_jacs[i].transpose_mul(yhat);
            for (k, slot) in own.iter_mut().enumerate() {
                *slot += scale * dghat_own.column(k).dot(v);
            }
            let mut other = [0.0; 6];
            for (k, slot) in other.iter_mut().enumerate() {
                *slot = scale * dghat_other.column(k).dot(v);
            }
            du_own.push(own);
            du_other.push(other);
        }
        let own_term = weight_path::<6>(state, set, &du_own, tau_mode);
        for r in 0..3 {
            for c in 0..6 {
                total.m[r][c] += own_term[r][c];
            }
        }
        let cross = Mat3x6 {
            m: weight_path::<6>(state, set, &du_other, tau_mode),
        };
        (total, cross)
    };

    let (self1, cross12) = side(&pair.set1, &pair.state1, t1, 1.0, &dg_dxi1, &dg_dxi2);
    let (self2, cross21) = side(&pair.set2, &pair.state2, t2, -1.0, &dg_dxi2, &dg_dxi1);
    DirectionBlocks {
        self1,
        self2,
        cross12,
        cross21,
    }
}

pub fn witness_jacobians(
    pair: &SmoothedPair,
    forward: &WitnessResult,
    t1: &Pose,
    t2: &Pose,
    score: ScoreKind,
    tau_mode: TauMode,
) -> WitnessJacobians {
    match score {
        ScoreKind::Distance => {
            let dx1_dxi1 =
                self_jacobian_distance(&pair.set1, &pair.state1, t1, forward.x2_world, tau_mode);
            let dx2_dxi2 =
                self_jacobian_distance(&pair.set2, &pair.state2, t2, forward.x1_world, tau_mode);

            // Cross blocks substitute the other object's smoothed self block
            // for the motion of the reference point.
            let m12 = reference_jacobian(&pair.set1, &pair.state1, forward.x2_world, tau_mode);
            let m21 = reference_jacobian(&pair.set2, &pair.state2, forward.x1_world, tau_mode);
            WitnessJacobians {
                dx1_dxi1,
                dx2_dxi2,
                dx1_dxi2: dx2_dxi2.left_mul(&m12),
                dx2_dxi1: dx1_dxi1.left_mul(&m21),
            }
        }
        ScoreKind::Direction => {
            let blocks = direction_jacobians(pair, forward, t1, t2, tau_mode);
            WitnessJacobians {
                dx1_dxi1: blocks.self1,
                dx2_dxi2: blocks.self2,
                dx1_dxi2: blocks.cross12,
                dx2_dxi1: blocks.cross21,
            }
        }
    }
}
