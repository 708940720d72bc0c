//! Frozen-candidate surrogate: the pure function of the two poses whose
//! exact derivatives the analytic Jacobians claim to be.
//!
//! Candidate membership and the forward-witness anchor points are frozen at
//! the base configuration; everything downstream (world points, scores,
//! weights, temperature per mode) is re-evaluated. Central finite
//! differences of this function are the independent oracle for
//! `witness_jacobians`, and also power the `gradcheck` command.

use alloc::vec::Vec;

use super::jacobians::{TauMode, WitnessJacobians};
use crate::flt;
use crate::math::{Mat3x6, Vec3};
use crate::narrowphase::WitnessResult;
use crate::se3::{exp_map, Pose, Twist};
use crate::smoothing::{
    population_std, softmax_smooth_with_tau, CandidateSet, ScoreKind, SmoothedPair, TAU_FLOOR,
};

#[derive(Clone, Debug)]
pub struct FrozenSurrogate {
    locals1: Vec<Vec3>,
    locals2: Vec<Vec3>,
    /// Forward witnesses at the base poses: world positions and the frozen
    /// local anchors they transport rigidly from.
    x1w: Vec3,
    x2w: Vec3,
    x1_local: Vec3,
    x2_local: Vec3,
    penetrating: bool,
    /// Base temperatures, used verbatim in stop-gradient mode (and always
    /// for direction scores, whose temperature is a constant).
    tau1: f64,
    tau2: f64,
    score: ScoreKind,
    tau_mode: TauMode,
}

impl FrozenSurrogate {
    pub fn new(
        pair: &SmoothedPair,
        forward: &WitnessResult,
        score: ScoreKind,
        tau_mode: TauMode,
    ) -> Self {
        FrozenSurrogate {
            locals1: pair.set1.points_local.clone(),
            locals2: pair.set2.points_local.clone(),
            x1w: forward.x1_world,
            x2w: forward.x2_world,
            x1_local: forward.x1_local,
            x2_local: forward.x2_local,
            penetrating: forward.penetrating,
            tau1: pair.state1.tau,
            tau2: pair.state2.tau,
            score,
            tau_mode,
        }
    }

    /// Softmax combination for one side given the anchor positions.
    fn combine(
        &self,
        locals: &[Vec3],
        pose: &Pose,
        x_ref: Vec3,
        own_anchor: Vec3,
        other_anchor: Vec3,
        base_tau: f64,
    ) -> Vec3 {
        let worlds: Vec<Vec3> = locals.iter().map(|&p| pose.act(p)).collect();
        let u: Vec<f64> = match self.score {
            ScoreKind::Distance => worlds
                .iter()
                .map(|&v| -(v - x_ref).norm_squared())
                .collect(),
            ScoreKind::Direction => {
                let y =
                    crate::smoothing::gap_direction(own_anchor, other_anchor, self.penetrating);
                worlds.iter().map(|&v| v.dot(y)).collect()
            }
        };
        let tau = match (self.score, self.tau_mode) {
            // The direction temperature is a constant by construction.
            (ScoreKind::Direction, _) => base_tau,
            (_, TauMode::StopGradient) => base_tau,
            (_, TauMode::Propagate) => flt::max(population_std(&u), TAU_FLOOR),
        };
        let set = CandidateSet {
            points_local: locals.to_vec(),
            points_world: worlds,
            piece: 0,
            strategy: "frozen",
        };
        softmax_smooth_with_tau(&set, u, tau).x_star
    }

    /// Smoothed witness of object 1 as a function of its own pose. The
    /// distance reference stays at the base witness of object 2; for
    /// direction scores the own anchor transports rigidly while the other
    /// anchor stays put.
    pub fn x1_of_t1(&self, t1: &Pose) -> Vec3 {
        self.combine(
            &self.locals1,
            t1,
            self.x2w,
            t1.act(self.x1_local),
            self.x2w,
            self.tau1,
        )
    }

    pub fn x2_of_t2(&self, t2: &Pose) -> Vec3 {
        self.combine(
            &self.locals2,
            t2,
            self.x1w,
            t2.act(self.x2_local),
            self.x1w,
            self.tau2,
        )
    }

    /// Smoothed witness of object 1 as a function of the other pose. For
    /// distance scores the reference point is the base witness displaced by
    /// the smoothed motion of object 2 (so the base derivative equals the
    /// assembled cross block); for direction scores the other anchor
    /// transports rigidly into the unit gap direction.
    pub fn x1_of_t2(&self, t1_base: &Pose, t2_base: &Pose, t2: &Pose) -> Vec3 {
        match self.score {
            ScoreKind::Distance => {
                let delta = self.x2_of_t2(t2) - self.x2_of_t2(t2_base);
                self.combine(
                    &self.locals1,
                    t1_base,
                    self.x2w + delta,
                    t1_base.act(self.x1_local),
                    self.x2w,
                    self.tau1,
                )
            }
            ScoreKind::Direction => self.combine(
                &self.locals1,
                t1_base,
                self.x2w,
                t1_base.act(self.x1_local),
                t2.act(self.x2_local),
                self.tau1,
            ),
        }
    }

    pub fn x2_of_t1(&self, t2_base: &Pose, t1_base: &Pose, t1: &Pose) -> Vec3 {
        match self.score {
            ScoreKind::Distance => {
                let delta = self.x1_of_t1(t1) - self.x1_of_t1(t1_base);
                self.combine(
                    &self.locals2,
                    t2_base,
                    self.x1w + delta,
                    t2_base.act(self.x2_local),
                    self.x1w,
                    self.tau2,
                )
            }
            ScoreKind::Direction => self.combine(
                &self.locals2,
                t2_base,
                self.x1w,
                t2_base.act(self.x2_local),
                t1.act(self.x1_local),
                self.tau2,
            ),
        }
    }

    /// Central finite differences of all four blocks at step `h`.
    pub fn fd_jacobians(&self, t1: &Pose, t2: &Pose, h: f64) -> WitnessJacobians {
        let mut dx1_dxi1 = Mat3x6::ZERO;
        let mut dx2_dxi2 = Mat3x6::ZERO;
        let mut dx1_dxi2 = Mat3x6::ZERO;
        let mut dx2_dxi1 = Mat3x6::ZERO;
        for j in 0..6 {
            let step = Twist::basis(j).scale(h);
            let plus = exp_map(step);
            let minus = exp_map(step.scale(-1.0));

            let t1p = t1.compose(&plus);
            let t1m = t1.compose(&minus);
            let t2p = t2.compose(&plus);
            let t2m = t2.compose(&minus);

            dx1_dxi1.set_column(j, (self.x1_of_t1(&t1p) - self.x1_of_t1(&t1m)) / (2.0 * h));
            dx2_dxi2.set_column(j, (self.x2_of_t2(&t2p) - self.x2_of_t2(&t2m)) / (2.0 * h));
            dx1_dxi2.set_column(
                j,
                (self.x1_of_t2(t1, t2, &t2p) - self.x1_of_t2(t1, t2, &t2m)) / (2.0 * h),
            );
            dx2_dxi1.set_column(
                j,
                (self.x2_of_t1(t2, t1, &t1p) - self.x2_of_t1(t2, t1, &t1m)) / (2.0 * h),
            );
        }
        WitnessJacobians {
            dx1_dxi1,
            dx2_dxi2,
            dx1_dxi2,
            dx2_dxi1,
        }
    }
}

/// Relative error per block, in the order
/// `[∂x₁/∂ξ₁, ∂x₂/∂ξ₂, ∂x₁/∂ξ₂, ∂x₂/∂ξ₁]`.
///
/// Each block is normalized by its own magnitude, floored at a thousandth of
/// the largest entry anywhere in the comparison: a cross block that is
/// exactly zero (degenerate candidate sets make the weights locally
/// constant) would otherwise pit rounding noise against rounding noise.
pub fn block_relative_errors(analytic: &WitnessJacobians, fd: &WitnessJacobians) -> [f64; 4] {
    let blocks = [
        (&analytic.dx1_dxi1, &fd.dx1_dxi1),
        (&analytic.dx2_dxi2, &fd.dx2_dxi2),
        (&analytic.dx1_dxi2, &fd.dx1_dxi2),
        (&analytic.dx2_dxi1, &fd.dx2_dxi1),
    ];
    let global = blocks
        .iter()
        .map(|(a, b)| flt::max(a.max_abs(), b.max_abs()))
        .fold(0.0, flt::max);
    let mut out = [0.0; 4];
    for (k, (a, b)) in blocks.into_iter().enumerate() {
        let scale = flt::max(
            flt::max(a.max_abs(), b.max_abs()),
            flt::max(global * 1e-3, 1e-12),
        );
        out[k] = a.max_abs_diff(b) / scale;
    }
    out
}

/// Worst relative error across all four blocks.
pub fn max_relative_error(analytic: &WitnessJacobians, fd: &WitnessJacobians) -> f64 {
    block_relative_errors(analytic, fd)
        .into_iter()
        .fold(0.0, flt::max)
}