//! Pose gradients of the witness-matching loss.
//!
//! The primary path assembles analytic Jacobians of the smoothed witnesses
//! in right-perturbation se(3) coordinates and pulls the loss partials back
//! through them; equivalent gradient transport then moves the object-1
//! gradient onto object 2 when only object 2 is optimized. Finite
//! differences, zeroth-order randomized smoothing, and the vertex–face
//! analytical method are provided as baselines.

mod analytic;
mod assemble;
mod estimators;
mod jacobians;
mod loss;
mod surrogate;

pub use analytic::{grad_analytical, grad_analytical_at};
pub use assemble::{assemble_pose_gradients, target_pullback, TaskGradient};
pub use estimators::{
    grad_finite_difference, grad_rs0, rs0_estimate, FD_ROT_STEP, RS0_SAMPLES, RS0_SIGMA,
};
pub use jacobians::{witness_jacobians, TauMode, WitnessJacobians};
pub use loss::{loss, LossConfig};
pub use surrogate::{block_relative_errors, max_relative_error, FrozenSurrogate};

use crate::geom::{CompositeShape, SurfacePointBank};
use crate::math::Vec3;
use crate::narrowphase::{composite_witness, WitnessResult};
use crate::se3::Pose;
use crate::smoothing::{smoothed_witness, SmoothedPair, SmoothingConfig, SmoothingError};

/// One target-point-matching problem: the scene geometry, per-object
/// candidate banks, and local-frame target points.
#[derive(Clone, Copy)]
pub struct SceneTask<'a> {
    pub shape1: &'a CompositeShape,
    pub shape2: &'a CompositeShape,
    pub bank1: &'a SurfacePointBank,
    pub bank2: &'a SurfacePointBank,
    pub target1_local: Vec3,
    pub target2_local: Vec3,
    pub loss: LossConfig,
}

impl<'a> SceneTask<'a> {
    pub fn forward(&self, t1: &Pose, t2: &Pose) -> WitnessResult {
        composite_witness(self.shape1, t1, self.shape2, t2)
    }

    pub fn targets_world(&self, t1: &Pose, t2: &Pose) -> (Vec3, Vec3) {
        (t1.act(self.target1_local), t2.act(self.target2_local))
    }

    /// Loss evaluated at the forward (non-smoothed) witnesses.
    pub fn forward_loss(&self, t1: &Pose, t2: &Pose) -> f64 {
        let w = self.forward(t1, t2);
        let (tw1, tw2) = self.targets_world(t1, t2);
        loss(w.x1_world, w.x2_world, tw1, tw2, &self.loss).0
    }
}

/// First-order smoothed gradient (both the distance-based scheme and the
/// direction-based baseline, depending on `cfg.score`) for an
/// already-computed forward witness.
///
/// Loss partials are taken at the smoothed witnesses so that the gradient
/// vanishes at stationary points of the surrogate.
#[allow(clippy::too_many_arguments)]
pub fn grad_smoothed_at(
    task: &SceneTask<'_>,
    t1: &Pose,
    t2: &Pose,
    forward: &WitnessResult,
    cfg: &SmoothingConfig,
    tau_mode: TauMode,
    use_eg: bool,
    optimize_t1: bool,
) -> Result<(TaskGradient, SmoothedPair), SmoothingError> {
    let (tw1, tw2) = task.targets_world(t1, t2);
    let pair = smoothed_witness(
        task.shape1,
        t1,
        task.shape2,
        t2,
        forward,
        task.bank1,
        task.bank2,
        cfg,
        tw1,
        tw2,
    )?;
    let jac = witness_jacobians(&pair, forward, t1, t2, cfg.score, tau_mode);
    let (_, dldx1, dldx2) = loss(pair.state1.x_star, pair.state2.x_star, tw1, tw2, &task.loss);
    let pull1 = assemble::target_pullback(t1, task.target1_local, tw1, pair.state1.x_star);
    let pull2 = assemble::target_pullback(t2, task.target2_local, tw2, pair.state2.x_star);
    let grad =
        assemble_pose_gradients(&jac, dldx1, dldx2, pull1, pull2, t1, t2, use_eg, optimize_t1);
    Ok((grad, pair))
}

/// Convenience wrapper that runs the forward query itself.
#[allow(clippy::too_many_arguments)]
pub fn grad_smoothed(
    task: &SceneTask<'_>,
    t1: &Pose,
    t2: &Pose,
    cfg: &SmoothingConfig,
    tau_mode: TauMode,
    use_eg: bool,
    optimize_t1: bool,
) -> Result<(TaskGradient, SmoothedPair, WitnessResult), SmoothingError> {
    let forward = task.forward(t1, t2);
    let (grad, pair) =
        grad_smoothed_at(task, t1, t2, &forward, cfg, tau_mode, use_eg, optimize_t1)?;
    Ok((grad, pair, forward))
}
