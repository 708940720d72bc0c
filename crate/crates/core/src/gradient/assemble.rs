//! Pull loss partials back to twist coordinates and apply gradient transport.

use super::jacobians::WitnessJacobians;
use crate::math::Vec3;
use crate::se3::{equivalent_transport, Pose, Twist};

/// Gradient of the loss with respect to both poses in se(3) coordinates.
#[derive(Clone, Copy, Debug, Default)]
pub struct TaskGradient {
    pub xi1: Twist,
    pub xi2: Twist,
    /// The twist actually applied to pose 2: `ξ₂ + ξ̃₂` with equivalent
    /// gradient transport enabled, plain `ξ₂` otherwise.
    pub xi2_total: Twist,
}

impl TaskGradient {
    pub fn is_finite(&self) -> bool {
        self.xi1.is_finite() && self.xi2.is_finite() && self.xi2_total.is_finite()
    }
}

fn add6(a: [f64; 6], b: [f64; 6]) -> [f64; 6] {
    let mut out = [0.0; 6];
    for i in 0..6 {
        out[i] = a[i] + b[i];
    }
    out
}

/// `ξᵢ = Σ Jᵀ (∂L/∂x)` over both witness points plus per-pose target
/// pullbacks, then transport.
///
/// The world-frame targets ride their poses (`tᵢ = Tᵢ(t_{i,o})`), so each
/// pose's gradient carries a `∂tᵢ/∂ξᵢ`-pullback of the loss partial with
/// respect to its own target; omitting it makes the optimizer chase a target
/// it is itself dragging along.
///
/// With `optimize_t1` both twists are returned for independent updates and
/// no transport is applied; otherwise `use_eg` adds the object-1 gradient,
/// transported to pose 2, into `xi2_total`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_pose_gradients(
    jac: &WitnessJacobians,
    dldx1: Vec3,
    dldx2: Vec3,
    target_pull1: Twist,
    target_pull2: Twist,
    t1: &Pose,
    t2: &Pose,
    use_eg: bool,
    optimize_t1: bool,
) -> TaskGradient {
    let xi1 = Twist::from_array(add6(
        jac.dx1_dxi1.transpose_mul(dldx1),
        jac.dx2_dxi1.transpose_mul(dldx2),
    ))
    .add(target_pull1);
    let xi2 = Twist::from_array(add6(
        jac.dx2_dxi2.transpose_mul(dldx2),
        jac.dx1_dxi2.transpose_mul(dldx1),
    ))
    .add(target_pull2);
    let xi2_total = if !optimize_t1 && use_eg {
        xi2.add(equivalent_transport(t1, t2, xi1))
    } else {
        xi2
    };
    TaskGradient {
        xi1,
        xi2,
        xi2_total,
    }
}

/// Pullback of the target-matching partial through the rigid transport of
/// the local target point: `D(t_o)ᵀ · 2(tʷ − x)`.
pub fn target_pullback(pose: &Pose, target_local: Vec3, target_world: Vec3, x: Vec3) -> Twist {
    Twist::from_array(
        pose.point_jacobian(target_local)
            .transpose_mul((target_world - x) * 2.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{Mat3, Mat3x6};

    fn rigid_jac() -> WitnessJacobians {
        let j = Mat3x6::from_blocks(&Mat3::skew(Vec3::new(0.1, 0.2, 0.3)), &Mat3::IDENTITY);
        WitnessJacobians {
            dx1_dxi1: j,
            dx2_dxi2: j,
            dx1_dxi2: Mat3x6::ZERO,
            dx2_dxi1: Mat3x6::ZERO,
        }
    }

    #[test]
    fn zero_partials_give_zero_twists() {
        let g = assemble_pose_gradients(
            &rigid_jac(),
            Vec3::ZERO,
            Vec3::ZERO,
            Twist::ZERO,
            Twist::ZERO,
            &Pose::IDENTITY,
            &Pose::IDENTITY,
            true,
            false,
        );
        assert_eq!(g.xi1, Twist::ZERO);
        assert_eq!(g.xi2, Twist::ZERO);
        assert_eq!(g.xi2_total, Twist::ZERO);
    }

    #[test]
    fn equal_poses_transport_negates_xi1() {
        let pose = Pose::from_translation(Vec3::new(0.3, -0.2, 0.9));
        let g = assemble_pose_gradients(
            &rigid_jac(),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::ZERO,
            Twist::ZERO,
            Twist::ZERO,
            &pose,
            &pose,
            true,
            false,
        );
        // At T₁ = T₂ the adjoint is the identity, so the transported term is
        // exactly −ξ₁.
        let expected = g.xi2.add(g.xi1.scale(-1.0));
        assert!((g.xi2_total.omega - expected.omega).norm() < 1e-12);
        assert!((g.xi2_total.v - expected.v).norm() < 1e-12);
    }

    #[test]
    fn joint_mode_skips_transport() {
        let pose = Pose::from_translation(Vec3::new(0.3, -0.2, 0.9));
        let g = assemble_pose_gradients(
            &rigid_jac(),
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::new(-1.0, 0.5, 0.0),
            Twist::ZERO,
            Twist::ZERO,
            &Pose::IDENTITY,
            &pose,
            true,
            true,
        );
        assert_eq!(g.xi2_total, g.xi2);
    }

    #[test]
    fn rigid_target_term_cancels_for_translations() {
        // Both the witness and the target ride the same pose: translating it
        // cannot change ‖x − t‖², so the translation part of the combined
        // gradient must vanish when the witness transports rigidly.
        let pose = Pose::IDENTITY;
        let x_local = Vec3::new(0.4, 0.1, -0.2);
        let t_local = Vec3::new(-0.1, 0.3, 0.2);
        let x = pose.act(x_local);
        let t = pose.act(t_local);
        let dldx = (x - t) * 2.0;
        let jac = WitnessJacobians {
            dx1_dxi1: pose.point_jacobian(x_local),
            dx2_dxi2: Mat3x6::ZERO,
            dx1_dxi2: Mat3x6::ZERO,
            dx2_dxi1: Mat3x6::ZERO,
        };
        let pull = target_pullback(&pose, t_local, t, x);
        let g = assemble_pose_gradients(
            &jac,
            dldx,
            Vec3::ZERO,
            pull,
            Twist::ZERO,
            &pose,
            &pose,
            false,
            true,
        );
        assert!(g.xi1.v.norm() < 1e-14, "{:?}", g.xi1.v);
        // The rotation part must also vanish: the pair is rigid.
        assert!(g.xi1.omega.norm() < 1e-14, "{:?}", g.xi1.omega);
    }
}
