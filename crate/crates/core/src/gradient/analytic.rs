//! Vertex–face analytical baseline.
//!
//! Witnesses are classified by their contributing feature. A vertex witness
//! moves rigidly with its own pose and ignores the other pose entirely (the
//! "stuck at vertices" failure mode); a face witness is the closest point on
//! a moving plane to the other witness, with the closed-form derivative of
//! that projection. Edge features contribute rigid transport only.

use super::assemble::{assemble_pose_gradients, TaskGradient};
use super::jacobians::WitnessJacobians;
use super::loss;
use super::SceneTask;
use crate::geom::ConvexPiece;
use crate::math::{Mat3, Mat3x6, Vec3};
use crate::narrowphase::{Feature, WitnessResult};
use crate::se3::Pose;

/// Derivative of the projection of the fixed point `q` onto the moving face
/// plane, with respect to a right twist on the plane's pose.
pub(crate) fn plane_projection_jacobian(
    pose: &Pose,
    anchor_local: Vec3,
    normal_local: Vec3,
    q: Vec3,
) -> Mat3x6 {
    let n = pose.rotate(normal_local);
    let a = pose.act(anchor_local);
    let s = (q - a).dot(n);
    let d_anchor = pose.point_jacobian(anchor_local);
    // dn under a right perturbation: rotation block −R[n₀]×, no translation.
    let d_normal = Mat3x6::from_blocks(&(pose.rotation * Mat3::skew(normal_local) * -1.0), &Mat3::ZERO);

    let mut out = Mat3x6::ZERO;
    for j in 0..6 {
        let dn = d_normal.column(j);
        let da = d_anchor.column(j);
        let ds = (q - a).dot(dn) - da.dot(n);
        out.set_column(j, -(n * ds) - dn * s);
    }
    out
}

fn face_plane_local(piece: &ConvexPiece, i: usize, j: usize, k: usize) -> (Vec3, Vec3) {
    let a = piece.vertices[i];
    let n = (piece.vertices[j] - a)
        .cross(piece.vertices[k] - a)
        .normalized_or_zero(1e-300);
    (a, n)
}

struct SideJacobians {
    own: Mat3x6,
    other: Mat3x6,
    fallback: bool,
}

/// Jacobians of one witness: `own` w.r.t. its own pose, `other` w.r.t. the
/// other pose (through the projection of the other witness when the feature
/// is a face).
fn side_jacobians(
    piece: &ConvexPiece,
    pose: &Pose,
    witness_local: Vec3,
    feature: Feature,
    other_witness_world: Vec3,
    other_rigid: &Mat3x6,
) -> SideJacobians {
    match feature {
        Feature::Vertex(_) | Feature::Edge(_, _) => SideJacobians {
            own: pose.point_jacobian(witness_local),
            other: Mat3x6::ZERO,
            fallback: false,
        },
        Feature::Face(i, j, k) => {
            let (anchor, n_local) = face_plane_local(piece, i, j, k);
            if n_local == Vec3::ZERO {
                // Degenerate face: rigid transport fallback.
                return SideJacobians {
                    own: pose.point_jacobian(witness_local),
                    other: Mat3x6::ZERO,
                    fallback: true,
                };
            }
            let n_world = pose.rotate(n_local);
            let reject = |m: &Mat3x6| {
                let mut out = *m;
                for c in 0..6 {
                    let col = m.column(c);
                    out.set_column(c, col - n_world * n_world.dot(col));
                }
                out
            };
            SideJacobians {
                own: plane_projection_jacobian(pose, anchor, n_local, other_witness_world),
                other: reject(other_rigid),
                fallback: false,
            }
        }
    }
}

/// Analytical gradient at an already-computed forward witness.
pub fn grad_analytical_at(
    task: &SceneTask<'_>,
    t1: &Pose,
    t2: &Pose,
    w: &WitnessResult,
    use_eg: bool,
    optimize_t1: bool,
) -> (TaskGradient, bool) {
    let piece1 = &task.shape1.pieces[w.piece1];
    let piece2 = &task.shape2.pieces[w.piece2];

    let rigid1 = t1.point_jacobian(w.x1_local);
    let rigid2 = t2.point_jacobian(w.x2_local);

    let side1 = side_jacobians(piece1, t1, w.x1_local, w.feature1, w.x2_world, &rigid2);
    let side2 = side_jacobians(piece2, t2, w.x2_local, w.feature2, w.x1_world, &rigid1);

    let jac = WitnessJacobians {
        dx1_dxi1: side1.own,
        dx2_dxi2: side2.own,
        dx1_dxi2: side1.other,
        dx2_dxi1: side2.other,
    };

    let (tw1, tw2) = task.targets_world(t1, t2);
    let (_, dldx1, dldx2) = loss(w.x1_world, w.x2_world, tw1, tw2, &task.loss);
    let pull1 = super::assemble::target_pullback(t1, task.target1_local, tw1, w.x1_world);
    let pull2 = super::assemble::target_pullback(t2, task.target2_local, tw2, w.x2_world);
    let grad =
        assemble_pose_gradients(&jac, dldx1, dldx2, pull1, pull2, t1, t2, use_eg, optimize_t1);
    (grad, side1.fallback || side2.fallback)
}

/// Analytical gradient, running the forward query itself.
pub fn grad_analytical(
    task: &SceneTask<'_>,
    t1: &Pose,
    t2: &Pose,
    use_eg: bool,
    optimize_t1: bool,
) -> (TaskGradient, WitnessResult, bool) {
    let w = task.forward(t1, t2);
    let (grad, fallback) = grad_analytical_at(task, t1, t2, &w, use_eg, optimize_t1);
    (grad, w, fallback)
}
