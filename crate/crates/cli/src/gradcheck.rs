//! Jacobian verification: analytic blocks against finite differences of the
//! frozen-candidate surrogate, plus the gradient-transport identity.

use diffwitness_core::geom::CompositeShape;
use diffwitness_core::gradient::{
    block_relative_errors, witness_jacobians, FrozenSurrogate, LossConfig, SceneTask, TauMode,
};
use diffwitness_core::math::Vec3;
use diffwitness_core::random::{derive_seed, rng_from_seed, standard_normal, uniform_rotation, unit_vector};
use diffwitness_core::se3::{equivalent_transport, exp_map, Pose, Twist};
use diffwitness_core::smoothing::{smoothed_witness, SamplingConfig, ScoreKind, SmoothingConfig};
use rand::Rng;

pub const BLOCK_NAMES: [&str; 4] = ["dx1/dxi1", "dx2/dxi2", "dx1/dxi2", "dx2/dxi1"];
/// Finite-difference step for the surrogate oracle.
pub const FD_STEP: f64 = 1e-6;
/// CLI failure threshold on the worst relative block error.
pub const FAIL_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct GradcheckReport {
    pub probes_run: usize,
    /// Max relative error per Jacobian block across all probes.
    pub block_errors: [f64; 4],
    /// Max Frobenius residual of the transport identity.
    pub max_transport_residual: f64,
    pub pass: bool,
    pub vacuous: bool,
}

/// Compare analytic and finite-difference Jacobians over random
/// configurations of the shape pair, and exercise the relative-pose
/// transport identity. `corrupt_cross` perturbs one cross block to verify
/// the check actually detects errors.
pub fn run_gradcheck(
    shape1: &CompositeShape,
    shape2: &CompositeShape,
    n_probes: usize,
    seed: u64,
    corrupt_cross: bool,
) -> GradcheckReport {
    if n_probes == 0 {
        return GradcheckReport {
            probes_run: 0,
            block_errors: [0.0; 4],
            max_transport_residual: 0.0,
            pass: true,
            vacuous: true,
        };
    }

    let bank1 = shape1.surface_bank(256, derive_seed(seed, 1));
    let bank2 = shape2.surface_bank(256, derive_seed(seed, 2));
    let mut rng = rng_from_seed(seed);
    let scale = (shape1.diag + shape2.diag) * 0.5;

    let mut block_errors = [0.0f64; 4];
    let mut max_transport = 0.0f64;
    let mut probes_run = 0;

    while probes_run < n_probes {
        let t1 = Pose::new(uniform_rotation(&mut rng), Vec3::ZERO);
        let t2 = Pose::new(
            uniform_rotation(&mut rng),
            unit_vector(&mut rng) * rng.gen_range(0.4..1.6) * scale,
        );
        let target1 = shape1.source_mesh.vertices
            [rng.gen_range(0..shape1.source_mesh.vertex_count())];
        let target2 = shape2.source_mesh.vertices
            [rng.gen_range(0..shape2.source_mesh.vertex_count())];

        let task = SceneTask {
            shape1,
            shape2,
            bank1: &bank1,
            bank2: &bank2,
            target1_local: target1,
            target2_local: target2,
            loss: LossConfig::default(),
        };
        let forward = task.forward(&t1, &t2);
        let (tw1, tw2) = task.targets_world(&t1, &t2);
        let cfg = SmoothingConfig {
            sampling: SamplingConfig::adaptive(),
            score: ScoreKind::Distance,
            seed: derive_seed(seed, probes_run as u64),
            direction_tau: None,
        };
        let Ok(pair) = smoothed_witness(
            shape1, &t1, shape2, &t2, &forward, &bank1, &bank2, &cfg, tw1, tw2,
        ) else {
            continue;
        };
        probes_run += 1;

        for tau_mode in [TauMode::StopGradient, TauMode::Propagate] {
            let mut analytic =
                witness_jacobians(&pair, &forward, &t1, &t2, ScoreKind::Distance, tau_mode);
            if corrupt_cross {
                analytic.dx1_dxi2.m[0][0] += 0.05 * (1.0 + analytic.dx1_dxi2.max_abs());
            }
            let surrogate = FrozenSurrogate::new(&pair, &forward, ScoreKind::Distance, tau_mode);
            let fd = surrogate.fd_jacobians(&t1, &t2, FD_STEP);
            let errs = block_relative_errors(&analytic, &fd);
            for (worst, err) in block_errors.iter_mut().zip(errs) {
                *worst = worst.max(err);
            }
        }

        // Transport identity at this probe's poses.
        let xi = Twist::new(
            unit_vector(&mut rng) * rng.gen_range(0.0..core::f64::consts::PI),
            Vec3::new(
                standard_normal(&mut rng),
                standard_normal(&mut rng),
                standard_normal(&mut rng),
            ),
        );
        for lambda in [1e-3, 0.3, 10.0] {
            let transported = equivalent_transport(&t1, &t2, xi);
            let lhs = t1
                .compose(&exp_map(xi.scale(-lambda)))
                .inverse()
                .compose(&t2);
            let rhs = t1
                .inverse()
                .compose(&t2.compose(&exp_map(transported.scale(-lambda))));
            max_transport = max_transport.max(lhs.matrix_distance(&rhs));
        }
    }

    let worst_block = block_errors.iter().fold(0.0f64, |a, &b| a.max(b));
    GradcheckReport {
        probes_run,
        block_errors,
        max_transport_residual: max_transport,
        pass: worst_block < FAIL_THRESHOLD && max_transport < 1e-9,
        vacuous: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn healthy_icosahedra_pass() {
        let a = shapes::bundled("icosahedron", 0.1).unwrap();
        let b = shapes::bundled("icosahedron", 0.08).unwrap();
        let report = run_gradcheck(&a, &b, 25, 3, false);
        assert!(report.pass, "block errors {:?}", report.block_errors);
        assert!(report.block_errors.iter().all(|&e| e < 1e-4));
    }

    #[test]
    fn corrupted_cross_term_is_detected() {
        let a = shapes::bundled("icosahedron", 0.1).unwrap();
        let b = shapes::bundled("icosahedron", 0.08).unwrap();
        let report = run_gradcheck(&a, &b, 10, 3, true);
        assert!(!report.pass);
    }

    #[test]
    fn zero_probes_is_vacuous_pass() {
        let a = shapes::bundled("cube", 0.1).unwrap();
        let b = shapes::bundled("cube", 0.1).unwrap();
        let report = run_gradcheck(&a, &b, 0, 3, false);
        assert!(report.pass && report.vacuous);
    }
}
