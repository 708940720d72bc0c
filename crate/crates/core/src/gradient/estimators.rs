//! Zeroth-order baselines: central finite differences and Gaussian-smoothed
//! gradient estimation, both driving full forward collision queries.

use rand::Rng;

use super::assemble::TaskGradient;
use super::SceneTask;
use crate::random::{rng_from_seed, standard_normal};
use crate::se3::{equivalent_transport, exp_map, Pose, Twist};

/// Default rotation step for finite differences; the translation step is
/// this times the shape scale.
pub const FD_ROT_STEP: f64 = 1e-6;
/// Default Gaussian perturbation scale for the zeroth-order estimator.
pub const RS0_SIGMA: f64 = 1e-2;
/// Default sample count for the zeroth-order estimator.
pub const RS0_SAMPLES: usize = 12;

/// Central differences over the basis twists; each coordinate costs two full
/// forward collision queries.
///
/// `ξ₁` is only estimated when transport or joint optimization needs it.
pub fn grad_finite_difference(
    task: &SceneTask<'_>,
    t1: &Pose,
    t2: &Pose,
    h_rot: f64,
    h_trans: f64,
    use_eg: bool,
    optimize_t1: bool,
) -> TaskGradient {
    let need_xi1 = use_eg || optimize_t1;
    let fd_axis = |pose_is_t1: bool, j: usize| -> f64 {
        let h = if j < 3 { h_rot } else { h_trans };
        let step = Twist::basis(j).scale(h);
        let plus = exp_map(step);
        let minus = exp_map(step.scale(-1.0));
        let (lp, lm) = if pose_is_t1 {
            (
                task.forward_loss(&t1.compose(&plus), t2),
                task.forward_loss(&t1.compose(&minus), t2),
            )
        } else {
            (
                task.forward_loss(t1, &t2.compose(&plus)),
                task.forward_loss(t1, &t2.compose(&minus)),
            )
        };
        (lp - lm) / (2.0 * h)
    };

    let mut xi2 = [0.0; 6];
    for (j, slot) in xi2.iter_mut().enumerate() {
        *slot = fd_axis(false, j);
    }
    let mut xi1 = [0.0; 6];
    if need_xi1 {
        for (j, slot) in xi1.iter_mut().enumerate() {
            *slot = fd_axis(true, j);
        }
    }

    finish(
        Twist::from_array(xi1),
        Twist::from_array(xi2),
        t1,
        t2,
        use_eg,
        optimize_t1,
    )
}

/// Zeroth-order randomized smoothing: Gaussian twist perturbations around
/// the current poses.
///
/// With perturbations `δ = σζ`, `ζ ~ N(0, I)`, the estimator
/// `(1/(nσ²)) Σ [L(T exp(δ)) − L(T)] δ` is a consistent estimate of the
/// gradient. Deterministic in `seed`.
#[allow(clippy::too_many_arguments)]
pub fn grad_rs0(
    task: &SceneTask<'_>,
    t1: &Pose,
    t2: &Pose,
    sigma: f64,
    n_samples: usize,
    seed: u64,
    use_eg: bool,
    optimize_t1: bool,
) -> TaskGradient {
    assert!(sigma > 0.0 && n_samples >= 1);
    let need_xi1 = use_eg || optimize_t1;
    let base = task.forward_loss(t1, t2);
    let mut rng = rng_from_seed(seed);

    let mut acc1 = [0.0; 6];
    let mut acc2 = [0.0; 6];
    for _ in 0..n_samples {
        let mut z1 = [0.0; 6];
        let mut z2 = [0.0; 6];
        if need_xi1 {
            for slot in &mut z1 {
                *slot = standard_normal(&mut rng);
            }
        }
        for slot in &mut z2 {
            *slot = standard_normal(&mut rng);
        }
        let p1 = t1.compose(&exp_map(Twist::from_array(z1).scale(sigma)));
        let p2 = t2.compose(&exp_map(Twist::from_array(z2).scale(sigma)));
        let delta = task.forward_loss(&p1, &p2) - base;
        for j in 0..6 {
            acc1[j] += delta * z1[j] * sigma;
            acc2[j] += delta * z2[j] * sigma;
        }
    }
    let norm = 1.0 / (n_samples as f64 * sigma * sigma);
    for j in 0..6 {
        acc1[j] *= norm;
        acc2[j] *= norm;
    }

    finish(
        Twist::from_array(acc1),
        Twist::from_array(acc2),
        t1,
        t2,
        use_eg,
        optimize_t1,
    )
}

fn finish(
    xi1: Twist,
    xi2: Twist,
    t1: &Pose,
    t2: &Pose,
    use_eg: bool,
    optimize_t1: bool,
) -> TaskGradient {
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

/// RS-0 sampling core against an arbitrary scalar function, exposed so the
/// estimator's statistics can be validated on synthetic losses.
pub fn rs0_estimate<F, R>(f: F, sigma: f64, n_samples: usize, rng: &mut R) -> [f64; 6]
where
    F: Fn(&Twist) -> f64,
    R: Rng,
{
    let base = f(&Twist::ZERO);
    let mut acc = [0.0; 6];
    for _ in 0..n_samples {
        let mut z = [0.0; 6];
        for slot in &mut z {
            *slot = standard_normal(rng);
        }
        let xi = Twist::from_array(z).scale(sigma);
        let delta = f(&xi) - base;
        for j in 0..6 {
            acc[j] += delta * z[j] * sigma;
        }
    }
    let norm = 1.0 / (n_samples as f64 * sigma * sigma);
    for slot in &mut acc {
        *slot *= norm;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rs0_zero_on_constant_loss() {
        let mut rng = rng_from_seed(4);
        let est = rs0_estimate(|_| 3.5, 0.01, 64, &mut rng);
        assert!(est.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn rs0_is_consistent_on_linear_loss() {
        // L(ξ) = ⟨g, ξ⟩: the estimator mean converges to g.
        let g = [0.4, -1.2, 0.8, 2.0, -0.5, 0.1];
        let f = |xi: &Twist| {
            let a = xi.to_array();
            a.iter().zip(g.iter()).map(|(x, gi)| x * gi).sum::<f64>()
        };
        let n = 10_000;
        let mut rng = rng_from_seed(77);
        let est = rs0_estimate(f, 0.05, n, &mut rng);
        // Var of each coordinate is ≈ ‖g‖² / n; allow 3σ.
        let g_norm_sq: f64 = g.iter().map(|x| x * x).sum();
        let bound = 3.0 * (g_norm_sq / n as f64).sqrt() + 1e-12;
        for j in 0..6 {
            assert!(
                (est[j] - g[j]).abs() < bound,
                "coord {j}: {} vs {} (bound {bound})",
                est[j],
                g[j]
            );
        }
    }

    #[test]
    fn rs0_two_seeds_differ_but_agree_statistically() {
        let g = [1.0, 0.0, -0.7, 0.3, 0.9, -0.2];
        let f = |xi: &Twist| {
            let a = xi.to_array();
            a.iter().zip(g.iter()).map(|(x, gi)| x * gi).sum::<f64>()
        };
        let mut rng_a = rng_from_seed(1);
        let mut rng_b = rng_from_seed(2);
        let ea = rs0_estimate(f, 0.05, 12, &mut rng_a);
        let eb = rs0_estimate(f, 0.05, 12, &mut rng_b);
        assert!(ea != eb);
        let g_norm_sq: f64 = g.iter().map(|x| x * x).sum();
        let bound = 5.0 * (g_norm_sq / 12f64).sqrt();
        for j in 0..6 {
            assert!((ea[j] - g[j]).abs() < bound);
            assert!((eb[j] - g[j]).abs() < bound);
        }
    }
}
