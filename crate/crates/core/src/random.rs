//! Seeded random draws used across sampling, task generation, and tests.
//!
//! Everything routes through `ChaCha8Rng` so that a given seed produces the
//! same stream on every platform, which the benchmark determinism contract
//! relies on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flt;
use crate::math::{Mat3, Vec3};

pub type SeedRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeedRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream from a parent seed and a context word.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer over the xor; avalanche is all we need.
    let mut z = (seed ^ salt.rotate_left(17)).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard normal draw via Box-Muller.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    flt::sqrt(-2.0 * flt::ln(u1)) * flt::cos(2.0 * core::f64::consts::PI * u2)
}

/// Uniform direction on the unit sphere.
pub fn unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Uniformly distributed rotation matrix from a normalized 4-normal quaternion.
pub fn uniform_rotation<R: Rng>(rng: &mut R) -> Mat3 {
    let q = [
        standard_normal(rng),
        standard_normal(rng),
        standard_normal(rng),
        standard_normal(rng),
    ];
    let n = flt::sqrt(q.iter().map(|v| v * v).sum());
    quaternion_to_matrix(q[0] / n, q[1] / n, q[2] / n, q[3] / n)
}

/// Rotation matrix from a unit quaternion (w, x, y, z).
pub fn quaternion_to_matrix(w: f64, x: f64, y: f64, z: f64) -> Mat3 {
    Mat3 {
        m: [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_orthonormal() {
        let mut rng = rng_from_seed(7);
        for _ in 0..100 {
            let r = uniform_rotation(&mut rng);
            let rtr = r.transpose() * r;
            assert!((rtr - Mat3::IDENTITY).frobenius_norm() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_draws_have_plausible_moments() {
        let mut rng = rng_from_seed(42);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = standard_normal(&mut rng);
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<f64> = {
            let mut rng = rng_from_seed(3);
            (0..16).map(|_| standard_normal(&mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = rng_from_seed(3);
            (0..16).map(|_| standard_normal(&mut rng)).collect()
        };
        assert_eq!(a, b);
    }
}
