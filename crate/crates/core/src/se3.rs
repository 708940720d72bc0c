//! SE(3) rigid-body transforms and se(3) twists.
//!
//! Poses are stored as `(R, t)`; the homogeneous 4×4 form is only
//! materialized for the ambient-gradient projection and for tests. Twists use
//! `(ω, v)` coordinate order and all twist-valued derivatives in this crate
//! are right-perturbation coordinates: the derivative at ε = 0 of a quantity
//! under `T ← T · exp(ε ê)`.

use crate::flt;
use crate::math::{Mat3, Mat3x6, Mat4, Vec3};

/// Rigid-body transform: rotation `R` and translation `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: Mat3,
    pub translation: Vec3,
}

/// Element of se(3): angular part `omega` (radians) and linear part `v`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Twist {
    pub omega: Vec3,
    pub v: Vec3,
}

/// Gradient of a scalar with respect to the 4×4 homogeneous matrix entries.
/// Consumers ignore the bottom row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientGradient(pub Mat4);

impl Twist {
    pub const ZERO: Twist = Twist {
        omega: Vec3::ZERO,
        v: Vec3::ZERO,
    };

    pub fn new(omega: Vec3, v: Vec3) -> Self {
        Twist { omega, v }
    }

    /// Coordinates in `(ω, v)` order, matching `Mat3x6` columns.
    pub fn to_array(self) -> [f64; 6] {
        [
            self.omega.x,
            self.omega.y,
            self.omega.z,
            self.v.x,
            self.v.y,
            self.v.z,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Twist {
            omega: Vec3::new(a[0], a[1], a[2]),
            v: Vec3::new(a[3], a[4], a[5]),
        }
    }

    /// Basis twist ê_i, i < 3 rotational, 3 ≤ i < 6 translational.
    pub fn basis(i: usize) -> Self {
        let mut a = [0.0; 6];
        a[i] = 1.0;
        Twist::from_array(a)
    }

    /// 4×4 matrix form `[[ω]× v; 0 0]`.
    pub fn hat(self) -> Mat4 {
        let mut m = Mat4::ZERO;
        let sk = Mat3::skew(self.omega);
        for i in 0..3 {
            for j in 0..3 {
                m.m[i][j] = sk.m[i][j];
            }
            m.m[i][3] = self.v[i];
        }
        m
    }

    pub fn scale(self, s: f64) -> Twist {
        Twist {
            omega: self.omega * s,
            v: self.v * s,
        }
    }

    pub fn add(self, rhs: Twist) -> Twist {
        Twist {
            omega: self.omega + rhs.omega,
            v: self.v + rhs.v,
        }
    }

    pub fn norm(self) -> f64 {
        flt::sqrt(self.omega.norm_squared() + self.v.norm_squared())
    }

    pub fn is_finite(self) -> bool {
        self.omega.is_finite() && self.v.is_finite()
    }
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        rotation: Mat3::IDENTITY,
        translation: Vec3::ZERO,
    };

    pub fn new(rotation: Mat3, translation: Vec3) -> Self {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn from_translation(t: Vec3) -> Self {
        Pose::new(Mat3::IDENTITY, t)
    }

    /// Apply to a point: `R x + t`.
    #[inline(always)]
    pub fn act(&self, point: Vec3) -> Vec3 {
        self.rotation * point + self.translation
    }

    /// Rotate a direction without translating it.
    #[inline(always)]
    pub fn rotate(&self, dir: Vec3) -> Vec3 {
        self.rotation * dir
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Composition `self ∘ rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * rhs.rotation,
            translation: self.rotation * rhs.translation + self.translation,
        }
    }

    /// Map a point from `self`'s frame into `other`'s frame.
    pub fn inverse_act(&self, point: Vec3) -> Vec3 {
        self.rotation.transpose() * (point - self.translation)
    }

    pub fn matrix(&self) -> Mat4 {
        Mat4::from_rotation_translation(&self.rotation, self.translation)
    }

    /// Deviation from orthonormality, `‖RᵀR − I‖_F`, plus determinant check.
    pub fn rotation_defect(&self) -> f64 {
        let d = (self.rotation.transpose() * self.rotation) - Mat3::IDENTITY;
        flt::max(
            d.frobenius_norm(),
            flt::abs(self.rotation.determinant() - 1.0),
        )
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.translation.is_finite() && self.rotation.is_finite() && self.rotation_defect() < tol
    }

    /// Frobenius distance between homogeneous matrices.
    pub fn matrix_distance(&self, rhs: &Pose) -> f64 {
        (self.matrix() - rhs.matrix()).frobenius_norm()
    }

    /// Jacobian of `self.act(local)` with respect to a right twist on `self`:
    /// rotation block `−R [p]×`, translation block `R`.
    pub fn point_jacobian(&self, local: Vec3) -> Mat3x6 {
        let rot = self.rotation * Mat3::skew(local) * -1.0;
        Mat3x6::from_blocks(&rot, &self.rotation)
    }
}

/// Closed-form exponential map se(3) → SE(3).
///
/// Rodrigues rotation plus the V-matrix translation; below ‖ω‖ = 1e-6 the
/// trigonometric coefficients switch to their Taylor expansions.
pub fn exp_map(xi: Twist) -> Pose {
    let theta_sq = xi.omega.norm_squared();
    let theta = flt::sqrt(theta_sq);
    let sk = Mat3::skew(xi.omega);
    let sk2 = sk * sk;

    let (a, b, c) = if theta < 1e-6 {
        // sin θ/θ, (1−cos θ)/θ², (θ−sin θ)/θ³
        (
            1.0 - theta_sq / 6.0,
            0.5 - theta_sq / 24.0,
            1.0 / 6.0 - theta_sq / 120.0,
        )
    } else {
        let s = flt::sin(theta);
        let cth = flt::cos(theta);
        (
            s / theta,
            (1.0 - cth) / theta_sq,
            (theta - s) / (theta_sq * theta),
        )
    };

    let rotation = Mat3::IDENTITY + sk * a + sk2 * b;
    let v_mat = Mat3::IDENTITY + sk * b + sk2 * c;
    Pose {
        rotation,
        translation: v_mat * xi.v,
    }
}

/// Adjoint action `Ad_T(ξ)`: `ω' = Rω`, `v' = Rv + t × (Rω)`.
pub fn adjoint(pose: &Pose, xi: Twist) -> Twist {
    let r_omega = pose.rotation * xi.omega;
    Twist {
        omega: r_omega,
        v: pose.rotation * xi.v + pose.translation.cross(r_omega),
    }
}

/// Orthogonal projection of the ambient gradient onto se(3).
///
/// Forms `M = T⁻¹ G` (bottom row of `G` zeroed first), skew-symmetrizes the
/// rotation block, and copies the translation column.
pub fn project_to_algebra(pose: &Pose, grad: &AmbientGradient) -> Twist {
    let mut g = grad.0;
    for j in 0..4 {
        g.m[3][j] = 0.0;
    }
    let m = pose.inverse().matrix() * g;
    let a = m.top_left();
    let skew_part = (a - a.transpose()) * 0.5;
    Twist {
        omega: skew_part.vee(),
        v: m.top_right(),
    }
}

/// Transport a gradient twist on `t1` to the twist on `t2` producing the
/// identical relative-pose update: `ξ̃₂ = −Ad_{T₂⁻¹ T₁}(ξ₁)`.
pub fn equivalent_transport(t1: &Pose, t2: &Pose, xi1: Twist) -> Twist {
    let rel = t2.inverse().compose(t1);
    adjoint(&rel, xi1).scale(-1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{rng_from_seed, standard_normal, uniform_rotation, unit_vector};
    use rand::Rng;

    fn random_pose<R: Rng>(rng: &mut R) -> Pose {
        Pose::new(
            uniform_rotation(rng),
            Vec3::new(
                standard_normal(rng),
                standard_normal(rng),
                standard_normal(rng),
            ),
        )
    }

    fn random_twist<R: Rng>(rng: &mut R) -> Twist {
        Twist::new(
            unit_vector(rng) * rng.gen_range(0.0..core::f64::consts::PI),
            Vec3::new(
                standard_normal(rng),
                standard_normal(rng),
                standard_normal(rng),
            ),
        )
    }

    #[test]
    fn act_identity_and_translation() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(Pose::IDENTITY.act(p), p);
        let t = Pose::from_translation(Vec3::X);
        assert_eq!(t.act(Vec3::ZERO), Vec3::X);
    }

    #[test]
    fn act_quarter_turn_about_z() {
        let pose = exp_map(Twist::new(
            Vec3::new(0.0, 0.0, core::f64::consts::FRAC_PI_2),
            Vec3::ZERO,
        ));
        let got = pose.act(Vec3::X);
        assert!((got - Vec3::Y).norm() < 1e-12, "{got:?}");
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let pose = exp_map(Twist::ZERO);
        assert!(pose.matrix_distance(&Pose::IDENTITY) < 1e-15);
    }

    #[test]
    fn exp_pure_rotation() {
        let pose = exp_map(Twist::new(
            Vec3::new(0.0, 0.0, core::f64::consts::FRAC_PI_2),
            Vec3::ZERO,
        ));
        assert!(pose.translation.norm() < 1e-15);
        assert!((pose.rotation * Vec3::X - Vec3::Y).norm() < 1e-12);
    }

    #[test]
    fn exp_inverse_consistency() {
        let mut rng = rng_from_seed(11);
        for _ in 0..500 {
            let xi = random_twist(&mut rng);
            let roundtrip = exp_map(xi).compose(&exp_map(xi.scale(-1.0)));
            assert!(roundtrip.matrix_distance(&Pose::IDENTITY) < 1e-10);
        }
    }

    #[test]
    fn exp_stays_orthonormal() {
        let mut rng = rng_from_seed(13);
        for _ in 0..10_000 {
            let xi = random_twist(&mut rng);
            assert!(exp_map(xi).rotation_defect() < 1e-10);
        }
    }

    #[test]
    fn adjoint_of_identity_is_identity() {
        let mut rng = rng_from_seed(17);
        let xi = random_twist(&mut rng);
        let out = adjoint(&Pose::IDENTITY, xi);
        assert!((out.omega - xi.omega).norm() < 1e-15);
        assert!((out.v - xi.v).norm() < 1e-15);
    }

    #[test]
    fn adjoint_pure_translation() {
        let t = Vec3::new(0.4, -0.3, 1.1);
        let pose = Pose::from_translation(t);
        let omega = Vec3::new(0.2, 0.5, -0.1);
        let out = adjoint(&pose, Twist::new(omega, Vec3::ZERO));
        assert!((out.omega - omega).norm() < 1e-15);
        assert!((out.v - t.cross(omega)).norm() < 1e-15);
    }

    #[test]
    fn adjoint_matches_matrix_conjugation() {
        let mut rng = rng_from_seed(19);
        for _ in 0..200 {
            let pose = random_pose(&mut rng);
            let xi = random_twist(&mut rng);
            let lhs = pose.matrix() * xi.hat() * pose.inverse().matrix();
            let rhs = adjoint(&pose, xi).hat();
            assert!((lhs - rhs).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn adjoint_identity_through_exp() {
        // T exp(λξ) T⁻¹ = exp(λ Ad_T ξ)
        let mut rng = rng_from_seed(23);
        for _ in 0..500 {
            let pose = random_pose(&mut rng);
            let xi = random_twist(&mut rng);
            let lambda: f64 = rng.gen_range(-2.0..2.0);
            let lhs = pose
                .compose(&exp_map(xi.scale(lambda)))
                .compose(&pose.inverse());
            let rhs = exp_map(adjoint(&pose, xi).scale(lambda));
            assert!(lhs.matrix_distance(&rhs) < 1e-9);
        }
    }

    #[test]
    fn projection_of_zero_is_zero() {
        let mut rng = rng_from_seed(29);
        let pose = random_pose(&mut rng);
        let out = project_to_algebra(&pose, &AmbientGradient(Mat4::ZERO));
        assert_eq!(out, Twist::ZERO);
    }

    #[test]
    fn projection_at_identity_recovers_algebra_element() {
        let omega = Vec3::new(0.3, -0.2, 0.9);
        let v = Vec3::new(1.0, 0.5, -0.25);
        let g = AmbientGradient(Twist::new(omega, v).hat());
        let out = project_to_algebra(&Pose::IDENTITY, &g);
        assert!((out.omega - omega).norm() < 1e-15);
        assert!((out.v - v).norm() < 1e-15);
    }

    #[test]
    fn projection_left_inverse_of_embedding() {
        let mut rng = rng_from_seed(31);
        for _ in 0..200 {
            let pose = random_pose(&mut rng);
            let xi = random_twist(&mut rng);
            let embedded = AmbientGradient(pose.matrix() * xi.hat());
            let out = project_to_algebra(&pose, &embedded);
            assert!((out.omega - xi.omega).norm() < 1e-10);
            assert!((out.v - xi.v).norm() < 1e-10);
        }
    }

    #[test]
    fn projection_is_linear_in_gradient() {
        let mut rng = rng_from_seed(37);
        let pose = random_pose(&mut rng);
        let xi_a = random_twist(&mut rng);
        let xi_b = random_twist(&mut rng);
        let ga = pose.matrix() * xi_a.hat();
        let gb = pose.matrix() * xi_b.hat();
        let mut combined = Mat4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                combined.m[i][j] = 2.0 * ga.m[i][j] - 0.5 * gb.m[i][j];
            }
        }
        let out = project_to_algebra(&pose, &AmbientGradient(combined));
        let expect = xi_a.scale(2.0).add(xi_b.scale(-0.5));
        assert!((out.omega - expect.omega).norm() < 1e-10);
        assert!((out.v - expect.v).norm() < 1e-10);
    }

    /// Numeric directional derivatives of a smooth scalar on SE(3), embedded
    /// as `G = T ξ̂`, must be recovered by the projection.
    #[test]
    fn projection_reproduces_numeric_directional_derivatives() {
        let mut rng = rng_from_seed(41);
        // L(T) = ‖T(a) − b‖² for fixed points a, b.
        let a = Vec3::new(0.3, 0.7, -0.4);
        let b = Vec3::new(-0.5, 0.2, 0.9);
        let loss = |pose: &Pose| (pose.act(a) - b).norm_squared();
        for _ in 0..50 {
            let pose = random_pose(&mut rng);
            let h = 1e-6;
            let mut coords = [0.0; 6];
            for (i, c) in coords.iter_mut().enumerate() {
                let eh = Twist::basis(i).scale(h);
                let plus = loss(&pose.compose(&exp_map(eh)));
                let minus = loss(&pose.compose(&exp_map(eh.scale(-1.0))));
                *c = (plus - minus) / (2.0 * h);
            }
            let fd_twist = Twist::from_array(coords);
            let embedded = AmbientGradient(pose.matrix() * fd_twist.hat());
            let out = project_to_algebra(&pose, &embedded);
            for i in 0..6 {
                assert!(
                    flt::abs(out.to_array()[i] - coords[i]) < 1e-5,
                    "component {i}: {} vs {}",
                    out.to_array()[i],
                    coords[i]
                );
            }
        }
    }

    #[test]
    fn transport_at_equal_poses_negates() {
        let mut rng = rng_from_seed(43);
        let pose = random_pose(&mut rng);
        let xi = random_twist(&mut rng);
        let out = equivalent_transport(&pose, &pose, xi);
        assert!((out.omega + xi.omega).norm() < 1e-12);
        assert!((out.v + xi.v).norm() < 1e-12);
    }

    #[test]
    fn transport_of_zero_is_zero() {
        let mut rng = rng_from_seed(47);
        let t1 = random_pose(&mut rng);
        let t2 = random_pose(&mut rng);
        assert_eq!(equivalent_transport(&t1, &t2, Twist::ZERO), Twist::ZERO);
    }

    /// Relative-pose identity: (T₁ exp(−λξ₁))⁻¹ T₂ = T₁⁻¹ (T₂ exp(−λ ξ̃₂)).
    #[test]
    fn transport_preserves_relative_pose() {
        let mut rng = rng_from_seed(53);
        for _ in 0..500 {
            let t1 = random_pose(&mut rng);
            let t2 = random_pose(&mut rng);
            let xi1 = random_twist(&mut rng);
            for lambda in [0.01, 0.5, 2.0] {
                let xi2 = equivalent_transport(&t1, &t2, xi1);
                let lhs = t1
                    .compose(&exp_map(xi1.scale(-lambda)))
                    .inverse()
                    .compose(&t2);
                let rhs = t1
                    .inverse()
                    .compose(&t2.compose(&exp_map(xi2.scale(-lambda))));
                assert!(lhs.matrix_distance(&rhs) < 1e-10);
            }
        }
    }
}
