//! Minimal fixed-size linear algebra: 3-vectors, 3×3 and 4×4 matrices.
//!
//! Hand-rolled rather than pulled in as a dependency so the numerical kernels
//! stay `no_std`-clean and bit-reproducible across platforms.

use core::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::flt;

/// 3-vector of `f64`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    pub const X: Vec3 = Vec3 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: Vec3 = Vec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    #[inline(always)]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline(always)]
    pub const fn splat(v: f64) -> Self {
        Vec3 { x: v, y: v, z: v }
    }

    #[inline(always)]
    pub fn dot(self, rhs: Vec3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    #[inline(always)]
    pub fn cross(self, rhs: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * rhs.z - self.z * rhs.y,
            y: self.z * rhs.x - self.x * rhs.z,
            z: self.x * rhs.y - self.y * rhs.x,
        }
    }

    #[inline(always)]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline(always)]
    pub fn norm(self) -> f64 {
        flt::sqrt(self.norm_squared())
    }

    /// Unit vector in the same direction, or zero if the norm is below `eps`.
    #[inline]
    pub fn normalized_or_zero(self, eps: f64) -> Vec3 {
        let n = self.norm();
        if n > eps {
            self / n
        } else {
            Vec3::ZERO
        }
    }

    #[inline]
    pub fn normalized(self) -> Vec3 {
        self / self.norm()
    }

    #[inline(always)]
    pub fn distance(self, rhs: Vec3) -> f64 {
        (self - rhs).norm()
    }

    #[inline(always)]
    pub fn distance_squared(self, rhs: Vec3) -> f64 {
        (self - rhs).norm_squared()
    }

    #[inline]
    pub fn min_by_component(self, rhs: Vec3) -> Vec3 {
        Vec3::new(
            flt::min(self.x, rhs.x),
            flt::min(self.y, rhs.y),
            flt::min(self.z, rhs.z),
        )
    }

    #[inline]
    pub fn max_by_component(self, rhs: Vec3) -> Vec3 {
        Vec3::new(
            flt::max(self.x, rhs.x),
            flt::max(self.y, rhs.y),
            flt::max(self.z, rhs.z),
        )
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    /// Any unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthonormal(self) -> Vec3 {
        let candidate = if flt::abs(self.x) <= flt::abs(self.y) && flt::abs(self.x) <= flt::abs(self.z)
        {
            Vec3::X
        } else if flt::abs(self.y) <= flt::abs(self.z) {
            Vec3::Y
        } else {
            Vec3::Z
        };
        self.cross(candidate).normalized()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline(always)]
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl AddAssign for Vec3 {
    #[inline(always)]
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline(always)]
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl SubAssign for Vec3 {
    #[inline(always)]
    fn sub_assign(&mut self, rhs: Vec3) {
        *self = *self - rhs;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline(always)]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline(always)]
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline(always)]
    fn mul(self, rhs: Vec3) -> Vec3 {
        rhs * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline(always)]
    fn div(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x / rhs, self.y / rhs, self.z / rhs)
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    #[inline(always)]
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index out of range"),
        }
    }
}

impl IndexMut<usize> for Vec3 {
    #[inline(always)]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vec3 index out of range"),
        }
    }
}

/// 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };
    pub const ZERO: Mat3 = Mat3 { m: [[0.0; 3]; 3] };

    #[inline]
    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Self {
        Mat3 {
            m: [r0.to_array(), r1.to_array(), r2.to_array()],
        }
    }

    #[inline]
    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        Mat3 {
            m: [
                [c0.x, c1.x, c2.x],
                [c0.y, c1.y, c2.y],
                [c0.z, c1.z, c2.z],
            ],
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::from_array(self.m[i])
    }

    #[inline]
    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    #[inline]
    pub fn transpose(&self) -> Mat3 {
        Mat3::from_cols(self.row(0), self.row(1), self.row(2))
    }

    /// Skew-symmetric cross-product matrix: `skew(w) * v == w × v`.
    #[inline]
    pub fn skew(w: Vec3) -> Mat3 {
        Mat3 {
            m: [
                [0.0, -w.z, w.y],
                [w.z, 0.0, -w.x],
                [-w.y, w.x, 0.0],
            ],
        }
    }

    /// Inverse of the skew embedding: assumes `self` is skew-symmetric.
    #[inline]
    pub fn vee(&self) -> Vec3 {
        Vec3::new(self.m[2][1], self.m[0][2], self.m[1][0])
    }

    /// Outer product `a bᵀ`.
    #[inline]
    pub fn outer(a: Vec3, b: Vec3) -> Mat3 {
        Mat3 {
            m: [
                [a.x * b.x, a.x * b.y, a.x * b.z],
                [a.y * b.x, a.y * b.y, a.y * b.z],
                [a.z * b.x, a.z * b.y, a.z * b.z],
            ],
        }
    }

    #[inline]
    pub fn determinant(&self) -> f64 {
        self.row(0).dot(self.row(1).cross(self.row(2)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for r in &self.m {
            for v in r {
                s += v * v;
            }
        }
        flt::sqrt(s)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|r| r.iter().all(|v| v.is_finite()))
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    #[inline(always)]
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }
}

impl Mul<Mat3> for Mat3 {
    type Output = Mat3;
    #[inline]
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.row(i).dot(rhs.col(j));
            }
        }
        out
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    #[inline]
    fn mul(self, s: f64) -> Mat3 {
        let mut out = self;
        for r in &mut out.m {
            for v in r {
                *v *= s;
            }
        }
        out
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    #[inline]
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    #[inline]
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] -= rhs.m[i][j];
            }
        }
        out
    }
}

/// 4×4 matrix, row-major. Used for homogeneous pose matrices and ambient
/// gradients; not a general linear-algebra workhorse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4 {
    pub m: [[f64; 4]; 4],
}

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4 {
        m: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    };
    pub const ZERO: Mat4 = Mat4 { m: [[0.0; 4]; 4] };

    /// Homogeneous matrix `[R t; 0 1]`.
    pub fn from_rotation_translation(r: &Mat3, t: Vec3) -> Mat4 {
        let mut out = Mat4::IDENTITY;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = r.m[i][j];
            }
            out.m[i][3] = t[i];
        }
        out
    }

    #[inline]
    pub fn top_left(&self) -> Mat3 {
        let mut out = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[i][j];
            }
        }
        out
    }

    #[inline]
    pub fn top_right(&self) -> Vec3 {
        Vec3::new(self.m[0][3], self.m[1][3], self.m[2][3])
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for r in &self.m {
            for v in r {
                s += v * v;
            }
        }
        flt::sqrt(s)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|r| r.iter().all(|v| v.is_finite()))
    }
}

impl Mul<Mat4> for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = Mat4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for (k, rhs_row) in rhs.m.iter().enumerate() {
                    s += self.m[i][k] * rhs_row[j];
                }
                out.m[i][j] = s;
            }
        }
        out
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] -= rhs.m[i][j];
            }
        }
        out
    }
}

/// 3×6 Jacobian block: derivative of a world-space point with respect to a
/// twist in `(ω, v)` coordinate order (rotation columns 0..3, translation
/// columns 3..6).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3x6 {
    pub m: [[f64; 6]; 3],
}

impl Mat3x6 {
    pub const ZERO: Mat3x6 = Mat3x6 { m: [[0.0; 6]; 3] };

    /// Assemble from two 3×3 blocks: `[rot | trans]`.
    pub fn from_blocks(rot: &Mat3, trans: &Mat3) -> Mat3x6 {
        let mut out = Mat3x6::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = rot.m[i][j];
                out.m[i][j + 3] = trans.m[i][j];
            }
        }
        out
    }

    #[inline]
    pub fn column(&self, j: usize) -> Vec3 {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn set_column(&mut self, j: usize, v: Vec3) {
        self.m[0][j] = v.x;
        self.m[1][j] = v.y;
        self.m[2][j] = v.z;
    }

    /// `selfᵀ · g`: pulls a point-space gradient back to twist coordinates.
    pub fn transpose_mul(&self, g: Vec3) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.column(j).dot(g);
        }
        out
    }

    /// `self · xi` for a twist in coordinate form.
    pub fn mul_twist(&self, xi: &[f64; 6]) -> Vec3 {
        let mut out = Vec3::ZERO;
        for (j, &c) in xi.iter().enumerate() {
            out += self.column(j) * c;
        }
        out
    }

    /// `m · self` with a 3×3 matrix on the left.
    pub fn left_mul(&self, m: &Mat3) -> Mat3x6 {
        let mut out = Mat3x6::ZERO;
        for j in 0..6 {
            out.set_column(j, *m * self.column(j));
        }
        out
    }

    /// Rank-one update `self += a bᵀ` where `b` is a 6-row.
    pub fn add_outer(&mut self, a: Vec3, b: &[f64; 6]) {
        for j in 0..6 {
            self.m[0][j] += a.x * b[j];
            self.m[1][j] += a.y * b[j];
            self.m[2][j] += a.z * b[j];
        }
    }

    pub fn scale(&self, s: f64) -> Mat3x6 {
        let mut out = *self;
        for r in &mut out.m {
            for v in r {
                *v *= s;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, rhs: &Mat3x6) -> f64 {
        let mut worst = 0.0;
        for i in 0..3 {
            for j in 0..6 {
                worst = flt::max(worst, flt::abs(self.m[i][j] - rhs.m[i][j]));
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0;
        for r in &self.m {
            for v in r {
                worst = flt::max(worst, flt::abs(*v));
            }
        }
        worst
    }
}

impl Add for Mat3x6 {
    type Output = Mat3x6;
    fn add(self, rhs: Mat3x6) -> Mat3x6 {
        let mut out = self;
        for i in 0..3 {
            for j in 0..6 {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }
}
