use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::lie::so3::skew;
use crate::scalar::Scalar;

/// Tolerance on `‖q‖ − 1` accepted by operations that require a rotation.
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Hamilton quaternion `w + xi + yj + zk`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Quaternion<T: Scalar> {
    pub w: T,
    pub v: Vector3<T>,
}

impl<T: Scalar> Quaternion<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion {
            w,
            v: Vector3::new(x, y, z),
        }
    }

    pub fn from_parts(w: T, v: Vector3<T>) -> Self {
        Quaternion { w, v }
    }

    pub fn identity() -> Self {
        Self::from_parts(T::one(), Vector3::zeros())
    }

    pub fn zero() -> Self {
        Self::from_parts(T::zero(), Vector3::zeros())
    }

    /// Vector (pure) quaternion `[0, x]`.
    pub fn pure(x: Vector3<T>) -> Self {
        Self::from_parts(T::zero(), x)
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Coefficients ordered `[w, x, y, z]`.
    pub fn coords(&self) -> Vector4<T> {
        Vector4::new(self.w, self.v.x, self.v.y, self.v.z)
    }

    pub fn from_coords(c: &Vector4<T>) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(self.w, -self.v)
    }

    pub fn norm_squared(&self) -> T {
        self.w * self.w + self.v.norm_squared()
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm();
        Self::from_parts(self.w / n, self.v / n)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_parts(self.w * s, self.v * s)
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - T::one()).abs() < T::lit(UNIT_TOLERANCE)
    }

    /// Exponential map from a rotation vector: `[cos(θ/2), sin(θ/2) n]`.
    pub fn exp(rotvec: &Vector3<T>) -> Self {
        let theta = rotvec.norm();
        let half = theta * T::lit(0.5);
        // sin(θ/2)/θ
        let k = if theta < T::lit(1e-8) {
            let t2 = theta * theta;
            T::lit(0.5) - t2 / T::lit(48.0) + t2 * t2 / T::lit(3840.0)
        } else {
            half.sin() / theta
        };
        Self::from_parts(half.cos(), rotvec * k)
    }

    /// Rotation vector of a unit quaternion, with `θ ∈ [0, π]`.
    pub fn log(&self) -> Vector3<T> {
        let q = if self.w < T::zero() { -*self } else { *self };
        let s = q.v.norm();
        if s < T::lit(1e-8) {
            // θ ≈ 2 s, higher-order terms below rounding
            return q.v * (T::lit(2.0) / q.w);
        }
        let theta = T::lit(2.0) * s.atan2(q.w);
        q.v * (theta / s)
    }

    /// Direction cosine matrix `C` with `C x = q ⊗ [0, x] ⊗ q*`.
    pub fn to_dcm(&self) -> Matrix3<T> {
        let w = self.w;
        let v = self.v;
        let two = T::lit(2.0);
        Matrix3::identity() * (w * w - v.norm_squared())
            + v * v.transpose() * two
            + skew(&v) * (two * w)
    }

    /// Unit quaternion from a rotation matrix (Shepperd's method).
    pub fn from_dcm(m: &Matrix3<T>) -> Self {
        let one = T::one();
        let quarter = T::lit(0.25);
        let tr = m.trace();
        let q = if tr > m[(0, 0)] && tr > m[(1, 1)] && tr > m[(2, 2)] {
            let s = (one + tr).sqrt() * T::lit(2.0);
            Self::new(
                quarter * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = (one + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * T::lit(2.0);
            Self::new(
                (m[(2, 1)] - m[(1, 2)]) / s,
                quarter * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            )
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = (one + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * T::lit(2.0);
            Self::new(
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                quarter * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            )
        } else {
            let s = (one + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * T::lit(2.0);
            Self::new(
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                quarter * s,
            )
        };
        q.normalize()
    }

    /// `q x q*` for a unit quaternion; rejects quaternions that are not unit.
    pub fn adjoint(&self, x: &Vector3<T>) -> Result<Vector3<T>> {
        if !self.is_unit() {
            return Err(Error::Domain(format!(
                "adjoint needs a unit quaternion, norm deviates by {:e}",
                nalgebra::try_convert::<T, f64>(self.norm() - T::one()).unwrap_or(f64::NAN)
            )));
        }
        Ok(self.rotate(x))
    }

    /// Unchecked `q x q*`, assuming a unit quaternion.
    #[inline]
    pub fn rotate(&self, x: &Vector3<T>) -> Vector3<T> {
        let t = self.v.cross(x) * T::lit(2.0);
        x + t * self.w + self.v.cross(&t)
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.coords() - other.coords()).amax()
    }
}

impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Quaternion {
            w: self.w * rhs.w - self.v.dot(&rhs.v),
            v: rhs.v * self.w + self.v * rhs.w + self.v.cross(&rhs.v),
        }
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_parts(self.w + rhs.w, self.v + rhs.v)
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_parts(self.w - rhs.w, self.v - rhs.v)
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_parts(-self.w, -self.v)
    }
}

pub fn quat_exp<T: Scalar>(rotvec: &Vector3<T>) -> Quaternion<T> {
    Quaternion::exp(rotvec)
}

pub fn quat_mul<T: Scalar>(q1: &Quaternion<T>, q2: &Quaternion<T>) -> Quaternion<T> {
    *q1 * *q2
}

pub fn quat_adjoint<T: Scalar>(q: &Quaternion<T>, x: &Vector3<T>) -> Result<Vector3<T>> {
    q.adjoint(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    type Q = Quaternion<f64>;

    #[test]
    fn exp_special_values() {
        assert_eq!(Q::exp(&Vector3::zeros()), Q::identity());
        let q = Q::exp(&Vector3::new(0.0, 0.0, PI));
        assert_relative_eq!(q.coords(), Vector4::new(0.0, 0.0, 0.0, 1.0), epsilon = 1e-15);
    }

    #[test]
    fn hamilton_products() {
        assert_eq!(Q::i() * Q::j(), Q::k());
        assert_eq!(Q::j() * Q::i(), -Q::k());
        assert_eq!(Q::j() * Q::k(), Q::i());
        assert_eq!(Q::k() * Q::i(), Q::j());
        let minus_one = -Q::identity();
        assert_eq!(Q::i() * Q::i(), minus_one);
        assert_eq!(Q::i() * Q::j() * Q::k(), minus_one);
    }

    #[test]
    fn quarter_turn_about_z() {
        let q = Q::exp(&Vector3::new(0.0, 0.0, PI / 2.0));
        let y = q.adjoint(&Vector3::x()).unwrap();
        assert_relative_eq!(y, Vector3::y(), epsilon = 1e-15);
    }

    #[test]
    fn adjoint_rejects_non_unit() {
        let q = Q::new(2.0, 0.0, 0.0, 0.0);
        assert!(matches!(q.adjoint(&Vector3::x()), Err(Error::Domain(_))));
    }

    #[test]
    fn log_inverts_exp() {
        for rv in [
            Vector3::new(0.3, -1.2, 0.4),
            Vector3::new(1e-10, 0.0, -2e-10),
            Vector3::new(0.0, 3.0, 0.0),
        ] {
            assert_relative_eq!(Q::exp(&rv).log(), rv, epsilon = 1e-12);
        }
    }

    #[test]
    fn dcm_round_trip() {
        let q = Q::exp(&Vector3::new(2.9, -0.3, 0.5));
        let back = Q::from_dcm(&q.to_dcm());
        let same = back.max_abs_diff(&q) < 1e-12 || back.max_abs_diff(&-q) < 1e-12;
        assert!(same);
    }

    #[test]
    fn series_branch_is_continuous() {
        let small = Vector3::new(3e-9, -4e-9, 1e-9);
        let q = Q::exp(&small);
        assert_relative_eq!(q.v, small * 0.5, epsilon = 1e-24);
        let q32 = Quaternion::<f32>::exp(&Vector3::new(3e-9, -4e-9, 1e-9));
        assert!((q32.norm() - 1.0).abs() < 1e-6);
    }
}
