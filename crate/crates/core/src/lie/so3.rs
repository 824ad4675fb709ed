use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cross-product matrix: `skew(a) b = a × b`.
#[inline]
pub fn skew<T: Scalar>(v: &Vector3<T>) -> Matrix3<T> {
    let z = T::zero();
    Matrix3::new(z, -v.z, v.y, v.z, z, -v.x, -v.y, v.x, z)
}

/// Inverse of [`skew`] on the antisymmetric part.
pub fn vee<T: Scalar>(m: &Matrix3<T>) -> Vector3<T> {
    let half = T::lit(0.5);
    Vector3::new(
        (m[(2, 1)] - m[(1, 2)]) * half,
        (m[(0, 2)] - m[(2, 0)]) * half,
        (m[(1, 0)] - m[(0, 1)]) * half,
    )
}

/// Rodrigues formula.
pub fn so3_exp<T: Scalar>(rotvec: &Vector3<T>) -> Matrix3<T> {
    let theta = rotvec.norm();
    let k = skew(rotvec);
    let (a, b) = if theta < T::lit(1e-8) {
        let t2 = theta * theta;
        (T::one() - t2 / T::lit(6.0), T::lit(0.5) - t2 / T::lit(24.0))
    } else {
        (theta.sin() / theta, (T::one() - theta.cos()) / (theta * theta))
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Rotation vector of a rotation matrix.
pub fn so3_log<T: Scalar>(r: &Matrix3<T>) -> Vector3<T> {
    Quaternion::from_dcm(r).log()
}

/// `Σ_k (θ×)^k / (k+1)!`, written in closed form.
pub fn left_jacobian<T: Scalar>(theta_n: &Vector3<T>) -> Matrix3<T> {
    let theta = theta_n.norm();
    let k = skew(theta_n);
    let (a, b) = if theta < T::lit(1e-6) {
        let t2 = theta * theta;
        (
            T::lit(0.5) - t2 / T::lit(24.0),
            T::one() / T::lit(6.0) - t2 / T::lit(120.0),
        )
    } else {
        let t2 = theta * theta;
        (
            (T::one() - theta.cos()) / t2,
            (theta - theta.sin()) / (t2 * theta),
        )
    };
    Matrix3::identity() + k * a + k * k * b
}

pub fn left_jacobian_inv<T: Scalar>(theta_n: &Vector3<T>) -> Matrix3<T> {
    let theta = theta_n.norm();
    let k = skew(theta_n);
    let c = if theta < T::lit(1e-6) {
        T::one() / T::lit(12.0) + theta * theta / T::lit(720.0)
    } else {
        let t2 = theta * theta;
        T::one() / t2 - (T::one() + theta.cos()) / (T::lit(2.0) * theta * theta.sin())
    };
    Matrix3::identity() - k * T::lit(0.5) + k * k * c
}

/// Rotation matrix with validated orthonormality.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Rot3<T: Scalar>(Matrix3<T>);

impl<T: Scalar> Rot3<T> {
    pub fn identity() -> Self {
        Rot3(Matrix3::identity())
    }

    pub fn from_matrix(m: Matrix3<T>) -> Result<Self> {
        let tol = T::lit(1e-9);
        let ortho = (m.transpose() * m - Matrix3::identity()).amax();
        let det = m.determinant();
        if ortho > tol || (det - T::one()).abs() > tol {
            return Err(Error::Domain("matrix is not a proper rotation".into()));
        }
        Ok(Rot3(m))
    }

    pub fn exp(rotvec: &Vector3<T>) -> Self {
        Rot3(so3_exp(rotvec))
    }

    pub fn log(&self) -> Vector3<T> {
        so3_log(&self.0)
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Rot3(self.0.transpose())
    }

    pub fn to_quaternion(&self) -> Quaternion<T> {
        Quaternion::from_dcm(&self.0)
    }
}

impl<T: Scalar> Mul for Rot3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Rot3(self.0 * rhs.0)
    }
}

impl<T: Scalar> Mul<Vector3<T>> for Rot3<T> {
    type Output = Vector3<T>;
    fn mul(self, rhs: Vector3<T>) -> Vector3<T> {
        self.0 * rhs
    }
}
