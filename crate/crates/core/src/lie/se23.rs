use std::ops::Mul;

use nalgebra::{Matrix3, Matrix5, Vector3};

use super::so3::{left_jacobian, skew, so3_exp};
use crate::algebra::TridentQuaternion;
use crate::scalar::Scalar;

/// Extended pose `[R v r; 0 I₂]`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SE23<T: Scalar>(Matrix5<T>);

impl<T: Scalar> SE23<T> {
    pub fn identity() -> Self {
        SE23(Matrix5::identity())
    }

    pub fn from_parts(r: &Matrix3<T>, v: &Vector3<T>, p: &Vector3<T>) -> Self {
        let mut m = Matrix5::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(v);
        m.fixed_view_mut::<3, 1>(0, 4).copy_from(p);
        SE23(m)
    }

    /// Closed-form exponential of `(θ, ν, ρ)`.
    pub fn exp(theta: &Vector3<T>, nu: &Vector3<T>, rho: &Vector3<T>) -> Self {
        let jl = left_jacobian(theta);
        Self::from_parts(&so3_exp(theta), &(jl * nu), &(jl * rho))
    }

    /// Lie-algebra matrix of `(θ, ν, ρ)`.
    pub fn hat(theta: &Vector3<T>, nu: &Vector3<T>, rho: &Vector3<T>) -> Matrix5<T> {
        let mut m = Matrix5::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(theta));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(nu);
        m.fixed_view_mut::<3, 1>(0, 4).copy_from(rho);
        m
    }

    pub fn matrix(&self) -> &Matrix5<T> {
        &self.0
    }

    pub fn rotation(&self) -> Matrix3<T> {
        self.0.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn velocity(&self) -> Vector3<T> {
        self.0.fixed_view::<3, 1>(0, 3).into_owned()
    }

    pub fn position(&self) -> Vector3<T> {
        self.0.fixed_view::<3, 1>(0, 4).into_owned()
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation().transpose();
        Self::from_parts(&rt, &-(rt * self.velocity()), &-(rt * self.position()))
    }
}

impl<T: Scalar> Mul for SE23<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        SE23(self.0 * rhs.0)
    }
}

pub fn se23_embed<T: Scalar>(t: &TridentQuaternion<T>) -> SE23<T> {
    SE23::from_parts(&t.real.to_dcm(), &t.t1(), &t.t2())
}
