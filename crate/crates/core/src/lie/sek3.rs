use std::ops::Mul;

use nalgebra::{Matrix3, SMatrix, Vector3};

use crate::algebra::ExtendedCliffordState;
use crate::scalar::Scalar;

pub type Matrix8<T> = SMatrix<T, 8, 8>;

/// `SE₅(3)` element laid out as
/// `[C, v, r, C b_g, C b_a, C l; 0₅ₓ₃, I₅]`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SEk3<T: Scalar>(Matrix8<T>);

impl<T: Scalar> SEk3<T> {
    pub fn identity() -> Self {
        SEk3(Matrix8::identity())
    }

    /// Builds the matrix from a rotation and five e-frame columns.
    pub fn from_columns(c: &Matrix3<T>, cols: &[Vector3<T>; 5]) -> Self {
        let mut m = Matrix8::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(c);
        for (k, col) in cols.iter().enumerate() {
            m.fixed_view_mut::<3, 1>(0, 3 + k).copy_from(col);
        }
        SEk3(m)
    }

    pub fn matrix(&self) -> &Matrix8<T> {
        &self.0
    }

    pub fn rotation(&self) -> Matrix3<T> {
        self.0.fixed_view::<3, 3>(0, 0).into_owned()
    }

    /// Column `k` (0 = velocity, 1 = position, 2..5 = rotated body vectors).
    pub fn column(&self, k: usize) -> Vector3<T> {
        self.0.fixed_view::<3, 1>(0, 3 + k).into_owned()
    }

    pub fn inverse(&self) -> Self {
        let ct = self.rotation().transpose();
        let cols = std::array::from_fn(|k| -(ct * self.column(k)));
        Self::from_columns(&ct, &cols)
    }

    /// Reads back the state, undoing the `C` premultiplication of the body
    /// columns.
    pub fn to_state(&self) -> ExtendedCliffordState<T> {
        let c = self.rotation();
        let ct = c.transpose();
        ExtendedCliffordState {
            att: crate::algebra::Quaternion::from_dcm(&c),
            vt: self.column(0),
            pos: self.column(1),
            bg: ct * self.column(2),
            ba: ct * self.column(3),
            lever: ct * self.column(4),
        }
    }
}

impl<T: Scalar> Mul for SEk3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        SEk3(self.0 * rhs.0)
    }
}

pub fn sek3_embed<T: Scalar>(s: &ExtendedCliffordState<T>) -> SEk3<T> {
    let c = s.dcm();
    SEk3::from_columns(&c, &[s.vt, s.pos, c * s.bg, c * s.ba, c * s.lever])
}
