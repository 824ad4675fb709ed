use std::ops::Mul;

use nalgebra::{Matrix4, Vector3};

use super::multivector::{Multivector, Signature};
use super::quaternion::Quaternion;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rigid transform `q + ε ½ t q` with `ε² = 0`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DualQuaternion<T: Scalar> {
    pub real: Quaternion<T>,
    pub dual: Quaternion<T>,
}

impl<T: Scalar> DualQuaternion<T> {
    pub fn identity() -> Self {
        DualQuaternion {
            real: Quaternion::identity(),
            dual: Quaternion::zero(),
        }
    }

    pub fn from_rotation_translation(q: Quaternion<T>, t: &Vector3<T>) -> Self {
        DualQuaternion {
            real: q,
            dual: (Quaternion::pure(*t) * q).scale(T::lit(0.5)),
        }
    }

    /// Encoded translation `2 vec(dual ⊗ real*)`.
    pub fn translation(&self) -> Vector3<T> {
        (self.dual * self.real.conj()).v * T::lit(2.0)
    }

    /// Scalar part of `2 dual ⊗ real*`; zero for a valid rigid transform.
    pub fn translation_scalar(&self) -> T {
        (self.dual * self.real.conj()).w * T::lit(2.0)
    }

    pub fn inverse(&self) -> Self {
        let rc = self.real.conj();
        DualQuaternion {
            real: rc,
            dual: -(rc * self.dual * rc),
        }
    }

    /// Homogeneous 4×4 matrix `[R t; 0 1]`.
    pub fn to_matrix(&self) -> Matrix4<T> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.real.to_dcm());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation());
        m
    }

    /// Element of `Cl(0,3,1)` with `ε = e1e2e3e4`.
    pub fn to_multivector(&self) -> Multivector<T> {
        let sig = Signature { p: 0, q: 3, r: 1 };
        let basis = dual_basis(sig);
        let mut m = Multivector::zero(sig);
        let c = self.real.coords();
        let d = self.dual.coords();
        for k in 0..4 {
            add_basis(&mut m, basis[k], c[k]);
            add_basis(&mut m, basis[4 + k], d[k]);
        }
        m
    }

    pub fn from_multivector(m: &Multivector<T>) -> Result<Self> {
        let sig = Signature { p: 0, q: 3, r: 1 };
        if m.signature() != sig {
            return Err(Error::SignatureMismatch {
                left: m.signature(),
                right: sig,
            });
        }
        let basis = dual_basis(sig);
        let get = |k: usize| read_basis(m, basis[k]);
        Ok(DualQuaternion {
            real: Quaternion::new(get(0), get(1), get(2), get(3)),
            dual: Quaternion::new(get(4), get(5), get(6), get(7)),
        })
    }
}

impl<T: Scalar> Mul for DualQuaternion<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        DualQuaternion {
            real: self.real * rhs.real,
            dual: self.real * rhs.dual + self.dual * rhs.real,
        }
    }
}

/// A basis element of a subalgebra that is `±` one blade.
pub(crate) type SignedBlade = (usize, i8);

/// Blades of `1, i, j, k` inside the even subalgebra of the first three
/// generators: `i = e2e3`, `j = e3e1`, `k = e1e2`.
pub(crate) fn quaternion_basis() -> [SignedBlade; 4] {
    [(0b000, 1), (0b110, 1), (0b101, -1), (0b011, 1)]
}

/// `ε x` for a quaternion basis blade `x`, with `ε = e1e2e3e_n`.
pub(crate) fn eps_times(sig: Signature, null_blade: usize, x: SignedBlade) -> SignedBlade {
    let (s1, eps) = sig.blade_product(0b111, null_blade);
    let (s2, blade) = sig.blade_product(eps, x.0);
    (blade, s1 * s2 * x.1)
}

fn dual_basis(sig: Signature) -> [SignedBlade; 8] {
    let q = quaternion_basis();
    let mut out = [(0, 0); 8];
    for k in 0..4 {
        out[k] = q[k];
        out[4 + k] = eps_times(sig, 0b1000, q[k]);
    }
    out
}

pub(crate) fn add_basis<T: Scalar>(m: &mut Multivector<T>, b: SignedBlade, c: T) {
    let cur = m.coeff(b.0);
    if b.1 > 0 {
        m.set_coeff(b.0, cur + c);
    } else {
        m.set_coeff(b.0, cur - c);
    }
}

pub(crate) fn read_basis<T: Scalar>(m: &Multivector<T>, b: SignedBlade) -> T {
    if b.1 > 0 {
        m.coeff(b.0)
    } else {
        -m.coeff(b.0)
    }
}
