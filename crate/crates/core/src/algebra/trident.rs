use std::ops::Mul;

use nalgebra::Vector3;

use super::dual_quaternion::{add_basis, eps_times, quaternion_basis, read_basis, SignedBlade};
use super::multivector::{Multivector, Signature};
use super::quaternion::Quaternion;
use crate::error::{Error, Result};
use crate::lie::so3::{left_jacobian, left_jacobian_inv};
use crate::scalar::Scalar;

/// Trident quaternion `q + ε1 q′ + ε2 q″` with `ε1² = ε2² = ε1ε2 = 0`.
///
/// As an extended pose, `q′ = ½ v q` and `q″ = ½ r q`. The multiplication is
/// the plain algebra product, so it also applies to non-unit elements such as
/// tangent vectors.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TridentQuaternion<T: Scalar> {
    pub real: Quaternion<T>,
    pub dual1: Quaternion<T>,
    pub dual2: Quaternion<T>,
}

impl<T: Scalar> TridentQuaternion<T> {
    pub fn identity() -> Self {
        TridentQuaternion {
            real: Quaternion::identity(),
            dual1: Quaternion::zero(),
            dual2: Quaternion::zero(),
        }
    }

    pub fn zero() -> Self {
        TridentQuaternion {
            real: Quaternion::zero(),
            dual1: Quaternion::zero(),
            dual2: Quaternion::zero(),
        }
    }

    pub fn from_pose(q: Quaternion<T>, t1: &Vector3<T>, t2: &Vector3<T>) -> Self {
        let half = T::lit(0.5);
        TridentQuaternion {
            real: q,
            dual1: (Quaternion::pure(*t1) * q).scale(half),
            dual2: (Quaternion::pure(*t2) * q).scale(half),
        }
    }

    pub fn t1(&self) -> Vector3<T> {
        (self.dual1 * self.real.conj()).v * T::lit(2.0)
    }

    pub fn t2(&self) -> Vector3<T> {
        (self.dual2 * self.real.conj()).v * T::lit(2.0)
    }

    /// Scalar parts of `2 dual_i ⊗ real*`; both vanish for a valid pose.
    pub fn translation_scalars(&self) -> (T, T) {
        let two = T::lit(2.0);
        let rc = self.real.conj();
        ((self.dual1 * rc).w * two, (self.dual2 * rc).w * two)
    }

    pub fn is_valid(&self, tol: T) -> bool {
        let (s1, s2) = self.translation_scalars();
        (self.real.norm() - T::one()).abs() < tol && s1.abs() < tol && s2.abs() < tol
    }

    pub fn inverse(&self) -> Self {
        let rc = self.real.conj();
        TridentQuaternion {
            real: rc,
            dual1: -(rc * self.dual1 * rc),
            dual2: -(rc * self.dual2 * rc),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        TridentQuaternion {
            real: self.real + o.real,
            dual1: self.dual1 + o.dual1,
            dual2: self.dual2 + o.dual2,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        TridentQuaternion {
            real: self.real.scale(s),
            dual1: self.dual1.scale(s),
            dual2: self.dual2.scale(s),
        }
    }

    /// The twelve coefficients `[real, dual1, dual2]`, each as `[w, x, y, z]`.
    pub fn coeffs(&self) -> [T; 12] {
        let mut out = [T::zero(); 12];
        for (k, q) in [self.real, self.dual1, self.dual2].iter().enumerate() {
            let c = q.coords();
            out[4 * k..4 * k + 4].copy_from_slice(c.as_slice());
        }
        out
    }

    /// Exponential from Lie-algebra coordinates.
    pub fn exp(theta: &Vector3<T>, t1_gen: &Vector3<T>, t2_gen: &Vector3<T>) -> Self {
        let jl = left_jacobian(theta);
        Self::from_pose(Quaternion::exp(theta), &(jl * t1_gen), &(jl * t2_gen))
    }

    /// Inverse of [`TridentQuaternion::exp`]: `(θ, t1_gen, t2_gen)`.
    pub fn log(&self) -> (Vector3<T>, Vector3<T>, Vector3<T>) {
        let theta = self.real.log();
        let jinv = left_jacobian_inv(&theta);
        (theta, jinv * self.t1(), jinv * self.t2())
    }

    /// Element of `Cl(0,3,2)` with `ε1 = e1e2e3e4`, `ε2 = e1e2e3e5`.
    pub fn to_multivector(&self) -> Multivector<T> {
        let sig = cl032();
        let mut m = Multivector::zero(sig);
        let c = self.coeffs();
        for (k, b) in trident_basis(sig).iter().enumerate() {
            add_basis(&mut m, *b, c[k]);
        }
        m
    }

    /// Reads the trident components of a reduced `Cl(0,3,2)` element.
    pub fn from_multivector(m: &Multivector<T>) -> Result<Self> {
        if m.signature() != cl032() {
            return Err(Error::SignatureMismatch {
                left: m.signature(),
                right: cl032(),
            });
        }
        let basis = trident_basis(cl032());
        let get = |k: usize| read_basis(m, basis[k]);
        Ok(TridentQuaternion {
            real: Quaternion::new(get(0), get(1), get(2), get(3)),
            dual1: Quaternion::new(get(4), get(5), get(6), get(7)),
            dual2: Quaternion::new(get(8), get(9), get(10), get(11)),
        })
    }
}

impl<T: Scalar> Mul for TridentQuaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        TridentQuaternion {
            real: self.real * rhs.real,
            dual1: self.real * rhs.dual1 + self.dual1 * rhs.real,
            dual2: self.real * rhs.dual2 + self.dual2 * rhs.real,
        }
    }
}

pub fn trident_mul<T: Scalar>(
    a: &TridentQuaternion<T>,
    b: &TridentQuaternion<T>,
) -> TridentQuaternion<T> {
    *a * *b
}

pub fn trident_exp<T: Scalar>(
    theta_n: &Vector3<T>,
    t1_gen: &Vector3<T>,
    t2_gen: &Vector3<T>,
) -> TridentQuaternion<T> {
    TridentQuaternion::exp(theta_n, t1_gen, t2_gen)
}

fn cl032() -> Signature {
    Signature { p: 0, q: 3, r: 2 }
}

fn trident_basis(sig: Signature) -> [SignedBlade; 12] {
    let q = quaternion_basis();
    let mut out = [(0, 0); 12];
    for k in 0..4 {
        out[k] = q[k];
        out[4 + k] = eps_times(sig, 0b01000, q[k]);
        out[8 + k] = eps_times(sig, 0b10000, q[k]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type TQ = TridentQuaternion<f64>;

    fn sample() -> TQ {
        TQ::from_pose(
            Quaternion::exp(&Vector3::new(0.3, -0.9, 0.2)),
            &Vector3::new(1.0, 2.0, 3.0),
            &Vector3::new(-4.0, 0.5, 6.0),
        )
    }

    #[test]
    fn identity_is_neutral() {
        let a = sample();
        assert_eq!(a * TQ::identity(), a);
        assert_eq!(TQ::identity() * a, a);
    }

    #[test]
    fn pure_translations_add() {
        let a = TQ::from_pose(Quaternion::identity(), &Vector3::new(1.0, 0.0, 2.0), &Vector3::x());
        let b = TQ::from_pose(Quaternion::identity(), &Vector3::new(0.5, 1.0, 0.0), &Vector3::y());
        let c = a * b;
        assert_relative_eq!(c.t1(), Vector3::new(1.5, 1.0, 2.0));
        assert_relative_eq!(c.t2(), Vector3::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn semi_direct_translation_law() {
        let a = sample();
        let b = TQ::from_pose(
            Quaternion::exp(&Vector3::new(-0.1, 0.4, 1.3)),
            &Vector3::new(0.2, -0.3, 0.9),
            &Vector3::new(7.0, 8.0, -1.0),
        );
        let c = a * b;
        assert_relative_eq!(c.t1(), a.t1() + a.real.rotate(&b.t1()), epsilon = 1e-12);
        assert_relative_eq!(c.t2(), a.t2() + a.real.rotate(&b.t2()), epsilon = 1e-12);
    }

    #[test]
    fn exp_limits() {
        assert_eq!(TQ::exp(&Vector3::zeros(), &Vector3::zeros(), &Vector3::zeros()), TQ::identity());
        let t = TQ::exp(&Vector3::zeros(), &Vector3::new(1.0, 2.0, 3.0), &Vector3::zeros());
        assert_eq!(t.real, Quaternion::identity());
        assert_relative_eq!(t.t1(), Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn log_inverts_exp() {
        let (th, a, b) = (
            Vector3::new(0.4, 0.1, -1.7),
            Vector3::new(3.0, -1.0, 2.0),
            Vector3::new(0.0, 5.0, 1.0),
        );
        let (th2, a2, b2) = TQ::exp(&th, &a, &b).log();
        assert_relative_eq!(th2, th, epsilon = 1e-12);
        assert_relative_eq!(a2, a, epsilon = 1e-12);
        assert_relative_eq!(b2, b, epsilon = 1e-12);
    }

    #[test]
    fn inverse_and_validity() {
        let a = sample();
        let id = a * a.inverse();
        assert!(id.real.max_abs_diff(&Quaternion::identity()) < 1e-14);
        assert!(id.dual1.norm() < 1e-14 && id.dual2.norm() < 1e-14);
        assert!(a.is_valid(1e-9));
    }

    #[test]
    fn multivector_round_trip() {
        let a = sample();
        assert_eq!(TQ::from_multivector(&a.to_multivector()).unwrap(), a);
    }
}
