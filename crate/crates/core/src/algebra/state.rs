use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use super::quaternion::Quaternion;
use super::trident::TridentQuaternion;
use crate::scalar::Scalar;

/// Full navigation state: attitude `q_e^b`, transformed velocity, position
/// (all e-frame) and the body-frame biases and lever arm.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ExtendedCliffordState<T: Scalar> {
    pub att: Quaternion<T>,
    pub vt: Vector3<T>,
    pub pos: Vector3<T>,
    pub bg: Vector3<T>,
    pub ba: Vector3<T>,
    pub lever: Vector3<T>,
}

impl<T: Scalar> ExtendedCliffordState<T> {
    pub fn identity() -> Self {
        ExtendedCliffordState {
            att: Quaternion::identity(),
            vt: Vector3::zeros(),
            pos: Vector3::zeros(),
            bg: Vector3::zeros(),
            ba: Vector3::zeros(),
            lever: Vector3::zeros(),
        }
    }

    pub fn dcm(&self) -> Matrix3<T> {
        self.att.to_dcm()
    }

    /// The SE₂(3) part as a trident quaternion.
    pub fn pose(&self) -> TridentQuaternion<T> {
        TridentQuaternion::from_pose(self.att, &self.vt, &self.pos)
    }

    /// Group composition. The e-frame slots (velocity, position) compose as
    /// `a + C_a b`; the body-frame slots as `C_bᵀ a + b`.
    pub fn compose(&self, o: &Self) -> Self {
        let back = |x: &Vector3<T>| o.att.conj().rotate(x);
        ExtendedCliffordState {
            att: self.att * o.att,
            vt: self.vt + self.att.rotate(&o.vt),
            pos: self.pos + self.att.rotate(&o.pos),
            bg: back(&self.bg) + o.bg,
            ba: back(&self.ba) + o.ba,
            lever: back(&self.lever) + o.lever,
        }
    }

    pub fn inverse(&self) -> Self {
        let qc = self.att.conj();
        ExtendedCliffordState {
            att: qc,
            vt: -qc.rotate(&self.vt),
            pos: -qc.rotate(&self.pos),
            bg: -self.att.rotate(&self.bg),
            ba: -self.att.rotate(&self.ba),
            lever: -self.att.rotate(&self.lever),
        }
    }

    /// Packed algebra element: e-frame vectors as `½ t q`, body-frame vectors
    /// as `½ q b`.
    pub fn to_clifford(&self) -> CliffordElement<T, 5> {
        let half = T::lit(0.5);
        let q = self.att;
        let left = |t: &Vector3<T>| (Quaternion::pure(*t) * q).scale(half);
        let right = |b: &Vector3<T>| (q * Quaternion::pure(*b)).scale(half);
        CliffordElement {
            real: q,
            duals: [
                left(&self.vt),
                left(&self.pos),
                right(&self.bg),
                right(&self.ba),
                right(&self.lever),
            ],
        }
    }

    /// Unpacks a group element produced by [`Self::to_clifford`].
    pub fn from_clifford(c: &CliffordElement<T, 5>) -> Self {
        let two = T::lit(2.0);
        let qc = c.real.conj();
        let left = |d: &Quaternion<T>| (*d * qc).v * two;
        let right = |d: &Quaternion<T>| (qc * *d).v * two;
        ExtendedCliffordState {
            att: c.real,
            vt: left(&c.duals[0]),
            pos: left(&c.duals[1]),
            bg: right(&c.duals[2]),
            ba: right(&c.duals[3]),
            lever: right(&c.duals[4]),
        }
    }

    pub fn is_finite(&self) -> bool {
        let ok = |v: &Vector3<T>| v.iter().all(|x| x.is_finite());
        self.att.w.is_finite()
            && ok(&self.att.v)
            && ok(&self.vt)
            && ok(&self.pos)
            && ok(&self.bg)
            && ok(&self.ba)
            && ok(&self.lever)
    }
}

impl<T: Scalar> Mul for ExtendedCliffordState<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

/// Element `q + Σ ε_k d_k` of the algebra with `K` mutually annihilating
/// nilpotent units that commute with the quaternions.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CliffordElement<T: Scalar, const K: usize> {
    pub real: Quaternion<T>,
    pub duals: [Quaternion<T>; K],
}

impl<T: Scalar, const K: usize> CliffordElement<T, K> {
    pub fn identity() -> Self {
        CliffordElement {
            real: Quaternion::identity(),
            duals: [Quaternion::zero(); K],
        }
    }

    pub fn zero() -> Self {
        CliffordElement {
            real: Quaternion::zero(),
            duals: [Quaternion::zero(); K],
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut duals = self.duals;
        for (d, od) in duals.iter_mut().zip(o.duals.iter()) {
            *d = *d + *od;
        }
        CliffordElement {
            real: self.real + o.real,
            duals,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        CliffordElement {
            real: self.real.scale(s),
            duals: self.duals.map(|d| d.scale(s)),
        }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> T {
        self.duals
            .iter()
            .fold(self.real.norm_squared(), |acc, d| acc + d.norm_squared())
            .sqrt()
    }
}

impl<T: Scalar, const K: usize> Mul for CliffordElement<T, K> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut duals = [Quaternion::zero(); K];
        for (k, d) in duals.iter_mut().enumerate() {
            *d = self.real * rhs.duals[k] + self.duals[k] * rhs.real;
        }
        CliffordElement {
            real: self.real * rhs.real,
            duals,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type S = ExtendedCliffordState<f64>;

    fn sample(seed: f64) -> S {
        S {
            att: Quaternion::exp(&Vector3::new(0.3 * seed, -0.2, 0.9)),
            vt: Vector3::new(1.0, seed, -2.0),
            pos: Vector3::new(4.0, 5.0, seed),
            bg: Vector3::new(0.01, -0.02, 0.03 * seed),
            ba: Vector3::new(0.1, 0.2, -0.3),
            lever: Vector3::new(seed, 0.8, 0.3),
        }
    }

    fn close(a: &S, b: &S) {
        assert!(a.att.max_abs_diff(&b.att) < 1e-12);
        assert_relative_eq!(a.vt, b.vt, epsilon = 1e-12);
        assert_relative_eq!(a.pos, b.pos, epsilon = 1e-12);
        assert_relative_eq!(a.bg, b.bg, epsilon = 1e-12);
        assert_relative_eq!(a.ba, b.ba, epsilon = 1e-12);
        assert_relative_eq!(a.lever, b.lever, epsilon = 1e-12);
    }

    #[test]
    fn composition_matches_packed_algebra_product() {
        let (a, b) = (sample(1.0), sample(-2.5));
        let via_algebra = S::from_clifford(&(a.to_clifford() * b.to_clifford()));
        close(&via_algebra, &a.compose(&b));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let a = sample(0.7);
        close(&a.compose(&a.inverse()), &S::identity());
        close(&a.inverse().compose(&a), &S::identity());
    }

    #[test]
    fn packing_round_trip() {
        let a = sample(3.0);
        close(&S::from_clifford(&a.to_clifford()), &a);
    }
}
