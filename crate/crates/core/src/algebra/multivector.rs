//! Generic Clifford algebra `Cl(p, q, r)` over any ring-like scalar.
//!
//! Blades are stored by bitmask: bit `i` set means generator `e_{i+1}` is a
//! factor, always in ascending order. Generators are numbered so that the first
//! `p` square to `+1`, the next `q` to `-1` and the last `r` to `0`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported generator count.
pub const MAX_GENERATORS: usize = 6;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize, r: usize) -> Result<Self> {
        if p + q + r > MAX_GENERATORS {
            return Err(Error::Domain(format!(
                "Cl({p},{q},{r}) has {} generators, at most {MAX_GENERATORS} supported",
                p + q + r
            )));
        }
        Ok(Signature { p, q, r })
    }

    pub fn generators(&self) -> usize {
        self.p + self.q + self.r
    }

    pub fn dimension(&self) -> usize {
        1 << self.generators()
    }

    /// Square of generator with zero-based index `i`: +1, -1 or 0.
    pub fn square(&self, i: usize) -> i8 {
        if i < self.p {
            1
        } else if i < self.p + self.q {
            -1
        } else {
            0
        }
    }

    /// Product of two basis blades as `(sign, blade)`; sign is 0 when a
    /// null generator appears twice.
    pub fn blade_product(&self, a: usize, b: usize) -> (i8, usize) {
        let mut sign = reorder_sign(a, b);
        let mut common = a & b;
        let mut i = 0;
        while common != 0 {
            if common & 1 == 1 {
                sign *= self.square(i);
                if sign == 0 {
                    return (0, a ^ b);
                }
            }
            common >>= 1;
            i += 1;
        }
        (sign, a ^ b)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cl({},{},{})", self.p, self.q, self.r)
    }
}

/// Sign picked up by moving the generators of `b` past those of `a` into
/// canonical order.
fn reorder_sign(a: usize, b: usize) -> i8 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Grade (number of generators) of a blade bitmask.
pub fn blade_grade(blade: usize) -> usize {
    blade.count_ones() as usize
}

/// Human-readable blade label such as `e1e3`; the scalar blade is `1`.
pub fn blade_name(blade: usize) -> String {
    if blade == 0 {
        return "1".to_string();
    }
    (0..usize::BITS as usize)
        .filter(|i| blade & (1 << i) != 0)
        .map(|i| format!("e{}", i + 1))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multivector<T> {
    sig: Signature,
    coeffs: Vec<T>,
}

impl<T> Multivector<T>
where
    T: Num + Copy + Neg<Output = T>,
{
    pub fn zero(sig: Signature) -> Self {
        Multivector {
            sig,
            coeffs: vec![T::zero(); sig.dimension()],
        }
    }

    pub fn scalar(sig: Signature, s: T) -> Self {
        let mut m = Self::zero(sig);
        m.coeffs[0] = s;
        m
    }

    /// Unit basis blade with the given bitmask.
    pub fn blade(sig: Signature, blade: usize) -> Result<Self> {
        if blade >= sig.dimension() {
            return Err(Error::Domain(format!(
                "blade {} does not exist in {sig}",
                blade_name(blade)
            )));
        }
        let mut m = Self::zero(sig);
        m.coeffs[blade] = T::one();
        Ok(m)
    }

    /// Generator `e_i` with one-based index as in the usual notation.
    pub fn generator(sig: Signature, i: usize) -> Result<Self> {
        if i == 0 || i > sig.generators() {
            return Err(Error::Domain(format!("generator e{i} does not exist in {sig}")));
        }
        Self::blade(sig, 1 << (i - 1))
    }

    pub fn from_coeffs(sig: Signature, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != sig.dimension() {
            return Err(Error::Domain(format!(
                "{sig} needs {} coefficients, got {}",
                sig.dimension(),
                coeffs.len()
            )));
        }
        Ok(Multivector { sig, coeffs })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> T {
        self.coeffs[blade]
    }

    pub fn set_coeff(&mut self, blade: usize, value: T) {
        self.coeffs[blade] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: T) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Grade-`k` projection.
    pub fn grade(&self, k: usize) -> Self {
        let mut out = Self::zero(self.sig);
        for (blade, &c) in self.coeffs.iter().enumerate() {
            if blade_grade(blade) == k {
                out.coeffs[blade] = c;
            }
        }
        out
    }

    /// Even-grade part, i.e. the projection onto `Cl⁺`.
    pub fn even(&self) -> Self {
        let mut out = Self::zero(self.sig);
        for (blade, &c) in self.coeffs.iter().enumerate() {
            if blade_grade(blade) % 2 == 0 {
                out.coeffs[blade] = c;
            }
        }
        out
    }

    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        self.check_sig(other)?;
        let mut out = Self::zero(self.sig);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let (sign, blade) = self.sig.blade_product(a, b);
                match sign {
                    0 => {}
                    1 => out.coeffs[blade] = out.coeffs[blade] + ca * cb,
                    _ => out.coeffs[blade] = out.coeffs[blade] - ca * cb,
                }
            }
        }
        Ok(out)
    }

    /// Reversion: reverses the generator order of every blade.
    pub fn reverse(&self) -> Self {
        let mut out = self.clone();
        for (blade, c) in out.coeffs.iter_mut().enumerate() {
            let k = blade_grade(blade);
            if (k * k.saturating_sub(1) / 2) % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// Quotient of `Cl(0,3,2)` by the ideal generated by `e4e5`: zeroes every
    /// blade that contains both null generators.
    pub fn quotient_reduce(&self) -> Result<Self> {
        let expected = Signature { p: 0, q: 3, r: 2 };
        if self.sig != expected {
            return Err(Error::SignatureMismatch {
                left: self.sig,
                right: expected,
            });
        }
        const E4E5: usize = 0b11000;
        let mut out = self.clone();
        for (blade, c) in out.coeffs.iter_mut().enumerate() {
            if blade & E4E5 == E4E5 {
                *c = T::zero();
            }
        }
        Ok(out)
    }

    /// Coefficient-wise conversion into another scalar type.
    pub fn map<U, F>(&self, f: F) -> Multivector<U>
    where
        U: Num + Copy + Neg<Output = U>,
        F: Fn(T) -> U,
    {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn check_sig(&self, other: &Self) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch {
                left: self.sig,
                right: other.sig,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.sig, other.sig, "signature mismatch in multivector arithmetic");
        Multivector {
            sig: self.sig,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl<T> Multivector<T>
where
    T: Num + Copy + Neg<Output = T> + PartialOrd,
{
    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &c| {
            let a = if c < T::zero() { -c } else { c };
            if a > acc {
                a
            } else {
                acc
            }
        })
    }
}

impl<T: Num + Copy + Neg<Output = T>> Add for &Multivector<T> {
    type Output = Multivector<T>;
    fn add(self, rhs: Self) -> Multivector<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Num + Copy + Neg<Output = T>> Sub for &Multivector<T> {
    type Output = Multivector<T>;
    fn sub(self, rhs: Self) -> Multivector<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Num + Copy + Neg<Output = T>> Neg for &Multivector<T> {
    type Output = Multivector<T>;
    fn neg(self) -> Multivector<T> {
        self.scale(-T::one())
    }
}

impl<T> fmt::Display for Multivector<T>
where
    T: Num + Copy + Neg<Output = T> + fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (blade, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if blade == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", blade_name(blade))?;
            } else {
                write!(f, "{c}*{}", blade_name(blade))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
