use nalgebra::RealField;

/// Floating-point scalar usable by the quaternion, trident and Lie-group types.
///
/// Implemented for `f32` and `f64`. The generic multivector engine only needs
/// ring operations and accepts exact types (integers, rationals) as well.
pub trait Scalar: RealField + Copy {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
