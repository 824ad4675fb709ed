//! Matrix Lie groups mirroring the algebra types.

pub mod se23;
pub mod sek3;
pub mod so3;

pub use se23::{se23_embed, SE23};
pub use sek3::{sek3_embed, Matrix8, SEk3};
pub use so3::{left_jacobian, left_jacobian_inv, skew, so3_exp, so3_log, vee, Rot3};
