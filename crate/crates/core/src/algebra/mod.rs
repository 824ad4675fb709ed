//! Clifford algebra engine and the quaternion family built on top of it.

pub mod dual_quaternion;
pub mod multivector;
pub mod quaternion;
pub mod state;
pub mod trident;

pub use dual_quaternion::DualQuaternion;
pub use multivector::{blade_grade, blade_name, Multivector, Signature, MAX_GENERATORS};
pub use quaternion::{quat_adjoint, quat_exp, quat_mul, Quaternion};
pub use state::{CliffordElement, ExtendedCliffordState};
pub use trident::{trident_exp, trident_mul, TridentQuaternion};
