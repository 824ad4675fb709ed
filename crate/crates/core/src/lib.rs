//! Clifford-algebra inertial navigation: trident-quaternion states, iterated
//! error-state Kalman filters and a Monte-Carlo simulation harness.

pub mod algebra;
pub mod error;
pub mod filter;
pub mod harness;
pub mod lie;
pub mod mechanization;
pub mod scalar;
pub mod sim;
pub mod verify;

pub use error::{Error, ErrorCategory, Result};
pub use scalar::Scalar;

pub type Quat = algebra::Quaternion<f64>;
pub type Quatf = algebra::Quaternion<f32>;
pub type DualQuat = algebra::DualQuaternion<f64>;
pub type DualQuatf = algebra::DualQuaternion<f32>;
pub type Trident = algebra::TridentQuaternion<f64>;
pub type Tridentf = algebra::TridentQuaternion<f32>;
pub type NavState = algebra::ExtendedCliffordState<f64>;
pub type NavStatef = algebra::ExtendedCliffordState<f32>;
pub type Rot3d = lie::Rot3<f64>;
pub type SE23d = lie::SE23<f64>;
pub type SEk3d = lie::SEk3<f64>;
