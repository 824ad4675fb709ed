//! Ground truth and sensor synthesis for a planar land vehicle.

pub mod gnss;
pub mod imu;
pub mod trajectory;

pub use gnss::simulate_gnss;
pub use imu::{simulate_imu, ImuErrorSpec, BIAS_CORRELATION_TIME};
pub use trajectory::{
    attitude_from_euler, enu_to_ecef, euler_enu, generate_trajectory, wrap_angle, Segment, SegmentKind,
    TrajectoryProfile, TruthSample, QUARTER_TURN_RATE,
};

use crate::algebra::ExtendedCliffordState;
use crate::mechanization::{EarthModel, ImuSample};

pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Navigation state at a truth epoch with the given biases and lever.
pub fn truth_state(
    s: &TruthSample,
    bg: nalgebra::Vector3<f64>,
    ba: nalgebra::Vector3<f64>,
    lever: nalgebra::Vector3<f64>,
    model: &EarthModel,
) -> ExtendedCliffordState<f64> {
    ExtendedCliffordState {
        att: s.att,
        vt: s.vt(model),
        pos: s.pos,
        bg,
        ba,
        lever,
    }
}

/// Error-free IMU stream straight from the truth rates.
pub fn ideal_imu(truth: &[TruthSample]) -> Vec<ImuSample> {
    truth
        .iter()
        .take(truth.len().saturating_sub(1))
        .map(|s| ImuSample::new(s.t, s.omega_ib_b, s.f_b))
        .collect()
}
