use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::trajectory::TruthSample;
use crate::error::{Error, Result};
use crate::mechanization::{EarthModel, GnssSample};

/// Antenna velocity `ṙ + C (ω_eb × l)` plus white noise, and the noiseless
/// antenna position, at every `imu_rate / rate`-th truth epoch from `t = 0`.
///
/// The body rate of the lever term is the truth rate of the interval that
/// starts at the fix epoch.
pub fn simulate_gnss(
    truth: &[TruthSample],
    lever: &Vector3<f64>,
    vel_std: f64,
    rate: f64,
    imu_rate: f64,
    seed: u64,
    model: &EarthModel,
) -> Result<Vec<GnssSample>> {
    if !(vel_std.is_finite() && vel_std >= 0.0) {
        return Err(Error::Config(format!("GNSS velocity std must be non-negative, got {vel_std}")));
    }
    if !(lever.iter().all(|x| x.is_finite())) {
        return Err(Error::Config("lever arm must be finite".into()));
    }
    let ratio = imu_rate / rate;
    if !(rate > 0.0 && ratio >= 1.0 && (ratio - ratio.round()).abs() < 1e-6) {
        return Err(Error::Config(format!(
            "GNSS rate {rate} Hz must divide the {imu_rate} Hz IMU rate"
        )));
    }
    let step = ratio.round() as usize;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(truth.len() / step + 1);
    for s in truth.iter().step_by(step) {
        let c = s.att.to_dcm();
        let clean = s.vel_ground + c * s.omega_eb_b(model).cross(lever);
        let noise = Vector3::<f64>::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        ) * vel_std;
        out.push(GnssSample {
            t: s.t,
            vel: clean + noise,
            pos: s.pos + c * lever,
            vel_std,
        });
    }
    Ok(out)
}
