//! IMU error synthesis: constant bias, bias random walk and white noise.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::trajectory::TruthSample;
use super::STANDARD_GRAVITY;
use crate::error::{Error, Result};
use crate::filter::NoiseSpec;
use crate::mechanization::ImuSample;

/// Correlation time used to turn a bias-instability figure into a
/// random-walk density.
pub const BIAS_CORRELATION_TIME: f64 = 100.0;

const DEG_PER_HOUR: f64 = std::f64::consts::PI / 180.0 / 3600.0;
const DEG_PER_SQRT_HOUR: f64 = std::f64::consts::PI / 180.0 / 60.0;
const MILLI_G: f64 = 1e-3 * STANDARD_GRAVITY;
const MICRO_G: f64 = 1e-6 * STANDARD_GRAVITY;

/// Sensor error figures in datasheet units.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImuErrorSpec {
    /// Constant gyro bias, deg/h.
    pub gyro_bias: [f64; 3],
    /// Constant accelerometer bias, mg.
    pub accel_bias: [f64; 3],
    /// Gyro bias instability, deg/h.
    pub gyro_instability: f64,
    /// Accelerometer bias instability, µg.
    pub accel_instability: f64,
    /// Angle random walk, deg/√h.
    pub gyro_rw: f64,
    /// Velocity random walk, µg/√Hz.
    pub accel_rw: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ImuErrorSpec {
    /// Low-cost MEMS grade used for the nominal scenario.
    fn default() -> Self {
        ImuErrorSpec {
            gyro_bias: [1000.0, 500.0, 800.0],
            accel_bias: [15.0, 5.0, 8.0],
            gyro_instability: 10.0,
            accel_instability: 20.0,
            gyro_rw: 0.2,
            accel_rw: 200.0,
            seed: 0,
        }
    }
}

impl ImuErrorSpec {
    pub fn zero() -> Self {
        ImuErrorSpec {
            gyro_bias: [0.0; 3],
            accel_bias: [0.0; 3],
            gyro_instability: 0.0,
            accel_instability: 0.0,
            gyro_rw: 0.0,
            accel_rw: 0.0,
            seed: 0,
        }
    }

    /// Same stochastic figures with deliberately large constant biases.
    pub fn enlarged() -> Self {
        ImuErrorSpec {
            gyro_bias: [2000.0, 2000.0, 2000.0],
            accel_bias: [80.0, 60.0, 50.0],
            ..Self::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ImuErrorSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let stoch = [
            self.gyro_instability,
            self.accel_instability,
            self.gyro_rw,
            self.accel_rw,
        ];
        if stoch.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Config("IMU stochastic parameters must be non-negative".into()));
        }
        if self.gyro_bias.iter().chain(&self.accel_bias).any(|x| !x.is_finite()) {
            return Err(Error::Config("IMU biases must be finite".into()));
        }
        Ok(())
    }

    pub fn gyro_bias_si(&self) -> Vector3<f64> {
        Vector3::from(self.gyro_bias) * DEG_PER_HOUR
    }

    pub fn accel_bias_si(&self) -> Vector3<f64> {
        Vector3::from(self.accel_bias) * MILLI_G
    }

    /// Gyro white-noise density, rad/√s.
    pub fn gyro_density(&self) -> f64 {
        self.gyro_rw * DEG_PER_SQRT_HOUR
    }

    /// Accelerometer white-noise density, (m/s²)/√Hz.
    pub fn accel_density(&self) -> f64 {
        self.accel_rw * MICRO_G
    }

    /// Gyro-bias random-walk density, rad/s/√s.
    pub fn gyro_bias_walk(&self) -> f64 {
        self.gyro_instability * DEG_PER_HOUR / BIAS_CORRELATION_TIME.sqrt()
    }

    /// Accelerometer-bias random-walk density, m/s²/√s.
    pub fn accel_bias_walk(&self) -> f64 {
        self.accel_instability * MICRO_G / BIAS_CORRELATION_TIME.sqrt()
    }

    /// Matching continuous noise model for a filter.
    pub fn noise_spec(&self, gnss_vel_std: f64, lever_psd: f64) -> NoiseSpec {
        NoiseSpec {
            gyro_arw: self.gyro_density(),
            accel_vrw: self.accel_density(),
            gyro_bias_psd: self.gyro_bias_walk(),
            accel_bias_psd: self.accel_bias_walk(),
            lever_psd,
            gnss_vel_std,
        }
    }
}

/// Corrupts truth rates with the configured errors. Sample `k` carries the
/// measurement for the interval starting at `truth[k].t`; the final truth
/// epoch closes the last interval and produces no sample.
pub fn simulate_imu(truth: &[TruthSample], spec: &ImuErrorSpec, rate: f64) -> Result<Vec<ImuSample>> {
    spec.validate()?;
    if truth.len() < 2 {
        return Ok(Vec::new());
    }
    let dt = 1.0 / rate;
    for w in truth.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "truth spacing {} s does not match the {rate} Hz IMU rate",
                w[1].t - w[0].t
            )));
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut normal3 = || {
        Vector3::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    };
    let sg = spec.gyro_density() / dt.sqrt();
    let sa = spec.accel_density() / dt.sqrt();
    let wg = spec.gyro_bias_walk() * dt.sqrt();
    let wa = spec.accel_bias_walk() * dt.sqrt();

    let mut bg = spec.gyro_bias_si();
    let mut ba = spec.accel_bias_si();
    let mut out = Vec::with_capacity(truth.len() - 1);
    for s in &truth[..truth.len() - 1] {
        let ng = normal3() * sg;
        let na = normal3() * sa;
        out.push(ImuSample::new(s.t, s.omega_ib_b + bg + ng, s.f_b + ba + na));
        bg += normal3() * wg;
        ba += normal3() * wa;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Quaternion;

    fn static_truth(n: usize, rate: f64) -> Vec<TruthSample> {
        (0..n)
            .map(|k| TruthSample {
                t: k as f64 / rate,
                att: Quaternion::identity(),
                pos: Vector3::new(0.0, 0.0, 6.4e6),
                vel_ground: Vector3::zeros(),
                omega_ib_b: Vector3::new(1e-3, -2e-3, 3e-3),
                f_b: Vector3::new(0.1, 0.2, 9.8),
            })
            .collect()
    }

    #[test]
    fn zero_spec_reproduces_truth() {
        let truth = static_truth(50, 100.0);
        let imu = simulate_imu(&truth, &ImuErrorSpec::zero(), 100.0).unwrap();
        assert_eq!(imu.len(), 49);
        for (u, s) in imu.iter().zip(&truth) {
            assert_eq!(u.gyro, s.omega_ib_b);
            assert_eq!(u.accel, s.f_b);
        }
    }

    #[test]
    fn rate_mismatch_is_rejected() {
        let truth = static_truth(10, 100.0);
        assert!(matches!(
            simulate_imu(&truth, &ImuErrorSpec::default(), 200.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unit_conversions() {
        let s = ImuErrorSpec::default();
        assert!((s.gyro_bias_si().x - 1000.0 * std::f64::consts::PI / 180.0 / 3600.0).abs() < 1e-18);
        assert!((s.accel_bias_si().x - 15e-3 * 9.80665).abs() < 1e-15);
        assert!((s.gyro_density() - 0.2 * std::f64::consts::PI / 180.0 / 60.0).abs() < 1e-18);
    }
}
