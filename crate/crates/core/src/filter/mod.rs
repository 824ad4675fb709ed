//! Error-state Kalman filters for loosely coupled INS/GNSS velocity fusion.

pub mod covariance;
pub mod model;
pub mod retract;
pub mod update;
pub mod variant;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

pub use covariance::predict;
pub use model::{
    build_fg, build_fg_at, build_h, build_h_at, predict_measurement, predict_measurement_with_rate,
    Covariance18, ErrorState18, Linearization, Mat18, Mat18x15, Mat3x18, NoiseSpec, Vec18,
};
pub use retract::{additive_jacobian, attitude_covariance_eframe, error_between, init_covariance, retract};
pub use update::{iterated_update, IteratedModel, IteratedOutcome};
pub use variant::{FilterKind, FilterVariant};

use crate::algebra::ExtendedCliffordState;
use crate::error::Result;
use crate::mechanization::{propagate, EarthModel, GnssSample, ImuSample};

type State = ExtendedCliffordState<f64>;

/// Per-axis one-sigma uncertainties in additive coordinates.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditiveStd {
    /// Attitude, deg (e-frame rotation vector).
    pub att_deg: [f64; 3],
    /// Transformed velocity, m/s.
    pub vel: [f64; 3],
    /// Position, m.
    pub pos: [f64; 3],
    /// Gyro bias, deg/h.
    pub gyro_bias_deg_h: [f64; 3],
    /// Accelerometer bias, mg.
    pub accel_bias_mg: [f64; 3],
    /// Lever arm, m.
    pub lever: [f64; 3],
}

impl AdditiveStd {
    pub fn covariance(&self) -> Mat18 {
        let deg_h = std::f64::consts::PI / 180.0 / 3600.0;
        let mg = 1e-3 * crate::sim::STANDARD_GRAVITY;
        let mut p = Mat18::zeros();
        let blocks: [([f64; 3], f64); 6] = [
            (self.att_deg, 1f64.to_radians()),
            (self.vel, 1.0),
            (self.pos, 1.0),
            (self.gyro_bias_deg_h, deg_h),
            (self.accel_bias_mg, mg),
            (self.lever, 1.0),
        ];
        for (b, (s, unit)) in blocks.iter().enumerate() {
            for k in 0..3 {
                let x = s[k] * unit;
                p[(3 * b + k, 3 * b + k)] = x * x;
            }
        }
        p
    }
}

/// GNSS velocity measurement seen by the iterated update. The body rate of
/// the lever term is frozen at the prior estimate.
pub struct GnssVelocityModel {
    pub kind: FilterKind,
    pub earth: EarthModel,
    pub omega_eb: Vector3<f64>,
    pub threshold: f64,
}

impl IteratedModel<18, 3> for GnssVelocityModel {
    type State = State;

    fn predict(&self, x: &State) -> Vector3<f64> {
        predict_measurement_with_rate(x, &self.omega_eb, &self.earth)
    }

    fn jacobian(&self, x: &State) -> Mat3x18 {
        let lin = Linearization {
            c: x.dcm(),
            vt: x.vt,
            pos: x.pos,
            omega_ib: Vector3::zeros(),
            f: Vector3::zeros(),
            lever: x.lever,
            g: Vector3::zeros(),
            w: self.earth.omega(),
        };
        build_h_at(self.kind, &lin, &self.omega_eb)
    }

    fn retract(&self, base: &State, delta: &Vec18) -> State {
        retract(self.kind, base, delta, &self.earth)
    }

    fn converged(&self, prev: &Vec18, next: &Vec18) -> bool {
        (next.fixed_rows::<3>(0) - prev.fixed_rows::<3>(0)).norm() < self.threshold
    }
}

/// Result of one GNSS measurement update.
#[derive(Copy, Clone, Debug)]
pub struct UpdateReport {
    pub iters: usize,
    pub innovation: Vector3<f64>,
}

/// State, covariance and configuration of one running filter.
#[derive(Clone, Debug)]
pub struct NavFilter {
    pub variant: FilterVariant,
    pub state: State,
    pub cov: Mat18,
    pub noise: NoiseSpec,
    pub earth: EarthModel,
    pub joseph: bool,
}

impl NavFilter {
    pub fn new(
        variant: FilterVariant,
        state: State,
        std: &AdditiveStd,
        noise: NoiseSpec,
        earth: EarthModel,
    ) -> Self {
        let cov = init_covariance(variant.kind, &std.covariance(), &state, &earth);
        NavFilter {
            variant,
            state,
            cov,
            noise,
            earth,
            joseph: false,
        }
    }

    pub fn kind(&self) -> FilterKind {
        self.variant.kind
    }

    /// Time update across one IMU interval.
    pub fn propagate(&mut self, u: &ImuSample, dt: f64) -> Result<()> {
        let (f, g) = build_fg(self.kind(), &self.state, u, &self.earth)?;
        self.cov = predict(&self.cov, &f, &g, &self.noise, dt)?;
        self.state = propagate(&self.state, u, dt, &self.earth)?;
        Ok(())
    }

    /// Measurement update with a GNSS velocity; `u` supplies the body rate.
    pub fn update(&mut self, y: &GnssSample, u: &ImuSample) -> Result<UpdateReport> {
        let c = self.state.dcm();
        let omega_eb = u.gyro - self.state.bg - c.transpose() * self.earth.omega();
        let model = GnssVelocityModel {
            kind: self.kind(),
            earth: self.earth,
            omega_eb,
            threshold: self.variant.term_threshold(),
        };
        let innovation = y.vel - model.predict(&self.state);
        let r = Matrix3::identity() * (y.vel_std * y.vel_std);
        let out = iterated_update(
            &model,
            &self.state,
            &self.cov,
            &y.vel,
            &r,
            self.variant.passes(),
            self.joseph,
        )?;
        self.state = out.state;
        self.cov = covariance::checked_symmetric(out.cov)?;
        Ok(UpdateReport {
            iters: out.iters,
            innovation,
        })
    }

    /// Re-initializes from a GNSS fix, keeping the attitude.
    pub fn reset(&mut self, y: &GnssSample, std: &AdditiveStd) {
        let (state, cov) = reset_filter(self.kind(), &self.state, &y.pos, &y.vel, std, &self.earth);
        self.state = state;
        self.cov = cov;
    }

    /// Attitude-error covariance as an e-frame rotation vector.
    pub fn attitude_cov(&self) -> Matrix3<f64> {
        attitude_covariance_eframe(self.kind(), &self.cov, &self.state)
    }
}

/// Position and transformed velocity from the fix, zero biases and lever,
/// attitude kept. The covariance is diagonal in additive coordinates and then
/// re-based into the filter's chart.
pub fn reset_filter(
    kind: FilterKind,
    state: &State,
    gnss_pos: &Vector3<f64>,
    gnss_vel: &Vector3<f64>,
    std: &AdditiveStd,
    earth: &EarthModel,
) -> (State, Mat18) {
    let new = State {
        att: state.att,
        vt: gnss_vel + earth.omega().cross(gnss_pos),
        pos: *gnss_pos,
        bg: Vector3::zeros(),
        ba: Vector3::zeros(),
        lever: Vector3::zeros(),
    };
    let cov = init_covariance(kind, &std.covariance(), &new, earth);
    (new, cov)
}
