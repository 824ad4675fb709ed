//! Continuous-time error dynamics `ė = F e + G w` and the GNSS velocity
//! measurement Jacobian for each filter kind.
//!
//! Error blocks are ordered `[attitude, velocity, position, gyro bias,
//! accel bias, lever]`; noise blocks `[gyro white, accel white, gyro-bias
//! drive, accel-bias drive, lever drive]`. Every error is "truth minus
//! estimate" in the chart of its kind.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use super::variant::FilterKind;
use crate::algebra::ExtendedCliffordState;
use crate::error::{Error, Result};
use crate::lie::so3::skew;
use crate::mechanization::{gravity, EarthModel, ImuSample};

pub type Mat18 = SMatrix<f64, 18, 18>;
pub type Mat18x15 = SMatrix<f64, 18, 15>;
pub type Mat3x18 = SMatrix<f64, 3, 18>;
pub type Vec18 = SVector<f64, 18>;
pub type Vec15 = SVector<f64, 15>;

/// Stacked error vector `[Δσ, Δv, Δr, Δb_g, Δb_a, Δl]`.
pub type ErrorState18 = Vec18;
pub type Covariance18 = Mat18;

pub const ATT: usize = 0;
pub const VEL: usize = 1;
pub const POS: usize = 2;
pub const BG: usize = 3;
pub const BA: usize = 4;
pub const LEVER: usize = 5;

#[inline]
pub(crate) fn set_block<const R: usize, const C: usize>(
    m: &mut SMatrix<f64, R, C>,
    bi: usize,
    bj: usize,
    b: &Matrix3<f64>,
) {
    m.fixed_view_mut::<3, 3>(3 * bi, 3 * bj).copy_from(b);
}

#[cfg(test)]
pub(crate) fn block<const R: usize, const C: usize>(
    m: &SMatrix<f64, R, C>,
    bi: usize,
    bj: usize,
) -> Matrix3<f64> {
    m.fixed_view::<3, 3>(3 * bi, 3 * bj).into_owned()
}

pub(crate) fn seg(v: &Vec18, b: usize) -> Vector3<f64> {
    v.fixed_rows::<3>(3 * b).into_owned()
}

/// Process and measurement noise densities in SI units.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// Gyro white noise, rad/√s.
    pub gyro_arw: f64,
    /// Accelerometer white noise, (m/s²)/√Hz.
    pub accel_vrw: f64,
    /// Gyro-bias random-walk density, rad/s/√s.
    pub gyro_bias_psd: f64,
    /// Accelerometer-bias random-walk density, m/s²/√s.
    pub accel_bias_psd: f64,
    /// Lever-arm random-walk density, m/√s.
    pub lever_psd: f64,
    /// GNSS velocity noise, m/s per axis.
    pub gnss_vel_std: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gyro_arw,
            self.accel_vrw,
            self.gyro_bias_psd,
            self.accel_bias_psd,
            self.lever_psd,
            self.gnss_vel_std,
        ];
        if all.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Config(format!("noise densities must be non-negative: {self:?}")));
        }
        Ok(())
    }

    /// Diagonal of the continuous noise covariance `Q`.
    pub fn q_diag(&self) -> Vec15 {
        let mut q = Vec15::zeros();
        let d = [
            self.gyro_arw,
            self.accel_vrw,
            self.gyro_bias_psd,
            self.accel_bias_psd,
            self.lever_psd,
        ];
        for (k, s) in d.iter().enumerate() {
            q.fixed_rows_mut::<3>(3 * k).fill(s * s);
        }
        q
    }
}

/// Quantities at which the models are evaluated.
#[derive(Copy, Clone, Debug)]
pub struct Linearization {
    /// `C_b^e` of the estimate.
    pub c: Matrix3<f64>,
    pub vt: Vector3<f64>,
    pub pos: Vector3<f64>,
    /// Bias-corrected angular rate `ω̂_ib^b`.
    pub omega_ib: Vector3<f64>,
    /// Bias-corrected specific force `f̂^b`.
    pub f: Vector3<f64>,
    pub lever: Vector3<f64>,
    pub g: Vector3<f64>,
    /// Earth rate `ω_ie^e`.
    pub w: Vector3<f64>,
}

impl Linearization {
    pub fn new(state: &ExtendedCliffordState<f64>, u: &ImuSample, model: &EarthModel) -> Result<Self> {
        Ok(Linearization {
            c: state.dcm(),
            vt: state.vt,
            pos: state.pos,
            omega_ib: u.gyro - state.bg,
            f: u.accel - state.ba,
            lever: state.lever,
            g: gravity(&state.pos, model)?,
            w: model.omega(),
        })
    }

    /// `ω̂_eb^b = ω̂_ib^b − Ĉᵀ ω_ie^e`.
    pub fn omega_eb(&self) -> Vector3<f64> {
        self.omega_ib - self.c.transpose() * self.w
    }
}

pub fn build_fg(
    kind: FilterKind,
    state: &ExtendedCliffordState<f64>,
    u: &ImuSample,
    model: &EarthModel,
) -> Result<(Mat18, Mat18x15)> {
    Ok(build_fg_at(kind, &Linearization::new(state, u, model)?))
}

pub fn build_fg_at(kind: FilterKind, lin: &Linearization) -> (Mat18, Mat18x15) {
    let mut f = Mat18::zeros();
    let mut g = Mat18x15::zeros();
    let i3 = Matrix3::identity();
    let c = lin.c;
    let wx = skew(&lin.w);
    match kind {
        FilterKind::CliffordRqekf => {
            let d = skew(&(c * lin.omega_eb()));
            set_block(&mut f, ATT, ATT, &-wx);
            set_block(&mut f, ATT, BG, &-i3);
            set_block(&mut f, VEL, ATT, &skew(&lin.g));
            set_block(&mut f, VEL, VEL, &-wx);
            set_block(&mut f, VEL, BG, &-skew(&lin.vt));
            set_block(&mut f, VEL, BA, &-i3);
            set_block(&mut f, POS, VEL, &i3);
            set_block(&mut f, POS, POS, &-wx);
            set_block(&mut f, POS, BG, &-skew(&lin.pos));
            for b in [BG, BA, LEVER] {
                set_block(&mut f, b, b, &d);
            }
            set_block(&mut g, ATT, 0, &-c);
            set_block(&mut g, VEL, 0, &-(skew(&lin.vt) * c));
            set_block(&mut g, VEL, 1, &-c);
            set_block(&mut g, POS, 0, &-(skew(&lin.pos) * c));
            set_block(&mut g, BG, 2, &c);
            set_block(&mut g, BA, 3, &c);
            set_block(&mut g, LEVER, 4, &c);
        }
        FilterKind::Rqekf => {
            set_block(&mut f, ATT, ATT, &-wx);
            set_block(&mut f, ATT, BG, &-c);
            set_block(&mut f, VEL, ATT, &skew(&lin.g));
            set_block(&mut f, VEL, VEL, &-wx);
            set_block(&mut f, VEL, BG, &-(skew(&lin.vt) * c));
            set_block(&mut f, VEL, BA, &-c);
            set_block(&mut f, POS, VEL, &i3);
            set_block(&mut f, POS, POS, &-wx);
            set_block(&mut f, POS, BG, &-(skew(&lin.pos) * c));
            set_block(&mut g, ATT, 0, &-c);
            set_block(&mut g, VEL, 0, &-(skew(&lin.vt) * c));
            set_block(&mut g, VEL, 1, &-c);
            set_block(&mut g, POS, 0, &-(skew(&lin.pos) * c));
            set_block(&mut g, BG, 2, &i3);
            set_block(&mut g, BA, 3, &i3);
            set_block(&mut g, LEVER, 4, &i3);
        }
        FilterKind::Lqekf => {
            let om = skew(&lin.omega_ib);
            set_block(&mut f, ATT, ATT, &-om);
            set_block(&mut f, ATT, BG, &-i3);
            set_block(&mut f, VEL, ATT, &-skew(&lin.f));
            set_block(&mut f, VEL, VEL, &-om);
            set_block(&mut f, VEL, BA, &-i3);
            set_block(&mut f, POS, VEL, &i3);
            set_block(&mut f, POS, POS, &-om);
            set_block(&mut g, ATT, 0, &-i3);
            set_block(&mut g, VEL, 1, &-i3);
            set_block(&mut g, BG, 2, &i3);
            set_block(&mut g, BA, 3, &i3);
            set_block(&mut g, LEVER, 4, &i3);
        }
        FilterKind::Ekf => {
            set_block(&mut f, ATT, ATT, &-wx);
            set_block(&mut f, ATT, BG, &-c);
            set_block(&mut f, VEL, ATT, &-skew(&(c * lin.f)));
            set_block(&mut f, VEL, VEL, &(-2.0 * wx));
            set_block(&mut f, VEL, POS, &-(wx * wx));
            set_block(&mut f, VEL, BA, &-c);
            set_block(&mut f, POS, VEL, &i3);
            set_block(&mut g, ATT, 0, &-c);
            set_block(&mut g, VEL, 1, &-c);
            set_block(&mut g, BG, 2, &i3);
            set_block(&mut g, BA, 3, &i3);
            set_block(&mut g, LEVER, 4, &i3);
        }
    }
    (f, g)
}

pub fn build_h(
    kind: FilterKind,
    state: &ExtendedCliffordState<f64>,
    u: &ImuSample,
    model: &EarthModel,
) -> Result<Mat3x18> {
    let lin = Linearization::new(state, u, model)?;
    Ok(build_h_at(kind, &lin, &lin.omega_eb()))
}

/// Measurement Jacobian with the body rate `ω_eb^b` of the lever term given
/// explicitly.
pub fn build_h_at(kind: FilterKind, lin: &Linearization, omega_eb: &Vector3<f64>) -> Mat3x18 {
    let mut h = Mat3x18::zeros();
    let c = lin.c;
    let wx = skew(&lin.w);
    let lever_rate = skew(&(c * omega_eb.cross(&lin.lever)));
    let put = |h: &mut Mat3x18, b: usize, m: &Matrix3<f64>| {
        h.fixed_view_mut::<3, 3>(0, 3 * b).copy_from(m);
    };
    match kind {
        FilterKind::CliffordRqekf | FilterKind::Rqekf => {
            let j = -skew(&lin.vt) + wx * skew(&lin.pos) - lever_rate;
            put(&mut h, ATT, &j);
            put(&mut h, VEL, &Matrix3::identity());
            put(&mut h, POS, &-wx);
            let l = if kind == FilterKind::CliffordRqekf {
                skew(&(c * omega_eb))
            } else {
                c * skew(omega_eb)
            };
            put(&mut h, LEVER, &l);
        }
        FilterKind::Lqekf => {
            put(&mut h, ATT, &-(c * skew(&omega_eb.cross(&lin.lever))));
            put(&mut h, VEL, &c);
            put(&mut h, POS, &-(wx * c));
            put(&mut h, LEVER, &(c * skew(omega_eb)));
        }
        FilterKind::Ekf => {
            put(&mut h, ATT, &-lever_rate);
            put(&mut h, VEL, &Matrix3::identity());
            put(&mut h, LEVER, &(c * skew(omega_eb)));
        }
    }
    h
}

/// Predicted GNSS velocity: ground velocity plus the lever-arm rate.
pub fn predict_measurement(
    state: &ExtendedCliffordState<f64>,
    u: &ImuSample,
    model: &EarthModel,
) -> Vector3<f64> {
    let c = state.dcm();
    let omega_eb = u.gyro - state.bg - c.transpose() * model.omega();
    predict_measurement_with_rate(state, &omega_eb, model)
}

pub fn predict_measurement_with_rate(
    state: &ExtendedCliffordState<f64>,
    omega_eb: &Vector3<f64>,
    model: &EarthModel,
) -> Vector3<f64> {
    let w = model.omega();
    state.vt - w.cross(&state.pos) + state.att.rotate(&omega_eb.cross(&state.lever))
}
