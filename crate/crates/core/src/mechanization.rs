//! Earth-frame strapdown propagation of the navigation state.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::algebra::{CliffordElement, ExtendedCliffordState, Quaternion, TridentQuaternion};
use crate::error::{Error, Result};
use crate::lie::so3::{left_jacobian, skew};

/// Smallest radius at which point-mass gravitation is evaluated.
pub const GRAVITY_GUARD_RADIUS: f64 = 1e5;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarthModel {
    /// Earth rotation rate about the e-frame z axis, rad/s.
    pub omega_ie: f64,
    /// Gravitational parameter, m³/s². Zero disables gravitation.
    pub mu: f64,
    /// Reference radius, m.
    pub r_ref: f64,
}

impl Default for EarthModel {
    fn default() -> Self {
        EarthModel {
            omega_ie: 7.292115e-5,
            mu: 3.986004418e14,
            r_ref: 6.378137e6,
        }
    }
}

impl EarthModel {
    /// No rotation and no gravitation, for kinematic tests.
    pub fn inert() -> Self {
        EarthModel {
            omega_ie: 0.0,
            mu: 0.0,
            r_ref: 6.378137e6,
        }
    }

    pub fn omega(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, self.omega_ie)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_ie >= 0.0 && self.mu >= 0.0 && self.r_ref > 0.0) {
            return Err(Error::Config(format!("invalid earth model {self:?}")));
        }
        Ok(())
    }
}

/// One IMU sample, applied over `[t, t + dt)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ImuSample {
    pub t: f64,
    pub gyro: Vector3<f64>,
    pub accel: Vector3<f64>,
}

impl ImuSample {
    pub fn new(t: f64, gyro: Vector3<f64>, accel: Vector3<f64>) -> Self {
        ImuSample { t, gyro, accel }
    }
}

/// GNSS fix: antenna velocity and position in the e-frame.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GnssSample {
    pub t: f64,
    pub vel: Vector3<f64>,
    pub pos: Vector3<f64>,
    /// One-sigma velocity noise per axis, m/s.
    pub vel_std: f64,
}

/// Spherical point-mass gravitation `−μ r / ‖r‖³`.
pub fn gravity(pos: &Vector3<f64>, model: &EarthModel) -> Result<Vector3<f64>> {
    if model.mu == 0.0 {
        return Ok(Vector3::zeros());
    }
    let r = pos.norm();
    if !(r > GRAVITY_GUARD_RADIUS) {
        return Err(Error::Domain(format!(
            "gravity requested at radius {r:.3} m, inside the {GRAVITY_GUARD_RADIUS} m guard"
        )));
    }
    Ok(-pos * (model.mu / (r * r * r)))
}

/// `Σ_k (φ×)^k / (k+2)!`, the second integral of the rotation exponential.
fn second_jacobian(phi: &Vector3<f64>) -> Matrix3<f64> {
    let t = phi.norm();
    let k = skew(phi);
    let (a, b) = if t < 1e-4 {
        let t2 = t * t;
        (1.0 / 6.0 - t2 / 120.0, 1.0 / 24.0 - t2 / 720.0)
    } else {
        let t2 = t * t;
        ((t - t.sin()) / (t2 * t), (t2 / 2.0 + t.cos() - 1.0) / (t2 * t2))
    };
    Matrix3::identity() * 0.5 + k * a + k * k * b
}

/// Advances `state` across one IMU interval.
///
/// Body-frame rates and specific force are held constant over the interval.
/// Attitude is exact for constant rates; the specific-force integrals use the
/// closed-form rotation integrals, and the slowly varying e-frame terms
/// (Coriolis, gravitation, transport) use the interval midpoint.
pub fn propagate(
    state: &ExtendedCliffordState<f64>,
    u: &ImuSample,
    dt: f64,
    model: &EarthModel,
) -> Result<ExtendedCliffordState<f64>> {
    if !(dt > 0.0) {
        return Err(Error::Ordering {
            previous: u.t,
            current: u.t + dt,
        });
    }
    if dt > 0.1 {
        return Err(Error::Domain(format!("propagation step {dt} s exceeds 0.1 s")));
    }
    let w = model.omega();
    let wx = skew(&w);
    let omega = u.gyro - state.bg;
    let f = u.accel - state.ba;
    let phi = omega * dt;
    let c = state.dcm();

    let earth_half = Quaternion::exp(&(-w * (0.5 * dt)));
    let earth_full = Quaternion::exp(&(-w * dt));
    let att = (earth_full * state.att * Quaternion::exp(&phi)).normalize();

    let dv_f = earth_half.rotate(&(c * left_jacobian(&phi) * f)) * dt;
    let dr_f = earth_half.rotate(&(c * second_jacobian(&phi) * f)) * (dt * dt);

    let a0 = -wx * state.vt + gravity(&state.pos, model)?;
    let vt_mid = state.vt + (dv_f + a0 * dt) * 0.5;
    let pos_mid = state.pos + (state.vt - wx * state.pos) * (0.5 * dt);
    let a_mid = -wx * vt_mid + gravity(&pos_mid, model)?;

    let vt = state.vt + dv_f + a_mid * dt;
    let pos = state.pos + state.vt * dt + dr_f + a_mid * (0.5 * dt * dt) - wx * pos_mid * dt;

    Ok(ExtendedCliffordState {
        att,
        vt,
        pos,
        ..*state
    })
}

/// Continuous-time state derivative with the same conventions as
/// [`propagate`]: `(q̇, v̇t, ṙ)`. Biases and lever are constant.
pub fn state_rates(
    state: &ExtendedCliffordState<f64>,
    u: &ImuSample,
    model: &EarthModel,
) -> Result<(Quaternion<f64>, Vector3<f64>, Vector3<f64>)> {
    let w = model.omega();
    let omega = u.gyro - state.bg;
    let f = u.accel - state.ba;
    let q = state.att;
    let qdot = (q * Quaternion::pure(omega) - Quaternion::pure(w) * q).scale(0.5);
    let vdot = q.rotate(&f) - w.cross(&state.vt) + gravity(&state.pos, model)?;
    let rdot = state.vt - w.cross(&state.pos);
    Ok((qdot, vdot, rdot))
}

/// Bias-free trident dynamics `(x ω̃_ib − ω̃_ie x)/2` with a fixed gravity
/// vector. `ω̃_ie` carries the state's own velocity in its second slot, which
/// enters as the linear map moving the first dual part into the second.
pub fn trident_dynamics(
    x: &TridentQuaternion<f64>,
    gyro: &Vector3<f64>,
    accel: &Vector3<f64>,
    g: &Vector3<f64>,
    model: &EarthModel,
) -> TridentQuaternion<f64> {
    let a = TridentQuaternion {
        real: Quaternion::pure(*gyro),
        dual1: Quaternion::pure(*accel),
        dual2: Quaternion::zero(),
    };
    let b = TridentQuaternion {
        real: Quaternion::pure(model.omega()),
        dual1: Quaternion::pure(-g),
        dual2: Quaternion::zero(),
    };
    let mut out = (*x * a).add(&(b * *x).scale(-1.0)).scale(0.5);
    out.dual2 = out.dual2 + x.dual1;
    out
}

/// Gravity vector used by the group-affine diagnostics: the model value at
/// the reference radius on the e-frame z axis, held constant.
fn diagnostic_gravity(model: &EarthModel) -> Vector3<f64> {
    gravity(&Vector3::new(0.0, 0.0, model.r_ref), model).unwrap_or_else(|_| Vector3::zeros())
}

/// `‖x1 f(x2) + f(x1) x2 − x1 f(1) x2 − f(x1 x2)‖` for the bias-free trident
/// dynamics; zero when the dynamics are group-affine.
pub fn group_affine_residual(
    x1: &TridentQuaternion<f64>,
    x2: &TridentQuaternion<f64>,
    u: &ImuSample,
    model: &EarthModel,
) -> f64 {
    let g = diagnostic_gravity(model);
    let f = |x: &TridentQuaternion<f64>| trident_dynamics(x, &u.gyro, &u.accel, &g, model);
    let id = TridentQuaternion::identity();
    let r = (*x1 * f(x2))
        .add(&(f(x1) * *x2))
        .add(&(*x1 * f(&id) * *x2).scale(-1.0))
        .add(&f(&(*x1 * *x2)).scale(-1.0));
    r.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Derivative of the packed full state (biases and lever included) under the
/// strapdown kinematics, with gravity held fixed.
pub fn extended_dynamics(
    s: &ExtendedCliffordState<f64>,
    u: &ImuSample,
    g: &Vector3<f64>,
    model: &EarthModel,
) -> CliffordElement<f64, 5> {
    let w = model.omega();
    let q = s.att;
    let qdot = (q * Quaternion::pure(u.gyro - s.bg) - Quaternion::pure(w) * q).scale(0.5);
    let vdot = q.rotate(&(u.accel - s.ba)) - w.cross(&s.vt) + g;
    let rdot = s.vt - w.cross(&s.pos);
    let left = |t: &Vector3<f64>, tdot: &Vector3<f64>| {
        (Quaternion::pure(*tdot) * q + Quaternion::pure(*t) * qdot).scale(0.5)
    };
    let right = |b: &Vector3<f64>| (qdot * Quaternion::pure(*b)).scale(0.5);
    CliffordElement {
        real: qdot,
        duals: [
            left(&s.vt, &vdot),
            left(&s.pos, &rdot),
            right(&s.bg),
            right(&s.ba),
            right(&s.lever),
        ],
    }
}

/// Group-affine residual of the full kinematics including biases and lever.
pub fn extended_group_affine_residual(
    s1: &ExtendedCliffordState<f64>,
    s2: &ExtendedCliffordState<f64>,
    u: &ImuSample,
    model: &EarthModel,
) -> f64 {
    let g = diagnostic_gravity(model);
    let f = |s: &ExtendedCliffordState<f64>| extended_dynamics(s, u, &g, model);
    let (x1, x2) = (s1.to_clifford(), s2.to_clifford());
    let id = ExtendedCliffordState::identity();
    (x1 * f(s2))
        .add(&(f(s1) * x2))
        .sub(&(x1 * f(&id) * x2))
        .sub(&f(&s1.compose(s2)))
        .norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gravity_on_polar_axis() {
        let m = EarthModel::default();
        let g = gravity(&Vector3::new(0.0, 0.0, m.r_ref), &m).unwrap();
        assert_relative_eq!(g.z, -m.mu / (m.r_ref * m.r_ref), max_relative = 1e-15);
        assert!((g.norm() - 9.8).abs() < 0.05);
        let p = Vector3::new(4e6, -3e6, 2e6);
        assert_eq!(gravity(&-p, &m).unwrap(), -gravity(&p, &m).unwrap());
        assert!(matches!(gravity(&Vector3::new(10.0, 0.0, 0.0), &m), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_inputs_leave_state_unchanged() {
        let s = ExtendedCliffordState {
            att: Quaternion::exp(&Vector3::new(0.1, 0.2, 0.3)),
            ..ExtendedCliffordState::identity()
        };
        let u = ImuSample::new(0.0, Vector3::zeros(), Vector3::zeros());
        let out = propagate(&s, &u, 0.01, &EarthModel::inert()).unwrap();
        assert!(out.att.max_abs_diff(&s.att) < 1e-15);
        assert_eq!(out.vt, s.vt);
        assert_eq!(out.pos, s.pos);
    }

    #[test]
    fn constant_acceleration() {
        let model = EarthModel::inert();
        let mut s = ExtendedCliffordState::identity();
        for k in 0..100 {
            let u = ImuSample::new(k as f64 * 0.01, Vector3::zeros(), Vector3::x());
            s = propagate(&s, &u, 0.01, &model).unwrap();
        }
        assert_relative_eq!(s.vt, Vector3::x(), epsilon = 1e-12);
        assert!((s.pos - Vector3::new(0.5, 0.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn rejects_non_positive_step() {
        let u = ImuSample::new(1.0, Vector3::zeros(), Vector3::zeros());
        let s = ExtendedCliffordState::identity();
        assert!(matches!(
            propagate(&s, &u, 0.0, &EarthModel::inert()),
            Err(Error::Ordering { .. })
        ));
    }

    #[test]
    fn identity_pair_has_zero_residual() {
        let id = TridentQuaternion::identity();
        let u = ImuSample::new(0.0, Vector3::new(0.1, 0.2, 0.3), Vector3::new(1.0, 2.0, 9.8));
        assert!(group_affine_residual(&id, &id, &u, &EarthModel::default()) < 1e-14);
    }
}
