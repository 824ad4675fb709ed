//! Planar land-vehicle trajectories lifted to the e-frame.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::mechanization::{gravity, EarthModel};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Straight,
    Accel,
    Decel,
    Turn,
}

/// One maneuver. `param` is the acceleration magnitude (m/s²) for
/// `accel`/`decel` and the signed turn rate (rad/s, positive left) for `turn`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration: f64,
    #[serde(default)]
    pub param: f64,
}

impl Segment {
    pub fn straight(duration: f64) -> Self {
        Segment {
            kind: SegmentKind::Straight,
            duration,
            param: 0.0,
        }
    }

    pub fn accel(duration: f64, a: f64) -> Self {
        Segment {
            kind: SegmentKind::Accel,
            duration,
            param: a,
        }
    }

    pub fn decel(duration: f64, a: f64) -> Self {
        Segment {
            kind: SegmentKind::Decel,
            duration,
            param: a,
        }
    }

    pub fn turn(duration: f64, rate: f64) -> Self {
        Segment {
            kind: SegmentKind::Turn,
            duration,
            param: rate,
        }
    }

    fn accel_value(&self) -> f64 {
        match self.kind {
            SegmentKind::Accel => self.param,
            SegmentKind::Decel => -self.param,
            _ => 0.0,
        }
    }

    fn turn_rate(&self) -> f64 {
        match self.kind {
            SegmentKind::Turn => self.param,
            _ => 0.0,
        }
    }
}

/// Vehicle profile. The segment list repeats until `duration` is reached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryProfile {
    /// Latitude (rad), longitude (rad), height (m) of the start point.
    pub origin_llh: [f64; 3],
    /// Initial heading, rad counter-clockwise from east.
    #[serde(default)]
    pub initial_heading: f64,
    pub segments: Vec<Segment>,
    pub base_speed: f64,
    pub imu_rate: f64,
    pub gnss_rate: f64,
    pub duration: f64,
}

/// 90° in ten seconds.
pub const QUARTER_TURN_RATE: f64 = PI / 20.0;

impl Default for TrajectoryProfile {
    /// Racetrack-like loop at 10 m/s with speed changes and 90°/180° turns.
    fn default() -> Self {
        TrajectoryProfile {
            origin_llh: [31f64.to_radians(), 121.4f64.to_radians(), 10.0],
            initial_heading: 30f64.to_radians(),
            segments: vec![
                Segment::turn(10.0, QUARTER_TURN_RATE),
                Segment::accel(5.0, 1.0),
                Segment::straight(10.0),
                Segment::decel(5.0, 1.0),
                Segment::turn(10.0, QUARTER_TURN_RATE),
                Segment::straight(360.0),
            ],
            base_speed: 10.0,
            imu_rate: 100.0,
            gnss_rate: 1.0,
            duration: 600.0,
        }
    }
}

impl TrajectoryProfile {
    pub fn imu_dt(&self) -> f64 {
        1.0 / self.imu_rate
    }

    pub fn imu_samples(&self) -> usize {
        (self.duration * self.imu_rate).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.duration > 0.0) {
            return bad(format!("profile duration must be positive, got {}", self.duration));
        }
        if !(self.imu_rate > 0.0 && self.gnss_rate > 0.0) {
            return bad("sensor rates must be positive".into());
        }
        if self.gnss_rate > self.imu_rate {
            return bad("GNSS rate cannot exceed the IMU rate".into());
        }
        if !on_grid(self.imu_rate / self.gnss_rate) {
            return bad("IMU rate must be an integer multiple of the GNSS rate".into());
        }
        if !on_grid(self.duration * self.imu_rate) {
            return bad("duration must be a whole number of IMU intervals".into());
        }
        if self.segments.is_empty() {
            return bad("profile needs at least one segment".into());
        }
        if !(self.base_speed >= 0.0) {
            return bad("base speed must be non-negative".into());
        }
        for (k, s) in self.segments.iter().enumerate() {
            if !(s.duration > 0.0) {
                return bad(format!("segment {k} has non-positive duration"));
            }
            if !on_grid(s.duration * self.imu_rate) {
                return bad(format!(
                    "segment {k} duration {} s is not a whole number of IMU intervals",
                    s.duration
                ));
            }
            if !s.param.is_finite() {
                return bad(format!("segment {k} parameter is not finite"));
            }
        }
        Ok(())
    }

    /// Rotation from local east-north-up axes at the origin to the e-frame.
    pub fn enu_to_ecef(&self) -> Matrix3<f64> {
        let lat = self.origin_llh[0];
        let lon = self.origin_llh[1];
        enu_to_ecef(lat, lon)
    }

    pub fn origin_ecef(&self, model: &EarthModel) -> Vector3<f64> {
        let lat = self.origin_llh[0];
        let lon = self.origin_llh[1];
        let r = model.r_ref + self.origin_llh[2];
        Vector3::new(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()) * r
    }
}

fn on_grid(x: f64) -> bool {
    (x - x.round()).abs() < 1e-6
}

/// ENU axes at geocentric latitude/longitude as columns in the e-frame.
pub fn enu_to_ecef(lat: f64, lon: f64) -> Matrix3<f64> {
    let (sl, cl) = lat.sin_cos();
    let (so, co) = lon.sin_cos();
    Matrix3::new(-so, -sl * co, cl * co, co, -sl * so, cl * so, 0.0, cl, sl)
}

/// Planar state at one instant.
#[derive(Copy, Clone, Debug)]
struct PlanarState {
    p: Vector2<f64>,
    speed: f64,
    heading: f64,
}

/// Motion within one segment instance.
#[derive(Copy, Clone, Debug)]
struct Leg {
    t0: f64,
    start: PlanarState,
    accel: f64,
    rate: f64,
}

impl Leg {
    /// Position, velocity, acceleration, heading and heading rate at `t`.
    fn eval(&self, t: f64) -> (Vector2<f64>, Vector2<f64>, Vector2<f64>, f64) {
        let tau = t - self.t0;
        let s0 = self.start.speed;
        let psi0 = self.start.heading;
        let speed = s0 + self.accel * tau;
        let psi = psi0 + self.rate * tau;
        let dir = Vector2::new(psi.cos(), psi.sin());
        let normal = Vector2::new(-psi.sin(), psi.cos());
        let p = if self.rate.abs() < 1e-12 {
            self.start.p + Vector2::new(psi0.cos(), psi0.sin()) * (s0 * tau + 0.5 * self.accel * tau * tau)
        } else {
            // constant speed inside turns
            let k = s0 / self.rate;
            self.start.p + Vector2::new(psi.sin() - psi0.sin(), psi0.cos() - psi.cos()) * k
        };
        let v = dir * speed;
        let a = dir * self.accel + normal * (speed * self.rate);
        (p, v, a, psi)
    }

    fn end(&self, duration: f64) -> PlanarState {
        let (p, _, _, psi) = self.eval(self.t0 + duration);
        PlanarState {
            p,
            speed: self.start.speed + self.accel * duration,
            heading: psi,
        }
    }
}

/// Ground truth at one IMU epoch. Rates and specific force describe the
/// interval `[t, t + dt)` and are evaluated at its midpoint.
#[derive(Copy, Clone, Debug)]
pub struct TruthSample {
    pub t: f64,
    /// `q_e^b`; body axes are forward-left-up.
    pub att: Quaternion<f64>,
    pub pos: Vector3<f64>,
    pub vel_ground: Vector3<f64>,
    pub omega_ib_b: Vector3<f64>,
    pub f_b: Vector3<f64>,
}

impl TruthSample {
    /// Transformed velocity `ω_ie × r + ṙ`.
    pub fn vt(&self, model: &EarthModel) -> Vector3<f64> {
        self.vel_ground + model.omega().cross(&self.pos)
    }

    /// Body rate relative to the earth frame.
    pub fn omega_eb_b(&self, model: &EarthModel) -> Vector3<f64> {
        self.omega_ib_b - self.att.conj().rotate(&model.omega())
    }
}

/// Generates truth at every IMU epoch `t = k / imu_rate`, `k = 0..=N`.
pub fn generate_trajectory(profile: &TrajectoryProfile, model: &EarthModel) -> Result<Vec<TruthSample>> {
    profile.validate()?;
    let n = profile.imu_samples();
    let dt = profile.imu_dt();
    let legs = build_legs(profile)?;
    let r0 = profile.origin_ecef(model);
    let cne = profile.enu_to_ecef();
    let w = model.omega();

    let kin = |t: f64| -> Result<(Vector3<f64>, Vector3<f64>, Vector3<f64>, f64, f64)> {
        let leg = leg_at(&legs, t);
        let (p, v, a, psi) = leg.eval(t);
        let lift = |x: Vector2<f64>| cne * Vector3::new(x.x, x.y, 0.0);
        Ok((r0 + lift(p), lift(v), lift(a), psi, leg.rate))
    };
    let attitude = |psi: f64| -> Quaternion<f64> {
        let rz = Quaternion::exp(&Vector3::new(0.0, 0.0, psi));
        Quaternion::from_dcm(&cne) * rz
    };

    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = k as f64 * dt;
        let (pos, vel, _, psi, _) = kin(t)?;
        let tm = t + 0.5 * dt;
        let (pm, vm, am, psim, rate) = kin(tm)?;
        let qm = attitude(psim);
        let f_e = am + 2.0 * w.cross(&vm) + w.cross(&w.cross(&pm)) - gravity(&pm, model)?;
        out.push(TruthSample {
            t,
            att: attitude(psi),
            pos,
            vel_ground: vel,
            omega_ib_b: Vector3::new(0.0, 0.0, rate) + qm.conj().rotate(&w),
            f_b: qm.conj().rotate(&f_e),
        });
    }
    Ok(out)
}

fn build_legs(profile: &TrajectoryProfile) -> Result<Vec<Leg>> {
    let mut legs = Vec::new();
    let mut state = PlanarState {
        p: Vector2::zeros(),
        speed: profile.base_speed,
        heading: profile.initial_heading,
    };
    let mut t = 0.0;
    // one extra interval so the final midpoint evaluation stays inside a leg
    let horizon = profile.duration + profile.imu_dt();
    'outer: loop {
        for seg in &profile.segments {
            if t >= horizon {
                break 'outer;
            }
            let leg = Leg {
                t0: t,
                start: state,
                accel: seg.accel_value(),
                rate: seg.turn_rate(),
            };
            let end = leg.end(seg.duration);
            if end.speed < 0.0 {
                return Err(Error::Config(format!(
                    "profile drives the speed negative at t = {:.2} s",
                    t + seg.duration
                )));
            }
            legs.push(leg);
            state = end;
            t += seg.duration;
        }
    }
    Ok(legs)
}

fn leg_at(legs: &[Leg], t: f64) -> &Leg {
    let idx = legs.partition_point(|l| l.t0 <= t + 1e-9);
    &legs[idx.saturating_sub(1)]
}

/// Heading (rad, counter-clockwise from east), pitch and roll of `q_e^b`
/// relative to the local ENU frame at `pos`.
pub fn euler_enu(att: &Quaternion<f64>, pos: &Vector3<f64>) -> (f64, f64, f64) {
    let lat = (pos.z / pos.norm()).asin();
    let lon = pos.y.atan2(pos.x);
    let cnb = enu_to_ecef(lat, lon).transpose() * att.to_dcm();
    let yaw = cnb[(1, 0)].atan2(cnb[(0, 0)]);
    let pitch = (-cnb[(2, 0)]).clamp(-1.0, 1.0).asin();
    let roll = cnb[(2, 1)].atan2(cnb[(2, 2)]);
    (roll, pitch, yaw)
}

/// `q_e^b` from ENU Euler angles (roll, pitch, yaw) at `pos`.
pub fn attitude_from_euler(roll: f64, pitch: f64, yaw: f64, pos: &Vector3<f64>) -> Quaternion<f64> {
    let lat = (pos.z / pos.norm()).asin();
    let lon = pos.y.atan2(pos.x);
    let qn = Quaternion::from_dcm(&enu_to_ecef(lat, lon));
    qn * Quaternion::exp(&Vector3::new(0.0, 0.0, yaw))
        * Quaternion::exp(&Vector3::new(0.0, pitch, 0.0))
        * Quaternion::exp(&Vector3::new(roll, 0.0, 0.0))
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = (a + PI) % (2.0 * PI);
    if x < 0.0 {
        x += 2.0 * PI;
    }
    x - PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short_profile(segments: Vec<Segment>, duration: f64) -> TrajectoryProfile {
        TrajectoryProfile {
            segments,
            duration,
            ..TrajectoryProfile::default()
        }
    }

    #[test]
    fn straight_segment_keeps_heading() {
        let model = EarthModel::default();
        let p = short_profile(vec![Segment::straight(10.0)], 10.0);
        let truth = generate_trajectory(&p, &model).unwrap();
        let (_, _, h0) = euler_enu(&truth[0].att, &truth[0].pos);
        let (_, _, h1) = euler_enu(&truth.last().unwrap().att, &truth.last().unwrap().pos);
        assert!((h1 - h0).abs() < 1e-5);
        let s = truth[500];
        let g = gravity(&s.pos, &model).unwrap();
        let w = model.omega();
        let expected = s.att.conj().rotate(
            &(2.0 * w.cross(&s.vel_ground) + w.cross(&w.cross(&s.pos)) - g),
        );
        assert!((s.f_b - expected).norm() < 1e-6);
    }

    #[test]
    fn quarter_turn() {
        let model = EarthModel::inert();
        let p = TrajectoryProfile {
            initial_heading: 0.0,
            ..short_profile(vec![Segment::turn(10.0, QUARTER_TURN_RATE)], 10.0)
        };
        let truth = generate_trajectory(&p, &model).unwrap();
        let cne = p.enu_to_ecef();
        let c0 = cne.transpose() * truth[0].att.to_dcm();
        let c1 = cne.transpose() * truth.last().unwrap().att.to_dcm();
        let rel = c0.transpose() * c1;
        let yaw = rel[(1, 0)].atan2(rel[(0, 0)]);
        assert!((yaw - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_profiles() {
        let model = EarthModel::default();
        let mut p = short_profile(vec![Segment::straight(10.0)], 0.0);
        assert!(matches!(generate_trajectory(&p, &model), Err(Error::Config(_))));
        p.duration = 10.0;
        p.segments = vec![Segment::straight(0.005)];
        assert!(generate_trajectory(&p, &model).is_err());
        p.segments = vec![Segment::decel(20.0, 1.0)];
        assert!(generate_trajectory(&p, &model).is_err());
    }

    #[test]
    fn euler_round_trip() {
        let pos = Vector3::new(3e6, 4e6, 3.5e6);
        let q = attitude_from_euler(0.3, -0.2, 2.5, &pos);
        let (r, p, y) = euler_enu(&q, &pos);
        assert!((r - 0.3).abs() < 1e-12 && (p + 0.2).abs() < 1e-12 && (y - 2.5).abs() < 1e-12);
    }

    #[test]
    fn wrapping() {
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(-0.1) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn noiseless_reintegration_closes() {
        use crate::mechanization::{propagate, ImuSample};
        let model = EarthModel::default();
        let p = TrajectoryProfile::default();
        let truth = generate_trajectory(&p, &model).unwrap();
        let dt = p.imu_dt();
        let mut x = crate::algebra::ExtendedCliffordState {
            att: truth[0].att,
            vt: truth[0].vt(&model),
            pos: truth[0].pos,
            ..crate::algebra::ExtendedCliffordState::identity()
        };
        let mut worst: f64 = 0.0;
        for w in truth.windows(2) {
            let u = ImuSample::new(w[0].t, w[0].omega_ib_b, w[0].f_b);
            x = propagate(&x, &u, dt, &model).unwrap();
            worst = worst.max((x.pos - w[1].pos).norm());
        }
        eprintln!("closure error {worst:e} m");
        assert!(worst < 1e-3, "closure error {worst} m");
    }
}
