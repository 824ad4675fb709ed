//! Error charts: applying an error-state correction to an estimate, the
//! exact inverse map, and the covariance re-basing from additive errors.

use nalgebra::{Matrix3, Vector3};

use super::model::{seg, set_block, Mat18, Vec18, ATT, BA, BG, LEVER, POS, VEL};
use super::variant::FilterKind;
use crate::algebra::{ExtendedCliffordState, Quaternion};
use crate::lie::so3::{left_jacobian, left_jacobian_inv, skew, so3_exp};
use crate::mechanization::EarthModel;

type State = ExtendedCliffordState<f64>;

/// Truth implied by estimate `est` and error `delta`.
pub fn retract(kind: FilterKind, est: &State, delta: &Vec18, model: &EarthModel) -> State {
    let ds = seg(delta, ATT);
    let dv = seg(delta, VEL);
    let dr = seg(delta, POS);
    match kind {
        FilterKind::CliffordRqekf => {
            let e = so3_exp(&ds);
            let j = left_jacobian(&ds);
            let att = (Quaternion::exp(&ds) * est.att).normalize();
            let ct = att.to_dcm().transpose();
            State {
                att,
                vt: e * est.vt + j * dv,
                pos: e * est.pos + j * dr,
                bg: est.bg + ct * (j * seg(delta, BG)),
                ba: est.ba + ct * (j * seg(delta, BA)),
                lever: est.lever + ct * (j * seg(delta, LEVER)),
            }
        }
        FilterKind::Rqekf => {
            let e = so3_exp(&ds);
            State {
                att: (Quaternion::exp(&ds) * est.att).normalize(),
                vt: e * (dv + est.vt),
                pos: e * (dr + est.pos),
                ..additive_tail(est, delta)
            }
        }
        FilterKind::Lqekf => {
            let c = est.dcm();
            State {
                att: (est.att * Quaternion::exp(&ds)).normalize(),
                vt: est.vt + c * dv,
                pos: est.pos + c * dr,
                ..additive_tail(est, delta)
            }
        }
        FilterKind::Ekf => {
            let w = model.omega();
            let pos = est.pos + dr;
            let vg = est.vt - w.cross(&est.pos) + dv;
            State {
                att: (Quaternion::exp(&ds) * est.att).normalize(),
                vt: vg + w.cross(&pos),
                pos,
                ..additive_tail(est, delta)
            }
        }
    }
}

fn additive_tail(est: &State, delta: &Vec18) -> State {
    State {
        bg: est.bg + seg(delta, BG),
        ba: est.ba + seg(delta, BA),
        lever: est.lever + seg(delta, LEVER),
        ..*est
    }
}

/// Exact error of `truth` relative to `est`; inverse of [`retract`].
pub fn error_between(kind: FilterKind, truth: &State, est: &State, model: &EarthModel) -> Vec18 {
    let c = truth.dcm();
    let ch = est.dcm();
    let mut out = Vec18::zeros();
    let mut put = |b: usize, v: Vector3<f64>| out.fixed_rows_mut::<3>(3 * b).copy_from(&v);
    match kind {
        FilterKind::CliffordRqekf => {
            let ds = (truth.att * est.att.conj()).log();
            let e = so3_exp(&ds);
            let jinv = left_jacobian_inv(&ds);
            put(ATT, ds);
            put(VEL, jinv * (truth.vt - e * est.vt));
            put(POS, jinv * (truth.pos - e * est.pos));
            put(BG, jinv * (c * (truth.bg - est.bg)));
            put(BA, jinv * (c * (truth.ba - est.ba)));
            put(LEVER, jinv * (c * (truth.lever - est.lever)));
        }
        FilterKind::Rqekf => {
            let ds = (truth.att * est.att.conj()).log();
            let et = ch * c.transpose();
            put(ATT, ds);
            put(VEL, et * truth.vt - est.vt);
            put(POS, et * truth.pos - est.pos);
        }
        FilterKind::Lqekf => {
            let cht = ch.transpose();
            put(ATT, (est.att.conj() * truth.att).log());
            put(VEL, cht * (truth.vt - est.vt));
            put(POS, cht * (truth.pos - est.pos));
        }
        FilterKind::Ekf => {
            let w = model.omega();
            let dr = truth.pos - est.pos;
            put(ATT, (truth.att * est.att.conj()).log());
            put(VEL, truth.vt - est.vt - w.cross(&dr));
            put(POS, dr);
        }
    }
    if kind != FilterKind::CliffordRqekf {
        put(BG, truth.bg - est.bg);
        put(BA, truth.ba - est.ba);
        put(LEVER, truth.lever - est.lever);
    }
    out
}

/// First-order map from additive errors (e-frame attitude rotation vector,
/// transformed velocity, position, body-frame biases and lever, all truth
/// minus estimate) to the errors of `kind`.
pub fn additive_jacobian(kind: FilterKind, est: &State, model: &EarthModel) -> Mat18 {
    let mut j = Mat18::identity();
    let c = est.dcm();
    match kind {
        FilterKind::CliffordRqekf => {
            set_block(&mut j, VEL, ATT, &skew(&est.vt));
            set_block(&mut j, POS, ATT, &skew(&est.pos));
            for b in [BG, BA, LEVER] {
                set_block(&mut j, b, b, &c);
            }
        }
        FilterKind::Rqekf => {
            set_block(&mut j, VEL, ATT, &skew(&est.vt));
            set_block(&mut j, POS, ATT, &skew(&est.pos));
        }
        FilterKind::Lqekf => {
            let ct = c.transpose();
            for b in [ATT, VEL, POS] {
                set_block(&mut j, b, b, &ct);
            }
        }
        FilterKind::Ekf => {
            set_block(&mut j, VEL, POS, &-skew(&model.omega()));
        }
    }
    j
}

/// Re-bases an additive-error covariance into the chart of `kind`.
pub fn init_covariance(kind: FilterKind, p_add: &Mat18, est: &State, model: &EarthModel) -> Mat18 {
    let j = additive_jacobian(kind, est, model);
    let p = j * p_add * j.transpose();
    (p + p.transpose()) * 0.5
}

/// Covariance of the attitude error as an e-frame rotation vector.
pub fn attitude_covariance_eframe(kind: FilterKind, p: &Mat18, est: &State) -> Matrix3<f64> {
    let patt = p.fixed_view::<3, 3>(0, 0).into_owned();
    match kind {
        FilterKind::Lqekf => {
            let c = est.dcm();
            c * patt * c.transpose()
        }
        _ => patt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est() -> State {
        State {
            att: Quaternion::exp(&Vector3::new(0.4, -0.2, 1.1)),
            vt: Vector3::new(5.0, -3.0, 1.0),
            pos: Vector3::new(30.0, 40.0, -20.0),
            bg: Vector3::new(1e-3, 2e-3, -1e-3),
            ba: Vector3::new(0.05, -0.02, 0.01),
            lever: Vector3::new(0.5, 0.8, 0.3),
        }
    }

    fn delta() -> Vec18 {
        Vec18::from_fn(|i, _| 0.01 * ((i as f64) * 0.7).sin())
    }

    #[test]
    fn zero_delta_is_identity() {
        let m = EarthModel::default();
        for kind in FilterKind::ALL {
            let out = retract(kind, &est(), &Vec18::zeros(), &m);
            let e = error_between(kind, &out, &est(), &m);
            assert!(e.amax() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn error_inverts_retraction() {
        let m = EarthModel::default();
        for kind in FilterKind::ALL {
            let truth = retract(kind, &est(), &delta(), &m);
            let back = error_between(kind, &truth, &est(), &m);
            assert!((back - delta()).amax() < 1e-12, "{kind}: {}", (back - delta()).amax());
        }
    }

    #[test]
    fn clifford_attitude_only_delta() {
        let m = EarthModel::default();
        let zero_nav = State {
            vt: Vector3::zeros(),
            pos: Vector3::zeros(),
            ..est()
        };
        let mut d = Vec18::zeros();
        d.fixed_rows_mut::<3>(0).copy_from(&Vector3::new(0.1, 0.2, -0.3));
        let out = retract(FilterKind::CliffordRqekf, &zero_nav, &d, &m);
        let expected = Quaternion::exp(&Vector3::new(0.1, 0.2, -0.3)) * zero_nav.att;
        assert!(out.att.max_abs_diff(&expected) < 1e-15);
        assert_eq!(out.vt, Vector3::zeros());
        assert_eq!(out.pos, Vector3::zeros());
        assert!((out.bg - zero_nav.bg).amax() < 1e-18);
    }

    #[test]
    fn clifford_jacobian_layout() {
        let m = EarthModel::default();
        let s = est();
        let j = additive_jacobian(FilterKind::CliffordRqekf, &s, &m);
        assert_eq!(j.fixed_view::<3, 3>(3, 0).into_owned(), skew(&s.vt));
        assert_eq!(j.fixed_view::<3, 3>(9, 9).into_owned(), s.dcm());
        let trivial = State::identity();
        assert_eq!(additive_jacobian(FilterKind::CliffordRqekf, &trivial, &m), Mat18::identity());
    }
}
