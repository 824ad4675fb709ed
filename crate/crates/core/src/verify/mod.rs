//! Numerical oracles: finite differences of the exact error dynamics and
//! measurement, retraction consistency, truncated-series exponentials and
//! the truth re-integration check.

use nalgebra::{SMatrix, Vector3};

use crate::algebra::{ExtendedCliffordState, Quaternion};
use crate::error::Result;
use crate::filter::model::{Linearization, Mat18, Mat18x15, Mat3x18, Vec18};
use crate::filter::{additive_jacobian, error_between, predict_measurement_with_rate, retract, FilterKind};
use crate::mechanization::{propagate, EarthModel, ImuSample};
use crate::sim::{generate_trajectory, TrajectoryProfile};

pub mod checks;
pub use checks::{oracle_suite, run_scenarios, scenario_checks, Check, Part, ScenarioReports};

type State = ExtendedCliffordState<f64>;

/// `exp(m)` by scaling and squaring of a 30-term Taylor series.
pub fn series_expm<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let norm = m.amax() * N as f64;
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.5 {
        s += 1;
    }
    let a = m / f64::powi(2.0, s);
    let mut term = SMatrix::<f64, N, N>::identity();
    let mut sum = term;
    for k in 1..30 {
        term = term * a / k as f64;
        sum += term;
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}

/// Sensor readings and the gravity vector shared by truth and estimate.
#[derive(Copy, Clone, Debug)]
pub struct FlowInput {
    pub gyro: Vector3<f64>,
    pub accel: Vector3<f64>,
    pub g: Vector3<f64>,
}

/// Noise realization `[n_g, n_a, n_bg, n_ba, n_l]`.
pub type Noise15 = SMatrix<f64, 15, 1>;

/// State after `tau` along the first-order flow, with body rate, specific
/// force and bias/lever rates given.
fn flow(x: &State, omega: &Vector3<f64>, f: &Vector3<f64>, drift: &Noise15, u: &FlowInput, w: &Vector3<f64>, tau: f64) -> State {
    let q = x.att;
    let qdot = (q * Quaternion::pure(*omega) - Quaternion::pure(*w) * q).scale(0.5);
    let vdot = q.rotate(f) - w.cross(&x.vt) + u.g;
    let rdot = x.vt - w.cross(&x.pos);
    let nb = |k: usize| Vector3::new(drift[3 * k], drift[3 * k + 1], drift[3 * k + 2]);
    State {
        att: (q + qdot.scale(tau)).normalize(),
        vt: x.vt + vdot * tau,
        pos: x.pos + rdot * tau,
        bg: x.bg + nb(2) * tau,
        ba: x.ba + nb(3) * tau,
        lever: x.lever + nb(4) * tau,
    }
}

/// Time derivative of the exact error of `truth` about `est` when both are
/// driven by the same readings, the truth also by the noise `n`. Central
/// differences in time with one Richardson step.
pub fn error_rate(
    kind: FilterKind,
    truth: &State,
    est: &State,
    u: &FlowInput,
    n: &Noise15,
    model: &EarthModel,
) -> Vec18 {
    let w = model.omega();
    let nv = |k: usize| Vector3::new(n[3 * k], n[3 * k + 1], n[3 * k + 2]);
    let om_t = u.gyro - truth.bg - nv(0);
    let f_t = u.accel - truth.ba - nv(1);
    let om_e = u.gyro - est.bg;
    let f_e = u.accel - est.ba;
    let zero = Noise15::zeros();
    let at = |tau: f64| {
        error_between(
            kind,
            &flow(truth, &om_t, &f_t, n, u, &w, tau),
            &flow(est, &om_e, &f_e, &zero, u, &w, tau),
            model,
        )
    };
    let d = |tau: f64| (at(tau) - at(-tau)) / (2.0 * tau);
    let tau = 1e-2;
    (d(tau / 2.0) * 4.0 - d(tau)) / 3.0
}

const FD_STEP: f64 = 1e-3;

/// Central difference in `h` with one Richardson step, which removes the
/// `h²` term that chart curvature scaled by the Earth radius would leave.
fn richardson<const R: usize>(d: impl Fn(f64) -> SMatrix<f64, R, 1>) -> SMatrix<f64, R, 1> {
    (d(FD_STEP / 2.0) * 4.0 - d(FD_STEP)) / 3.0
}

/// Finite-difference error-state matrix `F` at `est`.
pub fn fd_f(kind: FilterKind, est: &State, u: &FlowInput, model: &EarthModel) -> Mat18 {
    let zero = Noise15::zeros();
    let mut f = Mat18::zeros();
    for j in 0..18 {
        let col = richardson(|h| {
            let mut e = Vec18::zeros();
            e[j] = h;
            let tp = retract(kind, est, &e, model);
            let tm = retract(kind, est, &(-e), model);
            (error_rate(kind, &tp, est, u, &zero, model) - error_rate(kind, &tm, est, u, &zero, model)) / (2.0 * h)
        });
        f.set_column(j, &col);
    }
    f
}

/// Finite-difference noise-input matrix `G` at `est`.
pub fn fd_g(kind: FilterKind, est: &State, u: &FlowInput, model: &EarthModel) -> Mat18x15 {
    let mut g = Mat18x15::zeros();
    for j in 0..15 {
        let col = richardson(|h| {
            let mut n = Noise15::zeros();
            n[j] = h;
            (error_rate(kind, est, est, u, &n, model) - error_rate(kind, est, est, u, &(-n), model)) / (2.0 * h)
        });
        g.set_column(j, &col);
    }
    g
}

/// Finite-difference measurement matrix with the body rate held fixed.
pub fn fd_h(kind: FilterKind, est: &State, omega_eb: &Vector3<f64>, model: &EarthModel) -> Mat3x18 {
    let mut m = Mat3x18::zeros();
    for j in 0..18 {
        let col = richardson(|h| {
            let mut e = Vec18::zeros();
            e[j] = h;
            let yp = predict_measurement_with_rate(&retract(kind, est, &e, model), omega_eb, model);
            let ym = predict_measurement_with_rate(&retract(kind, est, &(-e), model), omega_eb, model);
            (yp - ym) / (2.0 * h)
        });
        m.set_column(j, &col);
    }
    m
}

/// Linearization point matching a [`FlowInput`].
pub fn linearization(est: &State, u: &FlowInput, model: &EarthModel) -> Linearization {
    Linearization {
        c: est.dcm(),
        vt: est.vt,
        pos: est.pos,
        omega_ib: u.gyro - est.bg,
        f: u.accel - est.ba,
        lever: est.lever,
        g: u.g,
        w: model.omega(),
    }
}

/// Largest block-wise relative deviation `‖A_b − B_b‖ / max(‖A_b‖, floor)`
/// over 3×3 blocks, with the offending block.
pub fn max_block_error<const R: usize, const C: usize>(
    a: &SMatrix<f64, R, C>,
    b: &SMatrix<f64, R, C>,
    floor: f64,
) -> (f64, (usize, usize)) {
    let mut worst = (0.0, (0, 0));
    for bi in 0..R / 3 {
        for bj in 0..C / 3 {
            let x = a.fixed_view::<3, 3>(3 * bi, 3 * bj);
            let y = b.fixed_view::<3, 3>(3 * bi, 3 * bj);
            let e = (x - y).norm() / x.norm().max(floor);
            if e > worst.0 {
                worst = (e, (bi, bj));
            }
        }
    }
    worst
}

/// Additive differences: e-frame rotation vector `log(q q̂*)`, then plain
/// differences of the remaining components.
pub fn additive_error(truth: &State, est: &State) -> Vec18 {
    let mut out = Vec18::zeros();
    let parts = [
        (truth.att * est.att.conj()).log(),
        truth.vt - est.vt,
        truth.pos - est.pos,
        truth.bg - est.bg,
        truth.ba - est.ba,
        truth.lever - est.lever,
    ];
    for (k, p) in parts.iter().enumerate() {
        out.fixed_rows_mut::<3>(3 * k).copy_from(p);
    }
    out
}

/// Deviation of the retraction at `eps·delta` from its first-order
/// prediction in a reference chart. The Clifford filter is measured in
/// additive coordinates, the others in the Clifford chart.
pub fn retraction_residual(kind: FilterKind, est: &State, delta: &Vec18, eps: f64, model: &EarthModel) -> f64 {
    let x = retract(kind, est, &(delta * eps), model);
    let jk_inv = additive_jacobian(kind, est, model)
        .try_inverse()
        .expect("chart Jacobian is invertible");
    if kind == FilterKind::CliffordRqekf {
        (additive_error(&x, est) - jk_inv * delta * eps).norm()
    } else {
        let jc = additive_jacobian(FilterKind::CliffordRqekf, est, model);
        (error_between(FilterKind::CliffordRqekf, &x, est, model) - jc * jk_inv * delta * eps).norm()
    }
}

/// `residual(ε) / residual(ε/2)`; close to 4 for a first-order-consistent
/// retraction.
pub fn retraction_halving_ratio(kind: FilterKind, est: &State, delta: &Vec18, eps: f64, model: &EarthModel) -> f64 {
    retraction_residual(kind, est, delta, eps, model) / retraction_residual(kind, est, delta, eps / 2.0, model)
}

/// Largest position deviation when the error-free truth rates are
/// re-integrated by the strapdown mechanization.
pub fn closure_error(profile: &TrajectoryProfile, model: &EarthModel) -> Result<f64> {
    let truth = generate_trajectory(profile, model)?;
    let dt = profile.imu_dt();
    let mut x = State {
        att: truth[0].att,
        vt: truth[0].vt(model),
        pos: truth[0].pos,
        ..State::identity()
    };
    let mut worst: f64 = 0.0;
    for w in truth.windows(2) {
        let u = ImuSample::new(w[0].t, w[0].omega_ib_b, w[0].f_b);
        x = propagate(&x, &u, dt, model)?;
        worst = worst.max((x.pos - w[1].pos).norm());
    }
    Ok(worst)
}
