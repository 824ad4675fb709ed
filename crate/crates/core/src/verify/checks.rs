//! Pass/fail checks over the numerical oracles and the Monte-Carlo
//! scenarios. Each [`Check`] is a list of named parts with the measured
//! value and its limit.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    closure_error, fd_f, fd_g, fd_h, linearization, max_block_error, retraction_halving_ratio, series_expm,
    FlowInput,
};
use crate::algebra::{ExtendedCliffordState, Multivector, Quaternion, Signature, TridentQuaternion};
use crate::error::Result;
use crate::filter::model::{build_fg_at, build_h_at, Vec18};
use crate::filter::{FilterKind, FilterVariant};
use crate::harness::{run_scenario, MetricsReport, ScenarioConfig, VariantReport, IDEAL_LABEL};
use crate::lie::{left_jacobian, se23_embed, sek3_embed, so3_exp, SE23};
use crate::mechanization::{extended_group_affine_residual, group_affine_residual, EarthModel, ImuSample};
use crate::sim::TrajectoryProfile;

/// One measured quantity against its limit.
#[derive(Clone, Debug)]
pub struct Part {
    pub name: String,
    pub value: f64,
    /// Human-readable bound, e.g. `< 1e-12`.
    pub limit: String,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub criterion: u8,
    pub title: &'static str,
    pub parts: Vec<Part>,
}

impl Check {
    fn new(criterion: u8, title: &'static str) -> Self {
        Check {
            criterion,
            title,
            parts: Vec::new(),
        }
    }

    fn below(mut self, name: impl Into<String>, value: f64, bound: f64) -> Self {
        self.parts.push(Part {
            name: name.into(),
            value,
            limit: format!("< {bound:e}"),
            passed: value < bound,
        });
        self
    }

    fn above(mut self, name: impl Into<String>, value: f64, bound: f64) -> Self {
        self.parts.push(Part {
            name: name.into(),
            value,
            limit: format!("> {bound}"),
            passed: value > bound,
        });
        self
    }

    fn at_most(mut self, name: impl Into<String>, value: f64, bound: f64) -> Self {
        self.parts.push(Part {
            name: name.into(),
            value,
            limit: format!("<= {bound}"),
            passed: value <= bound,
        });
        self
    }

    fn at_least(mut self, name: impl Into<String>, value: f64, bound: f64) -> Self {
        self.parts.push(Part {
            name: name.into(),
            value,
            limit: format!(">= {bound}"),
            passed: value >= bound,
        });
        self
    }

    fn within(mut self, name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        self.parts.push(Part {
            name: name.into(),
            value,
            limit: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
        });
        self
    }

    pub fn passed(&self) -> bool {
        self.parts.iter().all(|p| p.passed)
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} criterion {:>2}: {}", self.criterion, self.title)?;
        for p in &self.parts {
            let mark = if p.passed { "ok " } else { "BAD" };
            write!(f, "\n    [{mark}] {:<56} {:>12.4e}  {}", p.name, p.value, p.limit)?;
        }
        Ok(())
    }
}

fn normal3(rng: &mut ChaCha8Rng, s: f64) -> Vector3<f64> {
    Vector3::from_fn(|_, _| s * rng.sample::<f64, _>(StandardNormal))
}

fn rotvec(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let axis = normal3(rng, 1.0).normalize();
    axis * rng.random_range(1e-3..PI - 1e-3)
}

fn rand_quat(rng: &mut ChaCha8Rng) -> Quaternion<f64> {
    Quaternion::from_coords(&nalgebra::Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal)))
}

fn rand_mv(rng: &mut ChaCha8Rng, sig: Signature) -> Multivector<f64> {
    let c = (0..sig.dimension()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Multivector::from_coeffs(sig, c).expect("coefficient count matches the signature")
}

fn rand_trident(rng: &mut ChaCha8Rng) -> TridentQuaternion<f64> {
    TridentQuaternion::from_pose(Quaternion::exp(&rotvec(rng)), &normal3(rng, 10.0), &normal3(rng, 100.0))
}

/// Random state near the Earth's surface with moderate biases and lever.
fn rand_state(rng: &mut ChaCha8Rng, model: &EarthModel) -> ExtendedCliffordState<f64> {
    ExtendedCliffordState {
        att: Quaternion::exp(&rotvec(rng)),
        vt: normal3(rng, 10.0),
        pos: normal3(rng, 1.0).normalize() * model.r_ref + normal3(rng, 100.0),
        bg: normal3(rng, 1e-2),
        ba: normal3(rng, 0.1),
        lever: normal3(rng, 1.0),
    }
}

fn max_abs_mv(a: &Multivector<f64>, b: &Multivector<f64>) -> f64 {
    (a - b).max_abs()
}

/// Quaternion as an even element of `Cl(0,3)`: `i = e2e3`, `j = e3e1`, `k = e1e2`.
fn quat_mv(q: &Quaternion<f64>) -> Multivector<f64> {
    let sig = Signature { p: 0, q: 3, r: 0 };
    let mut m = Multivector::zero(sig);
    m.set_coeff(0, q.w);
    m.set_coeff(0b110, q.v.x);
    m.set_coeff(0b101, -q.v.y);
    m.set_coeff(0b011, q.v.z);
    m
}

/// Quaternion unit relations, the bivector product identity and
/// associativity of the geometric product.
pub fn algebra_identities(cases: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (i, j, k) = (Quaternion::i(), Quaternion::j(), Quaternion::k());
    let one = Quaternion::<f64>::identity();
    let unit_err = [
        (i * i + one).norm(),
        (j * j + one).norm(),
        (k * k + one).norm(),
        (i * j * k + one).norm(),
        (i * j - k).norm(),
        (j * i + k).norm(),
        (j * k - i).norm(),
        (k * j + i).norm(),
        (k * i - j).norm(),
        (i * k + j).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let cl03 = Signature { p: 0, q: 3, r: 0 };
    let b = |mask| Multivector::<f64>::blade(cl03, mask);
    let (e12, e13, e23) = (b(0b011)?, b(0b101)?, b(0b110)?);
    let minus_one = Multivector::scalar(cl03, -1.0);
    let biv_err = [
        max_abs_mv(&e12.geometric_product(&e12)?, &minus_one),
        max_abs_mv(&e13.geometric_product(&e13)?, &minus_one),
        max_abs_mv(&e23.geometric_product(&e23)?, &minus_one),
        max_abs_mv(&e12.geometric_product(&e13)?.geometric_product(&e23)?, &minus_one),
        max_abs_mv(&e12.geometric_product(&e13)?, &e23),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let mut quat_err: f64 = 0.0;
    for _ in 0..cases {
        let (p, q) = (rand_quat(&mut rng), rand_quat(&mut rng));
        let prod = quat_mv(&p).geometric_product(&quat_mv(&q))?;
        quat_err = quat_err.max(max_abs_mv(&prod, &quat_mv(&(p * q))));
    }

    let mut check = Check::new(1, "algebra identities")
        .below("quaternion unit relations", unit_err, 1e-12)
        .below("bivector product identity", biv_err, 1e-12)
        .below("quaternion product = even Cl(0,3) product", quat_err, 1e-12);
    for (p, q, r) in [(3, 0, 0), (0, 3, 0), (1, 3, 0), (0, 3, 1), (0, 3, 2), (2, 2, 1)] {
        let sig = Signature::new(p, q, r)?;
        let mut worst: f64 = 0.0;
        for _ in 0..cases {
            let (a, b, c) = (rand_mv(&mut rng, sig), rand_mv(&mut rng, sig), rand_mv(&mut rng, sig));
            let lhs = a.geometric_product(&b)?.geometric_product(&c)?;
            let rhs = a.geometric_product(&b.geometric_product(&c)?)?;
            let scale = lhs.max_abs().max(1.0);
            worst = worst.max(max_abs_mv(&lhs, &rhs) / scale);
        }
        check = check.below(format!("associativity Cl({p},{q},{r})"), worst, 1e-12);
    }
    Ok(check)
}

/// Trident product against SE₂(3) matrices, the SE_{k+2}(3) embedding and
/// the closed-form exponential against a series matrix exponential.
pub fn isomorphisms(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = EarthModel::default();
    let (mut prod, mut embed, mut exp): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..cases {
        let (a, b) = (rand_trident(&mut rng), rand_trident(&mut rng));
        let lhs = se23_embed(&(a * b));
        let rhs = se23_embed(&a) * se23_embed(&b);
        let scale = lhs.matrix().amax().max(1.0);
        prod = prod.max((lhs.matrix() - rhs.matrix()).amax() / scale);

        let (s1, s2) = (rand_state(&mut rng, &model), rand_state(&mut rng, &model));
        let lhs = sek3_embed(&s1.compose(&s2));
        let rhs = sek3_embed(&s1) * sek3_embed(&s2);
        let scale = lhs.matrix().amax().max(1.0);
        embed = embed.max((lhs.matrix() - rhs.matrix()).amax() / scale);

        let (th, nu, rho) = (rotvec(&mut rng), normal3(&mut rng, 1.0), normal3(&mut rng, 1.0));
        let closed = se23_embed(&TridentQuaternion::exp(&th, &nu, &rho));
        let series = series_expm(&SE23::hat(&th, &nu, &rho));
        exp = exp.max((closed.matrix() - series).amax());
    }
    Check::new(2, "isomorphisms")
        .below("trident product vs SE2(3) product", prod, 1e-12)
        .below("SEk(3) embedding homomorphism", embed, 1e-10)
        .below("trident exp vs series expm", exp, 1e-9)
}

/// `exp(θ×) J_l(−θ) = J_l(θ)` over rotation angles in `(0, π)`.
pub fn left_jacobian_identity(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let th = rotvec(&mut rng);
        let lhs: Matrix3<f64> = so3_exp(&th) * left_jacobian(&(-th));
        worst = worst.max((lhs - left_jacobian(&th)).amax());
    }
    Check::new(3, "left Jacobian identity").below("max entry deviation", worst, 1e-12)
}

/// Bias-free dynamics are group-affine; bias and lever terms break it.
pub fn group_affine(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = EarthModel::default();
    let (mut free, mut biased): (f64, f64) = (0.0, f64::INFINITY);
    for _ in 0..cases {
        let u = ImuSample::new(0.0, normal3(&mut rng, 0.5), normal3(&mut rng, 5.0));
        let (a, b) = (rand_trident(&mut rng), rand_trident(&mut rng));
        let scale = a.coeffs().iter().chain(b.coeffs().iter()).fold(1.0_f64, |m, c| m.max(c.abs()));
        free = free.max(group_affine_residual(&a, &b, &u, &model) / (scale * scale));
        let mut s1 = rand_state(&mut rng, &model);
        let mut s2 = rand_state(&mut rng, &model);
        for s in [&mut s1, &mut s2] {
            s.pos = normal3(&mut rng, 100.0);
            s.bg = normal3(&mut rng, 1.0);
            s.ba = normal3(&mut rng, 1.0);
        }
        biased = biased.min(extended_group_affine_residual(&s1, &s2, &u, &model));
    }
    Check::new(4, "group-affine diagnostic")
        .below("bias-free residual (relative)", free, 1e-10)
        .above("residual with biases (minimum)", biased, 1e-3)
}

/// Worst block error of the analytic `F`, `G`, `H` against finite
/// differences of the exact error dynamics and measurement. Blocks smaller
/// than `floor` are compared in absolute terms. Positions are drawn within
/// about a kilometre of the e-frame origin: at Earth-radius magnitudes the
/// nested differences lose too many digits to resolve a 1e-4 tolerance.
pub fn jacobian_oracles(states: usize, seed: u64, floor: f64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = EarthModel::default();
    let mut check = Check::new(5, "Jacobian oracles (F, G, H vs finite differences)");
    for kind in FilterKind::ALL {
        let (mut ef, mut eg, mut eh): (f64, f64, f64) = (0.0, 0.0, 0.0);
        let mut rng_k = ChaCha8Rng::seed_from_u64(rng.random());
        for _ in 0..states {
            let mut est = rand_state(&mut rng_k, &model);
            est.pos = normal3(&mut rng_k, 300.0);
            let u = FlowInput {
                gyro: normal3(&mut rng_k, 0.3),
                accel: Vector3::new(0.0, 0.0, 9.8) + normal3(&mut rng_k, 1.0),
                g: normal3(&mut rng_k, 1.0).normalize() * -9.8,
            };
            let lin = linearization(&est, &u, &model);
            let (f, g) = build_fg_at(kind, &lin);
            let h = build_h_at(kind, &lin, &lin.omega_eb());
            ef = ef.max(max_block_error(&f, &fd_f(kind, &est, &u, &model), floor).0);
            eg = eg.max(max_block_error(&g, &fd_g(kind, &est, &u, &model), floor).0);
            eh = eh.max(max_block_error(&h, &fd_h(kind, &est, &lin.omega_eb(), &model), floor).0);
        }
        check = check
            .below(format!("{kind} F"), ef, 1e-4)
            .below(format!("{kind} G"), eg, 1e-4)
            .below(format!("{kind} H"), eh, 1e-4);
    }
    check
}

/// Residual ratio under step halving for every retraction.
pub fn retraction_consistency(states: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = EarthModel::default();
    let mut check = Check::new(6, "retraction first-order consistency");
    for kind in FilterKind::ALL {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for _ in 0..states {
            let est = rand_state(&mut rng, &model);
            let d = Vec18::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
            let r = retraction_halving_ratio(kind, &est, &d, 1e-2, &model);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        check = check
            .within(format!("{kind} min halving ratio"), lo, 3.5, 4.5)
            .within(format!("{kind} max halving ratio"), hi, 3.5, 4.5);
    }
    check
}

pub fn mechanization_closure(profile: &TrajectoryProfile, model: &EarthModel) -> Result<Check> {
    let err = closure_error(profile, model)?;
    Ok(Check::new(7, "mechanization self-consistency").below("max position deviation, m", err, 1e-3))
}

/// Criteria 1 to 7 with their default sample sizes.
pub fn oracle_suite(seed: u64) -> Result<Vec<Check>> {
    Ok(vec![
        algebra_identities(1000, seed)?,
        isomorphisms(1000, seed.wrapping_add(1)),
        left_jacobian_identity(1000, seed.wrapping_add(2)),
        group_affine(1000, seed.wrapping_add(3)),
        jacobian_oracles(100, seed.wrapping_add(4), 1e-2),
        retraction_consistency(20, seed.wrapping_add(5)),
        mechanization_closure(&TrajectoryProfile::default(), &EarthModel::default())?,
    ])
}

const EKF_ITER: &str = "EKF-Iter";
const LQ_ITER: &str = "LQEKF-Iter";
const RQ_ITER: &str = "RQEKF-Iter";
const CLIFFORD_ITER: &str = "Clifford-RQEKF-Iter";
/// Index of the 200 to 600 s window in the default windows.
const LATE: usize = 2;

fn get<'a>(report: &'a MetricsReport, label: &str) -> Result<&'a VariantReport> {
    report
        .variant(label)
        .ok_or_else(|| crate::error::Error::Config(format!("scenario has no variant '{label}'")))
}

/// Reports of the three Monte-Carlo scenarios behind criteria 8 to 11.
#[derive(Clone, Debug)]
pub struct ScenarioReports {
    pub nominal: MetricsReport,
    pub enlarged: MetricsReport,
    /// Enlarged biases, EKF-Iter and Clifford-RQEKF-Iter, reset at 10 s.
    pub reset: MetricsReport,
}

pub fn run_scenarios(runs: usize, seed: u64) -> Result<ScenarioReports> {
    let mut nominal = ScenarioConfig::default();
    nominal.monte_carlo_runs = runs;
    nominal.seed = seed;
    let mut enlarged = ScenarioConfig::enlarged_bias();
    enlarged.monte_carlo_runs = runs;
    enlarged.seed = seed;
    let mut reset = enlarged.clone();
    reset.variants = vec![
        FilterVariant::iterated(FilterKind::Ekf),
        FilterVariant::iterated(FilterKind::CliffordRqekf),
    ];
    reset.reset_times = vec![10.0];
    Ok(ScenarioReports {
        nominal: run_scenario(&nominal)?,
        enlarged: run_scenario(&enlarged)?,
        reset: run_scenario(&reset)?,
    })
}

/// Criteria 8 to 11 from the scenario reports.
pub fn scenario_checks(r: &ScenarioReports) -> Result<Vec<Check>> {
    let n = &r.nominal;
    let ideal = get(n, IDEAL_LABEL)?.median_rmse(LATE);
    let clifford = get(n, CLIFFORD_ITER)?;
    let ekf = get(n, EKF_ITER)?;
    let c8 = Check::new(8, "nominal scenario, 200-600 s heading RMSE (median over runs)")
        .within("(a) Ideal-EKF, deg", ideal, 1.0, 6.0)
        .below("(b) Clifford-RQEKF-Iter / Ideal-EKF", clifford.median_rmse(LATE) / ideal, 2.0)
        .below("(b) LQEKF-Iter / Ideal-EKF", get(n, LQ_ITER)?.median_rmse(LATE) / ideal, 2.0)
        .above("(c) EKF-Iter, deg", ekf.median_rmse(LATE), 50.0)
        .at_most("(d) Clifford-RQEKF-Iter median passes after 50 s", clifford.median_iters(), 3.0)
        .at_most("(d) LQEKF-Iter median passes after 50 s", get(n, LQ_ITER)?.median_iters(), 3.0)
        .at_most("(d) RQEKF-Iter median passes after 50 s", nan_as_inf(get(n, RQ_ITER)?.median_iters()), 3.0);

    let e = &r.enlarged;
    let cl = get(e, CLIFFORD_ITER)?.median_rmse(LATE);
    let c9 = Check::new(9, "enlarged biases, 200-600 s heading RMSE (median over runs)")
        .below("Clifford-RQEKF-Iter, deg", cl, 10.0)
        .above("LQEKF-Iter / Clifford-RQEKF-Iter", get(e, LQ_ITER)?.median_rmse(LATE) / cl, 3.0)
        .above("RQEKF-Iter / Clifford-RQEKF-Iter", get(e, RQ_ITER)?.median_rmse(LATE) / cl, 3.0);

    let plain = &get(e, CLIFFORD_ITER)?.runs;
    let reset = &get(&r.reset, CLIFFORD_ITER)?.runs;
    let wins = plain
        .iter()
        .zip(reset)
        .filter(|(a, b)| match (a.heading_error_at(60.0), b.heading_error_at(60.0)) {
            (Some(x), Some(y)) => y < x,
            _ => false,
        })
        .count();
    let c10 = Check::new(10, "reset at 10 s under enlarged biases")
        .at_least("fraction of runs where reset lowers 60 s heading error", wins as f64 / plain.len() as f64, 0.8)
        .above("EKF-Iter with reset, 200-600 s RMSE, deg", get(&r.reset, EKF_ITER)?.median_rmse(LATE), 50.0);

    let c11 = Check::new(11, "3-sigma heading consistency after 50 s (median over runs)")
        .at_least("Clifford-RQEKF-Iter fraction", clifford.median_consistency(), 0.9)
        .above(
            "Clifford-RQEKF-Iter minus EKF-Iter fraction",
            clifford.median_consistency() - ekf.median_consistency(),
            0.0,
        );
    Ok(vec![c8, c9, c10, c11])
}

fn nan_as_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}
