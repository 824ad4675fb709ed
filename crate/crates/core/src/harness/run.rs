use nalgebra::Vector3;
use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::metrics::{median, rmse_intervals, EpochRecord, MetricsReport, RunResult, VariantReport};
use crate::algebra::ExtendedCliffordState;
use crate::error::{Error, ErrorCategory, Result};
use crate::filter::{AdditiveStd, FilterKind, FilterVariant, NavFilter};
use crate::mechanization::{GnssSample, ImuSample};
use crate::sim::{
    attitude_from_euler, euler_enu, generate_trajectory, simulate_gnss, simulate_imu, wrap_angle,
    TruthSample, STANDARD_GRAVITY,
};

pub const IDEAL_LABEL: &str = "Ideal-EKF";

/// One filter configuration inside a scenario.
#[derive(Clone, Debug)]
pub struct FilterRun {
    pub label: String,
    pub variant: FilterVariant,
    pub ideal: bool,
}

impl FilterRun {
    pub fn ideal() -> Self {
        FilterRun {
            label: IDEAL_LABEL.into(),
            variant: FilterVariant::new(FilterKind::Ekf, false),
            ideal: true,
        }
    }

    pub fn plain(variant: FilterVariant) -> Self {
        FilterRun {
            label: variant.label(),
            variant,
            ideal: false,
        }
    }
}

/// The ideal baseline followed by the configured variants.
pub fn filter_runs(cfg: &ScenarioConfig) -> Vec<FilterRun> {
    std::iter::once(FilterRun::ideal())
        .chain(cfg.variants.iter().copied().map(FilterRun::plain))
        .collect()
}

/// Sensor streams of one Monte-Carlo run.
#[derive(Clone, Debug)]
pub struct SensorSet {
    pub imu: Vec<ImuSample>,
    pub gnss: Vec<GnssSample>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run` under master seed `master`.
pub fn run_seed(master: u64, run: usize) -> u64 {
    splitmix(master ^ splitmix(run as u64))
}

/// IMU and GNSS streams for one run seed.
pub fn simulate_sensors(cfg: &ScenarioConfig, truth: &[TruthSample], seed: u64) -> Result<SensorSet> {
    let spec = cfg.imu_spec.with_seed(splitmix(seed ^ cfg.imu_spec.seed));
    let imu = simulate_imu(truth, &spec, cfg.profile.imu_rate)?;
    let gnss = simulate_gnss(
        truth,
        &Vector3::from(cfg.lever),
        cfg.gnss_vel_std,
        cfg.profile.gnss_rate,
        cfg.profile.imu_rate,
        splitmix(seed.wrapping_add(1)),
        &cfg.earth,
    )?;
    Ok(SensorSet { imu, gnss })
}

/// Initial estimate: position and velocity from the first fix, perturbed
/// attitude (or the truth for the ideal baseline), zero biases.
fn initial_filter(cfg: &ScenarioConfig, truth: &TruthSample, fix: &GnssSample, run: &FilterRun) -> NavFilter {
    let att = if run.ideal {
        truth.att
    } else {
        let (roll, pitch, yaw) = euler_enu(&truth.att, &truth.pos);
        let [dr, dh, dp] = cfg.init_att_error_deg.map(f64::to_radians);
        attitude_from_euler(roll + dr, pitch + dp, yaw + dh, &truth.pos)
    };
    let state = ExtendedCliffordState {
        att,
        vt: fix.vel + cfg.earth.omega().cross(&fix.pos),
        pos: fix.pos,
        bg: Vector3::zeros(),
        ba: Vector3::zeros(),
        lever: Vector3::from(cfg.lever_guess),
    };
    let std = if run.ideal {
        AdditiveStd {
            att_deg: cfg.ideal_att_std_deg,
            ..cfg.init_std
        }
    } else {
        cfg.init_std
    };
    let noise = cfg.imu_spec.noise_spec(cfg.gnss_vel_std, cfg.lever_psd);
    let mut f = NavFilter::new(run.variant, state, &std, noise, cfg.earth);
    f.joseph = cfg.joseph;
    f
}

fn record(t: f64, f: &NavFilter, truth: &TruthSample, iters: usize) -> EpochRecord {
    let (r0, p0, y0) = euler_enu(&truth.att, &truth.pos);
    let (r1, p1, y1) = euler_enu(&f.state.att, &truth.pos);
    let up = truth.pos.normalize();
    let var = (up.transpose() * f.attitude_cov() * up)[(0, 0)].max(0.0);
    let deg_h = 180.0 / std::f64::consts::PI * 3600.0;
    let mg = 1e3 / STANDARD_GRAVITY;
    let s = &f.state;
    EpochRecord {
        t,
        err_roll: wrap_angle(r1 - r0).to_degrees(),
        err_pitch: wrap_angle(p1 - p0).to_degrees(),
        err_head: wrap_angle(y1 - y0).to_degrees(),
        sig3_head: 3.0 * var.sqrt().to_degrees(),
        iters,
        gyro_bias: (s.bg * deg_h).into(),
        accel_bias: (s.ba * mg).into(),
        lever: s.lever.into(),
    }
}

/// Output of one filter over one sensor set.
#[derive(Clone, Debug)]
pub struct FilterTrace {
    pub series: Vec<EpochRecord>,
    pub updates: Vec<(f64, usize)>,
    /// Time of a numerical breakdown; later epochs carry NaN errors.
    pub diverged_at: Option<f64>,
}

fn diverged_record(t: f64) -> EpochRecord {
    EpochRecord {
        t,
        err_roll: f64::NAN,
        err_pitch: f64::NAN,
        err_head: f64::NAN,
        sig3_head: f64::NAN,
        iters: 0,
        gyro_bias: [f64::NAN; 3],
        accel_bias: [f64::NAN; 3],
        lever: [f64::NAN; 3],
    }
}

/// Runs one filter over one sensor set against the truth. A numerical
/// breakdown of the filter (non-finite or negative variances, singular
/// innovation) ends the run as diverged; other errors propagate.
pub fn run_filter(
    cfg: &ScenarioConfig,
    truth: &[TruthSample],
    sensors: &SensorSet,
    run: &FilterRun,
) -> Result<FilterTrace> {
    let imu = &sensors.imu;
    let gnss = &sensors.gnss;
    if imu.is_empty() || gnss.is_empty() {
        return Err(Error::Config("scenario produced no sensor data".into()));
    }
    let dt = cfg.profile.imu_dt();
    let gnss_step = (cfg.profile.imu_rate / cfg.profile.gnss_rate).round() as usize;
    let metric_step = (cfg.profile.imu_rate / cfg.metrics_rate).round() as usize;
    // the baseline already holds the true attitude and is never reset
    let mut resets: Vec<f64> = if run.ideal { Vec::new() } else { cfg.reset_times.clone() };
    resets.sort_by(f64::total_cmp);
    let mut next_reset = 0;

    let mut f = initial_filter(cfg, &truth[0], &gnss[0], run);
    let mut series = Vec::with_capacity(imu.len() / metric_step + 1);
    let mut updates = Vec::with_capacity(gnss.len());
    let mut diverged_at = None;
    for k in 0..=imu.len() {
        let t = k as f64 * dt;
        if diverged_at.is_some() {
            if k % metric_step == 0 {
                series.push(diverged_record(t));
            }
            continue;
        }
        let step = (|| -> Result<usize> {
            let mut iters = 0;
            if k > 0 && k % gnss_step == 0 {
                if let Some(y) = gnss.get(k / gnss_step) {
                    if next_reset < resets.len() && t >= resets[next_reset] - 1e-9 {
                        f.reset(y, &cfg.init_std);
                        next_reset += 1;
                    } else {
                        let u = &imu[k.min(imu.len() - 1)];
                        iters = f.update(y, u)?.iters;
                        updates.push((t, iters));
                    }
                }
            }
            if k % metric_step == 0 {
                series.push(record(t, &f, &truth[k], iters));
            }
            if k < imu.len() {
                f.propagate(&imu[k], dt)?;
            }
            Ok(iters)
        })();
        match step {
            Ok(_) => {}
            Err(e) if e.category() == ErrorCategory::Numeric => {
                diverged_at = Some(t);
                if series.last().map_or(true, |r| r.t < t - 1e-9) && k % metric_step == 0 {
                    series.push(diverged_record(t));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(FilterTrace {
        series,
        updates,
        diverged_at,
    })
}

fn summarize(cfg: &ScenarioConfig, run: usize, seed: u64, trace: FilterTrace) -> Result<RunResult> {
    let FilterTrace {
        series,
        updates,
        diverged_at,
    } = trace;
    let head: Vec<(f64, f64)> = series.iter().map(|r| (r.t, r.err_head)).collect();
    // a diverged window has no finite error
    let heading_rmse = rmse_intervals(&head, &cfg.windows)?
        .into_iter()
        .map(|x| if x.is_nan() { f64::INFINITY } else { x })
        .collect();
    let settled: Vec<&EpochRecord> = series.iter().filter(|r| r.t >= cfg.settle_time).collect();
    let consistency = if settled.is_empty() {
        f64::NAN
    } else {
        settled.iter().filter(|r| r.err_head.abs() <= r.sig3_head).count() as f64 / settled.len() as f64
    };
    let median_iters = median(
        updates
            .iter()
            .filter(|(t, _)| *t > cfg.settle_time)
            .map(|&(_, n)| n as f64)
            .collect(),
    );
    Ok(RunResult {
        run,
        seed,
        series,
        updates,
        heading_rmse,
        consistency,
        median_iters,
        diverged_at,
    })
}

/// Ground truth, per-run sensors and every filter (ideal baseline first).
/// Runs execute in parallel; results are ordered by run index.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsReport> {
    cfg.validate()?;
    let truth = generate_trajectory(&cfg.profile, &cfg.earth).map_err(|e| e.context("generating truth"))?;
    let filters = filter_runs(cfg);
    let per_run: Vec<Vec<RunResult>> = (0..cfg.monte_carlo_runs)
        .into_par_iter()
        .map(|r| {
            let seed = run_seed(cfg.seed, r);
            let sensors = simulate_sensors(cfg, &truth, seed)
                .map_err(|e| e.context(format!("simulating sensors for run {r}")))?;
            filters
                .iter()
                .map(|fr| {
                    let trace = run_filter(cfg, &truth, &sensors, fr)
                        .map_err(|e| e.context(format!("{} run {r}", fr.label)))?;
                    summarize(cfg, r, seed, trace)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(assemble(cfg, &filters, per_run))
}

/// Runs every filter over recorded sensor streams, scored against the truth
/// of the configured profile. The logs must span the profile at its rates.
pub fn filter_logs(cfg: &ScenarioConfig, sensors: &SensorSet) -> Result<MetricsReport> {
    cfg.validate()?;
    let truth = generate_trajectory(&cfg.profile, &cfg.earth).map_err(|e| e.context("generating truth"))?;
    if sensors.imu.len() + 1 != truth.len() {
        return Err(Error::Config(format!(
            "IMU log has {} samples, the profile needs {}",
            sensors.imu.len(),
            truth.len() - 1
        )));
    }
    let gnss_step = (cfg.profile.imu_rate / cfg.profile.gnss_rate).round() as usize;
    if sensors.gnss.len() != (truth.len() - 1) / gnss_step + 1 {
        return Err(Error::Config(format!(
            "GNSS log has {} fixes, the profile needs {}",
            sensors.gnss.len(),
            (truth.len() - 1) / gnss_step + 1
        )));
    }
    let filters = filter_runs(cfg);
    let runs = filters
        .par_iter()
        .map(|fr| {
            let trace = run_filter(cfg, &truth, sensors, fr).map_err(|e| e.context(fr.label.clone()))?;
            summarize(cfg, 0, cfg.seed, trace)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(cfg, &filters, vec![runs]))
}

fn assemble(cfg: &ScenarioConfig, filters: &[FilterRun], per_run: Vec<Vec<RunResult>>) -> MetricsReport {
    let mut variants: Vec<VariantReport> = filters
        .iter()
        .map(|fr| VariantReport {
            label: fr.label.clone(),
            variant: fr.variant,
            ideal: fr.ideal,
            runs: Vec::with_capacity(per_run.len()),
        })
        .collect();
    for runs in per_run {
        for (v, r) in variants.iter_mut().zip(runs) {
            v.runs.push(r);
        }
    }
    MetricsReport {
        windows: cfg.windows.clone(),
        variants,
    }
}
