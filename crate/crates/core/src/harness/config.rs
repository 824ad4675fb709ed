use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{AdditiveStd, FilterKind, FilterVariant};
use crate::mechanization::EarthModel;
use crate::sim::{ImuErrorSpec, TrajectoryProfile};

fn default_lever() -> [f64; 3] {
    [0.5, 0.8, 0.3]
}

fn default_gnss_vel_std() -> f64 {
    0.1
}

fn default_att_error() -> [f64; 3] {
    [60.0, 180.0, 60.0]
}

fn default_ideal_att_std() -> [f64; 3] {
    [1.0, 1.0, 1.0]
}

fn default_windows() -> Vec<(f64, f64)> {
    vec![(1.0, 10.0), (10.0, 50.0), (200.0, 600.0)]
}

fn default_runs() -> usize {
    1
}

fn default_metrics_rate() -> f64 {
    10.0
}

fn default_settle_time() -> f64 {
    50.0
}

fn default_variants() -> Vec<FilterVariant> {
    vec![
        FilterVariant::iterated(FilterKind::Ekf),
        FilterVariant::iterated(FilterKind::Lqekf),
        FilterVariant::iterated(FilterKind::Rqekf),
        FilterVariant::iterated(FilterKind::CliffordRqekf),
    ]
}

/// Initial uncertainty for the nominal IMU grade.
pub fn nominal_init_std() -> AdditiveStd {
    AdditiveStd {
        att_deg: [180.0; 3],
        vel: [0.3; 3],
        pos: [3.0; 3],
        gyro_bias_deg_h: [1000.0; 3],
        accel_bias_mg: [20.0; 3],
        lever: [1.0; 3],
    }
}

/// A complete, self-describing experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub profile: TrajectoryProfile,
    #[serde(default)]
    pub earth: EarthModel,
    #[serde(default)]
    pub imu_spec: ImuErrorSpec,
    /// True IMU-to-antenna lever arm, m (body frame).
    #[serde(default = "default_lever")]
    pub lever: [f64; 3],
    /// Filter's initial lever-arm estimate, m.
    #[serde(default)]
    pub lever_guess: [f64; 3],
    #[serde(default = "default_gnss_vel_std")]
    pub gnss_vel_std: f64,
    /// Lever-arm process noise density, m/√s.
    #[serde(default)]
    pub lever_psd: f64,
    #[serde(default = "default_variants")]
    pub variants: Vec<FilterVariant>,
    /// Initial attitude error, deg, ordered roll, heading, pitch.
    #[serde(default = "default_att_error")]
    pub init_att_error_deg: [f64; 3],
    /// Initial uncertainty of every filter except the ideal baseline. The
    /// attitude entry is also the attitude std applied at a reset.
    #[serde(default = "nominal_init_std")]
    pub init_std: AdditiveStd,
    /// Attitude std of the ideal baseline, which starts at the true attitude.
    #[serde(default = "default_ideal_att_std")]
    pub ideal_att_std_deg: [f64; 3],
    /// Times (s) at which the filters are re-initialized from the GNSS fix.
    #[serde(default)]
    pub reset_times: Vec<f64>,
    #[serde(default = "default_runs")]
    pub monte_carlo_runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Heading RMSE windows `[t0, t1)`, s.
    #[serde(default = "default_windows")]
    pub windows: Vec<(f64, f64)>,
    #[serde(default = "default_metrics_rate")]
    pub metrics_rate: f64,
    /// Start of the steady-state period used by the consistency and
    /// iteration statistics, s.
    #[serde(default = "default_settle_time")]
    pub settle_time: f64,
    #[serde(default)]
    pub joseph: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ScenarioConfig {
    /// Large-bias variant of the default scenario.
    pub fn enlarged_bias() -> Self {
        ScenarioConfig {
            imu_spec: ImuErrorSpec::enlarged(),
            init_std: AdditiveStd {
                gyro_bias_deg_h: [2000.0; 3],
                accel_bias_mg: [100.0; 3],
                ..nominal_init_std()
            },
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| e.context(format!("loading {}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.profile.validate()?;
        self.earth.validate()?;
        self.imu_spec.validate()?;
        if self.variants.is_empty() {
            return bad("at least one filter variant is required".into());
        }
        for v in &self.variants {
            v.validate()?;
        }
        if self.monte_carlo_runs < 1 {
            return bad("monte_carlo_runs must be at least 1".into());
        }
        if !(self.gnss_vel_std > 0.0) {
            return bad("gnss_vel_std must be positive".into());
        }
        if !(self.lever_psd >= 0.0) {
            return bad("lever_psd must be non-negative".into());
        }
        let ratio = self.profile.imu_rate / self.metrics_rate;
        if !(self.metrics_rate > 0.0 && ratio >= 1.0 && (ratio - ratio.round()).abs() < 1e-6) {
            return bad("metrics_rate must divide the IMU rate".into());
        }
        for &(t0, t1) in &self.windows {
            if !(t0 >= 0.0 && t1 > t0 && t1 <= self.profile.duration + 1e-9) {
                return bad(format!("window [{t0}, {t1}) lies outside the scenario"));
            }
        }
        for &t in &self.reset_times {
            if !(t >= 0.0 && t <= self.profile.duration) {
                return bad(format!("reset time {t} s lies outside the scenario"));
            }
        }
        let stds = [
            self.init_std.att_deg,
            self.init_std.vel,
            self.init_std.pos,
            self.init_std.gyro_bias_deg_h,
            self.init_std.accel_bias_mg,
            self.init_std.lever,
            self.ideal_att_std_deg,
        ];
        if stds.iter().flatten().any(|x| !(x.is_finite() && *x > 0.0)) {
            return bad("initial standard deviations must be positive".into());
        }
        Ok(())
    }
}
