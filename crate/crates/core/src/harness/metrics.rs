use crate::error::{Error, Result};
use crate::filter::FilterVariant;

/// Filter outputs at one metrics epoch. Angles in deg, gyro bias in deg/h,
/// accelerometer bias in mg, lever in m.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub t: f64,
    pub err_roll: f64,
    pub err_pitch: f64,
    pub err_head: f64,
    /// Three-sigma heading bound from the filter covariance.
    pub sig3_head: f64,
    /// Linearization passes of the update at this epoch, 0 if none.
    pub iters: usize,
    pub gyro_bias: [f64; 3],
    pub accel_bias: [f64; 3],
    pub lever: [f64; 3],
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub series: Vec<EpochRecord>,
    /// `(t, passes)` for every measurement update.
    pub updates: Vec<(f64, usize)>,
    /// Heading RMSE per configured window, deg.
    pub heading_rmse: Vec<f64>,
    /// Fraction of epochs after the settle time with `|err_head| ≤ sig3_head`.
    pub consistency: f64,
    /// Median passes per update after the settle time.
    pub median_iters: f64,
    /// Time at which the filter broke down numerically, if it did.
    pub diverged_at: Option<f64>,
}

impl RunResult {
    /// Absolute heading error at the metrics epoch closest to `t`.
    /// Infinite after a divergence.
    pub fn heading_error_at(&self, t: f64) -> Option<f64> {
        self.series
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .map(|r| if r.err_head.is_nan() { f64::INFINITY } else { r.err_head.abs() })
    }
}

#[derive(Clone, Debug)]
pub struct VariantReport {
    pub label: String,
    pub variant: FilterVariant,
    /// Started from the true attitude.
    pub ideal: bool,
    pub runs: Vec<RunResult>,
}

impl VariantReport {
    /// Median over runs of the heading RMSE in window `w`.
    pub fn median_rmse(&self, w: usize) -> f64 {
        median(self.runs.iter().map(|r| r.heading_rmse[w]).collect())
    }

    /// Root of the mean over runs of the squared window RMSE.
    pub fn pooled_rmse(&self, w: usize) -> f64 {
        let n = self.runs.len() as f64;
        (self.runs.iter().map(|r| r.heading_rmse[w].powi(2)).sum::<f64>() / n).sqrt()
    }

    pub fn median_consistency(&self) -> f64 {
        median(self.runs.iter().map(|r| r.consistency).collect())
    }

    /// Median passes over every update after the settle time in every run.
    pub fn median_iters(&self) -> f64 {
        median(self.runs.iter().map(|r| r.median_iters).collect())
    }

    pub fn diverged_runs(&self) -> usize {
        self.runs.iter().filter(|r| r.diverged_at.is_some()).count()
    }
}

#[derive(Clone, Debug)]
pub struct MetricsReport {
    pub windows: Vec<(f64, f64)>,
    pub variants: Vec<VariantReport>,
}

impl MetricsReport {
    pub fn variant(&self, label: &str) -> Option<&VariantReport> {
        self.variants.iter().find(|v| v.label == label)
    }

    /// Fixed-width table of median heading RMSE per window.
    pub fn summary_table(&self) -> String {
        let mut out = format!("{:<22}", "variant");
        for (t0, t1) in &self.windows {
            out += &format!("{:>14}", format!("{t0}~{t1} s"));
        }
        out += &format!("{:>12}{:>10}{:>10}\n", "3σ frac", "iters", "diverged");
        for v in &self.variants {
            out += &format!("{:<22}", v.label);
            for w in 0..self.windows.len() {
                out += &format!("{:>14.3}", v.median_rmse(w));
            }
            out += &format!(
                "{:>12.3}{:>10.1}{:>10}\n",
                v.median_consistency(),
                v.median_iters(),
                v.diverged_runs()
            );
        }
        out
    }
}

/// `√(mean e²)` over samples with `t0 ≤ t < t1`, one value per window.
pub fn rmse_intervals(series: &[(f64, f64)], windows: &[(f64, f64)]) -> Result<Vec<f64>> {
    windows
        .iter()
        .map(|&(t0, t1)| {
            let (sum, n) = series
                .iter()
                .filter(|(t, _)| *t >= t0 && *t < t1)
                .fold((0.0, 0usize), |(s, n), (_, e)| (s + e * e, n + 1));
            if n == 0 {
                return Err(Error::Config(format!("RMSE window [{t0}, {t1}) holds no samples")));
            }
            Ok((sum / n as f64).sqrt())
        })
        .collect()
}

/// Median of a sample; NaN when empty.
pub fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_error_rmse() {
        let s: Vec<_> = (0..100).map(|k| (k as f64 * 0.1, -2.5)).collect();
        let r = rmse_intervals(&s, &[(1.0, 5.0)]).unwrap();
        assert!((r[0] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn empty_window_is_config_error() {
        let s = vec![(0.0, 1.0), (1.0, 1.0)];
        assert!(matches!(rmse_intervals(&s, &[(5.0, 6.0)]), Err(Error::Config(_))));
    }

    #[test]
    fn medians() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(vec![]).is_nan());
    }
}
