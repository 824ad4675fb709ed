//! Scenario configuration, Monte-Carlo execution, metrics and CSV I/O.

pub mod config;
pub mod io;
pub mod metrics;
pub mod run;

pub use config::{nominal_init_std, ScenarioConfig};
pub use io::{
    load_gnss, load_imu, load_logs, write_gnss, write_imu, write_results, write_summary, write_truth,
};
pub use metrics::{median, rmse_intervals, EpochRecord, MetricsReport, RunResult, VariantReport};
pub use run::{
    filter_logs, filter_runs, run_filter, run_scenario, run_seed, simulate_sensors, FilterRun, FilterTrace, SensorSet, IDEAL_LABEL,
};
