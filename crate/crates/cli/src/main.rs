use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use clifford_ins::filter::FilterVariant;
use clifford_ins::harness::{
    filter_logs, load_logs, run_scenario, run_seed, simulate_sensors, write_gnss, write_imu, write_results,
    write_summary, write_truth, MetricsReport, ScenarioConfig, SensorSet,
};
use clifford_ins::sim::generate_trajectory;
use clifford_ins::verify::{oracle_suite, run_scenarios, scenario_checks, Check};
use clifford_ins::Error;

#[derive(Parser)]
#[command(name = "cins", version, about = "Clifford-algebra INS/GNSS filters: simulation, filtering and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate truth and one run of IMU/GNSS logs as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Monte-Carlo run index whose sensor noise is written.
        #[arg(long, default_value_t = 0)]
        run: usize,
    },
    /// Run the filters over recorded IMU/GNSS CSV logs.
    Filter {
        #[command(flatten)]
        common: Common,
        /// IMU log (default: <out-dir>/imu.csv).
        #[arg(long)]
        imu: Option<PathBuf>,
        /// GNSS log (default: <out-dir>/gnss.csv).
        #[arg(long)]
        gnss: Option<PathBuf>,
    },
    /// Simulate and filter every Monte-Carlo run, then write the metrics.
    Run {
        #[command(flatten)]
        common: Common,
        /// Override the number of Monte-Carlo runs.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Check the algebra, Jacobian and retraction oracles, optionally the
    /// Monte-Carlo scenarios as well.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run the nominal, enlarged-bias and reset scenarios.
        #[arg(long)]
        scenarios: bool,
        /// Monte-Carlo runs per scenario.
        #[arg(long, default_value_t = 20)]
        runs: usize,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Preset {
    Nominal,
    Enlarged,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON; built-in preset when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario used without --config.
    #[arg(long, value_enum, default_value_t = Preset::Nominal)]
    preset: Preset,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's output_dir, else ./out).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Comma-separated variants, e.g. EKF-Iter,Clifford-RQEKF-Iter.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
}

impl Common {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => match self.preset {
                Preset::Nominal => ScenarioConfig::default(),
                Preset::Enlarged => ScenarioConfig::enlarged_bias(),
            },
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(names) = &self.variants {
            cfg.variants = names
                .iter()
                .map(|s| s.parse::<FilterVariant>())
                .collect::<clifford_ins::Result<_>>()?;
        }
        if let Some(dir) = &self.out_dir {
            cfg.output_dir = Some(dir.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir(cfg: &ScenarioConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn write_report(dir: &Path, report: &MetricsReport) -> Result<()> {
    write_results(&dir.join("results.csv"), report)?;
    write_summary(&dir.join("summary.csv"), report)?;
    print!("{}", report.summary_table());
    println!("wrote {}", dir.display());
    Ok(())
}

fn simulate(common: &Common, run: usize) -> Result<()> {
    let cfg = common.config()?;
    let dir = out_dir(&cfg);
    let truth = generate_trajectory(&cfg.profile, &cfg.earth)?;
    let seed = run_seed(cfg.seed, run);
    let sensors = simulate_sensors(&cfg, &truth, seed)?;
    write_truth(&dir.join("truth.csv"), &truth)?;
    write_imu(&dir.join("imu.csv"), &sensors.imu)?;
    write_gnss(&dir.join("gnss.csv"), &sensors.gnss)?;
    let path = dir.join("config.json");
    std::fs::write(&path, cfg.to_json()).map_err(|source| Error::Io { path, source })?;
    println!(
        "run {run} (seed {seed}): {} IMU samples, {} GNSS fixes -> {}",
        sensors.imu.len(),
        sensors.gnss.len(),
        dir.display()
    );
    Ok(())
}

fn filter(common: &Common, imu: Option<PathBuf>, gnss: Option<PathBuf>) -> Result<()> {
    let cfg = common.config()?;
    let dir = out_dir(&cfg);
    let imu = imu.unwrap_or_else(|| dir.join("imu.csv"));
    let gnss = gnss.unwrap_or_else(|| dir.join("gnss.csv"));
    let (imu, gnss) = load_logs(&imu, &gnss)?;
    let report = filter_logs(&cfg, &SensorSet { imu, gnss })?;
    write_report(&dir, &report)
}

fn run(common: &Common, runs: Option<usize>) -> Result<()> {
    let mut cfg = common.config()?;
    if let Some(n) = runs {
        cfg.monte_carlo_runs = n;
        cfg.validate()?;
    }
    let start = Instant::now();
    let report = run_scenario(&cfg)?;
    eprintln!("{} runs in {:.1} s", cfg.monte_carlo_runs, start.elapsed().as_secs_f64());
    write_report(&out_dir(&cfg), &report)
}

fn verify(seed: u64, scenarios: bool, runs: usize) -> Result<bool> {
    let mut checks: Vec<Check> = oracle_suite(seed)?;
    if scenarios {
        let start = Instant::now();
        checks.extend(scenario_checks(&run_scenarios(runs, seed)?)?);
        eprintln!("scenarios in {:.1} s", start.elapsed().as_secs_f64());
    }
    for c in &checks {
        println!("{c}");
    }
    Ok(checks.iter().all(Check::passed))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<Error>())
        .map_or(1, |e| e.category().exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { common, run: r } => simulate(&common, r).map(|_| true),
        Command::Filter { common, imu, gnss } => filter(&common, imu, gnss).map(|_| true),
        Command::Run { common, runs } => run(&common, runs).map(|_| true),
        Command::Verify { seed, scenarios, runs } => verify(seed, scenarios, runs),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            // library errors already carry their sources in the message
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
