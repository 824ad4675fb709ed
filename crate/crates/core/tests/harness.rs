use std::fs;
use std::path::Path;

use clifford_ins::filter::{FilterKind, FilterVariant};
use clifford_ins::harness::{
    filter_logs, load_gnss, load_imu, load_logs, rmse_intervals, run_filter, run_scenario, run_seed, simulate_sensors,
    write_gnss, write_imu, write_results, write_summary, FilterRun, ScenarioConfig, SensorSet, IDEAL_LABEL,
};
use clifford_ins::sim::{generate_trajectory, ideal_imu, simulate_gnss, Segment, TrajectoryProfile, QUARTER_TURN_RATE};
use clifford_ins::{Error, ErrorCategory};
use nalgebra::Vector3;
use proptest::prelude::*;

fn short_config(duration: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.profile = TrajectoryProfile {
        segments: vec![
            Segment::turn(10.0, QUARTER_TURN_RATE),
            Segment::accel(5.0, 1.0),
            Segment::straight(10.0),
            Segment::decel(5.0, 1.0),
            Segment::turn(10.0, -QUARTER_TURN_RATE),
        ],
        duration,
        ..TrajectoryProfile::default()
    };
    cfg.windows = vec![(1.0, 10.0), (10.0, duration)];
    cfg.settle_time = 20.0;
    cfg
}

#[test]
fn imu_row_maps_fields_directly() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("imu.csv");
    fs::write(&p, "t,gx,gy,gz,ax,ay,az\n0.010,0.001,-0.002,0.0005,0.12,-9.81,0.03\n").unwrap();
    let imu = load_imu(&p).unwrap();
    assert_eq!(imu.len(), 1);
    assert_eq!(imu[0].t, 0.01);
    assert_eq!(imu[0].gyro, Vector3::new(0.001, -0.002, 0.0005));
    assert_eq!(imu[0].accel, Vector3::new(0.12, -9.81, 0.03));
}

#[test]
fn header_only_files_are_empty_streams() {
    let dir = tempfile::tempdir().unwrap();
    let (pi, pg) = (dir.path().join("i.csv"), dir.path().join("g.csv"));
    fs::write(&pi, "t,gx,gy,gz,ax,ay,az\n").unwrap();
    fs::write(&pg, "t,vx,vy,vz,px,py,pz,vel_std\n").unwrap();
    let (imu, gnss) = load_logs(&pi, &pg).unwrap();
    assert!(imu.is_empty() && gnss.is_empty());
}

#[test]
fn malformed_row_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("imu.csv");
    fs::write(&p, "t,gx,gy,gz,ax,ay,az\n0,0,0,0,0,0,0\n0.01,0,0,zero,0,0,0\n").unwrap();
    match load_imu(&p) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
    fs::write(&p, "t,gx,gy,gz,ax,ay,az\n0,0,0,0,0,0\n").unwrap();
    assert_eq!(load_imu(&p).unwrap_err().category(), ErrorCategory::Parse);
    fs::write(&p, "t,gx,gy,gz\n0,0,0,0\n").unwrap();
    assert!(matches!(load_imu(&p), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn non_monotone_time_is_an_ordering_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("gnss.csv");
    fs::write(&p, "t,vx,vy,vz,px,py,pz,vel_std\n1,0,0,0,0,0,0,0.1\n1,0,0,0,0,0,0,0.1\n").unwrap();
    let err = load_gnss(&p).unwrap_err();
    let mut e = &err;
    while let Error::Context { source, .. } = e {
        e = source;
    }
    assert!(matches!(e, Error::Ordering { .. }), "{err}");
}

#[test]
fn sensor_csv_round_trip_is_bit_exact() {
    let cfg = short_config(40.0);
    let truth = generate_trajectory(&cfg.profile, &cfg.earth).unwrap();
    let s = simulate_sensors(&cfg, &truth, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (pi, pg) = (dir.path().join("imu.csv"), dir.path().join("gnss.csv"));
    write_imu(&pi, &s.imu).unwrap();
    write_gnss(&pg, &s.gnss).unwrap();
    let (imu, gnss) = load_logs(&pi, &pg).unwrap();
    assert_eq!(imu, s.imu);
    assert_eq!(gnss, s.gnss);
}

#[test]
fn config_rejects_unknown_keys_and_round_trips() {
    assert!(matches!(ScenarioConfig::from_json(r#"{"seeed": 3}"#), Err(Error::Config(_))));
    let cfg = ScenarioConfig::enlarged_bias();
    assert_eq!(ScenarioConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    let partial = ScenarioConfig::from_json(r#"{"seed": 9, "monte_carlo_runs": 4}"#).unwrap();
    assert_eq!((partial.seed, partial.monte_carlo_runs), (9, 4));
    assert_eq!(partial.profile, TrajectoryProfile::default());
}

#[test]
fn config_validation() {
    let mut cfg = ScenarioConfig::default();
    cfg.variants.clear();
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    let mut cfg = ScenarioConfig::default();
    cfg.monte_carlo_runs = 0;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    let mut cfg = ScenarioConfig::default();
    cfg.windows = vec![(200.0, 900.0)];
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
}

#[test]
fn missing_config_file_is_config_category() {
    let err = ScenarioConfig::load(Path::new("/definitely/not/here.json")).unwrap_err();
    assert_eq!(err.category(), ErrorCategory::Config);
}

proptest! {
    #[test]
    fn rmse_matches_brute_force(values in prop::collection::vec(-50.0f64..50.0, 20..200), t0 in 0.0f64..5.0, len in 1.0f64..10.0) {
        let series: Vec<(f64, f64)> = values.iter().enumerate().map(|(k, v)| (k as f64 * 0.1, *v)).collect();
        let t1 = t0 + len;
        let inside: Vec<f64> = series.iter().filter(|(t, _)| *t >= t0 && *t < t1).map(|(_, v)| *v).collect();
        let got = rmse_intervals(&series, &[(t0, t1)]);
        if inside.is_empty() {
            prop_assert!(got.is_err());
        } else {
            let mut sum = 0.0;
            for v in &inside {
                sum += v * v;
            }
            let want = (sum / inside.len() as f64).sqrt();
            let got = got.unwrap()[0];
            prop_assert!(got >= 0.0);
            prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0));
        }
    }
}

#[test]
fn noiseless_perfect_start_tracks_truth() {
    let mut cfg = short_config(60.0);
    cfg.windows = vec![(0.0, 60.0)];
    cfg.init_att_error_deg = [0.0; 3];
    // the filter starts from the first fix, which is exact only without a lever
    cfg.lever = [0.0; 3];
    cfg.lever_guess = [0.0; 3];
    cfg.init_std.att_deg = [1.0; 3];
    let truth = generate_trajectory(&cfg.profile, &cfg.earth).unwrap();
    let gnss = simulate_gnss(
        &truth,
        &Vector3::from(cfg.lever),
        0.0,
        cfg.profile.gnss_rate,
        cfg.profile.imu_rate,
        0,
        &cfg.earth,
    )
    .unwrap();
    let sensors = SensorSet {
        imu: ideal_imu(&truth),
        gnss,
    };
    for kind in FilterKind::ALL {
        for iterated in [false, true] {
            let run = FilterRun::plain(FilterVariant::new(kind, iterated));
            let trace = run_filter(&cfg, &truth, &sensors, &run).unwrap();
            assert!(trace.diverged_at.is_none(), "{}", run.label);
            let head: Vec<(f64, f64)> = trace.series.iter().map(|r| (r.t, r.err_head)).collect();
            let rmse = rmse_intervals(&head, &cfg.windows).unwrap()[0];
            assert!(rmse < 0.01, "{}: {rmse} deg", run.label);
        }
    }
}

#[test]
fn scenario_is_deterministic_and_ideal_first() {
    let mut cfg = short_config(40.0);
    cfg.monte_carlo_runs = 3;
    cfg.variants = vec![
        FilterVariant::iterated(FilterKind::Ekf),
        FilterVariant::iterated(FilterKind::CliffordRqekf),
    ];
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    assert_eq!(a.variants[0].label, IDEAL_LABEL);
    assert_eq!(a.variants.len(), 3);
    for (va, vb) in a.variants.iter().zip(&b.variants) {
        assert_eq!(va.runs.len(), 3);
        for (ra, rb) in va.runs.iter().zip(&vb.runs) {
            assert_eq!(ra.seed, run_seed(cfg.seed, ra.run));
            assert_eq!(ra.series, rb.series);
            assert_eq!(ra.heading_rmse, rb.heading_rmse);
        }
    }
    let mut other = cfg.clone();
    other.seed = 1;
    let c = run_scenario(&other).unwrap();
    assert_ne!(a.variants[1].runs[0].series, c.variants[1].runs[0].series);
}

#[test]
fn replayed_logs_match_the_simulated_run() {
    let mut cfg = short_config(40.0);
    cfg.variants = vec![FilterVariant::iterated(FilterKind::CliffordRqekf)];
    let direct = run_scenario(&cfg).unwrap();

    let truth = generate_trajectory(&cfg.profile, &cfg.earth).unwrap();
    let s = simulate_sensors(&cfg, &truth, run_seed(cfg.seed, 0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (pi, pg) = (dir.path().join("imu.csv"), dir.path().join("gnss.csv"));
    write_imu(&pi, &s.imu).unwrap();
    write_gnss(&pg, &s.gnss).unwrap();
    let (imu, gnss) = load_logs(&pi, &pg).unwrap();
    let replay = filter_logs(&cfg, &SensorSet { imu, gnss }).unwrap();
    for (a, b) in direct.variants.iter().zip(&replay.variants) {
        assert_eq!(a.runs[0].series, b.runs[0].series, "{}", a.label);
    }

    write_results(&dir.path().join("out/results.csv"), &replay).unwrap();
    write_summary(&dir.path().join("out/summary.csv"), &replay).unwrap();
    let results = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert!(results.starts_with("t,variant,run,err_roll,err_pitch,err_head,iters,sig3_head"));
    assert!(dir.path().join("out/summary.txt").exists());
}

#[test]
fn replay_rejects_logs_of_the_wrong_length() {
    let cfg = short_config(40.0);
    let truth = generate_trajectory(&cfg.profile, &cfg.earth).unwrap();
    let mut s = simulate_sensors(&cfg, &truth, 0).unwrap();
    s.imu.pop();
    assert!(matches!(filter_logs(&cfg, &s), Err(Error::Config(_))));
}
