use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cins(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cins")).args(args).output().unwrap()
}

const SHORT: &str = r#"{
  "profile": {
    "origin_llh": [0.5410520681182421, 2.118829711921116, 10.0],
    "initial_heading": 0.5235987755982988,
    "segments": [
      {"kind": "turn", "duration": 10.0, "param": 0.15707963267948966},
      {"kind": "straight", "duration": 10.0, "param": 0.0}
    ],
    "base_speed": 10.0,
    "imu_rate": 100.0,
    "gnss_rate": 1.0,
    "duration": 30.0
  },
  "windows": [[1.0, 10.0], [10.0, 30.0]],
  "settle_time": 10.0,
  "monte_carlo_runs": 2
}"#;

fn write_config(dir: &Path) -> String {
    let p = dir.join("short.json");
    fs::write(&p, SHORT).unwrap();
    p.to_str().unwrap().to_owned()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_then_filter_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out_dir = dir.path().join("out");
    let out_dir = out_dir.to_str().unwrap();

    ok(&cins(&["simulate", "--config", &cfg, "--variants", "EKF-Iter,Clifford-RQEKF-Iter", "--out-dir", out_dir]));
    for f in ["truth.csv", "imu.csv", "gnss.csv", "config.json"] {
        assert!(Path::new(out_dir).join(f).exists(), "{f}");
    }
    let imu = fs::read_to_string(Path::new(out_dir).join("imu.csv")).unwrap();
    assert_eq!(imu.lines().count(), 1 + 3000);

    let out = cins(&["filter", "--config", &cfg, "--variants", "EKF-Iter,Clifford-RQEKF-Iter", "--out-dir", out_dir]);
    ok(&out);
    let summary = fs::read_to_string(Path::new(out_dir).join("summary.csv")).unwrap();
    assert!(summary.contains("Clifford-RQEKF-Iter"));
    assert!(summary.contains("EKF-Iter"));
    assert!(Path::new(out_dir).join("results.csv").exists());
}

#[test]
fn run_honours_runs_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out_dir = dir.path().join("mc");
    ok(&cins(&["run", "--config", &cfg, "--runs", "1", "--out-dir", out_dir.to_str().unwrap()]));
    assert!(out_dir.join("summary.csv").exists());
}

#[test]
fn bad_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, r#"{"seeed": 1}"#).unwrap();
    let out = cins(&["simulate", "--config", p.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = cins(&["run", "--variants", "Kalman-9000", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_log_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let imu = dir.path().join("imu.csv");
    let gnss = dir.path().join("gnss.csv");
    fs::write(&imu, "t,gx,gy,gz,ax,ay,az\n0.01,0,0,x,0,0,9.8\n").unwrap();
    fs::write(&gnss, "t,vx,vy,vz,px,py,pz,vel_std\n").unwrap();
    let out = cins(&[
        "filter",
        "--config",
        &cfg,
        "--imu",
        imu.to_str().unwrap(),
        "--gnss",
        gnss.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_oracles_pass() {
    let out = cins(&["verify"]);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS criterion")).count(), 7);
}
