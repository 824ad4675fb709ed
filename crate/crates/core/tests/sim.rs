use clifford_ins::mechanization::EarthModel;
use clifford_ins::sim::{
    euler_enu, generate_trajectory, simulate_gnss, simulate_imu, wrap_angle, ImuErrorSpec, Segment, TrajectoryProfile,
    QUARTER_TURN_RATE,
};
use clifford_ins::verify::closure_error;
use clifford_ins::Error;
use nalgebra::Vector3;

fn straight(duration: f64, imu_rate: f64) -> TrajectoryProfile {
    TrajectoryProfile {
        segments: vec![Segment::straight(duration)],
        duration,
        imu_rate,
        ..TrajectoryProfile::default()
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

fn lag1(xs: &[f64]) -> f64 {
    let (m, s) = mean_std(xs);
    let c: f64 = xs.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    c / ((xs.len() - 1) as f64 * s * s)
}

#[test]
fn zero_spec_reproduces_truth() {
    let model = EarthModel::default();
    let truth = generate_trajectory(&straight(10.0, 100.0), &model).unwrap();
    let imu = simulate_imu(&truth, &ImuErrorSpec::zero(), 100.0).unwrap();
    assert_eq!(imu.len(), truth.len() - 1);
    for (u, s) in imu.iter().zip(&truth) {
        assert_eq!(u.gyro, s.omega_ib_b);
        assert_eq!(u.accel, s.f_b);
    }
}

#[test]
fn imu_rate_mismatch_is_config_error() {
    let truth = generate_trajectory(&straight(2.0, 100.0), &EarthModel::default()).unwrap();
    assert!(matches!(
        simulate_imu(&truth, &ImuErrorSpec::default(), 200.0),
        Err(Error::Config(_))
    ));
}

#[test]
fn constant_bias_recovered_by_sample_mean() {
    let truth = generate_trajectory(&straight(1000.0, 100.0), &EarthModel::default()).unwrap();
    let spec = ImuErrorSpec {
        gyro_instability: 0.0,
        accel_instability: 0.0,
        ..ImuErrorSpec::default()
    }
    .with_seed(11);
    let imu = simulate_imu(&truth, &spec, 100.0).unwrap();
    let n = imu.len();
    assert!(n >= 100_000);
    let dt: f64 = 0.01;
    let (bg, ba) = (spec.gyro_bias_si(), spec.accel_bias_si());
    let (sg, sa) = (spec.gyro_density() / dt.sqrt(), spec.accel_density() / dt.sqrt());
    for k in 0..3 {
        let eg: Vec<f64> = imu.iter().zip(&truth).map(|(u, s)| u.gyro[k] - s.omega_ib_b[k]).collect();
        let ea: Vec<f64> = imu.iter().zip(&truth).map(|(u, s)| u.accel[k] - s.f_b[k]).collect();
        let (mg, stdg) = mean_std(&eg);
        let (ma, stda) = mean_std(&ea);
        assert!((mg - bg[k]).abs() < 3.0 * sg / (n as f64).sqrt(), "gyro axis {k}");
        assert!((ma - ba[k]).abs() < 3.0 * sa / (n as f64).sqrt(), "accel axis {k}");
        assert!((stdg / sg - 1.0).abs() < 0.02);
        assert!((stda / sa - 1.0).abs() < 0.02);
        assert!(lag1(&eg).abs() < 0.05);
        assert!(lag1(&ea).abs() < 0.05);
    }
}

#[test]
fn bias_walk_increments_match_density() {
    let truth = generate_trajectory(&straight(500.0, 100.0), &EarthModel::default()).unwrap();
    let spec = ImuErrorSpec {
        gyro_rw: 0.0,
        accel_rw: 0.0,
        ..ImuErrorSpec::zero()
    };
    let spec = ImuErrorSpec {
        gyro_instability: 10.0,
        accel_instability: 20.0,
        ..spec
    }
    .with_seed(5);
    let imu = simulate_imu(&truth, &spec, 100.0).unwrap();
    let err: Vec<f64> = imu.iter().zip(&truth).map(|(u, s)| u.gyro[0] - s.omega_ib_b[0]).collect();
    let inc: Vec<f64> = err.windows(2).map(|w| w[1] - w[0]).collect();
    let (_, s) = mean_std(&inc);
    let expected = spec.gyro_bias_walk() * 0.01_f64.sqrt();
    assert!((s / expected - 1.0).abs() < 0.05, "{s} vs {expected}");
}

#[test]
fn imu_is_deterministic_per_seed() {
    let truth = generate_trajectory(&straight(20.0, 100.0), &EarthModel::default()).unwrap();
    let spec = ImuErrorSpec::default().with_seed(42);
    let a = simulate_imu(&truth, &spec, 100.0).unwrap();
    let b = simulate_imu(&truth, &spec, 100.0).unwrap();
    let c = simulate_imu(&truth, &spec.with_seed(43), 100.0).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn gnss_noise_statistics() {
    let model = EarthModel::default();
    let truth = generate_trajectory(&straight(100.0, 100.0), &model).unwrap();
    let lever = Vector3::new(0.5, 0.8, 0.3);
    let noisy = simulate_gnss(&truth, &lever, 0.1, 100.0, 100.0, 9, &model).unwrap();
    let clean = simulate_gnss(&truth, &lever, 0.0, 100.0, 100.0, 9, &model).unwrap();
    assert!(noisy.len() >= 10_000);
    for k in 0..3 {
        let e: Vec<f64> = noisy.iter().zip(&clean).map(|(a, b)| a.vel[k] - b.vel[k]).collect();
        let (m, s) = mean_std(&e);
        assert!((s / 0.1 - 1.0).abs() < 0.05, "axis {k}: {s}");
        assert!(m.abs() < 3.0 * 0.1 / (e.len() as f64).sqrt());
        assert!(lag1(&e).abs() < 0.05);
    }
    for (a, b) in noisy.iter().zip(&clean) {
        assert_eq!(a.pos, b.pos);
    }
}

#[test]
fn gnss_without_lever_or_noise_is_ground_velocity() {
    let model = EarthModel::default();
    let truth = generate_trajectory(&TrajectoryProfile::default(), &model).unwrap();
    let fixes = simulate_gnss(&truth, &Vector3::zeros(), 0.0, 1.0, 100.0, 0, &model).unwrap();
    assert_eq!(fixes.len(), 601);
    for (k, y) in fixes.iter().enumerate() {
        let s = &truth[100 * k];
        assert_eq!(y.t, s.t);
        assert_eq!(y.vel, s.vel_ground);
        assert_eq!(y.pos, s.pos);
    }
}

#[test]
fn quarter_turn_changes_heading_by_ninety_degrees() {
    let model = EarthModel::default();
    let profile = TrajectoryProfile {
        segments: vec![Segment::turn(10.0, QUARTER_TURN_RATE)],
        duration: 10.0,
        ..TrajectoryProfile::default()
    };
    let truth = generate_trajectory(&profile, &model).unwrap();
    let first = truth.first().unwrap();
    let last = truth.last().unwrap();
    let (_, _, y0) = euler_enu(&first.att, &first.pos);
    let (_, _, y1) = euler_enu(&last.att, &first.pos);
    assert!((wrap_angle(y1 - y0) - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

// headings are read in the origin frame, in which the motion is planar
#[test]
fn straight_keeps_heading_and_speed() {
    let model = EarthModel::default();
    let truth = generate_trajectory(&straight(60.0, 100.0), &model).unwrap();
    let (_, _, y0) = euler_enu(&truth[0].att, &truth[0].pos);
    for s in truth.iter().step_by(500) {
        let (_, _, y) = euler_enu(&s.att, &truth[0].pos);
        assert!(wrap_angle(y - y0).abs() < 1e-9);
        assert!((s.vel_ground.norm() - 10.0).abs() < 1e-9);
    }
}

#[test]
fn default_profile_closes_under_reintegration() {
    let err = closure_error(&TrajectoryProfile::default(), &EarthModel::default()).unwrap();
    assert!(err < 1e-3, "closure error {err} m");
}

#[test]
fn zero_duration_profile_is_rejected() {
    let mut p = TrajectoryProfile::default();
    p.duration = 0.0;
    assert!(matches!(generate_trajectory(&p, &EarthModel::default()), Err(Error::Config(_))));
}
