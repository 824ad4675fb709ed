//! CSV readers and writers. Floats are written in shortest round-trip form.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use super::metrics::MetricsReport;
use crate::error::{Error, Result};
use crate::mechanization::{GnssSample, ImuSample};
use crate::sim::TruthSample;

pub const IMU_HEADER: [&str; 7] = ["t", "gx", "gy", "gz", "ax", "ay", "az"];
pub const GNSS_HEADER: [&str; 8] = ["t", "vx", "vy", "vz", "px", "py", "pz", "vel_std"];

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        kind => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

fn put(w: &mut csv::Writer<File>, path: &Path, fields: &[String]) -> Result<()> {
    w.write_record(fields).map_err(|e| csv_err(path, e))
}

fn fmt(xs: &[f64]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

/// Reads rows of `N` floats under a mandatory header, with strictly
/// increasing first column.
fn read_rows<const N: usize>(path: &Path, header: &[&str; N]) -> Result<Vec<[f64; N]>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if found.len() != N || found.iter().zip(header.iter()).any(|(a, b)| a != *b) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header '{}', found '{}'", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out: Vec<[f64; N]> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if rec.len() != N {
            return Err(parse_err(format!("expected {N} fields, found {}", rec.len())));
        }
        let mut row = [0.0; N];
        for (k, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(format!("column '{}': cannot parse '{field}'", header[k])))?;
            if !v.is_finite() {
                return Err(parse_err(format!("column '{}' is not finite", header[k])));
            }
            row[k] = v;
        }
        if let Some(prev) = out.last() {
            if !(row[0] > prev[0]) {
                return Err(Error::Ordering {
                    previous: prev[0],
                    current: row[0],
                }
                .context(format!("{}:{line}", path.display())));
            }
        }
        out.push(row);
    }
    Ok(out)
}

pub fn load_imu(path: &Path) -> Result<Vec<ImuSample>> {
    Ok(read_rows(path, &IMU_HEADER)?
        .into_iter()
        .map(|r| ImuSample::new(r[0], Vector3::new(r[1], r[2], r[3]), Vector3::new(r[4], r[5], r[6])))
        .collect())
}

pub fn load_gnss(path: &Path) -> Result<Vec<GnssSample>> {
    let rows = read_rows(path, &GNSS_HEADER)?;
    if let Some(r) = rows.iter().find(|r| !(r[7] > 0.0)) {
        return Err(Error::Config(format!(
            "{}: non-positive vel_std at t = {}",
            path.display(),
            r[0]
        )));
    }
    Ok(rows
        .into_iter()
        .map(|r| GnssSample {
            t: r[0],
            vel: Vector3::new(r[1], r[2], r[3]),
            pos: Vector3::new(r[4], r[5], r[6]),
            vel_std: r[7],
        })
        .collect())
}

pub fn load_logs(imu_path: &Path, gnss_path: &Path) -> Result<(Vec<ImuSample>, Vec<GnssSample>)> {
    Ok((load_imu(imu_path)?, load_gnss(gnss_path)?))
}

pub fn write_imu(path: &Path, imu: &[ImuSample]) -> Result<()> {
    let mut w = writer(path)?;
    put(&mut w, path, &IMU_HEADER.map(String::from))?;
    for u in imu {
        put(
            &mut w,
            path,
            &fmt(&[u.t, u.gyro.x, u.gyro.y, u.gyro.z, u.accel.x, u.accel.y, u.accel.z]),
        )?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_gnss(path: &Path, gnss: &[GnssSample]) -> Result<()> {
    let mut w = writer(path)?;
    put(&mut w, path, &GNSS_HEADER.map(String::from))?;
    for g in gnss {
        put(
            &mut w,
            path,
            &fmt(&[g.t, g.vel.x, g.vel.y, g.vel.z, g.pos.x, g.pos.y, g.pos.z, g.vel_std]),
        )?;
    }
    w.flush().map_err(io_err(path))
}

/// Truth attitude (`q_e^b`), position, ground velocity, body rate and
/// specific force.
pub fn write_truth(path: &Path, truth: &[TruthSample]) -> Result<()> {
    let mut w = writer(path)?;
    let header = [
        "t", "qw", "qx", "qy", "qz", "px", "py", "pz", "vx", "vy", "vz", "wx", "wy", "wz", "fx", "fy", "fz",
    ];
    put(&mut w, path, &header.map(String::from))?;
    for s in truth {
        let q = s.att;
        let mut row = vec![s.t, q.w, q.v.x, q.v.y, q.v.z];
        row.extend(s.pos.iter().chain(&s.vel_ground).chain(&s.omega_ib_b).chain(&s.f_b));
        put(&mut w, path, &fmt(&row))?;
    }
    w.flush().map_err(io_err(path))
}

/// Per-epoch errors, bounds and estimates of every variant and run.
pub fn write_results(path: &Path, report: &MetricsReport) -> Result<()> {
    let mut w = writer(path)?;
    let header = [
        "t", "variant", "run", "err_roll", "err_pitch", "err_head", "iters", "sig3_head", "bg_x", "bg_y", "bg_z",
        "ba_x", "ba_y", "ba_z", "lever_x", "lever_y", "lever_z",
    ];
    put(&mut w, path, &header.map(String::from))?;
    for v in &report.variants {
        for r in &v.runs {
            for e in &r.series {
                let mut row = vec![e.t.to_string(), v.label.clone(), r.run.to_string()];
                row.extend(fmt(&[e.err_roll, e.err_pitch, e.err_head]));
                row.push(e.iters.to_string());
                row.push(e.sig3_head.to_string());
                row.extend(fmt(&e.gyro_bias));
                row.extend(fmt(&e.accel_bias));
                row.extend(fmt(&e.lever));
                put(&mut w, path, &row)?;
            }
        }
    }
    w.flush().map_err(io_err(path))
}

/// One row per variant and run with windowed heading RMSE and statistics.
pub fn write_summary(path: &Path, report: &MetricsReport) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["variant".to_string(), "run".into(), "seed".into()];
    header.extend(report.windows.iter().map(|(a, b)| format!("rmse_head_{a}_{b}")));
    header.extend(["consistency".to_string(), "median_iters".into()]);
    put(&mut w, path, &header)?;
    for v in &report.variants {
        for r in &v.runs {
            let mut row = vec![v.label.clone(), r.run.to_string(), r.seed.to_string()];
            row.extend(fmt(&r.heading_rmse));
            row.extend(fmt(&[r.consistency, r.median_iters]));
            put(&mut w, path, &row)?;
        }
    }
    w.flush().map_err(io_err(path))?;
    let table = path.with_extension("txt");
    let mut f = File::create(&table).map_err(io_err(&table))?;
    f.write_all(report.summary_table().as_bytes()).map_err(io_err(&table))
}
