use super::model::{Mat18, Mat18x15, NoiseSpec};
use crate::error::{Error, Result};

/// Discrete covariance propagation over `dt`.
///
/// `Φ = I + F dt + ½ (F dt)²` and trapezoidal `Q_d = ½ (Φ G Q Gᵀ Φᵀ + G Q Gᵀ) dt`.
pub fn predict(p: &Mat18, f: &Mat18, g: &Mat18x15, noise: &NoiseSpec, dt: f64) -> Result<Mat18> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("covariance step must be positive, got {dt}")));
    }
    let fdt = f * dt;
    let phi = Mat18::identity() + fdt + fdt * fdt * 0.5;
    let mut gq = *g;
    for (k, q) in noise.q_diag().iter().enumerate() {
        gq.column_mut(k).scale_mut(*q);
    }
    let gqg = gq * g.transpose();
    let qd = (phi * gqg * phi.transpose() + gqg) * (0.5 * dt);
    let next = phi * p * phi.transpose() + qd;
    checked_symmetric(next)
}

/// Symmetrizes and rejects negative or non-finite variances. Negative values
/// within round-off of the largest variance are clamped to zero.
pub fn checked_symmetric(p: Mat18) -> Result<Mat18> {
    let mut s = (p + p.transpose()) * 0.5;
    let scale = s.diagonal().amax();
    for i in 0..18 {
        let d = s[(i, i)];
        if d < 0.0 && d >= -1e-12 * scale {
            s[(i, i)] = 0.0;
        } else if !(d.is_finite() && d >= 0.0) {
            return Err(Error::NumericalFailure(format!(
                "covariance diagonal {i} became {d:e}"
            )));
        }
    }
    Ok(s)
}

/// Series transition matrix, used by tests and the verification suite.
pub fn transition_series(f: &Mat18, dt: f64, terms: usize) -> Mat18 {
    let fdt = f * dt;
    let mut term = Mat18::identity();
    let mut sum = Mat18::identity();
    for k in 1..terms {
        term = term * fdt / k as f64;
        sum += term;
    }
    sum
}
