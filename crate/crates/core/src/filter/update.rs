//! Iterated (Gauss–Newton) Kalman measurement update.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};

/// A measurement model on a manifold state, linearized in the error chart of
/// a fixed prior.
pub trait IteratedModel<const N: usize, const M: usize> {
    type State: Clone;

    fn predict(&self, x: &Self::State) -> SVector<f64, M>;

    /// Measurement Jacobian with respect to the error state at `x`.
    fn jacobian(&self, x: &Self::State) -> SMatrix<f64, M, N>;

    /// State at error `delta` from `base`.
    fn retract(&self, base: &Self::State, delta: &SVector<f64, N>) -> Self::State;

    /// Termination test between successive error iterates.
    fn converged(&self, prev: &SVector<f64, N>, next: &SVector<f64, N>) -> bool;
}

#[derive(Clone, Debug)]
pub struct IteratedOutcome<S, const N: usize> {
    pub state: S,
    pub cov: SMatrix<f64, N, N>,
    /// Number of linearization passes performed.
    pub iters: usize,
    /// Error iterates `δη₂, δη₃, …`, one per pass.
    pub deltas: Vec<SVector<f64, N>>,
}

/// Runs `δη_{i+1} = K_i [y − h(η_i) + H_i δη_i]`, `η_{i+1} = retract(x̂, δη_{i+1})`
/// until convergence or `max_iter` passes. The posterior covariance uses the
/// gain and Jacobian of the final pass.
pub fn iterated_update<Mdl, const N: usize, const M: usize>(
    model: &Mdl,
    prior: &Mdl::State,
    p: &SMatrix<f64, N, N>,
    y: &SVector<f64, M>,
    r: &SMatrix<f64, M, M>,
    max_iter: usize,
    joseph: bool,
) -> Result<IteratedOutcome<Mdl::State, N>>
where
    Mdl: IteratedModel<N, M>,
{
    let max_iter = max_iter.max(1);
    let mut delta = SVector::<f64, N>::zeros();
    let mut eta = prior.clone();
    let mut deltas = Vec::with_capacity(2);
    let mut kh = SMatrix::<f64, N, N>::zeros();
    let mut gain = SMatrix::<f64, N, M>::zeros();
    let mut iters = 0;
    for _ in 0..max_iter {
        let h = model.jacobian(&eta);
        let s = h * p * h.transpose() + r;
        let s_inv = s.try_inverse().ok_or_else(|| {
            Error::NumericalFailure("innovation covariance is singular".into())
        })?;
        gain = p * h.transpose() * s_inv;
        kh = gain * h;
        let next = gain * (y - model.predict(&eta) + h * delta);
        eta = model.retract(prior, &next);
        iters += 1;
        deltas.push(next);
        let done = model.converged(&delta, &next);
        delta = next;
        if done {
            break;
        }
    }
    let i_kh = SMatrix::<f64, N, N>::identity() - kh;
    let cov = if joseph {
        i_kh * p * i_kh.transpose() + gain * r * gain.transpose()
    } else {
        i_kh * p
    };
    let cov = (cov + cov.transpose()) * 0.5;
    Ok(IteratedOutcome {
        state: eta,
        cov,
        iters,
        deltas,
    })
}
