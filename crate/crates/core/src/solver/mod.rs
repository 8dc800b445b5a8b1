//! Fixed-`p` finite element solver for the drift problem with truncated drift
//! and datum, plus the a priori energy and level-set diagnostics.

mod assemble;
mod bounds;
pub mod linalg;
mod problem;
mod solve;

pub use bounds::{energy_and_bound, level_decay, linf_via_levels, EnergyBound, LevelEstimate};
pub use problem::{DiscreteProblem, Drift, Regularization, SolverOptions, Source};
pub use solve::{flux_predictor, solve_fixed_p, SolveReport};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `T_k(s)`: `s` clipped to `[-k, k]`.
pub fn truncate<T: Real>(s: T, k: T) -> Result<T> {
    if !(k > T::zero()) {
        return Err(Error::InvalidLevel(k.to_f64_lossy()));
    }
    Ok(s.max(-k).min(k))
}

/// `G_k(s) = s - T_k(s)`.
pub fn gk_part<T: Real>(s: T, k: T) -> Result<T> {
    Ok(s - truncate(s, k)?)
}

#[cfg(test)]
mod tests;
