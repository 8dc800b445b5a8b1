use serde::{Deserialize, Serialize};

use super::schedule::{ContinuationOptions, ScheduleRun};
use crate::error::{Error, Result};
use crate::mesh::FeSpace;
use crate::radial::aggregate;
use crate::scalar::Real;
use crate::trichotomy::{classify_sequence, richardson, SlopeFit, Trend, Trichotomy};

/// Extrapolated limit of a schedule run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate<T> {
    pub classification: Trichotomy,
    /// Nodal candidate limit; zero for `Degenerate`, absent for `Unbounded`.
    pub profile: Option<Vec<T>>,
    /// Fit of `log ||u_p||_inf` against `1/(p-1)`.
    pub sup_slope: SlopeFit<T>,
    /// Extreme per-node slopes (finite ones only).
    pub slope_range: (T, T),
    pub nodes: usize,
}

/// Per-node log-slope classification and extrapolation in `p - 1`.
///
/// Every free node must show the same trend, otherwise the result is
/// inconclusive. The candidate limit is the extrapolant, not the last iterate.
pub fn richardson_limit<T: Real>(space: &dyn FeSpace<T>, run: &ScheduleRun<T>, options: &ContinuationOptions<T>) -> Result<LimitEstimate<T>> {
    let ps = &run.exponents;
    let window = options.window.max(4);
    if ps.len() < window {
        return Err(Error::InvalidSchedule(format!("need at least {window} schedule points, got {}", ps.len())));
    }
    if let Some(f) = &run.failure {
        return Err(Error::Inconclusive(format!("run did not finish: {f}")));
    }
    if run.reports.iter().any(|r| r.solution.len() != space.num_nodes()) {
        return Err(Error::MismatchedMeshes("report size differs from the mesh".into()));
    }
    // reports at or beyond the guard count as +inf
    let finite_steps = if run.blow_up { run.reports.len() - 1 } else { run.reports.len() };
    let value = |k: usize, i: usize| -> T {
        if k < finite_steps {
            run.reports[k].solution[i].abs()
        } else {
            T::infinity()
        }
    };
    let sup: Vec<T> = (0..ps.len()).map(|k| if k < finite_steps { run.reports[k].linf } else { T::infinity() }).collect();
    let sup_slope = classify_sequence(ps, &sup, window, options.slope_tolerance)?;

    let free: Vec<usize> = (0..space.num_nodes()).filter(|&i| !space.is_dirichlet(i)).collect();
    let mut trends = Vec::with_capacity(free.len());
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut series = vec![T::zero(); ps.len()];
    for &i in &free {
        for (k, s) in series.iter_mut().enumerate() {
            *s = value(k, i);
        }
        let fit = classify_sequence(ps, &series, window, options.slope_tolerance)?;
        if fit.slope.is_finite() {
            lo = lo.min(fit.slope);
            hi = hi.max(fit.slope);
        }
        trends.push(fit.trend);
    }
    let classification = match aggregate(trends.iter().copied()) {
        Some(c) => c,
        None => {
            let count = |t| trends.iter().filter(|&&x| x == t).count();
            return Err(Error::Inconclusive(format!(
                "node trends disagree: {} to zero, {} finite, {} to infinity, {} inconclusive",
                count(Trend::ToZero),
                count(Trend::Finite),
                count(Trend::ToInfinity),
                count(Trend::Inconclusive)
            )));
        }
    };
    let profile = match classification {
        Trichotomy::Degenerate => Some(vec![T::zero(); space.num_nodes()]),
        Trichotomy::Unbounded => None,
        Trichotomy::Nontrivial => {
            let mut out = vec![T::zero(); space.num_nodes()];
            for &i in &free {
                let vals: Vec<T> = run.reports.iter().map(|r| r.solution[i]).collect();
                out[i] = richardson(ps, &vals, options.richardson_points);
            }
            Some(out)
        }
    };
    Ok(LimitEstimate {
        classification,
        profile,
        sup_slope,
        slope_range: (lo, hi),
        nodes: free.len(),
    })
}
