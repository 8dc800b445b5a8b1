use serde::{Deserialize, Serialize};

use super::field::{extract_z, ZNorms};
use crate::error::{Error, Result};
use crate::mesh::FeSpace;
use crate::scalar::Real;
use crate::solver::{flux_predictor, solve_fixed_p, DiscreteProblem, Drift, SolveReport, SolverOptions, Source};
use crate::trichotomy::{geometric_schedule, validate_schedule};

/// Decreasing exponents with the solver settings used at every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Schedule<T> {
    pub exponents: Vec<T>,
    pub solver: SolverOptions<T>,
}

impl<T: Real> Schedule<T> {
    /// `p_k - 1 = (p0 - 1) 2^{-k}` for `k = 0..steps`.
    pub fn geometric(p0: T, steps: usize) -> Self {
        Self {
            exponents: geometric_schedule(p0, steps),
            solver: SolverOptions::default(),
        }
    }

    pub fn with_solver(mut self, solver: SolverOptions<T>) -> Self {
        self.solver = solver;
        self
    }

    /// Strictly decreasing, inside `(1, N)`, and admissible for the Hardy drift.
    pub fn validate(&self, drift: &Drift<T>, n: usize) -> Result<()> {
        let lambda = match drift {
            Drift::Hardy { lambda } => *lambda,
            _ => T::zero(),
        };
        validate_schedule(&self.exponents, lambda, n)?;
        self.solver.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound = "T: Real")]
pub struct ContinuationOptions<T> {
    /// Abort once `||u_p||_inf` exceeds this value.
    pub guard: T,
    /// Schedule points used by the log-slope fit.
    pub window: usize,
    /// Slope threshold separating the three trends.
    pub slope_tolerance: T,
    /// Points in the extrapolation to `p = 1`.
    pub richardson_points: usize,
    pub warm_start: bool,
}

impl<T: Real> Default for ContinuationOptions<T> {
    fn default() -> Self {
        Self {
            guard: T::of(1e8),
            window: 4,
            slope_tolerance: T::of(0.05),
            richardson_points: 3,
            warm_start: true,
        }
    }
}

/// Reports along a schedule. Steps after a blow-up or failure are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRun<T> {
    pub exponents: Vec<T>,
    pub reports: Vec<SolveReport<T>>,
    pub z_norms: Vec<ZNorms<T>>,
    /// The guard fired at the last report.
    pub blow_up: bool,
    /// Numerical failure at the first missing step.
    pub failure: Option<String>,
}

impl<T: Real> ScheduleRun<T> {
    pub fn is_complete(&self) -> bool {
        self.reports.len() == self.exponents.len() && !self.blow_up
    }

    /// `||u_p||_inf` per scheduled exponent; `+inf` after a blow-up, `NaN` after a failure.
    pub fn sup_norms(&self) -> Vec<T> {
        (0..self.exponents.len())
            .map(|k| match self.reports.get(k) {
                Some(r) if self.blow_up && k + 1 == self.reports.len() => {
                    if r.linf.is_finite() {
                        r.linf
                    } else {
                        T::infinity()
                    }
                }
                Some(r) => r.linf,
                None if self.blow_up => T::infinity(),
                None => T::nan(),
            })
            .collect()
    }

    /// Smallest `c` with `||z_p||_inf <= 1 + c (p - 1)` along the run.
    pub fn z_growth(&self) -> T {
        self.reports
            .iter()
            .zip(&self.z_norms)
            .map(|(r, z)| ((z.linf - T::one()) / (r.exponent - T::one())).max(T::zero()))
            .fold(T::zero(), T::max)
    }
}

/// Solves along the schedule, warm-starting each step from the previous one.
///
/// Validation errors are returned; a numerical failure ends the run with a
/// failure marker and the reports computed so far.
pub fn run_schedule<T: Real>(
    space: &dyn FeSpace<T>,
    drift: &Drift<T>,
    source: &Source<T>,
    schedule: &Schedule<T>,
    options: &ContinuationOptions<T>,
) -> Result<ScheduleRun<T>> {
    schedule.validate(drift, space.dimension())?;
    if options.window < 2 || options.richardson_points < 1 {
        return Err(Error::InvalidParameter {
            name: "window",
            value: options.window as f64,
            reason: "need a window of at least 2 and one extrapolation point",
        });
    }
    let mut run = ScheduleRun {
        exponents: schedule.exponents.clone(),
        reports: Vec::new(),
        z_norms: Vec::new(),
        blow_up: false,
        failure: None,
    };
    for &p in &schedule.exponents {
        let dp = DiscreteProblem::new(space, p, drift.clone(), source.clone()).with_options(schedule.solver);
        let prev = run.reports.last().filter(|_| options.warm_start);
        match solve_step(&dp, prev) {
            Ok(rep) => {
                let z = extract_z(space, &rep.solution, p, rep.epsilon);
                run.z_norms.push(z.norms);
                let over = !(rep.linf <= options.guard);
                run.reports.push(rep);
                if over {
                    run.blow_up = true;
                    break;
                }
            }
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => {
                run.failure = Some(format!("p = {p}: {e}"));
                break;
            }
        }
    }
    Ok(run)
}

/// Tries the flux predictor, then the previous solution, then a cold start.
fn solve_step<T: Real>(dp: &DiscreteProblem<'_, T>, prev: Option<&SolveReport<T>>) -> Result<SolveReport<T>> {
    let Some(prev) = prev else {
        return solve_fixed_p(dp, None);
    };
    let mut first = None;
    if let Ok(start) = flux_predictor(dp, prev) {
        match solve_fixed_p(dp, Some(&start)) {
            Ok(rep) => return Ok(rep),
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => first = Some(e),
        }
    }
    match solve_fixed_p(dp, Some(&prev.solution)) {
        Ok(rep) => Ok(rep),
        Err(e) if e.is_validation() => Err(e),
        Err(e) => solve_fixed_p(dp, None).map_err(|_| first.unwrap_or(e)),
    }
}
