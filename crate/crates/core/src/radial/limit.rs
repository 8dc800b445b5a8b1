use serde::{Deserialize, Serialize};

use super::problem::RadialProblem;
use super::solution::{radial_solution_with, RadialOptions};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::trichotomy::{classify_sequence, guard, richardson, validate_schedule, Trend, Trichotomy, BLOW_UP_REPORT};

/// Settings for the `p -> 1+` classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitOptions {
    /// Number of trailing schedule points in the log-slope fit.
    pub window: usize,
    /// `|slope| <= tol` counts as a finite limit.
    pub slope_tolerance: f64,
    /// Values beyond this are reported as `+inf`.
    pub blow_up: f64,
    /// Points used by the Richardson extrapolant of finite limits.
    pub richardson_points: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            window: 4,
            // the radial family is exact, so the fit is only limited by rounding
            slope_tolerance: 1e-6,
            blow_up: BLOW_UP_REPORT,
            richardson_points: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTrend<T> {
    pub radius: T,
    /// `u_{p_k}(r)` with blow-up values reported as `+inf`.
    pub values: Vec<T>,
    pub slope: T,
    pub trend: Trend,
    /// `0`, `+inf`, or the Richardson extrapolant.
    pub limit: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyRecord<T> {
    pub schedule: Vec<T>,
    /// `||u_{p_k}||_inf`, guarded.
    pub sup_norms: Vec<T>,
    pub points: Vec<PointTrend<T>>,
    /// Common trend of all interior points, `None` when they disagree or a point is inconclusive.
    pub classification: Option<Trichotomy>,
}

impl<T: Real> TrichotomyRecord<T> {
    pub fn classification(&self) -> Result<Trichotomy> {
        self.classification
            .ok_or_else(|| Error::Inconclusive("interior points do not share one asymptotic trend".into()))
    }

    /// Limit profile `(r, u(r))` at the recorded points.
    pub fn limit_profile(&self) -> Vec<(T, T)> {
        self.points.iter().map(|p| (p.radius, p.limit)).collect()
    }
}

/// Common trend of a set of per-point trends.
pub fn aggregate(trends: impl IntoIterator<Item = Trend>) -> Option<Trichotomy> {
    let mut seen: Option<Trend> = None;
    for t in trends {
        match seen {
            None => seen = Some(t),
            Some(s) if s == t => {}
            Some(_) => return None,
        }
    }
    seen.and_then(Trend::as_trichotomy)
}

/// Solves the radial problem along `schedule` and classifies each interior node by
/// the slope of `log u_p` against `1/(p-1)`.
pub fn limit_p_to_one<T: Real>(
    prob: &RadialProblem<T>,
    schedule: &[T],
    radial: &RadialOptions,
    opts: &LimitOptions,
) -> Result<TrichotomyRecord<T>> {
    validate_schedule(schedule, prob.lambda, prob.dimension)?;
    let grid = radial.grid(prob.radius)?;
    let limit = T::of(opts.blow_up);
    let mut columns = Vec::with_capacity(schedule.len());
    let mut sup_norms = Vec::with_capacity(schedule.len());
    for &p in schedule {
        let sol = radial_solution_with(&prob.with_exponent(p)?, &grid, radial.gauss_points)?;
        sup_norms.push(guard(sol.sup(), limit));
        columns.push(sol.values);
    }
    let nodes = grid.nodes();
    let mut points = Vec::new();
    // interior nodes only: r = 0 duplicates r_1 and u(R) = 0
    for j in 1..nodes.len() - 1 {
        let values: Vec<T> = columns.iter().map(|c| guard(c[j], limit)).collect();
        let fit = classify_sequence(schedule, &values, opts.window, T::of(opts.slope_tolerance))?;
        let limit_value = match fit.trend {
            Trend::ToZero => T::zero(),
            Trend::ToInfinity => T::infinity(),
            Trend::Finite => richardson(schedule, &values, opts.richardson_points),
            Trend::Inconclusive => T::nan(),
        };
        points.push(PointTrend {
            radius: nodes[j],
            values,
            slope: fit.slope,
            trend: fit.trend,
            limit: limit_value,
        });
    }
    let classification = aggregate(points.iter().map(|p| p.trend));
    Ok(TrichotomyRecord {
        schedule: schedule.to_vec(),
        sup_norms,
        points,
        classification,
    })
}
