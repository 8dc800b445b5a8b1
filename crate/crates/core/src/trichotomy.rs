//! Log-slope classification and Richardson extrapolation along a `p`-schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values above this are reported as `+inf` rather than propagated.
pub const BLOW_UP_REPORT: f64 = 1e12;

/// Asymptotic behaviour of a sequence `u_{p_k}` as `p_k -> 1+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trend {
    ToZero,
    Finite,
    ToInfinity,
    Inconclusive,
}

/// Global classification of a limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trichotomy {
    Degenerate,
    Nontrivial,
    Unbounded,
}

impl Trend {
    pub fn as_trichotomy(self) -> Option<Trichotomy> {
        match self {
            Trend::ToZero => Some(Trichotomy::Degenerate),
            Trend::Finite => Some(Trichotomy::Nontrivial),
            Trend::ToInfinity => Some(Trichotomy::Unbounded),
            Trend::Inconclusive => None,
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Fit of `log u` against `1/(p-1)` over the last `window` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit<T> {
    pub slope: T,
    pub trend: Trend,
}

/// Classifies one sequence `values[k] = u_{p_k}` (schedule decreasing to 1).
///
/// Zeros give `ToZero`, non-finite values `ToInfinity`. Otherwise the slope of
/// `log u` against `1/(p-1)` decides, and a sequence whose successive
/// increments of `log u` change sign by more than `tol` in `1/(p-1)` units is inconclusive.
pub fn classify_sequence<T: Real>(ps: &[T], values: &[T], window: usize, tol: T) -> Result<SlopeFit<T>> {
    if ps.len() != values.len() || ps.len() < window || window < 2 {
        return Err(Error::InvalidSchedule(format!(
            "need at least {window} schedule points, got {}",
            ps.len()
        )));
    }
    let start = ps.len() - window;
    let (ps, values) = (&ps[start..], &values[start..]);
    if values.iter().any(|v| !v.is_finite()) {
        return Ok(SlopeFit {
            slope: T::infinity(),
            trend: Trend::ToInfinity,
        });
    }
    if values.iter().any(|v| *v <= T::zero()) {
        return Ok(SlopeFit {
            slope: T::neg_infinity(),
            trend: Trend::ToZero,
        });
    }
    let xs: Vec<T> = ps.iter().map(|&p| (p - T::one()).recip()).collect();
    let ys: Vec<T> = values.iter().map(|v| v.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let local: Vec<T> = (1..xs.len()).map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])).collect();
    let up = local.iter().any(|&s| s > tol);
    let down = local.iter().any(|&s| s < -tol);
    let trend = if up && down {
        Trend::Inconclusive
    } else if slope < -tol {
        Trend::ToZero
    } else if slope > tol {
        Trend::ToInfinity
    } else {
        Trend::Finite
    };
    Ok(SlopeFit { slope, trend })
}

/// Polynomial extrapolation to `p = 1` through the last `points` samples in the variable `p - 1`.
pub fn richardson<T: Real>(ps: &[T], values: &[T], points: usize) -> T {
    let m = points.min(ps.len()).max(1);
    let start = ps.len() - m;
    let xs: Vec<T> = ps[start..].iter().map(|&p| p - T::one()).collect();
    let ys = &values[start..];
    // Lagrange interpolation evaluated at x = 0
    let mut acc = T::zero();
    for i in 0..m {
        let mut l = T::one();
        for j in 0..m {
            if i != j {
                l *= (T::zero() - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += l * ys[i];
    }
    acc
}

/// Checks that `ps` decreases strictly towards 1 and that every exponent keeps
/// the Hardy drift admissible, `|lambda| < (N - p) / p`.
pub fn validate_schedule<T: Real>(ps: &[T], lambda: T, n: usize) -> Result<()> {
    if ps.is_empty() {
        return Err(Error::InvalidSchedule("empty schedule".into()));
    }
    if !ps.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidSchedule("exponents must decrease strictly".into()));
    }
    let nf = T::of_usize(n);
    for &p in ps {
        if !(p > T::one()) || !(p < nf) {
            return Err(Error::InvalidSchedule(format!("exponent {p} outside (1, N)")));
        }
        if !(lambda.abs() < (nf - p) / p) {
            return Err(Error::InvalidSchedule(format!(
                "exponent {p} violates |lambda| < (N - p) / p for lambda = {lambda}"
            )));
        }
    }
    Ok(())
}

/// Default geometric schedule `p_k - 1 = (p_0 - 1) 2^{-k}`, `k = 0..steps`.
pub fn geometric_schedule<T: Real>(p0: T, steps: usize) -> Vec<T> {
    (0..steps).map(|k| T::one() + (p0 - T::one()) * T::of(0.5).powi(k as i32)).collect()
}

/// Replaces values beyond `limit` by `+inf`.
pub fn guard<T: Real>(v: T, limit: T) -> T {
    if !v.is_finite() || v.abs() > limit {
        T::infinity()
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn schedule() -> Vec<f64> {
        (0..7).map(|k| 1.0 + 0.2 * 0.5f64.powi(k)).collect()
    }

    #[test]
    fn exact_power_family() {
        let ps = schedule();
        for (alpha, trend) in [(0.5, Trend::ToZero), (1.0, Trend::Finite), (1.5, Trend::ToInfinity)] {
            let v: Vec<f64> = ps.iter().map(|p| f64::powf(alpha, 1.0 / (p - 1.0)) * 0.3).collect();
            let fit = classify_sequence(&ps, &v, 4, 1e-6).unwrap();
            assert_eq!(fit.trend, trend);
            if alpha != 1.0 {
                assert_relative_eq!(fit.slope, f64::ln(alpha), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn oscillation_is_inconclusive() {
        let ps = schedule();
        let v = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0];
        assert_eq!(classify_sequence(&ps, &v, 4, 1e-6).unwrap().trend, Trend::Inconclusive);
        assert!(classify_sequence(&ps[..3], &v[..3], 4, 1e-6).is_err());
    }

    #[test]
    fn richardson_removes_linear_and_quadratic_terms() {
        let ps = schedule();
        let v: Vec<f64> = ps.iter().map(|p| 2.0 + 3.0 * (p - 1.0) - (p - 1.0).powi(2)).collect();
        assert_relative_eq!(richardson(&ps, &v, 3), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn schedules() {
        let ps = geometric_schedule(1.2, 7);
        assert_relative_eq!(ps[6], 1.0 + 0.2 / 64.0);
        assert!(validate_schedule(&ps, -1.0, 3).is_ok());
        // p = 1.5 in N = 3 allows only |lambda| < 1
        assert!(validate_schedule(&[1.5], -1.0, 3).is_err());
        assert!(validate_schedule(&[1.1, 1.2], 0.0, 3).is_err());
        assert!(validate_schedule::<f64>(&[], 0.0, 3).is_err());
    }

    #[test]
    fn guard_marks_blow_up() {
        assert!(guard(2e12, BLOW_UP_REPORT).is_infinite());
        assert_eq!(guard(5.0, BLOW_UP_REPORT), 5.0);
    }
}
