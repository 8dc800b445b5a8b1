//! Critical-threshold quantities and the regime classifier.

use serde::{Deserialize, Serialize};

use super::constants::Constants;
use super::norms::Datum;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default tolerance for thresholds computed from closed-form data.
pub const ANALYTIC_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    /// `theta < 1 - tol`, `|theta - 1| <= tol`, otherwise supercritical.
    pub fn classify<T: Real>(theta: T, tol: T) -> Self {
        if theta < T::one() - tol {
            Regime::Subcritical
        } else if (theta - T::one()).abs() <= tol {
            Regime::Critical
        } else {
            Regime::Supercritical
        }
    }
}

/// Threshold quantities for one instance. Infinite norms give infinite thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport<T> {
    pub dimension: usize,
    pub lambda: T,
    /// `S_N ||f||_{L^N} + |lambda| / (N - 1)`.
    pub theta_ln: T,
    /// `gamma_1 ||f||_{L^{N,inf}} + |lambda| / (N - 1)`.
    pub theta_lorentz: T,
    /// `gamma_1 |||F|||_{L^{N,inf}} + S_N ||f||_{L^N}`; for the Hardy drift
    /// `|F| = |lambda| / |x|` and this coincides with `theta_ln`.
    pub theta_drift: T,
    pub regime_ln: Regime,
    pub regime_lorentz: Regime,
    pub regime_drift: Regime,
    /// Whether a generic drift field (rather than the Hardy drift) was supplied.
    pub generic_drift: bool,
    pub tolerance: T,
    /// The sharpest applicable classification: the Lorentz threshold for the
    /// Hardy drift, the generic-drift threshold otherwise.
    pub governing_regime: Regime,
}

impl<T: Real> ThresholdReport<T> {
    pub fn governing_theta(&self) -> T {
        if self.generic_drift {
            self.theta_drift
        } else {
            self.theta_lorentz
        }
    }
}

/// Checks `|lambda| < N - 1`.
pub fn check_lambda<T: Real>(lambda: T, n: usize) -> Result<()> {
    let bound = T::of_usize(n) - T::one();
    if !(lambda.abs() < bound) {
        return Err(Error::OutOfRangeLambda {
            lambda: lambda.to_f64_lossy(),
            bound: bound.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Computes all thresholds for `-Delta_p u = lambda ... + f` (Hardy drift) or,
/// when `drift` is given, for a generic drift with magnitude `|F| = drift`.
///
/// `tol = None` selects the default: [`ANALYTIC_TOLERANCE`] for closed-form
/// data, ten times the weak-norm resolution of sampled data otherwise.
pub fn threshold_classify<T: Real>(
    lambda: T,
    f: &Datum<T>,
    drift: Option<&Datum<T>>,
    n: usize,
    tol: Option<T>,
) -> Result<ThresholdReport<T>> {
    let c = Constants::<T>::new(n)?;
    if drift.is_none() {
        check_lambda(lambda, n)?;
    }
    let nf = T::of_usize(n);
    let hardy_part = lambda.abs() / (nf - T::one());
    let f_ln = f.lq_norm(n, nf)?;
    let f_weak = f.weak_norm(n)?;
    let sob = if f_ln == T::zero() { T::zero() } else { c.sobolev * f_ln };
    let theta_ln = sob + hardy_part;
    let theta_lorentz = c.gamma_1 * f_weak + hardy_part;
    let theta_drift = match drift {
        Some(fd) => c.gamma_1 * fd.weak_norm(n)? + sob,
        None => theta_ln,
    };

    let tolerance = match tol {
        Some(t) if t >= T::zero() => t,
        Some(t) => {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                value: t.to_f64_lossy(),
                reason: "must be nonnegative",
            })
        }
        None => {
            let mut res = f.weak_norm_resolution(n);
            if let Some(fd) = drift {
                res = res.max(fd.weak_norm_resolution(n));
            }
            let analytic = f.is_analytic() && drift.map_or(true, |d| d.is_analytic());
            if analytic {
                T::of(ANALYTIC_TOLERANCE)
            } else {
                (T::of(10.0) * res * theta_lorentz.max(theta_drift).min(T::of(1e300).min(T::max_value())))
                    .max(T::of(ANALYTIC_TOLERANCE))
            }
        }
    };
    let regime_ln = Regime::classify(theta_ln, tolerance);
    let regime_lorentz = Regime::classify(theta_lorentz, tolerance);
    let regime_drift = Regime::classify(theta_drift, tolerance);
    Ok(ThresholdReport {
        dimension: n,
        lambda,
        theta_ln,
        theta_lorentz,
        theta_drift,
        regime_ln,
        regime_lorentz,
        regime_drift,
        generic_drift: drift.is_some(),
        tolerance,
        governing_regime: if drift.is_some() { regime_drift } else { regime_lorentz },
    })
}
