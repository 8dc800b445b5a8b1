use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_spaces::{check_lambda, AnalyticDatum};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// Radial datum `f(r)`: a closed form or a piecewise-linear table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum RadialProfile<T> {
    Analytic(AnalyticDatum<T>),
    /// Linear interpolation between `(radii[i], values[i])`; `radii` starts at 0.
    Tabulated { radii: Vec<T>, values: Vec<T> },
}

impl<T: Real> RadialProfile<T> {
    pub fn tabulated(radii: Vec<T>, values: Vec<T>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::InvalidField("tabulated profile needs matching radii and values".into()));
        }
        if radii[0] != T::zero() || !radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidField("tabulated radii must start at 0 and increase".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField("tabulated values must be finite".into()));
        }
        Ok(RadialProfile::Tabulated { radii, values })
    }

    pub fn value(&self, r: T) -> T {
        match self {
            RadialProfile::Analytic(a) => a.value_at(r),
            RadialProfile::Tabulated { radii, values } => {
                let k = radii.partition_point(|&x| x <= r).clamp(1, radii.len() - 1);
                let (a, b) = (radii[k - 1], radii[k]);
                let t = ((r - a) / (b - a)).max(T::zero()).min(T::one());
                values[k - 1] + (values[k] - values[k - 1]) * t
            }
        }
    }

    /// Errors unless `f >= 0`; a sign-changing datum makes the flux two-signed.
    pub fn check_sign(&self) -> Result<()> {
        let negative = match self {
            RadialProfile::Analytic(a) => a.amplitude() < T::zero(),
            RadialProfile::Tabulated { values, .. } => values.iter().any(|v| *v < T::zero()),
        };
        if negative {
            return Err(Error::UnsupportedDatum(
                "radial oracle needs f >= 0 (sign-changing or negative data are rejected)".into(),
            ));
        }
        Ok(())
    }

    pub fn scaled(&self, c: T) -> Self {
        match self {
            RadialProfile::Analytic(a) => RadialProfile::Analytic(a.scaled(c)),
            RadialProfile::Tabulated { radii, values } => RadialProfile::Tabulated {
                radii: radii.clone(),
                values: values.iter().map(|v| *v * c).collect(),
            },
        }
    }
}

/// Radial instance of `-Delta_p u = lambda |u'|^{p-2} u' / r + f` on `B_R`, `u(R) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem<T> {
    pub dimension: usize,
    pub radius: T,
    pub lambda: T,
    pub profile: RadialProfile<T>,
    pub exponent: T,
}

impl<T: Real> RadialProblem<T> {
    pub fn new(dimension: usize, radius: T, lambda: T, profile: RadialProfile<T>, exponent: T) -> Result<Self> {
        let prob = Self {
            dimension,
            radius,
            lambda,
            profile,
            exponent,
        };
        prob.validate()?;
        Ok(prob)
    }

    /// Same instance at another exponent.
    pub fn with_exponent(&self, p: T) -> Result<Self> {
        Self::new(self.dimension, self.radius, self.lambda, self.profile.clone(), p)
    }

    pub fn with_profile(&self, profile: RadialProfile<T>) -> Result<Self> {
        Self::new(self.dimension, self.radius, self.lambda, profile, self.exponent)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::InvalidDimension(self.dimension as i64, 2));
        }
        if !(self.radius > T::zero()) || !self.radius.is_finite() {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: self.radius.to_f64_lossy(),
                reason: "must be positive",
            });
        }
        check_lambda(self.lambda, self.dimension)?;
        if !(self.exponent > T::one()) || !self.exponent.is_finite() {
            return Err(Error::InvalidExponent {
                value: self.exponent.to_f64_lossy(),
                reason: "need p > 1",
            });
        }
        if let RadialProfile::Analytic(a) = &self.profile {
            a.validate()?;
            if (a.radius() - self.radius).abs() > T::tiny() * self.radius {
                return Err(Error::InvalidParameter {
                    name: "radius",
                    value: a.radius().to_f64_lossy(),
                    reason: "datum radius differs from the ball radius",
                });
            }
        }
        self.profile.check_sign()
    }

    /// `lambda + N - 1`, the power in the integrating factor (positive by validation).
    pub(crate) fn moment_power(&self) -> T {
        self.lambda + T::of_usize(self.dimension) - T::one()
    }

    /// `M(r) = int_0^r s^{lambda+N-1} f(s) ds`.
    pub fn moment(&self, r: T, rule: &GaussLegendre<T>) -> T {
        let k = self.moment_power();
        match &self.profile {
            RadialProfile::Analytic(a) => a.radial_moment(self.dimension, self.lambda, r),
            RadialProfile::Tabulated { radii, .. } => {
                let mut acc = T::zero();
                let mut a = T::zero();
                for &b in radii.iter().skip(1) {
                    let hi = b.min(r);
                    if hi > a {
                        acc += rule.integrate(a, hi, |s| s.powf(k) * self.profile.value(s));
                    }
                    if b >= r {
                        return acc;
                    }
                    a = b;
                }
                // beyond the table the last value is held
                acc + rule.integrate(a, r, |s| s.powf(k) * self.profile.value(s))
            }
        }
    }

    /// Flux potential `v(r) = -r^{-lambda} M(r)` on the finite-energy branch `v(0) = 0`.
    pub fn flux_at(&self, r: T, rule: &GaussLegendre<T>) -> T {
        if r == T::zero() {
            return T::zero();
        }
        -r.powf(-self.lambda) * self.moment(r, rule)
    }

    /// `w = v / r^{N-1} = |u'|^{p-2} u'`.
    pub fn flux_density(&self, r: T, rule: &GaussLegendre<T>) -> T {
        self.flux_at(r, rule) / r.powi(self.dimension as i32 - 1)
    }
}
