use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_spaces::{lorentz_weak_norm, lq_norm, AnalyticDatum, Constants, ScalarField};
use crate::mesh::FeSpace;
use crate::scalar::{norm, Real, Vec3};

use super::truncate;

type VectorFn<T> = Arc<dyn Fn(Vec3<T>) -> Vec3<T> + Send + Sync>;
type ScalarFn<T> = Arc<dyn Fn(Vec3<T>) -> T + Send + Sync>;

/// Drift `F` in `-Delta_p u = |grad u|^{p-2} grad u . F + f`.
#[derive(Clone)]
pub enum Drift<T> {
    None,
    /// `F = lambda x / |x|^2`.
    Hardy { lambda: T },
    /// Arbitrary field; `weak_norm` overrides the sampled `||F||_{N,inf}`.
    Custom { field: VectorFn<T>, weak_norm: Option<T> },
}

impl<T: Real> Drift<T> {
    pub fn custom(field: impl Fn(Vec3<T>) -> Vec3<T> + Send + Sync + 'static) -> Self {
        Drift::Custom {
            field: Arc::new(field),
            weak_norm: None,
        }
    }

    #[inline]
    pub fn at(&self, x: &Vec3<T>) -> Vec3<T> {
        match self {
            Drift::None => [T::zero(); 3],
            Drift::Hardy { lambda } => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                [*lambda * x[0] / r2, *lambda * x[1] / r2, *lambda * x[2] / r2]
            }
            Drift::Custom { field, .. } => field(*x),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Drift::None)
    }

    /// `||F||_{L^{N,inf}}` on the space's domain.
    pub fn weak_norm(&self, space: &dyn FeSpace<T>) -> Result<T> {
        let n = space.dimension();
        match self {
            Drift::None => Ok(T::zero()),
            Drift::Hardy { lambda } => Ok(lambda.abs() * Constants::<T>::new(n)?.inverse_radius_weak_norm()),
            Drift::Custom { weak_norm: Some(w), .. } => Ok(*w),
            Drift::Custom { field, .. } => {
                let s = sample(space, |x| norm(&field(x)));
                Ok(lorentz_weak_norm(&s, n))
            }
        }
    }
}

impl<T: Real> fmt::Debug for Drift<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::None => write!(f, "None"),
            Drift::Hardy { lambda } => write!(f, "Hardy {{ lambda: {lambda} }}"),
            Drift::Custom { weak_norm, .. } => write!(f, "Custom {{ weak_norm: {weak_norm:?} }}"),
        }
    }
}

/// Right-hand side `f`.
#[derive(Clone)]
pub enum Source<T> {
    /// Closed-form radial datum evaluated at `|x|`.
    Analytic(AnalyticDatum<T>),
    Function(ScalarFn<T>),
}

impl<T: Real> Source<T> {
    pub fn function(f: impl Fn(Vec3<T>) -> T + Send + Sync + 'static) -> Self {
        Source::Function(Arc::new(f))
    }

    #[inline]
    pub fn at(&self, x: &Vec3<T>) -> T {
        match self {
            Source::Analytic(d) => d.value_at(norm(x)),
            Source::Function(f) => f(*x),
        }
    }

    /// `(||f||_{L^N}, ||f||_{L^{N,inf}})`; closed form for analytic data, quadrature otherwise.
    pub fn norms(&self, space: &dyn FeSpace<T>) -> Result<(T, T)> {
        let n = space.dimension();
        match self {
            Source::Analytic(d) => Ok((d.lq_norm(n, T::of_usize(n))?, d.weak_norm(n)?)),
            Source::Function(f) => {
                let s = sample(space, |x| f(x));
                Ok((lq_norm(&s, T::of_usize(n))?, lorentz_weak_norm(&s, n)))
            }
        }
    }
}

impl<T: Real> fmt::Debug for Source<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Analytic(d) => write!(f, "Analytic({d:?})"),
            Source::Function(_) => write!(f, "Function"),
        }
    }
}

/// Values of `g` at every quadrature point, weighted.
fn sample<T: Real>(space: &dyn FeSpace<T>, g: impl Fn(Vec3<T>) -> T) -> ScalarField<T> {
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for c in 0..space.num_cells() {
        space.visit_quadrature(c, &mut |q| {
            values.push(g(q.x));
            weights.push(q.weight);
        });
    }
    ScalarField::new(values, weights).expect("quadrature weights are valid")
}

/// Regularization `|grad u| ~ (|grad u|^2 + eps^2)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Regularization<T> {
    /// Fixed `eps`.
    Absolute(T),
    /// `eps = value * (int |grad u|^2 / |Omega|)^{1/2}`, re-evaluated at every iterate.
    Relative(T),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound = "T: Real")]
pub struct SolverOptions<T> {
    /// Nonlinear tolerance on `||R|| / ||b||`.
    pub tolerance: T,
    /// Relative residual of the inner linear solves.
    pub linear_tolerance: T,
    pub max_iterations: usize,
    pub max_linear_iterations: usize,
    /// Newton steps with line search; otherwise Picard only.
    pub newton: bool,
    /// Picard relaxation applied when the residual does not decrease.
    pub damping: T,
    pub regularization: Regularization<T>,
    /// Truncation level `n` of the drift damping and of the datum; `inf` disables both.
    pub truncation: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::of(1e-8),
            linear_tolerance: T::of(1e-10),
            max_iterations: 200,
            max_linear_iterations: 5000,
            newton: true,
            damping: T::of(0.5),
            regularization: Regularization::Relative(T::of(1e-6)),
            truncation: T::of(1e4),
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: T, reason| {
            Err(Error::InvalidParameter {
                name,
                value: value.to_f64_lossy(),
                reason,
            })
        };
        if !(self.tolerance > T::zero()) {
            return bad("tolerance", self.tolerance, "must be positive");
        }
        if !(self.linear_tolerance > T::zero()) {
            return bad("linear_tolerance", self.linear_tolerance, "must be positive");
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return bad("damping", self.damping, "must lie in (0, 1]");
        }
        if !(self.truncation >= T::one()) {
            return bad("truncation", self.truncation, "n must be at least 1");
        }
        match self.regularization {
            Regularization::Absolute(e) | Regularization::Relative(e) if !(e > T::zero() && e.is_finite()) => {
                bad("epsilon", e, "must be positive and finite")
            }
            _ => Ok(()),
        }
    }
}

/// One instance of the regularized, truncated problem at a fixed exponent.
#[derive(Clone)]
pub struct DiscreteProblem<'a, T> {
    pub space: &'a dyn FeSpace<T>,
    pub exponent: T,
    pub drift: Drift<T>,
    pub source: Source<T>,
    pub options: SolverOptions<T>,
}

impl<T: Real> fmt::Debug for DiscreteProblem<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteProblem")
            .field("dimension", &self.space.dimension())
            .field("nodes", &self.space.num_nodes())
            .field("exponent", &self.exponent)
            .field("drift", &self.drift)
            .field("source", &self.source)
            .field("options", &self.options)
            .finish()
    }
}

impl<'a, T: Real> DiscreteProblem<'a, T> {
    pub fn new(space: &'a dyn FeSpace<T>, exponent: T, drift: Drift<T>, source: Source<T>) -> Self {
        Self {
            space,
            exponent,
            drift,
            source,
            options: SolverOptions::default(),
        }
    }

    pub fn with_options(mut self, options: SolverOptions<T>) -> Self {
        self.options = options;
        self
    }

    pub fn with_exponent(&self, p: T) -> Self {
        let mut out = self.clone();
        out.exponent = p;
        out
    }

    /// `T_n(f)` at `x`.
    #[inline]
    pub fn datum_at(&self, x: &Vec3<T>) -> T {
        let f = self.source.at(x);
        if self.options.truncation.is_finite() {
            truncate(f, self.options.truncation).unwrap_or(f)
        } else {
            f
        }
    }

    /// `gamma_p ||F||_{N,inf}`.
    pub fn drift_strength(&self) -> Result<T> {
        let n = self.space.dimension();
        let c = Constants::<T>::new(n)?;
        Ok(c.gamma_p(self.exponent)? * self.drift.weak_norm(self.space)?)
    }

    /// Checks `1 < p < N`, `gamma_p ||F|| < 1`, and the options.
    pub fn validate(&self) -> Result<()> {
        self.options.validate()?;
        let n = self.space.dimension();
        let p = self.exponent;
        if !(p > T::one() && p < T::of_usize(n)) {
            return Err(Error::InvalidExponent {
                value: p.to_f64_lossy(),
                reason: "need 1 < p < N",
            });
        }
        if let Drift::Hardy { lambda } = self.drift {
            crate::function_spaces::check_lambda(lambda, n)?;
        }
        let s = self.drift_strength()?;
        if !(s < T::one()) {
            return Err(Error::InvalidExponent {
                value: p.to_f64_lossy(),
                reason: "drift too strong: need gamma_p ||F||_{N,inf} < 1",
            });
        }
        Ok(())
    }
}
