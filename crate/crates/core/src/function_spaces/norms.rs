//! Lebesgue and Lorentz norms for sampled fields and for data given either way.

use serde::{Deserialize, Serialize};

use super::analytic::AnalyticDatum;
use super::field::ScalarField;
use super::rearrangement::SortedProfile;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::scalar::Real;

/// `(sum w_i |f_i|^q)^{1/q}`, or the essential sup for `q = inf`.
pub fn lq_norm<T: Real>(f: &ScalarField<T>, q: T) -> Result<T> {
    if !(q >= T::one()) {
        return Err(Error::InvalidExponent {
            value: q.to_f64_lossy(),
            reason: "need q >= 1",
        });
    }
    let pairs = f.values().iter().zip(f.weights()).filter(|(_, w)| **w > T::zero());
    if q.is_infinite() {
        return Ok(pairs.map(|(v, _)| v.abs()).fold(T::zero(), T::max));
    }
    // scale by the max to avoid overflow for large q
    let m = pairs.clone().map(|(v, _)| v.abs()).fold(T::zero(), T::max);
    if m == T::zero() || m.is_infinite() {
        return Ok(m);
    }
    let s: T = pairs.map(|(v, &w)| w * (v.abs() / m).powf(q)).sum();
    Ok(m * s.powf(q.recip()))
}

/// `||f||_{L^{N,inf}} = sup_t t^{1/N} f*(t)`.
pub fn lorentz_weak_norm<T: Real>(f: &ScalarField<T>, n: usize) -> T {
    SortedProfile::new(f).weak_norm(T::of_usize(n))
}

/// `||g||_{L^{q,1}}`, the norm dual to `L^{q',inf}`.
pub fn lorentz_one_norm<T: Real>(g: &ScalarField<T>, q: T) -> T {
    SortedProfile::new(g).lorentz_one_norm(q)
}

/// `int f* g*`, the right side of the Hardy–Littlewood inequality.
pub fn rearranged_product<T: Real>(f: &ScalarField<T>, g: &ScalarField<T>) -> T {
    SortedProfile::new(f).product_integral(&SortedProfile::new(g))
}

/// A datum (or drift magnitude) known in closed form or only through samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Datum<T> {
    Analytic(AnalyticDatum<T>),
    Sampled(ScalarField<T>),
}

impl<T: Real> From<AnalyticDatum<T>> for Datum<T> {
    fn from(d: AnalyticDatum<T>) -> Self {
        Datum::Analytic(d)
    }
}

impl<T: Real> From<ScalarField<T>> for Datum<T> {
    fn from(f: ScalarField<T>) -> Self {
        Datum::Sampled(f)
    }
}

impl<T: Real> Datum<T> {
    pub fn is_analytic(&self) -> bool {
        matches!(self, Datum::Analytic(_))
    }

    pub fn measure(&self, n: usize) -> Result<T> {
        match self {
            Datum::Analytic(a) => a.domain_measure(n),
            Datum::Sampled(f) => Ok(f.measure()),
        }
    }

    pub fn lq_norm(&self, n: usize, q: T) -> Result<T> {
        match self {
            Datum::Analytic(a) => a.lq_norm(n, q),
            Datum::Sampled(f) => lq_norm(f, q),
        }
    }

    pub fn weak_norm(&self, n: usize) -> Result<T> {
        match self {
            Datum::Analytic(a) => a.weak_norm(n),
            Datum::Sampled(f) => Ok(lorentz_weak_norm(f, n)),
        }
    }

    pub fn distribution(&self, n: usize, s: T) -> Result<T> {
        match self {
            Datum::Analytic(a) => a.distribution(n, s),
            Datum::Sampled(f) => super::rearrangement::distribution_function(f, s),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Datum::Analytic(a) => a.amplitude() == T::zero(),
            Datum::Sampled(f) => f.values().iter().all(|v| *v == T::zero()),
        }
    }

    /// Relative discretization error of the weak norm: the jump of `t^{1/N}`
    /// across the step of `f*` where the supremum is attained. Zero for closed forms.
    pub fn weak_norm_resolution(&self, n: usize) -> T {
        match self {
            Datum::Analytic(_) => T::zero(),
            Datum::Sampled(f) => {
                let p = SortedProfile::new(f);
                let nf = T::of_usize(n);
                match p.weak_argmax(nf) {
                    Some(i) if i > 0 && p.cumulative[i - 1] > T::zero() => {
                        (p.cumulative[i] / p.cumulative[i - 1]).powf(nf.recip()) - T::one()
                    }
                    _ => T::zero(),
                }
            }
        }
    }

    /// Piecewise-constant samples of an analytic datum on a radial grid.
    pub fn sample_on(&self, grid: &RadialGrid<T>, n: usize) -> Result<Datum<T>> {
        match self {
            Datum::Analytic(a) => Ok(Datum::Sampled(grid.sample(n, |r| a.value_at(r))?)),
            Datum::Sampled(_) => Ok(self.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_spaces::ball_volume;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn constant_norms() {
        let g = RadialGrid::uniform(1.0, 200).unwrap();
        let one = g.sample(2, |_| 1.0).unwrap();
        assert_relative_eq!(lq_norm(&one, 2.0).unwrap(), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(lq_norm(&one, f64::INFINITY).unwrap(), 1.0);
        assert!(lq_norm(&one, 0.5).is_err());
        // c |Omega|^{1/N}
        let c = one.scaled(3.0);
        assert_relative_eq!(lorentz_weak_norm(&c, 2), 3.0 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn sampled_inverse_radius_converges() {
        for n in [2usize, 3] {
            let grid = RadialGrid::geometric(1.0, 1.001, 1e-6).unwrap();
            let f = grid.sample(n, |r| 0.8 / r).unwrap();
            let exact = 0.8 * ball_volume::<f64>(n as i64).unwrap().powf(1.0 / n as f64);
            assert_relative_eq!(lorentz_weak_norm(&f, n), exact, max_relative = 1e-3);
            let d = Datum::Sampled(f);
            assert!(d.weak_norm_resolution(n) < 1e-3);
        }
        // L^2 of 1/|x| on B_1 in R^3
        let grid = RadialGrid::geometric(1.0, 1.001, 1e-9).unwrap();
        let f = grid.sample(3, |r| 1.0 / r).unwrap();
        assert_relative_eq!(lq_norm(&f, 2.0).unwrap(), (4.0 * PI).sqrt(), max_relative = 1e-4);
    }
}
