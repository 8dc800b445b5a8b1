use serde::Serialize;

use super::constants::Constants;
use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Both sides of the Hardy inequality `int |u|^p / |x|^p <= H^{-p} int |grad u|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyCheck<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: Real> HardyCheck<T> {
    pub fn holds(&self, tol: T) -> bool {
        self.lhs <= self.rhs * (T::one() + tol)
    }
}

/// Evaluates the Hardy inequality for `u` sampled at points (coordinates
/// required) with `grad_norm[i] = |grad u|` at the same points.
pub fn hardy_check<T: Real>(u: &ScalarField<T>, grad_norm: &[T], p: T, n: usize) -> Result<HardyCheck<T>> {
    let consts = Constants::<T>::new(n)?;
    if !(p > T::one() && p < T::of_usize(n)) {
        return Err(Error::InvalidExponent {
            value: p.to_f64_lossy(),
            reason: "Hardy inequality needs 1 < p < N",
        });
    }
    if grad_norm.len() != u.len() {
        return Err(Error::InvalidField("gradient samples do not match the field".into()));
    }
    if u.point_dim() == 0 && !u.is_empty() {
        return Err(Error::InvalidField("Hardy check needs sample coordinates".into()));
    }
    let h = consts.hardy(p)?;
    let mut lhs = T::zero();
    let mut grad = T::zero();
    for i in 0..u.len() {
        let w = u.weights()[i];
        let x = u.point(i).expect("coordinates checked");
        let r = x.iter().map(|c| *c * *c).sum::<T>().sqrt();
        let v = u.values()[i].abs();
        if v > T::zero() {
            lhs += w * (v / r).powf(p);
        }
        grad += w * grad_norm[i].powf(p);
    }
    Ok(HardyCheck {
        lhs,
        rhs: grad / h.powf(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn cone_in_three_dimensions() {
        let g = RadialGrid::uniform(1.0, 20000).unwrap();
        let u = g.sample(3, |r| 1.0 - r).unwrap();
        let grad = vec![1.0; u.len()];
        let c = hardy_check(&u, &grad, 2.0, 3).unwrap();
        // measure-midpoint sampling is first order near the origin
        assert_relative_eq!(c.lhs, 4.0 * PI / 3.0, max_relative = 5e-4);
        assert_relative_eq!(c.rhs, 16.0 * PI / 3.0, max_relative = 1e-12);
        assert!(c.holds(0.0));
    }

    #[test]
    fn zero_and_bad_exponents() {
        let g = RadialGrid::uniform(1.0, 10).unwrap();
        let u = g.sample(3, |_| 0.0).unwrap();
        let c = hardy_check(&u, &vec![0.0; 10], 1.5, 3).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        assert!(hardy_check(&u, &vec![0.0; 10], 3.0, 3).is_err());
        assert!(hardy_check(&u, &vec![0.0; 10], 1.0, 3).is_err());
    }
}
