//! Distribution functions and decreasing rearrangements of sampled fields.

use serde::Serialize;

use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `|f|` sorted in nonincreasing order together with the cumulative measure.
///
/// `f*` is the step function equal to `values[i]` on `[cumulative[i-1], cumulative[i])`
/// (with `cumulative[-1] = 0`). Ties keep the original sample order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortedProfile<T> {
    pub values: Vec<T>,
    pub cumulative: Vec<T>,
}

impl<T: Real> SortedProfile<T> {
    pub fn new(f: &ScalarField<T>) -> Self {
        let abs: Vec<T> = f.values().iter().map(|v| v.abs()).collect();
        let mut order: Vec<usize> = (0..abs.len()).filter(|&i| f.weights()[i] > T::zero()).collect();
        // stable sort: equal values stay in index order
        order.sort_by(|&a, &b| abs[b].partial_cmp(&abs[a]).expect("fields carry no NaN"));
        let mut acc = T::zero();
        let mut values = Vec::with_capacity(order.len());
        let mut cumulative = Vec::with_capacity(order.len());
        for i in order {
            acc += f.weights()[i];
            values.push(abs[i]);
            cumulative.push(acc);
        }
        Self { values, cumulative }
    }

    pub fn measure(&self) -> T {
        self.cumulative.last().copied().unwrap_or_else(T::zero)
    }

    fn lower(&self, i: usize) -> T {
        if i == 0 {
            T::zero()
        } else {
            self.cumulative[i - 1]
        }
    }

    /// `f*(t)`, zero for `t >= |Omega|`.
    pub fn at(&self, t: T) -> T {
        let i = self.cumulative.partition_point(|&w| w <= t);
        self.values.get(i).copied().unwrap_or_else(T::zero)
    }

    /// `alpha(s) = |{|f| > s}|`.
    pub fn distribution(&self, s: T) -> T {
        let i = self.values.partition_point(|&v| v > s);
        self.lower(i)
    }

    /// `sup_t t^{1/q} f*(t)`.
    pub fn weak_norm(&self, q: T) -> T {
        self.values
            .iter()
            .zip(&self.cumulative)
            .map(|(&v, &w)| w.powf(q.recip()) * v)
            .fold(T::zero(), T::max)
    }

    /// Index realizing [`Self::weak_norm`].
    pub fn weak_argmax(&self, q: T) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (i, (&v, &w)) in self.values.iter().zip(&self.cumulative).enumerate() {
            let x = w.powf(q.recip()) * v;
            if best.map_or(true, |(_, b)| x > b) {
                best = Some((i, x));
            }
        }
        best.map(|(i, _)| i)
    }

    /// `||f||_{L^{q,1}} = int_0^inf t^{1/q} f*(t) dt / t`.
    pub fn lorentz_one_norm(&self, q: T) -> T {
        let e = q.recip();
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| v * q * (self.cumulative[i].powf(e) - self.lower(i).powf(e)))
            .sum()
    }

    /// `int_0^inf f*(t) g*(t) dt` over the merged breakpoints.
    pub fn product_integral(&self, other: &Self) -> T {
        let (mut i, mut j) = (0, 0);
        let mut t = T::zero();
        let mut acc = T::zero();
        while i < self.values.len() && j < other.values.len() {
            let end = self.cumulative[i].min(other.cumulative[j]);
            acc += self.values[i] * other.values[j] * (end - t);
            t = end;
            if self.cumulative[i] <= end {
                i += 1;
            }
            if other.cumulative[j] <= end {
                j += 1;
            }
        }
        acc
    }
}

/// `alpha_f(s) = |{x : |f(x)| > s}|` from quadrature weights.
pub fn distribution_function<T: Real>(f: &ScalarField<T>, s: T) -> Result<T> {
    if !(s >= T::zero()) {
        return Err(Error::InvalidLevel(s.to_f64_lossy()));
    }
    Ok(f.values()
        .iter()
        .zip(f.weights())
        .filter(|(v, _)| v.abs() > s)
        .map(|(_, &w)| w)
        .sum())
}

/// `f*` sampled at the midpoints of a partition of `(0, |Omega|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rearrangement<T> {
    /// Sample points `t_i`, strictly increasing in `(0, |Omega|)`.
    pub points: Vec<T>,
    /// `f*(t_i)`, nonincreasing.
    pub values: Vec<T>,
    /// Length of the partition cell represented by each sample.
    pub widths: Vec<T>,
    /// `|Omega|` of the source field.
    pub measure: T,
}

impl<T: Real> Rearrangement<T> {
    /// Distribution function of the step function `f*(t_i)` on its partition cells.
    pub fn distribution(&self, s: T) -> T {
        self.values
            .iter()
            .zip(&self.widths)
            .filter(|(v, _)| **v > s)
            .map(|(_, &w)| w)
            .sum()
    }

    /// Largest partition width; bounds the equimeasurability defect.
    pub fn resolution(&self) -> T {
        self.widths.iter().copied().fold(T::zero(), T::max)
    }
}

/// Samples `f*` on the cells of `partition`, a strictly increasing list of
/// breakpoints inside `[0, |Omega|]`; the first and last points are taken as
/// the ends of the covered range.
pub fn decreasing_rearrangement<T: Real>(f: &ScalarField<T>, partition: &[T]) -> Result<Rearrangement<T>> {
    if partition.len() < 2 || f.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let measure = f.measure();
    let ok = partition.windows(2).all(|w| w[0] < w[1])
        && partition[0] >= T::zero()
        && *partition.last().unwrap() <= measure * (T::one() + T::tiny());
    if !ok {
        return Err(Error::InvalidField("rearrangement partition must increase inside [0, |Omega|]".into()));
    }
    let profile = SortedProfile::new(f);
    let half = T::of(0.5);
    let mut points = Vec::with_capacity(partition.len() - 1);
    let mut values = Vec::with_capacity(partition.len() - 1);
    let mut widths = Vec::with_capacity(partition.len() - 1);
    for w in partition.windows(2) {
        let t = (w[0] + w[1]) * half;
        points.push(t);
        values.push(profile.at(t));
        widths.push(w[1] - w[0]);
    }
    Ok(Rearrangement {
        points,
        values,
        widths,
        measure,
    })
}

/// Uniform partition of `[0, |Omega|]` into `m` cells.
pub fn uniform_partition<T: Real>(measure: T, m: usize) -> Vec<T> {
    (0..=m).map(|i| measure * T::of_usize(i) / T::of_usize(m.max(1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn field(values: &[f64], weights: &[f64]) -> ScalarField<f64> {
        ScalarField::new(values.to_vec(), weights.to_vec()).unwrap()
    }

    #[test]
    fn step_profile() {
        let f = field(&[1.0, -3.0, 2.0, 2.0], &[0.5, 0.25, 1.0, 0.25]);
        let p = SortedProfile::new(&f);
        assert_eq!(p.values, vec![3.0, 2.0, 2.0, 1.0]);
        assert_eq!(p.cumulative, vec![0.25, 1.25, 1.5, 2.0]);
        assert_eq!(p.at(0.1), 3.0);
        assert_eq!(p.at(0.25), 2.0);
        assert_eq!(p.at(1.9), 1.0);
        assert_eq!(p.at(2.0), 0.0);
        assert_eq!(p.distribution(2.0), 0.25);
        assert_eq!(p.distribution(0.0), 2.0);
        assert_eq!(distribution_function(&f, 1.5).unwrap(), 1.5);
        assert!(distribution_function(&f, -0.1).is_err());
    }

    #[test]
    fn constant_field_rearranges_to_itself() {
        let f = field(&[2.0; 5], &[0.2; 5]);
        let r = decreasing_rearrangement(&f, &uniform_partition(f.measure(), 7)).unwrap();
        assert!(r.values.iter().all(|&v| v == 2.0));
        assert_relative_eq!(r.distribution(1.0), 1.0, epsilon = 1e-15);
        assert_eq!(r.distribution(2.0), 0.0);
    }

    #[test]
    fn lorentz_one_norm_of_constant() {
        // ||c||_{q,1} = q c |Omega|^{1/q}
        let f = field(&[3.0; 4], &[0.5; 4]);
        assert_relative_eq!(SortedProfile::new(&f).lorentz_one_norm(1.5), 1.5 * 3.0 * 2f64.powf(1.0 / 1.5), epsilon = 1e-14);
    }

    #[test]
    fn product_integral_matches_direct_sum_for_sorted_pairs() {
        let f = field(&[3.0, 2.0, 1.0], &[1.0, 1.0, 1.0]);
        let g = field(&[5.0, 4.0, 0.0], &[0.5, 1.5, 1.0]);
        // f* g* = 3*5*0.5 + 3*4*0.5 + 2*4*1 + 1*0*1 = 21.5
        assert_relative_eq!(SortedProfile::new(&f).product_integral(&SortedProfile::new(&g)), 21.5);
    }

    #[test]
    fn rejects_bad_partitions() {
        let f = field(&[1.0], &[1.0]);
        assert_eq!(decreasing_rearrangement(&f, &[0.0]).unwrap_err(), Error::EmptyGrid);
        assert!(decreasing_rearrangement(&f, &[0.0, 0.5, 0.4]).is_err());
        assert!(decreasing_rearrangement(&f, &[0.0, 2.0]).is_err());
    }
}
