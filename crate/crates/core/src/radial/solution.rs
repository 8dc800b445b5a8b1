use serde::{Deserialize, Serialize};

use super::problem::RadialProblem;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// Discretization settings for the radial oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadialOptions {
    /// Ratio of consecutive nodes of the geometric grid.
    pub ratio: f64,
    /// Smallest positive node as a fraction of `R`.
    pub inner_fraction: f64,
    /// Gauss–Legendre points per cell.
    pub gauss_points: usize,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            ratio: 1.05,
            inner_fraction: 1e-6,
            gauss_points: 10,
        }
    }
}

impl RadialOptions {
    pub fn grid<T: Real>(&self, radius: T) -> Result<RadialGrid<T>> {
        RadialGrid::geometric(radius, T::of(self.ratio), radius * T::of(self.inner_fraction))
    }
}

/// Radial solution sampled at grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution<T> {
    pub dimension: usize,
    pub exponent: T,
    pub nodes: Vec<T>,
    /// `v = r^{N-1} |u'|^{p-2} u'`.
    pub flux: Vec<T>,
    /// `u'(r) <= 0`.
    pub slope: Vec<T>,
    /// `u_p(r) >= 0`, `u_p(R) = 0`.
    pub values: Vec<T>,
}

impl<T: Real> RadialSolution<T> {
    pub fn sup(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }

    /// Linear interpolation of `u_p`.
    pub fn value_at(&self, r: T) -> T {
        let k = self.nodes.partition_point(|&x| x <= r).clamp(1, self.nodes.len() - 1);
        let (a, b) = (self.nodes[k - 1], self.nodes[k]);
        let t = ((r - a) / (b - a)).max(T::zero()).min(T::one());
        self.values[k - 1] + (self.values[k] - self.values[k - 1]) * t
    }
}

/// `v(r_j) = -r_j^{-lambda} int_0^{r_j} s^{lambda+N-1} f(s) ds` on the grid nodes.
pub fn flux_potential<T: Real>(prob: &RadialProblem<T>, grid: &RadialGrid<T>) -> Result<Vec<T>> {
    prob.validate()?;
    let rule = GaussLegendre::new(10);
    Ok(grid.nodes().iter().map(|&r| prob.flux_at(r, &rule)).collect())
}

/// Solves the radial problem by quadrature of `|v / r^{N-1}|^{1/(p-1)}` from `R` inward.
///
/// Errors with `BlowUpAtOrigin` when the slope is not integrable at `r = 0`.
pub fn radial_solution<T: Real>(prob: &RadialProblem<T>, grid: &RadialGrid<T>) -> Result<RadialSolution<T>> {
    radial_solution_with(prob, grid, 10)
}

pub fn radial_solution_with<T: Real>(prob: &RadialProblem<T>, grid: &RadialGrid<T>, gauss_points: usize) -> Result<RadialSolution<T>> {
    prob.validate()?;
    if (grid.radius() - prob.radius).abs() > T::tiny() * prob.radius {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: grid.radius().to_f64_lossy(),
            reason: "grid does not end at the ball radius",
        });
    }
    let rule = GaussLegendre::new(gauss_points.max(1));
    let q = (prob.exponent - T::one()).recip();
    let nodes = grid.nodes().to_vec();
    let m = nodes.len();
    let speed = |r: T| prob.flux_density(r, &rule).abs().powf(q);

    let flux: Vec<T> = nodes.iter().map(|&r| prob.flux_at(r, &rule)).collect();
    let mut slope: Vec<T> = nodes.iter().map(|&r| if r > T::zero() { -speed(r) } else { T::zero() }).collect();

    // local power of |w| at the innermost positive node
    let r1 = nodes[1];
    let (w1, w_half) = (prob.flux_density(r1, &rule).abs(), prob.flux_density(r1 * T::of(0.5), &rule).abs());
    let exponent = if w1 > T::zero() && w_half > T::zero() {
        q * (w1 / w_half).ln() / T::LN_2()
    } else {
        T::one()
    };
    if exponent <= -T::one() {
        return Err(Error::BlowUpAtOrigin {
            exponent: exponent.to_f64_lossy(),
        });
    }
    slope[0] = if exponent.abs() <= T::of(1e-9) { slope[1] } else if exponent > T::zero() { T::zero() } else { T::neg_infinity() };

    let mut values = vec![T::zero(); m];
    for j in (0..m - 1).rev() {
        let (a, b) = (nodes[j], nodes[j + 1]);
        let piece = if a == T::zero() {
            // |w|^q ~ c r^e on the innermost cell
            speed(b) * b / (exponent + T::one())
        } else {
            rule.integrate(a, b, speed)
        };
        values[j] = values[j + 1] + piece;
    }
    Ok(RadialSolution {
        dimension: prob.dimension,
        exponent: prob.exponent,
        nodes,
        flux,
        slope,
        values,
    })
}

/// Relative strong-form residual of `-(r^{N-1} w)' / r^{N-1} - lambda w / r - f` at the interior nodes,
/// with `w = |u'|^{p-2} u'` rebuilt from the solution's slopes and the derivative
/// taken by three-point differences on the (nonuniform) grid.
///
/// Entry `j` belongs to node `j + 1`; each residual is scaled by the sum of the magnitudes of the three terms.
/// Entries are NaN where a slope in the stencil is below the smallest normal number
/// while the flux is not, since `w` cannot be rebuilt there.
pub fn strong_residual<T: Real>(prob: &RadialProblem<T>, sol: &RadialSolution<T>) -> Vec<T> {
    let r = &sol.nodes;
    let n = prob.dimension as i32;
    let pm1 = prob.exponent - T::one();
    let v: Vec<T> = r
        .iter()
        .zip(&sol.slope)
        .map(|(&ri, &s)| {
            if ri == T::zero() {
                T::zero()
            } else {
                -s.abs().powf(pm1) * ri.powi(n - 1)
            }
        })
        .collect();
    (1..r.len() - 1)
        .map(|j| {
            let lost = (j - 1..=j + 1).any(|i| sol.slope[i].abs() < T::min_positive_value() && sol.flux[i] != T::zero());
            if lost {
                return T::nan();
            }
            let (h0, h1) = (r[j] - r[j - 1], r[j + 1] - r[j]);
            let dv = -v[j - 1] * h1 / (h0 * (h0 + h1)) + v[j] * (h1 - h0) / (h0 * h1) + v[j + 1] * h0 / (h1 * (h0 + h1));
            let div = -dv / r[j].powi(n - 1);
            let drift = -prob.lambda * v[j] / r[j].powi(n);
            let f = prob.profile.value(r[j]);
            let scale = div.abs() + drift.abs() + f.abs();
            if scale == T::zero() {
                T::zero()
            } else {
                (div + drift - f).abs() / scale
            }
        })
        .collect()
}

/// Largest `| |u'|^{p-2} u' r^{N-1} - v | / max |v|` over the nodes.
pub fn consistency_residual<T: Real>(sol: &RadialSolution<T>) -> T {
    let n = sol.dimension as i32;
    let pm1 = sol.exponent - T::one();
    let scale = sol.flux.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    sol.nodes
        .iter()
        .zip(&sol.slope)
        .zip(&sol.flux)
        .filter(|((r, _), _)| **r > T::zero())
        .map(|((&r, &s), &v)| (-s.abs().powf(pm1) * r.powi(n - 1) - v).abs() / scale)
        .fold(T::zero(), T::max)
}
