//! One-dimensional radial grids on `[0, R]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_spaces::{ball_volume, ScalarField};
use crate::scalar::Real;

/// Increasing nodes `0 = r_0 < r_1 < ... < r_m = R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid<T> {
    nodes: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    pub fn from_nodes(nodes: Vec<T>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::EmptyGrid);
        }
        if nodes[0] != T::zero() || !nodes.windows(2).all(|w| w[0] < w[1]) || !nodes.iter().all(|r| r.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: nodes[0].to_f64_lossy(),
                reason: "nodes must start at 0 and increase strictly",
            });
        }
        Ok(Self { nodes })
    }

    /// Nodes `R, R/q, R/q^2, ...` down to the first one not below `r_min`, plus the origin.
    pub fn geometric(radius: T, ratio: T, r_min: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: radius.to_f64_lossy(),
                reason: "must be positive",
            });
        }
        if !(ratio > T::one()) {
            return Err(Error::InvalidParameter {
                name: "ratio",
                value: ratio.to_f64_lossy(),
                reason: "geometric ratio must exceed 1",
            });
        }
        if !(r_min > T::zero() && r_min < radius) {
            return Err(Error::InvalidParameter {
                name: "r_min",
                value: r_min.to_f64_lossy(),
                reason: "need 0 < r_min < R",
            });
        }
        let mut nodes = vec![radius];
        let mut r = radius;
        loop {
            let next = r / ratio;
            if next < r_min {
                break;
            }
            nodes.push(next);
            r = next;
        }
        nodes.push(T::zero());
        nodes.reverse();
        Self::from_nodes(nodes)
    }

    pub fn uniform(radius: T, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::EmptyGrid);
        }
        Self::from_nodes((0..=cells).map(|i| radius * T::of_usize(i) / T::of_usize(cells)).collect())
    }

    /// Inserts the midpoint of every cell.
    pub fn refine(&self) -> Self {
        let half = T::of(0.5);
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push((w[0] + w[1]) * half);
        }
        nodes.push(self.radius());
        Self { nodes }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn radius(&self) -> T {
        *self.nodes.last().expect("grid is nonempty")
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Largest cell length.
    pub fn max_step(&self) -> T {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(T::zero(), T::max)
    }

    /// `|{a < |x| < b}|` for cell `i`.
    pub fn shell_volume(&self, n: usize, i: usize) -> Result<T> {
        let c = ball_volume::<T>(n as i64)?;
        let ni = n as i32;
        Ok(c * (self.nodes[i + 1].powi(ni) - self.nodes[i].powi(ni)))
    }

    /// Representative radius of cell `i`: the radius splitting the shell into
    /// halves of equal measure, or the outer node for the cell touching the origin
    /// (where profiles may be singular).
    pub fn sample_radius(&self, n: usize, i: usize) -> T {
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        if a == T::zero() {
            return b;
        }
        let ni = n as i32;
        ((a.powi(ni) + b.powi(ni)) * T::of(0.5)).powf(T::of_usize(n).recip())
    }

    /// Piecewise-constant sampling of a radial profile; weights are the shell volumes.
    pub fn sample(&self, n: usize, f: impl Fn(T) -> T) -> Result<ScalarField<T>> {
        let m = self.cells();
        let mut values = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let mut coords = Vec::with_capacity(m);
        for i in 0..m {
            let r = self.sample_radius(n, i);
            values.push(f(r));
            weights.push(self.shell_volume(n, i)?);
            coords.push(r);
        }
        ScalarField::with_points(values, weights, coords, 1)
    }
}
