use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A function sampled at quadrature points: one value and one nonnegative
/// quadrature weight per point, with optional point coordinates.
///
/// All norms computed from a field treat it as the piecewise-constant function
/// taking `values[i]` on a cell of measure `weights[i]`, so the weights sum to
/// `|Omega|` and every rearrangement identity holds exactly for the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField<T> {
    values: Vec<T>,
    weights: Vec<T>,
    /// Flattened coordinates, `point_dim` entries per sample.
    coords: Vec<T>,
    point_dim: usize,
}

impl<T: Real> ScalarField<T> {
    pub fn new(values: Vec<T>, weights: Vec<T>) -> Result<Self> {
        Self::with_points(values, weights, Vec::new(), 0)
    }

    pub fn with_points(values: Vec<T>, weights: Vec<T>, coords: Vec<T>, point_dim: usize) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::InvalidField(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if point_dim > 0 && coords.len() != point_dim * values.len() {
            return Err(Error::InvalidField("coordinate count does not match samples".into()));
        }
        if point_dim == 0 && !coords.is_empty() {
            return Err(Error::InvalidField("coordinates given without a point dimension".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidField(format!("quadrature weight {w} is not a finite nonnegative number")));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidField("NaN sample".into()));
        }
        Ok(Self {
            values,
            weights,
            coords,
            point_dim,
        })
    }

    /// Constant `c` on the given cells.
    pub fn constant(c: T, weights: Vec<T>) -> Result<Self> {
        let values = vec![c; weights.len()];
        Self::new(values, weights)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn point_dim(&self) -> usize {
        self.point_dim
    }

    pub fn point(&self, i: usize) -> Option<&[T]> {
        (self.point_dim > 0).then(|| &self.coords[i * self.point_dim..(i + 1) * self.point_dim])
    }

    /// `|Omega|`, always taken from the weights.
    pub fn measure(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            weights: self.weights.clone(),
            coords: self.coords.clone(),
            point_dim: self.point_dim,
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    /// `int f g`; both fields must share the quadrature.
    pub fn inner_product(&self, other: &Self) -> Result<T> {
        self.check_same_quadrature(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.weights)
            .map(|((a, b), w)| *a * *b * *w)
            .sum())
    }

    pub fn check_same_quadrature(&self, other: &Self) -> Result<()> {
        if self.weights != other.weights {
            return Err(Error::InvalidField("fields live on different quadratures".into()));
        }
        Ok(())
    }
}

/// A vector function sampled at quadrature points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField<T> {
    components: usize,
    values: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> VectorField<T> {
    pub fn new(components: usize, values: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if components == 0 || values.len() != components * weights.len() {
            return Err(Error::InvalidField("vector field shape mismatch".into()));
        }
        ScalarField::new(vec![T::zero(); weights.len()], weights.clone())?;
        Ok(Self {
            components,
            values,
            weights,
        })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn at(&self, i: usize) -> &[T] {
        &self.values[i * self.components..(i + 1) * self.components]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Pointwise Euclidean magnitude `|F|`.
    pub fn magnitude(&self) -> ScalarField<T> {
        let values = (0..self.len())
            .map(|i| self.at(i).iter().map(|c| *c * *c).sum::<T>().sqrt())
            .collect();
        ScalarField {
            values,
            weights: self.weights.clone(),
            coords: Vec::new(),
            point_dim: 0,
        }
    }
}
