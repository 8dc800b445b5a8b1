use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::function_spaces::{lq_norm, VectorField};
use crate::mesh::{cell_gradient, FeSpace};
use crate::scalar::{dot, Real, Vec3};

/// `||z||_{L^q}` for `q = 2, 4, 8, inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZNorms<T> {
    pub l2: T,
    pub l4: T,
    pub l8: T,
    pub linf: T,
}

/// `z_p = (|grad u|^2 + eps^2)^{(p-2)/2} grad u`, constant per cell.
#[derive(Debug, Clone)]
pub struct ExtractedZ<T> {
    pub cells: Vec<Vec3<T>>,
    pub field: VectorField<T>,
    pub norms: ZNorms<T>,
}

pub fn extract_z<T: Real>(space: &dyn FeSpace<T>, u: &[T], p: T, eps: T) -> ExtractedZ<T> {
    let k = space.components();
    let mut cells = Vec::with_capacity(space.num_cells());
    let mut values = Vec::with_capacity(space.num_cells() * k);
    let mut weights = Vec::with_capacity(space.num_cells());
    for c in 0..space.num_cells() {
        let g = cell_gradient(space, c, u);
        let s2 = dot(&g, &g) + eps * eps;
        let a = if s2 > T::zero() { s2.powf((p - T::of(2.0)) / T::of(2.0)) } else { T::zero() };
        let z = [a * g[0], a * g[1], a * g[2]];
        values.extend_from_slice(&z[..k]);
        weights.push(space.cell_measure(c));
        cells.push(z);
    }
    let field = VectorField::new(k, values, weights).expect("one value per cell");
    let mag = field.magnitude();
    let norms = ZNorms {
        l2: lq_norm(&mag, T::of(2.0)).unwrap_or(T::nan()),
        l4: lq_norm(&mag, T::of(4.0)).unwrap_or(T::nan()),
        l8: lq_norm(&mag, T::of(8.0)).unwrap_or(T::nan()),
        linf: lq_norm(&mag, T::infinity()).unwrap_or(T::nan()),
    };
    ExtractedZ { cells, field, norms }
}

/// Candidate `z` for a certificate: cell values or a closed form.
#[derive(Clone)]
pub enum ZField<T> {
    PerCell(Vec<Vec3<T>>),
    Function(Arc<dyn Fn(Vec3<T>) -> Vec3<T> + Send + Sync>),
}

impl<T: Real> ZField<T> {
    pub fn function(f: impl Fn(Vec3<T>) -> Vec3<T> + Send + Sync + 'static) -> Self {
        ZField::Function(Arc::new(f))
    }

    #[inline]
    pub fn at(&self, cell: usize, x: &Vec3<T>) -> Vec3<T> {
        match self {
            ZField::PerCell(v) => v[cell],
            ZField::Function(f) => f(*x),
        }
    }

    /// Same field multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        match self {
            ZField::PerCell(v) => ZField::PerCell(v.iter().map(|z| [z[0] * c, z[1] * c, z[2] * c]).collect()),
            ZField::Function(f) => {
                let f = f.clone();
                ZField::Function(Arc::new(move |x| {
                    let z = f(x);
                    [z[0] * c, z[1] * c, z[2] * c]
                }))
            }
        }
    }
}

impl<T: Real> fmt::Debug for ZField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZField::PerCell(v) => write!(f, "PerCell({} cells)", v.len()),
            ZField::Function(_) => write!(f, "Function"),
        }
    }
}
