//! Piecewise-linear finite element spaces: a radial 1-D mesh with the weight
//! `N C_N r^{N-1}`, and simplicial meshes in two and three dimensions.

mod generate;
mod io;
mod radial;
mod simplex;

pub use generate::{ball, disk, square, Grading, MeshSpec, MeshKind};
pub use io::{read_mesh, write_mesh};
pub use radial::RadialMesh;
pub use simplex::SimplexMesh;

use crate::scalar::{dot, Real, Vec3};

/// One quadrature point of a cell: weight, position, and the values of the
/// cell's local basis functions (unused trailing entries are zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint<T> {
    pub weight: T,
    pub x: Vec3<T>,
    pub phi: [T; 4],
}

/// A boundary facet with outward unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace<T> {
    pub cell: usize,
    pub nodes: Vec<usize>,
    pub normal: Vec3<T>,
    pub measure: T,
    pub centroid: Vec3<T>,
}

/// A conforming P1 space with homogeneous Dirichlet nodes.
///
/// Gradients are constant per cell. Positions live in the space's own
/// coordinates: for the radial mesh `x = [r, 0, 0]`, so `x / |x|^2` and
/// vectors are expressed by their radial component.
pub trait FeSpace<T: Real>: Sync {
    /// Dimension `N` of the underlying problem.
    fn dimension(&self) -> usize;
    /// Number of vector components stored for gradients and fields.
    fn components(&self) -> usize;
    fn num_nodes(&self) -> usize;
    fn num_cells(&self) -> usize;
    fn cell_nodes(&self, c: usize) -> &[usize];
    /// Gradients of the local basis functions on cell `c`.
    fn basis_gradients(&self, c: usize) -> [Vec3<T>; 4];
    fn cell_measure(&self, c: usize) -> T;
    fn visit_quadrature(&self, c: usize, f: &mut dyn FnMut(&QuadPoint<T>));
    fn is_dirichlet(&self, node: usize) -> bool;
    fn node_position(&self, node: usize) -> Vec3<T>;
    fn boundary_faces(&self) -> Vec<BoundaryFace<T>>;
    /// Characteristic mesh size.
    fn mesh_size(&self) -> T;
    /// Measure of `{x in cell : u(x) >= k}` for the linear interpolant of `vals` (local order).
    fn cell_superlevel_measure(&self, c: usize, vals: &[T], k: T) -> T;

    /// Stable identifier used to detect fields from different meshes.
    fn signature(&self) -> (usize, usize, usize) {
        (self.dimension(), self.num_nodes(), self.num_cells())
    }

    fn measure(&self) -> T {
        (0..self.num_cells()).map(|c| self.cell_measure(c)).sum()
    }

    /// `int phi_i` for every node.
    fn lumped_measures(&self) -> Vec<T> {
        let mut m = vec![T::zero(); self.num_nodes()];
        for c in 0..self.num_cells() {
            let nodes = self.cell_nodes(c);
            self.visit_quadrature(c, &mut |q| {
                for (a, &i) in nodes.iter().enumerate() {
                    m[i] += q.weight * q.phi[a];
                }
            });
        }
        m
    }
}

/// `grad u` on cell `c`.
pub fn cell_gradient<T: Real, S: FeSpace<T> + ?Sized>(space: &S, c: usize, u: &[T]) -> Vec3<T> {
    let g = space.basis_gradients(c);
    let mut out = [T::zero(); 3];
    for (a, &i) in space.cell_nodes(c).iter().enumerate() {
        for d in 0..3 {
            out[d] += u[i] * g[a][d];
        }
    }
    out
}

/// All cell gradients.
pub fn gradients<T: Real, S: FeSpace<T> + ?Sized>(space: &S, u: &[T]) -> Vec<Vec3<T>> {
    (0..space.num_cells()).map(|c| cell_gradient(space, c, u)).collect()
}

/// `u` at a quadrature point of cell `c`.
pub fn interpolate<T: Real, S: FeSpace<T> + ?Sized>(space: &S, c: usize, u: &[T], q: &QuadPoint<T>) -> T {
    space.cell_nodes(c).iter().enumerate().map(|(a, &i)| q.phi[a] * u[i]).sum()
}

/// `int g(x, u(x))` by the cell quadrature.
pub fn integrate<T: Real, S: FeSpace<T> + ?Sized>(space: &S, u: &[T], g: impl Fn(Vec3<T>, T) -> T) -> T {
    let mut acc = T::zero();
    for c in 0..space.num_cells() {
        space.visit_quadrature(c, &mut |q| acc += q.weight * g(q.x, interpolate(space, c, u, q)));
    }
    acc
}

/// `int |grad u|^p`, exact for P1.
pub fn gradient_power<T: Real, S: FeSpace<T> + ?Sized>(space: &S, u: &[T], p: T) -> T {
    (0..space.num_cells())
        .map(|c| {
            let g = cell_gradient(space, c, u);
            space.cell_measure(c) * dot(&g, &g).sqrt().powf(p)
        })
        .sum()
}

/// `||u - exact||_{L^2} / ||exact||_{L^2}` with `exact` a radial profile.
pub fn relative_l2_error<T: Real, S: FeSpace<T> + ?Sized>(space: &S, u: &[T], exact: impl Fn(T) -> T) -> T {
    let mut num = T::zero();
    let mut den = T::zero();
    for c in 0..space.num_cells() {
        space.visit_quadrature(c, &mut |q| {
            let e = exact(dot(&q.x, &q.x).sqrt());
            let d = interpolate(space, c, u, q) - e;
            num += q.weight * d * d;
            den += q.weight * e * e;
        });
    }
    if den == T::zero() {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// `|{x : |u(x)| >= k}|` for the P1 function `u` (`k > 0`).
pub fn superlevel_measure<T: Real, S: FeSpace<T> + ?Sized>(space: &S, u: &[T], k: T) -> T {
    let mut acc = T::zero();
    let mut pos = [T::zero(); 4];
    let mut neg = [T::zero(); 4];
    for c in 0..space.num_cells() {
        let nodes = space.cell_nodes(c);
        for (a, &i) in nodes.iter().enumerate() {
            pos[a] = u[i];
            neg[a] = -u[i];
        }
        // {u >= k} and {u <= -k} are disjoint for k > 0
        acc += space.cell_superlevel_measure(c, &pos[..nodes.len()], k);
        acc += space.cell_superlevel_measure(c, &neg[..nodes.len()], k);
    }
    acc
}

/// Fraction of a `d`-simplex (`d = 1, 2, 3`) where a linear function with vertex
/// values `vals` is at least `k`.
pub fn simplex_superlevel_fraction<T: Real>(vals: &[T], k: T) -> T {
    let mut a: Vec<T> = vals.iter().map(|&v| v - k).collect();
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite values"));
    if a[0] >= T::zero() {
        return T::one();
    }
    let above = a.iter().filter(|&&x| x > T::zero()).count();
    if above == 0 {
        return T::zero();
    }
    match (a.len(), above) {
        (2, 1) => a[1] / (a[1] - a[0]),
        (3, 1) => a[2] * a[2] / ((a[2] - a[0]) * (a[2] - a[1])),
        (3, 2) => T::one() - a[0] * a[0] / ((a[1] - a[0]) * (a[2] - a[0])),
        (4, 1) => a[3].powi(3) / ((a[3] - a[0]) * (a[3] - a[1]) * (a[3] - a[2])),
        (4, 3) => T::one() + a[0].powi(3) / ((a[1] - a[0]) * (a[2] - a[0]) * (a[3] - a[0])),
        (4, 2) => {
            // every term is nonnegative for a0 <= a1 <= 0 < a2 <= a3
            let num = a[0] * a[1] * (a[2] * a[2] + a[2] * a[3] + a[3] * a[3]) - a[2] * a[3] * (a[0] + a[1]) * (a[2] + a[3])
                + a[2] * a[2] * a[3] * a[3];
            num / ((a[2] - a[0]) * (a[3] - a[0]) * (a[2] - a[1]) * (a[3] - a[1]))
        }
        _ => unreachable!("simplices have 2 to 4 vertices"),
    }
}

#[cfg(test)]
mod tests;
