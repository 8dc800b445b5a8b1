//! Cell-wise assembly of the regularized operator, its Newton and Picard
//! linearizations, and the load vector. Cells are processed in parallel blocks
//! and scattered in cell order, so results do not depend on the thread count.

use rayon::prelude::*;

use super::linalg::CsrMatrix;
use super::problem::DiscreteProblem;
use crate::mesh::{cell_gradient, FeSpace};
use crate::scalar::{dot, norm, Real, Vec3};

const BLOCK: usize = 2048;

fn for_cells<T: Real, L: Send>(
    space: &dyn FeSpace<T>,
    compute: impl Fn(usize) -> L + Sync,
    mut scatter: impl FnMut(usize, L),
) {
    let n = space.num_cells();
    let mut start = 0;
    while start < n {
        let end = (start + BLOCK).min(n);
        let local: Vec<L> = (start..end).into_par_iter().map(&compute).collect();
        for (c, l) in (start..end).zip(local) {
            scatter(c, l);
        }
        start = end;
    }
}

/// Regularized flux `sigma = (|g|^2 + eps^2)^{(p-2)/2} g` and its coefficient.
#[inline]
pub(crate) fn flux<T: Real>(g: &Vec3<T>, p: T, eps: T) -> (T, Vec3<T>) {
    let s2 = dot(g, g) + eps * eps;
    let a = if s2 > T::zero() { s2.powf((p - T::of(2.0)) / T::of(2.0)) } else { T::zero() };
    (a, [a * g[0], a * g[1], a * g[2]])
}

#[inline]
fn damping<T: Real>(sigma: &Vec3<T>, f: &Vec3<T>, n: T) -> T {
    if n.is_finite() {
        T::one() + norm(sigma) * norm(f) / n
    } else {
        T::one()
    }
}

/// `(int |grad u|^2 / |Omega|)^{1/2}`.
pub(crate) fn rms_gradient<T: Real>(space: &dyn FeSpace<T>, u: &[T]) -> T {
    let mut acc = T::zero();
    let mut vol = T::zero();
    for c in 0..space.num_cells() {
        let g = cell_gradient(space, c, u);
        let m = space.cell_measure(c);
        acc += m * dot(&g, &g);
        vol += m;
    }
    (acc / vol).sqrt()
}

/// `b_i = int T_n(f) phi_i`, zero on Dirichlet nodes.
pub(crate) fn load<T: Real>(dp: &DiscreteProblem<'_, T>) -> Vec<T> {
    let space = dp.space;
    let mut b = vec![T::zero(); space.num_nodes()];
    for_cells(
        space,
        |c| {
            let mut loc = [T::zero(); 4];
            space.visit_quadrature(c, &mut |q| {
                let f = dp.datum_at(&q.x);
                for a in 0..4 {
                    loc[a] += q.weight * f * q.phi[a];
                }
            });
            loc
        },
        |c, loc| {
            for (a, &i) in space.cell_nodes(c).iter().enumerate() {
                b[i] += loc[a];
            }
        },
    );
    zero_fixed(space, &mut b);
    b
}

pub(crate) fn zero_fixed<T: Real>(space: &dyn FeSpace<T>, v: &mut [T]) {
    for (i, x) in v.iter_mut().enumerate() {
        if space.is_dirichlet(i) {
            *x = T::zero();
        }
    }
}

/// Drift part `d_i = int sigma.F / (1 + |sigma||F|/n) phi_i`.
fn drift_local<T: Real>(dp: &DiscreteProblem<'_, T>, c: usize, sigma: &Vec3<T>, loc: &mut [T; 4]) {
    if dp.drift.is_none() {
        return;
    }
    let n = dp.options.truncation;
    dp.space.visit_quadrature(c, &mut |q| {
        let f = dp.drift.at(&q.x);
        let s = dot(sigma, &f) / damping(sigma, &f, n);
        for a in 0..4 {
            loc[a] += q.weight * s * q.phi[a];
        }
    });
}

/// Operator split `(A(u), D(u))` with `A_i = int sigma . grad phi_i`, `D` the damped drift.
pub(crate) fn operator<T: Real>(dp: &DiscreteProblem<'_, T>, u: &[T], eps: T) -> (Vec<T>, Vec<T>) {
    let space = dp.space;
    let p = dp.exponent;
    let mut a_vec = vec![T::zero(); space.num_nodes()];
    let mut d_vec = vec![T::zero(); space.num_nodes()];
    for_cells(
        space,
        |c| {
            let g = cell_gradient(space, c, u);
            let (_, sigma) = flux(&g, p, eps);
            let grads = space.basis_gradients(c);
            let m = space.cell_measure(c);
            let mut la = [T::zero(); 4];
            for a in 0..space.cell_nodes(c).len() {
                la[a] = m * dot(&sigma, &grads[a]);
            }
            let mut ld = [T::zero(); 4];
            drift_local(dp, c, &sigma, &mut ld);
            (la, ld)
        },
        |c, (la, ld)| {
            for (a, &i) in space.cell_nodes(c).iter().enumerate() {
                a_vec[i] += la[a];
                d_vec[i] += ld[a];
            }
        },
    );
    zero_fixed(space, &mut a_vec);
    zero_fixed(space, &mut d_vec);
    (a_vec, d_vec)
}

/// Newton matrix `dR/du` of `R = A(u) - D(u) - b`.
pub(crate) fn jacobian<T: Real>(dp: &DiscreteProblem<'_, T>, u: &[T], eps: T, mat: &mut CsrMatrix<T>) {
    let space = dp.space;
    let p = dp.exponent;
    let n = dp.options.truncation;
    let two = T::of(2.0);
    mat.clear();
    for_cells(
        space,
        |c| {
            let g = cell_gradient(space, c, u);
            let (a, sigma) = flux(&g, p, eps);
            let s2 = dot(&g, &g) + eps * eps;
            let beta = if s2 > T::zero() { (p - two) / s2 } else { T::zero() };
            // J_sigma v = a (v + beta (g.v) g)
            let jsig = |v: &Vec3<T>| {
                let gv = dot(&g, v) * beta;
                [a * (v[0] + gv * g[0]), a * (v[1] + gv * g[1]), a * (v[2] + gv * g[2])]
            };
            let grads = space.basis_gradients(c);
            let k = space.cell_nodes(c).len();
            let m = space.cell_measure(c);
            let mut loc = [[T::zero(); 4]; 4];
            let jg: Vec<Vec3<T>> = (0..k).map(|b| jsig(&grads[b])).collect();
            for i in 0..k {
                for j in 0..k {
                    loc[i][j] = m * dot(&grads[i], &jg[j]);
                }
            }
            if !dp.drift.is_none() {
                let smag = norm(&sigma);
                let jsig_sigma_unit = if smag > T::zero() {
                    let v = jsig(&sigma);
                    [v[0] / smag, v[1] / smag, v[2] / smag]
                } else {
                    [T::zero(); 3]
                };
                space.visit_quadrature(c, &mut |q| {
                    let f = dp.drift.at(&q.x);
                    let damp = damping(&sigma, &f, n);
                    let sf = dot(&sigma, &f);
                    let jf = jsig(&f);
                    let fn_ = if n.is_finite() { norm(&f) / n } else { T::zero() };
                    // ds/dg
                    let ds = [
                        (jf[0] * damp - sf * fn_ * jsig_sigma_unit[0]) / (damp * damp),
                        (jf[1] * damp - sf * fn_ * jsig_sigma_unit[1]) / (damp * damp),
                        (jf[2] * damp - sf * fn_ * jsig_sigma_unit[2]) / (damp * damp),
                    ];
                    for j in 0..k {
                        let dsj = dot(&ds, &grads[j]) * q.weight;
                        for i in 0..k {
                            loc[i][j] -= q.phi[i] * dsj;
                        }
                    }
                });
            }
            loc
        },
        |c, loc| {
            let nodes = space.cell_nodes(c);
            for (a, &i) in nodes.iter().enumerate() {
                for (b, &j) in nodes.iter().enumerate() {
                    mat.add(i, j, loc[a][b]);
                }
            }
        },
    );
    mat.apply_dirichlet(&fixed_mask(space));
}

/// Picard matrix `int a(grad u) grad phi_j . grad phi_i` (`a = 1` gives the Laplacian).
pub(crate) fn picard<T: Real>(dp: &DiscreteProblem<'_, T>, u: Option<&[T]>, eps: T, mat: &mut CsrMatrix<T>) {
    let space = dp.space;
    let p = dp.exponent;
    mat.clear();
    for_cells(
        space,
        |c| {
            let a = match u {
                Some(u) => flux(&cell_gradient(space, c, u), p, eps).0,
                None => T::one(),
            };
            let grads = space.basis_gradients(c);
            let k = space.cell_nodes(c).len();
            let m = space.cell_measure(c) * a;
            let mut loc = [[T::zero(); 4]; 4];
            for i in 0..k {
                for j in 0..k {
                    loc[i][j] = m * dot(&grads[i], &grads[j]);
                }
            }
            loc
        },
        |c, loc| {
            let nodes = space.cell_nodes(c);
            for (a, &i) in nodes.iter().enumerate() {
                for (b, &j) in nodes.iter().enumerate() {
                    mat.add(i, j, loc[a][b]);
                }
            }
        },
    );
    mat.apply_dirichlet(&fixed_mask(space));
}

pub(crate) fn fixed_mask<T: Real>(space: &dyn FeSpace<T>) -> Vec<bool> {
    (0..space.num_nodes()).map(|i| space.is_dirichlet(i)).collect()
}
