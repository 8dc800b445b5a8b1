//! Sparse matrices in CSR form, ILU(0), and Krylov solvers.

use rayon::prelude::*;

use crate::mesh::FeSpace;
use crate::scalar::Real;

const CHUNK: usize = 4096;

/// Dot product with a fixed reduction order (chunked, then sequential).
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let partial: Vec<T> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| p * q).sum::<T>())
        .collect();
    partial.into_iter().sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn axpy<T: Real>(y: &mut [T], alpha: T, x: &[T]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(y, &x)| *y += alpha * x);
}

/// Square sparse matrix with sorted column indices per row.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    pub row_start: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<T>,
    diag: Vec<usize>,
}

impl<T: Real> CsrMatrix<T> {
    /// Node-to-node coupling pattern of a finite element space.
    pub fn pattern(space: &dyn FeSpace<T>) -> Self {
        let n = space.num_nodes();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for c in 0..space.num_cells() {
            let nodes = space.cell_nodes(c);
            for &i in nodes {
                adj[i].extend_from_slice(nodes);
            }
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_start.push(0);
        for (i, mut row) in adj.into_iter().enumerate() {
            row.push(i);
            row.sort_unstable();
            row.dedup();
            cols.extend(row);
            row_start.push(cols.len());
        }
        let diag = (0..n)
            .map(|i| row_start[i] + cols[row_start[i]..row_start[i + 1]].binary_search(&i).expect("diagonal present"))
            .collect();
        let values = vec![T::zero(); cols.len()];
        Self {
            row_start,
            cols,
            values,
            diag,
        }
    }

    pub fn n(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = T::zero());
    }

    /// Position of entry `(i, j)`, which must be in the pattern.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        let s = self.row_start[i];
        s + self.cols[s..self.row_start[i + 1]].binary_search(&j).expect("entry in pattern")
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let k = self.index(i, j);
        self.values[k] += v;
    }

    pub fn diagonal(&self) -> Vec<T> {
        self.diag.iter().map(|&k| self.values[k]).collect()
    }

    /// Replaces the rows and columns of marked nodes by the identity.
    pub fn apply_dirichlet(&mut self, fixed: &[bool]) {
        for i in 0..self.n() {
            for k in self.row_start[i]..self.row_start[i + 1] {
                let j = self.cols[k];
                if fixed[i] || fixed[j] {
                    self.values[k] = if i == j { T::one() } else { T::zero() };
                }
            }
        }
    }

    pub fn mul(&self, x: &[T], y: &mut [T]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut acc = T::zero();
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *yi = acc;
        });
    }
}

/// Incomplete LU factorization with the sparsity of the matrix.
#[derive(Debug, Clone)]
pub struct Ilu0<T> {
    lu: CsrMatrix<T>,
}

impl<T: Real> Ilu0<T> {
    /// Returns `None` on a vanishing pivot.
    pub fn new(a: &CsrMatrix<T>) -> Option<Self> {
        let mut lu = a.clone();
        let n = lu.n();
        for i in 0..n {
            let (rs, re) = (lu.row_start[i], lu.row_start[i + 1]);
            let mut kk = rs;
            while kk < re && lu.cols[kk] < i {
                let k = lu.cols[kk];
                let pivot = lu.values[lu.diag[k]];
                if pivot == T::zero() || !pivot.is_finite() {
                    return None;
                }
                let lik = lu.values[kk] / pivot;
                lu.values[kk] = lik;
                // row i -= lik * (upper part of row k), on the pattern of row i
                let mut a = kk + 1;
                let mut b = lu.diag[k] + 1;
                let be = lu.row_start[k + 1];
                while a < re && b < be {
                    let (ca, cb) = (lu.cols[a], lu.cols[b]);
                    if ca == cb {
                        let v = lu.values[b];
                        lu.values[a] -= lik * v;
                        a += 1;
                        b += 1;
                    } else if ca < cb {
                        a += 1;
                    } else {
                        b += 1;
                    }
                }
                kk += 1;
            }
            let d = lu.values[lu.diag[i]];
            if d == T::zero() || !d.is_finite() {
                return None;
            }
        }
        Some(Self { lu })
    }

    pub fn apply(&self, r: &[T], z: &mut [T]) {
        let lu = &self.lu;
        let n = lu.n();
        for i in 0..n {
            let mut acc = r[i];
            for k in lu.row_start[i]..lu.diag[i] {
                acc -= lu.values[k] * z[lu.cols[k]];
            }
            z[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for k in lu.diag[i] + 1..lu.row_start[i + 1] {
                acc -= lu.values[k] * z[lu.cols[k]];
            }
            z[i] = acc / lu.values[lu.diag[i]];
        }
    }
}

/// ILU(0) when it exists, Jacobi otherwise.
#[derive(Debug, Clone)]
pub enum Preconditioner<T> {
    Ilu(Ilu0<T>),
    Jacobi(Vec<T>),
}

impl<T: Real> Preconditioner<T> {
    pub fn new(a: &CsrMatrix<T>) -> Self {
        match Ilu0::new(a) {
            Some(ilu) => Preconditioner::Ilu(ilu),
            None => Preconditioner::Jacobi(
                a.diagonal()
                    .into_iter()
                    .map(|d| if d != T::zero() { T::one() / d } else { T::one() })
                    .collect(),
            ),
        }
    }

    pub fn apply(&self, r: &[T], z: &mut [T]) {
        match self {
            Preconditioner::Ilu(ilu) => ilu.apply(r, z),
            Preconditioner::Jacobi(d) => z.iter_mut().zip(r).zip(d).for_each(|((z, &r), &d)| *z = r * d),
        }
    }
}

/// Outcome of a Krylov solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolve<T> {
    pub iterations: usize,
    pub residual: T,
    pub converged: bool,
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
pub fn pcg<T: Real>(a: &CsrMatrix<T>, m: &Preconditioner<T>, b: &[T], x: &mut [T], tol: T, max_iter: usize) -> LinearSolve<T> {
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return LinearSolve {
            iterations: 0,
            residual: T::zero(),
            converged: true,
        };
    }
    let mut r = vec![T::zero(); n];
    a.mul(x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, &b)| *r = b - *r);
    let mut z = vec![T::zero(); n];
    m.apply(&r, &mut z);
    let mut d = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![T::zero(); n];
    let mut res = norm2(&r) / bnorm;
    for it in 0..max_iter {
        if res <= tol {
            return LinearSolve {
                iterations: it,
                residual: res,
                converged: true,
            };
        }
        a.mul(&d, &mut q);
        let dq = dot(&d, &q);
        if !(dq > T::zero()) {
            break;
        }
        let alpha = rz / dq;
        axpy(x, alpha, &d);
        axpy(&mut r, -alpha, &q);
        res = norm2(&r) / bnorm;
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        d.par_iter_mut().zip(z.par_iter()).for_each(|(d, &z)| *d = z + beta * *d);
    }
    LinearSolve {
        iterations: max_iter,
        residual: res,
        converged: res <= tol,
    }
}

/// Right-preconditioned BiCGStab for general `a`.
pub fn bicgstab<T: Real>(a: &CsrMatrix<T>, m: &Preconditioner<T>, b: &[T], x: &mut [T], tol: T, max_iter: usize) -> LinearSolve<T> {
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return LinearSolve {
            iterations: 0,
            residual: T::zero(),
            converged: true,
        };
    }
    let mut r = vec![T::zero(); n];
    a.mul(x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, &b)| *r = b - *r);
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (T::one(), T::one(), T::one());
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut ph = vec![T::zero(); n];
    let mut s = vec![T::zero(); n];
    let mut sh = vec![T::zero(); n];
    let mut t = vec![T::zero(); n];
    let mut res = norm2(&r) / bnorm;
    for it in 0..max_iter {
        if res <= tol {
            return LinearSolve {
                iterations: it,
                residual: res,
                converged: true,
            };
        }
        let rho_new = dot(&r0, &r);
        if rho_new == T::zero() || omega == T::zero() {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p.par_iter_mut()
            .zip(r.par_iter().zip(v.par_iter()))
            .for_each(|(p, (&r, &v))| *p = r + beta * (*p - omega * v));
        m.apply(&p, &mut ph);
        a.mul(&ph, &mut v);
        let r0v = dot(&r0, &v);
        if r0v == T::zero() {
            break;
        }
        alpha = rho / r0v;
        s.par_iter_mut()
            .zip(r.par_iter().zip(v.par_iter()))
            .for_each(|(s, (&r, &v))| *s = r - alpha * v);
        let snorm = norm2(&s) / bnorm;
        if snorm <= tol {
            axpy(x, alpha, &ph);
            return LinearSolve {
                iterations: it + 1,
                residual: snorm,
                converged: true,
            };
        }
        m.apply(&s, &mut sh);
        a.mul(&sh, &mut t);
        let tt = dot(&t, &t);
        if tt == T::zero() {
            break;
        }
        omega = dot(&t, &s) / tt;
        axpy(x, alpha, &ph);
        axpy(x, omega, &sh);
        r.par_iter_mut()
            .zip(s.par_iter().zip(t.par_iter()))
            .for_each(|(r, (&s, &t))| *r = s - omega * t);
        res = norm2(&r) / bnorm;
        if !res.is_finite() {
            break;
        }
    }
    LinearSolve {
        iterations: max_iter,
        residual: res,
        converged: res <= tol,
    }
}
