use serde::{Deserialize, Serialize};

use super::assemble::{flux, jacobian, load, operator, picard, rms_gradient, zero_fixed};
use super::linalg::{bicgstab, dot, norm2, pcg, CsrMatrix, Preconditioner};
use super::problem::{DiscreteProblem, Regularization};
use crate::error::{Error, Result};
use crate::mesh::{cell_gradient, gradient_power, integrate};
use crate::scalar::{dot as dot3, norm, Real, Vec3};

/// Result of one fixed-`p` solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport<T> {
    pub exponent: T,
    pub iterations: usize,
    /// Final `||R|| / ||b||` over the free nodes.
    pub residual: T,
    pub history: Vec<T>,
    pub epsilon: T,
    /// `int |grad u|^p`.
    pub energy: T,
    /// `int |grad u|`.
    pub total_variation: T,
    pub l1: T,
    /// `||u||_{L^{N/(N-1)}}`.
    pub l1star: T,
    pub linf: T,
    /// Nodal values.
    pub solution: Vec<T>,
}

struct Eval<T> {
    eps: T,
    a: Vec<T>,
    d: Vec<T>,
    r: Vec<T>,
    res: T,
}

struct Solver<'p, 'a, T> {
    dp: &'p DiscreteProblem<'a, T>,
    b: Vec<T>,
    bnorm: T,
    mat: CsrMatrix<T>,
}

impl<'p, 'a, T: Real> Solver<'p, 'a, T> {
    fn epsilon(&self, u: &[T]) -> T {
        match self.dp.options.regularization {
            Regularization::Absolute(e) => e,
            Regularization::Relative(r) => {
                let g = rms_gradient(self.dp.space, u);
                if g > T::zero() {
                    r * g
                } else {
                    r
                }
            }
        }
    }

    fn eval(&self, u: &[T]) -> Eval<T> {
        let eps = self.epsilon(u);
        let (a, d) = operator(self.dp, u, eps);
        let r: Vec<T> = a.iter().zip(&d).zip(&self.b).map(|((&a, &d), &b)| a - d - b).collect();
        let res = norm2(&r) / self.bnorm;
        Eval {
            eps,
            a,
            d,
            r,
            res: if res.is_finite() { res } else { T::infinity() },
        }
    }

    /// Rescales `u` by the factor that balances `<A(tu) - D(tu), u>` against `<b, u>`
    /// for the homogeneous part of the operator.
    fn amplitude(&self, u: &[T], ev: &Eval<T>) -> Option<T> {
        let num = dot(&self.b, u);
        let den: T = ev.a.iter().zip(&ev.d).zip(u).map(|((&a, &d), &x)| (a - d) * x).sum();
        if !(num > T::zero() && den > T::zero()) {
            return None;
        }
        let t = (num / den).powf(T::one() / (self.dp.exponent - T::one()));
        (t.is_finite() && t > T::zero()).then_some(t)
    }

    fn linear(&mut self, rhs: &[T], x: &mut [T], symmetric: bool) -> bool {
        let opts = &self.dp.options;
        let m = Preconditioner::new(&self.mat);
        let out = if symmetric {
            pcg(&self.mat, &m, rhs, x, opts.linear_tolerance, opts.max_linear_iterations)
        } else {
            bicgstab(&self.mat, &m, rhs, x, opts.linear_tolerance, opts.max_linear_iterations)
        };
        out.converged || (out.residual.is_finite() && out.residual < T::of(1e-3))
    }

    fn initial(&mut self) -> Result<Vec<T>> {
        let mut u = vec![T::zero(); self.b.len()];
        picard(self.dp, None, T::one(), &mut self.mat);
        let b = self.b.clone();
        if !self.linear(&b, &mut u, true) {
            return Err(Error::SingularLinearization("Laplace start did not converge".into()));
        }
        Ok(u)
    }

    fn newton_step(&mut self, u: &[T], ev: &Eval<T>) -> Option<(Vec<T>, Eval<T>)> {
        jacobian(self.dp, u, ev.eps, &mut self.mat);
        let rhs: Vec<T> = ev.r.iter().map(|&r| -r).collect();
        let mut delta = vec![T::zero(); u.len()];
        if !self.linear(&rhs, &mut delta, false) || delta.iter().any(|d| !d.is_finite()) {
            return None;
        }
        let mut step = T::one();
        for _ in 0..12 {
            let trial: Vec<T> = u.iter().zip(&delta).map(|(&u, &d)| u + step * d).collect();
            let te = self.eval(&trial);
            if te.res < (T::one() - T::of(1e-4) * step) * ev.res {
                return Some((trial, te));
            }
            step *= T::of(0.5);
        }
        None
    }

    fn picard_step(&mut self, u: &[T], ev: &Eval<T>) -> Result<(Vec<T>, Eval<T>)> {
        picard(self.dp, Some(u), ev.eps, &mut self.mat);
        let mut rhs: Vec<T> = self.b.iter().zip(&ev.d).map(|(&b, &d)| b + d).collect();
        zero_fixed(self.dp.space, &mut rhs);
        let mut next = u.to_vec();
        if !self.linear(&rhs, &mut next, true) {
            return Err(Error::SingularLinearization("Picard system did not converge".into()));
        }
        let mut omega = T::one();
        let mut best = None;
        for _ in 0..6 {
            let trial: Vec<T> = u.iter().zip(&next).map(|(&u, &v)| u + omega * (v - u)).collect();
            let te = self.eval(&trial);
            let better = te.res < ev.res;
            best = Some((trial, te));
            if better {
                break;
            }
            omega *= self.dp.options.damping;
        }
        Ok(best.expect("at least one trial"))
    }
}

/// Solves the regularized, truncated problem at a fixed exponent.
///
/// Newton steps with a residual line search are tried first; a Picard step
/// (lagged coefficient and drift, relaxed while the residual does not decrease)
/// is the fallback. After every step the iterate is rescaled by the amplitude
/// that is exact for the homogeneous part of the operator, when that lowers the
/// residual.
pub fn solve_fixed_p<T: Real>(dp: &DiscreteProblem<'_, T>, warm_start: Option<&[T]>) -> Result<SolveReport<T>> {
    dp.validate()?;
    let space = dp.space;
    let n = space.num_nodes();
    let mut b = load(dp);
    let mut bnorm = norm2(&b);
    if bnorm == T::zero() {
        let u = vec![T::zero(); n];
        return Ok(report(dp, u, 0, T::zero(), Vec::new(), T::zero()));
    }
    // Without truncation and with a relative epsilon every term is homogeneous,
    // so the solve runs on the normalized load and is rescaled at the end.
    let homogeneous = !dp.options.truncation.is_finite() && matches!(dp.options.regularization, Regularization::Relative(_));
    let amp = if homogeneous && bnorm.is_finite() {
        b.iter_mut().for_each(|v| *v /= bnorm);
        let amp = bnorm.powf(T::one() / (dp.exponent - T::one()));
        bnorm = norm2(&b);
        amp
    } else {
        T::one()
    };
    let mut s = Solver {
        dp,
        b,
        bnorm,
        mat: CsrMatrix::pattern(space),
    };
    let mut u = match warm_start {
        Some(w) if w.len() != n => {
            return Err(Error::MismatchedMeshes(format!("warm start has {} values, mesh has {n} nodes", w.len())))
        }
        Some(w) if w.iter().all(|v| v.is_finite()) && w.iter().any(|&v| v != T::zero()) => {
            let mut u: Vec<T> = w.iter().map(|&v| v / amp).collect();
            zero_fixed(space, &mut u);
            u
        }
        _ => s.initial()?,
    };
    let mut ev = s.eval(&u);
    let mut history = Vec::new();
    let tol = dp.options.tolerance;
    for it in 0..=dp.options.max_iterations {
        if let Some(t) = s.amplitude(&u, &ev) {
            let scaled: Vec<T> = u.iter().map(|&v| v * t).collect();
            let se = s.eval(&scaled);
            if se.res < ev.res {
                u = scaled;
                ev = se;
            }
        }
        history.push(ev.res);
        if ev.res <= tol {
            u.iter_mut().for_each(|v| *v *= amp);
            return Ok(report(dp, u, it, ev.res, history, ev.eps * amp));
        }
        if it == dp.options.max_iterations {
            break;
        }
        let stepped = if dp.options.newton { s.newton_step(&u, &ev) } else { None };
        let (next, ne) = match stepped {
            Some(x) => x,
            None => s.picard_step(&u, &ev)?,
        };
        u = next;
        ev = ne;
    }
    Err(Error::Diverged {
        iterations: dp.options.max_iterations,
        residual: ev.res.to_f64_lossy(),
    })
}

/// Start for `dp` built from a solution at another exponent.
///
/// The discrete flux of `previous` is kept and the gradient in each cell is the
/// one whose regularized flux at the new exponent equals it; the gradients are
/// then projected onto the space by a Laplace solve. When the discrete flux does
/// not depend on `p` (one cell per free node, as on radial meshes) this is the
/// new solution up to the change in regularization.
pub fn flux_predictor<T: Real>(dp: &DiscreteProblem<'_, T>, previous: &SolveReport<T>) -> Result<Vec<T>> {
    dp.validate()?;
    let space = dp.space;
    let n = space.num_nodes();
    if previous.solution.len() != n {
        return Err(Error::MismatchedMeshes(format!(
            "previous solution has {} values, mesh has {n} nodes",
            previous.solution.len()
        )));
    }
    let p = dp.exponent;
    let sigmas: Vec<Vec3<T>> = (0..space.num_cells())
        .map(|c| flux(&cell_gradient(space, c, &previous.solution), previous.exponent, previous.epsilon).1)
        .collect();
    let eps = match dp.options.regularization {
        Regularization::Absolute(e) => e,
        Regularization::Relative(r) => {
            let (mut acc, mut vol) = (T::zero(), T::zero());
            for (c, s) in sigmas.iter().enumerate() {
                let m = space.cell_measure(c);
                acc += m * norm(s).powf(T::of(2.0) / (p - T::one()));
                vol += m;
            }
            let g = (acc / vol).sqrt();
            if g > T::zero() && g.is_finite() {
                r * g
            } else {
                r
            }
        }
    };
    let mut rhs = vec![T::zero(); n];
    for (c, sigma) in sigmas.iter().enumerate() {
        let s = norm(sigma);
        if !(s > T::zero()) {
            continue;
        }
        let scale = invert_flux(s, p, eps) / s;
        let grads = space.basis_gradients(c);
        let m = space.cell_measure(c) * scale;
        for (a, &i) in space.cell_nodes(c).iter().enumerate() {
            rhs[i] += m * dot3(sigma, &grads[a]);
        }
    }
    zero_fixed(space, &mut rhs);
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Diverged {
            iterations: 0,
            residual: f64::INFINITY,
        });
    }
    let mut mat = CsrMatrix::pattern(space);
    picard(dp, None, T::one(), &mut mat);
    let pre = Preconditioner::new(&mat);
    let mut u = vec![T::zero(); n];
    let out = pcg(&mat, &pre, &rhs, &mut u, dp.options.linear_tolerance, dp.options.max_linear_iterations);
    if !out.converged {
        return Err(Error::SingularLinearization("gradient projection did not converge".into()));
    }
    Ok(u)
}

/// The `s >= 0` with `(s^2 + eps^2)^{(p-2)/2} s = t`, for `t > 0`.
///
/// In `y = ln s` the map has slope between `min(1, p-1)` and `max(1, p-1)`, which
/// brackets the root from any starting point; Newton steps are kept inside it.
pub(crate) fn invert_flux<T: Real>(t: T, p: T, eps: T) -> T {
    let le = if eps > T::zero() { eps.ln() } else { T::neg_infinity() };
    let two = T::of(2.0);
    let h = |y: T| {
        // ln(s^2 + eps^2) and s^2 / (s^2 + eps^2) without forming s.
        let (big, gap) = if y >= le { (y, le - y) } else { (le, y - le) };
        let e = (two * gap).exp();
        let lsum = two * big + e.ln_1p();
        let q = if y >= le { T::one() / (T::one() + e) } else { e / (T::one() + e) };
        ((p - two) / two * lsum + y - t.ln(), T::one() + (p - two) * q)
    };
    let (lo_slope, hi_slope) = (T::one().min(p - T::one()), T::one().max(p - T::one()));
    let mut y = t.ln() / (p - T::one());
    let (v0, _) = h(y);
    if v0 == T::zero() {
        return y.exp();
    }
    let (a, b) = (y - v0 / hi_slope, y - v0 / lo_slope);
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    y = (lo + hi) / T::of(2.0);
    for _ in 0..100 {
        let (v, d) = h(y);
        if v == T::zero() {
            break;
        }
        if v > T::zero() {
            hi = y;
        } else {
            lo = y;
        }
        let next = y - v / d;
        y = if next > lo && next < hi { next } else { (lo + hi) / T::of(2.0) };
        if hi - lo <= T::epsilon() * (T::one() + y.abs()) * T::of(4.0) {
            break;
        }
    }
    y.exp()
}

fn report<T: Real>(dp: &DiscreteProblem<'_, T>, u: Vec<T>, iterations: usize, residual: T, history: Vec<T>, epsilon: T) -> SolveReport<T> {
    let space = dp.space;
    let nf = T::of_usize(space.dimension());
    let q = nf / (nf - T::one());
    let l1star = integrate(space, &u, |_, v| v.abs().powf(q)).powf(T::one() / q);
    SolveReport {
        exponent: dp.exponent,
        iterations,
        residual,
        history,
        epsilon,
        energy: gradient_power(space, &u, dp.exponent),
        total_variation: gradient_power(space, &u, T::one()),
        l1: integrate(space, &u, |_, v| v.abs()),
        l1star,
        linf: u.iter().fold(T::zero(), |m, &v| m.max(v.abs())),
        solution: u,
    }
}
