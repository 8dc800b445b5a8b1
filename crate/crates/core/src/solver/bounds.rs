use serde::{Deserialize, Serialize};

use super::problem::DiscreteProblem;
use super::solve::SolveReport;
use crate::error::{Error, Result};
use crate::function_spaces::{Constants, Regime, ANALYTIC_TOLERANCE};
use crate::mesh::{superlevel_measure, FeSpace};
use crate::scalar::Real;

/// `int |grad u_p|^p` against the a priori bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBound<T> {
    pub lhs: T,
    pub rhs: T,
    pub ok: bool,
}

/// Checks `int |grad u|^p <= (c_f / (1 - gamma_p ||F||_{N,inf}))^{p/(p-1)} |Omega|`
/// where `c_f = min(S_N ||f||_{L^N}, gamma_1 ||f||_{L^{N,inf}})`.
///
/// Both choices of `c_f` bound `int f u` through Holder in the respective
/// scale; the Lorentz one keeps the bound finite for `f = alpha / |x|`.
pub fn energy_and_bound<T: Real>(report: &SolveReport<T>, dp: &DiscreteProblem<'_, T>, tol: T) -> Result<EnergyBound<T>> {
    let space = dp.space;
    let n = space.dimension();
    let c = Constants::<T>::new(n)?;
    let p = report.exponent;
    let (f_ln, f_weak) = dp.source.norms(space)?;
    let sob = if f_ln == T::zero() { T::zero() } else { c.sobolev * f_ln };
    let lor = if f_weak == T::zero() { T::zero() } else { c.gamma_1 * f_weak };
    let cf = sob.min(lor);
    let drift = dp.drift.weak_norm(space)?;
    let theta = cf + c.gamma_1 * drift;
    if Regime::classify(theta, T::of(ANALYTIC_TOLERANCE)) == Regime::Supercritical {
        return Err(Error::BoundNotApplicable(format!("supercritical data (theta = {theta})")));
    }
    let den = T::one() - c.gamma_p(p)? * drift;
    if !(den > T::zero()) {
        return Err(Error::BoundNotApplicable(format!("gamma_p ||F|| >= 1 at p = {p}")));
    }
    let rhs = if cf == T::zero() {
        T::zero()
    } else {
        (cf / den).powf(p / (p - T::one())) * space.measure()
    };
    let lhs = report.energy;
    Ok(EnergyBound {
        lhs,
        rhs,
        ok: lhs <= rhs * (T::one() + tol) + T::min_positive_value(),
    })
}

/// Level-set table of `|A_k| = |{|u| >= k}|` and the sup estimate it yields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate<T> {
    /// Smallest tabulated level with `|A_k| = 0`.
    pub estimate: T,
    pub k0: T,
    /// `(k, |A_k|)`, increasing in `k`.
    pub table: Vec<(T, T)>,
    /// Pairs `l > k >= k0` violating `|A_l| <= S_N / (l - k) |A_k|^{1 + 1/N}`.
    pub violations: usize,
    /// Largest ratio `|A_l| / (S_N / (l - k) |A_k|^{1 + 1/N})` over the pairs.
    pub worst_ratio: T,
}

impl<T: Real> LevelEstimate<T> {
    pub fn decay_holds(&self) -> bool {
        self.violations == 0
    }
}

/// Stampacchia levels for a computed solution: geometric levels `k0 2^j` with
/// `k0 = ||u||_{L^1} / |Omega|`, refined by bisection to the first empty level.
///
/// `q` is the integrability exponent of the datum; the estimate is only
/// guaranteed by the theory for `q > N`.
pub fn linf_via_levels<T: Real>(space: &dyn FeSpace<T>, report: &SolveReport<T>, q: T) -> Result<LevelEstimate<T>> {
    let n = space.dimension();
    if !(q > T::of_usize(n)) {
        return Err(Error::EstimateNotGuaranteed(format!("datum exponent q = {q} must exceed N = {n}")));
    }
    level_decay(space, report)
}

/// The level table and decay check of [`linf_via_levels`] without the
/// integrability requirement on the datum.
pub fn level_decay<T: Real>(space: &dyn FeSpace<T>, report: &SolveReport<T>) -> Result<LevelEstimate<T>> {
    let n = space.dimension();
    let u = &report.solution;
    let k0 = report.l1 / space.measure();
    if !(k0 > T::zero()) {
        return Ok(LevelEstimate {
            estimate: T::zero(),
            k0: T::zero(),
            table: Vec::new(),
            violations: 0,
            worst_ratio: T::zero(),
        });
    }
    let mut table = Vec::new();
    let mut k = k0;
    let mut hi = None;
    for _ in 0..2000 {
        let m = superlevel_measure(space, u, k);
        table.push((k, m));
        if m == T::zero() {
            hi = Some(k);
            break;
        }
        k = k * T::of(2.0);
    }
    let mut hi = hi.ok_or_else(|| Error::Inconclusive("level sets never empty".into()))?;
    let mut lo = if table.len() >= 2 { table[table.len() - 2].0 } else { T::zero() };
    for _ in 0..64 {
        let mid = (lo + hi) / T::of(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if superlevel_measure(space, u, mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if table.last().map(|e| e.0) != Some(hi) {
        table.pop();
        table.push((hi, T::zero()));
    }
    let sn = Constants::<T>::new(n)?.sobolev;
    let expo = T::one() + T::one() / T::of_usize(n);
    let mut violations = 0;
    let mut worst = T::zero();
    for (i, &(kk, ak)) in table.iter().enumerate() {
        for &(l, al) in &table[i + 1..] {
            let bound = sn / (l - kk) * ak.powf(expo);
            let ratio = if bound > T::zero() { al / bound } else if al > T::zero() { T::infinity() } else { T::zero() };
            worst = worst.max(ratio);
            if al > bound * (T::one() + T::of(1e-12)) {
                violations += 1;
            }
        }
    }
    Ok(LevelEstimate {
        estimate: hi,
        k0,
        table,
        violations,
        worst_ratio: worst,
    })
}
