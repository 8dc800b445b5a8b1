use serde::{Deserialize, Serialize};

use super::problem::RadialProblem;
use super::solution::RadialSolution;
use crate::grid::RadialGrid;
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// Candidate limit profiles for the critical `alpha / |x|` instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateProfile {
    /// `R - r`, the limit of the finite-energy radial branch.
    Cone,
    /// `R^{N-1} / (N-1) [1 - (r/R)^{N-1}]`.
    PowerProfile,
}

impl CandidateProfile {
    pub const ALL: [CandidateProfile; 2] = [CandidateProfile::Cone, CandidateProfile::PowerProfile];

    pub fn value<T: Real>(self, n: usize, radius: T, r: T) -> T {
        match self {
            CandidateProfile::Cone => radius - r,
            CandidateProfile::PowerProfile => {
                let k = n as i32 - 1;
                radius.powi(k) / T::of_usize(n - 1) * (T::one() - (r / radius).powi(k))
            }
        }
    }

    pub fn slope<T: Real>(self, n: usize, radius: T, r: T) -> T {
        match self {
            CandidateProfile::Cone => -T::one(),
            CandidateProfile::PowerProfile => -(r / radius).powi(n as i32 - 2),
        }
    }
}

/// Residuals of one candidate pair `(u, z = -x/|x|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialCertificate<T> {
    pub profile: CandidateProfile,
    /// Largest relative residual of `-div z - lambda z.x/|x|^2 - f` over the positive nodes.
    pub residual_pde: T,
    /// Largest `|1 - z . grad u / |grad u||` where `grad u != 0`.
    pub residual_pairing: T,
    /// `|z . nu + sign(u)|` at `r = R` when `|u(R)|` is above the activation level, else 0.
    pub residual_boundary: T,
    pub z_sup: T,
}

impl<T: Real> RadialCertificate<T> {
    pub fn passes(&self, tol: T) -> bool {
        self.residual_pde <= tol && self.residual_pairing <= tol && self.residual_boundary <= tol && self.z_sup <= T::one() + tol
    }
}

/// `-div z - lambda z . x/|x|^2` for `z = -x/|x|`, computed with three-point
/// differences of `r^{N-1} z_r` at each interior node.
pub fn forward_datum<T: Real>(n: usize, lambda: T, grid: &RadialGrid<T>) -> Vec<(T, T)> {
    let r = grid.nodes();
    let k = n as i32 - 1;
    let flux: Vec<T> = r.iter().map(|&x| -x.powi(k)).collect();
    (1..r.len() - 1)
        .map(|j| {
            let (h0, h1) = (r[j] - r[j - 1], r[j + 1] - r[j]);
            let d = -flux[j - 1] * h1 / (h0 * (h0 + h1)) + flux[j] * (h1 - h0) / (h0 * h1) + flux[j + 1] * h0 / (h1 * (h0 + h1));
            let div = d / r[j].powi(k);
            // z . x / |x|^2 = -1 / r
            (r[j], -div + lambda / r[j])
        })
        .collect()
}

/// Certificate residuals of `(u, z = -x/|x|)` for every candidate profile.
pub fn radial_limit_certificate<T: Real>(prob: &RadialProblem<T>, grid: &RadialGrid<T>) -> Vec<RadialCertificate<T>> {
    let n = prob.dimension;
    let residual_pde = flux_balance_residual(prob, grid);
    CandidateProfile::ALL
        .iter()
        .map(|&profile| {
            let residual_pairing = grid
                .nodes()
                .iter()
                .filter(|&&r| r > T::zero())
                .map(|&r| {
                    let du = profile.slope(n, prob.radius, r);
                    if du == T::zero() {
                        T::zero()
                    } else {
                        // z_r = -1
                        (T::one() - (-du) / du.abs()).abs()
                    }
                })
                .fold(T::zero(), T::max);
            let u_boundary = profile.value(n, prob.radius, prob.radius);
            let sup = profile.value(n, prob.radius, T::zero()).abs();
            let residual_boundary = if u_boundary.abs() > T::of(1e-6) * sup {
                // z . nu = -1 at r = R
                (-T::one() + u_boundary.signum()).abs()
            } else {
                T::zero()
            };
            RadialCertificate {
                profile,
                residual_pde,
                residual_pairing,
                residual_boundary,
                z_sup: T::one(),
            }
        })
        .collect()
}

/// Weak residual of `-div z - lambda z.x/|x|^2 - f` for `z = -x/|x|`, tested against the
/// indicator of every shell: `-[r^{N-1} z_r]_a^b + int_a^b (lambda/r - f) r^{N-1} dr`,
/// relative to the sum of the term magnitudes, maximized over the shells.
pub fn flux_balance_residual<T: Real>(prob: &RadialProblem<T>, grid: &RadialGrid<T>) -> T {
    let rule = GaussLegendre::<T>::new(10);
    let k = prob.dimension as i32 - 1;
    grid.nodes()
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            // -(b^{N-1} (-1) - a^{N-1} (-1))
            let div = b.powi(k) - a.powi(k);
            let drift = rule.integrate(a, b, |r| prob.lambda * r.powi(k - 1));
            let f = rule.integrate(a, b, |r| prob.profile.value(r) * r.powi(k));
            let scale = div.abs() + drift.abs() + f.abs();
            if scale == T::zero() {
                T::zero()
            } else {
                (div + drift - f).abs() / scale
            }
        })
        .fold(T::zero(), T::max)
}

/// Relative residual of `(r^{lambda} v)' = -r^{lambda+N-1} f` at interior nodes, i.e. the
/// divergence form `-div(|x|^lambda w) = |x|^lambda f` of the drift equation, with `v`
/// rebuilt from the solution slopes.
pub fn weighted_identity_residual<T: Real>(prob: &RadialProblem<T>, sol: &RadialSolution<T>) -> T {
    let r = &sol.nodes;
    let n = prob.dimension as i32;
    let pm1 = prob.exponent - T::one();
    let g: Vec<T> = r
        .iter()
        .zip(&sol.slope)
        .map(|(&ri, &s)| {
            if ri == T::zero() {
                T::zero()
            } else {
                -s.abs().powf(pm1) * ri.powi(n - 1) * ri.powf(prob.lambda)
            }
        })
        .collect();
    (1..r.len() - 1)
        .map(|j| {
            let (h0, h1) = (r[j] - r[j - 1], r[j + 1] - r[j]);
            let d = -g[j - 1] * h1 / (h0 * (h0 + h1)) + g[j] * (h1 - h0) / (h0 * h1) + g[j + 1] * h0 / (h1 * (h0 + h1));
            let rhs = -r[j].powf(prob.lambda + T::of_usize(prob.dimension) - T::one()) * prob.profile.value(r[j]);
            let scale = d.abs().max(rhs.abs());
            if scale == T::zero() {
                T::zero()
            } else {
                (d - rhs).abs() / scale
            }
        })
        .fold(T::zero(), T::max)
}
