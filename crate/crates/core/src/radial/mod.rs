//! Semi-analytic solver for radial instances on balls.
//!
//! With `w = |u'|^{p-2} u'` and `v = r^{N-1} w` the equation reduces to
//! `(r^lambda v)' = -r^{lambda+N-1} f`. The finite-energy branch `v(0) = 0` gives
//! `v(r) = -r^{-lambda} int_0^r s^{lambda+N-1} f(s) ds`, and `u_p` follows by
//! integrating `|v / r^{N-1}|^{1/(p-1)}` inward from `u_p(R) = 0`.

mod certificate;
mod limit;
mod problem;
mod solution;

pub use certificate::{flux_balance_residual, forward_datum, radial_limit_certificate, weighted_identity_residual, CandidateProfile, RadialCertificate};
pub use limit::{aggregate, limit_p_to_one, LimitOptions, PointTrend, TrichotomyRecord};
pub use problem::{RadialProblem, RadialProfile};
pub use solution::{
    consistency_residual, flux_potential, radial_solution, radial_solution_with, strong_residual, RadialOptions, RadialSolution,
};

#[cfg(test)]
mod tests;
