//! Closed-form radial data on a ball `B_R(0)`: constants, `alpha/|x|`, and
//! the capped `alpha/|x|` plateau.

use serde::{Deserialize, Serialize};

use super::constants::ball_volume;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radial datum on `B_R(0) ⊂ R^N` given in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticDatum<T> {
    /// `f ≡ value`.
    Constant { value: T, radius: T },
    /// `f = alpha / |x|`.
    InverseRadius { alpha: T, radius: T },
    /// `f = alpha beta / R` for `|x| <= R/beta`, `alpha / |x|` for `R/beta <= |x| <= R`.
    Plateau { alpha: T, beta: T, radius: T },
}

impl<T: Real> AnalyticDatum<T> {
    pub fn constant(value: T, radius: T) -> Self {
        AnalyticDatum::Constant { value, radius }
    }

    pub fn inverse_radius(alpha: T, radius: T) -> Self {
        AnalyticDatum::InverseRadius { alpha, radius }
    }

    pub fn plateau(alpha: T, beta: T, radius: T) -> Self {
        AnalyticDatum::Plateau { alpha, beta, radius }
    }

    pub fn radius(&self) -> T {
        match *self {
            AnalyticDatum::Constant { radius, .. }
            | AnalyticDatum::InverseRadius { radius, .. }
            | AnalyticDatum::Plateau { radius, .. } => radius,
        }
    }

    /// Amplitude parameter (`value` or `alpha`).
    pub fn amplitude(&self) -> T {
        match *self {
            AnalyticDatum::Constant { value, .. } => value,
            AnalyticDatum::InverseRadius { alpha, .. } | AnalyticDatum::Plateau { alpha, .. } => alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.radius();
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: r.to_f64_lossy(),
                reason: "must be positive",
            });
        }
        if !self.amplitude().is_finite() {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                value: self.amplitude().to_f64_lossy(),
                reason: "must be finite",
            });
        }
        if let AnalyticDatum::Plateau { beta, .. } = *self {
            if !(beta >= T::one()) || !beta.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    value: beta.to_f64_lossy(),
                    reason: "plateau needs beta >= 1",
                });
            }
        }
        Ok(())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.amplitude() >= T::zero()
    }

    /// Same profile multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        match *self {
            AnalyticDatum::Constant { value, radius } => AnalyticDatum::Constant { value: value * c, radius },
            AnalyticDatum::InverseRadius { alpha, radius } => AnalyticDatum::InverseRadius { alpha: alpha * c, radius },
            AnalyticDatum::Plateau { alpha, beta, radius } => AnalyticDatum::Plateau {
                alpha: alpha * c,
                beta,
                radius,
            },
        }
    }

    /// `f(r)`; `+inf` at `r = 0` for the inverse-radius profile.
    pub fn value_at(&self, r: T) -> T {
        match *self {
            AnalyticDatum::Constant { value, .. } => value,
            AnalyticDatum::InverseRadius { alpha, .. } => alpha / r,
            AnalyticDatum::Plateau { alpha, beta, radius } => {
                let r0 = radius / beta;
                if r <= r0 {
                    alpha * beta / radius
                } else {
                    alpha / r
                }
            }
        }
    }

    /// `|B_R| = C_N R^N`.
    pub fn domain_measure(&self, n: usize) -> Result<T> {
        Ok(ball_volume::<T>(n as i64)? * self.radius().powi(n as i32))
    }

    /// `alpha_f(s) = |{|f| > s}|`.
    pub fn distribution(&self, n: usize, s: T) -> Result<T> {
        if !(s >= T::zero()) {
            return Err(Error::InvalidLevel(s.to_f64_lossy()));
        }
        let c = ball_volume::<T>(n as i64)?;
        let omega = self.domain_measure(n)?;
        let a = self.amplitude().abs();
        let radius = self.radius();
        let ni = n as i32;
        Ok(match *self {
            AnalyticDatum::Constant { .. } => {
                if s < a {
                    omega
                } else {
                    T::zero()
                }
            }
            AnalyticDatum::InverseRadius { .. } => {
                if a == T::zero() {
                    T::zero()
                } else if s < a / radius {
                    omega
                } else {
                    c * (a / s).powi(ni)
                }
            }
            AnalyticDatum::Plateau { beta, .. } => {
                if a == T::zero() || s >= a * beta / radius {
                    T::zero()
                } else if s < a / radius {
                    omega
                } else {
                    c * (a / s).powi(ni)
                }
            }
        })
    }

    /// `f*(t) = sup{s > 0 : alpha_f(s) > t}` for `t > 0`.
    pub fn rearrangement(&self, n: usize, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(Error::InvalidLevel(t.to_f64_lossy()));
        }
        if t >= self.domain_measure(n)? {
            return Ok(T::zero());
        }
        let c = ball_volume::<T>(n as i64)?;
        let a = self.amplitude().abs();
        let nf = T::of_usize(n);
        let tail = a * (c / t).powf(nf.recip());
        Ok(match *self {
            AnalyticDatum::Constant { .. } => a,
            AnalyticDatum::InverseRadius { .. } => tail,
            AnalyticDatum::Plateau { beta, radius, .. } => tail.min(a * beta / radius),
        })
    }

    /// `||f||_{L^{N,inf}} = sup_t t^{1/N} f*(t)`.
    pub fn weak_norm(&self, n: usize) -> Result<T> {
        let c = ball_volume::<T>(n as i64)?;
        let nf = T::of_usize(n);
        let a = self.amplitude().abs();
        Ok(match *self {
            AnalyticDatum::Constant { .. } => a * self.domain_measure(n)?.powf(nf.recip()),
            AnalyticDatum::InverseRadius { .. } | AnalyticDatum::Plateau { .. } => a * c.powf(nf.recip()),
        })
    }

    /// `||f||_{L^q}`, `+inf` when the singularity is not `q`-integrable.
    pub fn lq_norm(&self, n: usize, q: T) -> Result<T> {
        if !(q >= T::one()) {
            return Err(Error::InvalidExponent {
                value: q.to_f64_lossy(),
                reason: "need q >= 1",
            });
        }
        let c = ball_volume::<T>(n as i64)?;
        let nf = T::of_usize(n);
        let a = self.amplitude().abs();
        let radius = self.radius();
        if a == T::zero() {
            return Ok(T::zero());
        }
        if q.is_infinite() {
            return Ok(match *self {
                AnalyticDatum::Constant { .. } => a,
                AnalyticDatum::InverseRadius { .. } => T::infinity(),
                AnalyticDatum::Plateau { beta, .. } => a * beta / radius,
            });
        }
        // int_{r0}^{R} r^{-q} N C_N r^{N-1} dr
        let shell = |r0: T| -> T {
            let e = nf - q;
            if e.abs() <= T::tiny() {
                nf * c * (radius / r0).ln()
            } else {
                nf * c * (radius.powf(e) - r0.powf(e)) / e
            }
        };
        let integral = match *self {
            AnalyticDatum::Constant { .. } => a.powf(q) * c * radius.powi(n as i32),
            AnalyticDatum::InverseRadius { .. } => {
                if q >= nf {
                    return Ok(T::infinity());
                }
                a.powf(q) * nf * c * radius.powf(nf - q) / (nf - q)
            }
            AnalyticDatum::Plateau { beta, .. } => {
                let r0 = radius / beta;
                a.powf(q) * ((beta / radius).powf(q) * c * r0.powi(n as i32) + shell(r0))
            }
        };
        Ok(integral.powf(q.recip()))
    }

    /// `int_0^r s^{lambda+N-1} f(s) ds` (requires `lambda + N - 1 > 0`).
    pub fn radial_moment(&self, n: usize, lambda: T, r: T) -> T {
        let r = r.min(self.radius()).max(T::zero());
        let k = lambda + T::of_usize(n) - T::one();
        match *self {
            AnalyticDatum::Constant { value, .. } => value * r.powf(k + T::one()) / (k + T::one()),
            AnalyticDatum::InverseRadius { alpha, .. } => alpha * r.powf(k) / k,
            AnalyticDatum::Plateau { alpha, beta, radius } => {
                let r0 = radius / beta;
                let height = alpha * beta / radius;
                if r <= r0 {
                    height * r.powf(k + T::one()) / (k + T::one())
                } else {
                    height * r0.powf(k + T::one()) / (k + T::one()) + alpha * (r.powf(k) - r0.powf(k)) / k
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const C3: f64 = 4.0 * PI / 3.0;

    #[test]
    fn distribution_of_presets() {
        let one = AnalyticDatum::constant(2.0, 1.0);
        assert_relative_eq!(one.distribution(3, 1.5).unwrap(), C3);
        assert_eq!(one.distribution(3, 2.0).unwrap(), 0.0);
        assert_eq!(one.distribution(3, 7.0).unwrap(), 0.0);
        assert!(one.distribution(3, -1.0).is_err());

        let inv = AnalyticDatum::inverse_radius(1.0, 2.0);
        for s in [0.5, 0.7, 3.0, 10.0] {
            assert_relative_eq!(inv.distribution(3, s).unwrap(), C3 / (s * s * s), epsilon = 1e-14);
        }
        assert_relative_eq!(inv.distribution(3, 0.1).unwrap(), C3 * 8.0);

        let plateau = AnalyticDatum::plateau(1.0, 3.0, 1.0);
        assert_relative_eq!(plateau.distribution(3, 2.0).unwrap(), C3 / 8.0, epsilon = 1e-14);
        assert_eq!(plateau.distribution(3, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_radius_rearrangement_and_norms() {
        let inv = AnalyticDatum::inverse_radius(1.0, 1.0);
        for t in [1e-3, 0.1, 1.0, 4.0] {
            assert_relative_eq!(inv.rearrangement(3, t).unwrap(), (C3 / t).powf(1.0 / 3.0), epsilon = 1e-14);
        }
        assert_relative_eq!(inv.weak_norm(3).unwrap(), C3.powf(1.0 / 3.0), epsilon = 1e-15);
        assert_relative_eq!(AnalyticDatum::inverse_radius(0.7, 5.0).weak_norm(3).unwrap(), 0.7 * C3.powf(1.0 / 3.0), epsilon = 1e-15);
        // int_0^1 r^{-2} 4 pi r^2 dr = 4 pi
        assert_relative_eq!(inv.lq_norm(3, 2.0).unwrap(), (4.0 * PI).sqrt(), epsilon = 1e-14);
        assert!(inv.lq_norm(3, 3.0).unwrap().is_infinite());
    }

    #[test]
    fn plateau_rearrangement_is_capped() {
        // f* equals C_N^{1/N} t^{-1/N} only above the plateau measure C_N (R/beta)^N
        let (beta, radius) = (2.0, 1.0);
        let f = AnalyticDatum::<f64>::plateau(1.0, beta, radius);
        let corner = C3 * (radius / beta).powi(3);
        assert_relative_eq!(f.rearrangement(3, 0.5 * corner).unwrap(), beta / radius, epsilon = 1e-14);
        let t = 2.0 * corner;
        assert_relative_eq!(f.rearrangement(3, t).unwrap(), (C3 / t).powf(1.0 / 3.0), epsilon = 1e-14);
        assert_relative_eq!(f.weak_norm(3).unwrap(), C3.powf(1.0 / 3.0), epsilon = 1e-15);
    }

    #[test]
    fn plateau_ln_norm_matches_radial_integral() {
        // Independent oracle: midpoint quadrature of int |f|^N N C_N r^{N-1} dr on a fine grid.
        for n in [2usize, 3, 4] {
            for beta in [1.0, 1.5, 4.0] {
                let f = AnalyticDatum::plateau(1.0, beta, 1.0);
                let cn = ball_volume::<f64>(n as i64).unwrap();
                let m = 400_000;
                let mut sum = 0.0;
                for i in 0..m {
                    let r = (i as f64 + 0.5) / m as f64;
                    sum += f.value_at(r).powi(n as i32) * n as f64 * cn * r.powi(n as i32 - 1) / m as f64;
                }
                let closed = cn * (1.0 + n as f64 * f64::ln(beta));
                assert_relative_eq!(sum, closed, max_relative = 1e-6);
                assert_relative_eq!(f.lq_norm(n, n as f64).unwrap(), closed.powf(1.0 / n as f64), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn radial_moment_closed_forms() {
        // lambda = -1, N = 3, f = alpha / r: int_0^r s alpha / s ds = alpha r
        let f = AnalyticDatum::inverse_radius(0.5, 1.0);
        assert_relative_eq!(f.radial_moment(3, -1.0, 0.3), 0.15, epsilon = 1e-15);
        // lambda = 0, N = 2, f = 1: r^2 / 2
        let g = AnalyticDatum::constant(1.0, 1.0);
        assert_relative_eq!(g.radial_moment(2, 0.0, 0.5), 0.125, epsilon = 1e-15);
        // plateau continuity at R/beta
        let h = AnalyticDatum::<f64>::plateau(1.0, 2.0, 1.0);
        let below = h.radial_moment(4, -2.0, 0.5 - 1e-12);
        let above = h.radial_moment(4, -2.0, 0.5 + 1e-12);
        assert!((below - above).abs() < 1e-10);
    }
}
