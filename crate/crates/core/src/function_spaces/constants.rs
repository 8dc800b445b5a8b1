use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lebesgue measure of the unit ball in `R^N`, `pi^{N/2} / Gamma(N/2 + 1)`.
///
/// Evaluated through the recursion `V_N = 2 pi V_{N-2} / N`, exact in the
/// Gamma function for every integer dimension.
pub fn ball_volume<T: Real>(n: i64) -> Result<T> {
    if n <= 0 {
        return Err(Error::InvalidDimension(n, 1));
    }
    let two_pi = T::PI() + T::PI();
    let (mut v, start) = if n % 2 == 0 {
        (T::one(), 2)
    } else {
        (T::of(2.0), 3)
    };
    let mut k = start;
    while k <= n {
        v = v * two_pi / T::of(k as f64);
        k += 2;
    }
    Ok(v)
}

/// Sharp constants attached to the dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants<T> {
    pub dimension: usize,
    /// `C_N = |B_1|`.
    pub ball_volume: T,
    /// Best Sobolev constant `S_N = 1 / (N C_N^{1/N})`.
    pub sobolev: T,
    /// Best `L^{1*,1}` embedding constant `1 / ((N-1) C_N^{1/N})`.
    pub gamma_1: T,
}

/// Populates [`Constants`] for `N >= 2`.
pub fn sharp_constants<T: Real>(n: usize) -> Result<Constants<T>> {
    Constants::new(n)
}

impl<T: Real> Constants<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n as i64, 2));
        }
        let c = ball_volume::<T>(n as i64)?;
        let nf = T::of_usize(n);
        let root = c.powf(nf.recip());
        Ok(Self {
            dimension: n,
            ball_volume: c,
            sobolev: (nf * root).recip(),
            gamma_1: ((nf - T::one()) * root).recip(),
        })
    }

    fn n(&self) -> T {
        T::of_usize(self.dimension)
    }

    /// Surface measure of the unit sphere, `N C_N`.
    pub fn sphere_area(&self) -> T {
        self.n() * self.ball_volume
    }

    /// `C_N^{1/N}`, the weak-`L^N` norm of `1/|x|`.
    pub fn inverse_radius_weak_norm(&self) -> T {
        self.ball_volume.powf(self.n().recip())
    }

    /// Sharp Lorentz–Sobolev constant `gamma_p = p / ((N - p) C_N^{1/N})` for `1 <= p < N`.
    pub fn gamma_p(&self, p: T) -> Result<T> {
        self.check_exponent(p)?;
        Ok(p / ((self.n() - p) * self.inverse_radius_weak_norm()))
    }

    /// Optimal Hardy constant `(N - p) / p` for `1 <= p < N`.
    pub fn hardy(&self, p: T) -> Result<T> {
        self.check_exponent(p)?;
        Ok((self.n() - p) / p)
    }

    fn check_exponent(&self, p: T) -> Result<()> {
        if !(p >= T::one() && p < self.n()) {
            return Err(Error::InvalidExponent {
                value: p.to_f64_lossy(),
                reason: "need 1 <= p < N",
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn ball_volume_closed_forms() {
        assert_relative_eq!(ball_volume::<f64>(1).unwrap(), 2.0, epsilon = 1e-15);
        assert_relative_eq!(ball_volume::<f64>(2).unwrap(), PI, epsilon = 1e-15);
        assert_relative_eq!(ball_volume::<f64>(3).unwrap(), 4.0 * PI / 3.0, epsilon = 1e-15);
        assert_relative_eq!(ball_volume::<f64>(4).unwrap(), PI * PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(ball_volume::<f64>(5).unwrap(), 8.0 * PI * PI / 15.0, epsilon = 1e-15);
        assert!(matches!(ball_volume::<f64>(0), Err(Error::InvalidDimension(0, 1))));
        assert!(ball_volume::<f64>(-3).is_err());
    }

    #[test]
    fn two_dimensional_constants() {
        let c = sharp_constants::<f64>(2).unwrap();
        assert_relative_eq!(c.sobolev, 1.0 / (2.0 * PI.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(c.sobolev, 0.282_094_791_773_878_1, epsilon = 1e-14);
        assert_relative_eq!(c.gamma_1, 1.0 / PI.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(c.gamma_1, 0.564_189_583_547_756_3, epsilon = 1e-14);
    }

    #[test]
    fn gamma_p_at_one_is_gamma_1() {
        for n in 2..8 {
            let c = sharp_constants::<f64>(n).unwrap();
            assert_relative_eq!(c.gamma_p(1.0).unwrap(), c.gamma_1, epsilon = 1e-15);
            let cn = ball_volume::<f64>(n as i64).unwrap();
            assert_relative_eq!(c.sobolev, 1.0 / (n as f64 * cn.powf(1.0 / n as f64)), epsilon = 1e-14);
        }
        let c3 = sharp_constants::<f64>(3).unwrap();
        let expected = 1.0 / (2.0 * (4.0 * PI / 3.0).powf(1.0 / 3.0));
        assert_relative_eq!(c3.gamma_p(1.0).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn limits_as_p_tends_to_one() {
        for n in 2..6 {
            let c = sharp_constants::<f64>(n).unwrap();
            let mut prev_gap = f64::INFINITY;
            for k in 1..=6 {
                let p = 1.0 + 10f64.powi(-k);
                let gap = (c.gamma_p(p).unwrap() - c.gamma_1).abs();
                assert!(gap < prev_gap);
                prev_gap = gap;
                assert_relative_eq!(c.hardy(p).unwrap(), n as f64 - 1.0, epsilon = 2.0 * n as f64 * 10f64.powi(-k));
            }
            assert!(prev_gap < 1e-5);
        }
    }

    #[test]
    fn monotonicity_in_p() {
        let c = sharp_constants::<f64>(4).unwrap();
        let ps: Vec<f64> = (1..40).map(|i| 1.0 + 0.075 * i as f64).collect();
        for w in ps.windows(2) {
            assert!(c.gamma_p(w[1]).unwrap() > c.gamma_p(w[0]).unwrap());
            assert!(c.hardy(w[1]).unwrap() < c.hardy(w[0]).unwrap());
        }
        assert!(c.gamma_p(4.0).is_err());
        assert!(c.hardy(0.5).is_err());
    }

    #[test]
    fn single_precision_agrees() {
        let c32 = sharp_constants::<f32>(3).unwrap();
        let c64 = sharp_constants::<f64>(3).unwrap();
        assert!((c32.sobolev as f64 - c64.sobolev).abs() < 1e-6);
        assert!((c32.gamma_1 as f64 - c64.gamma_1).abs() < 1e-6);
    }
}
