//! Gauss–Legendre rules and collapsed (Duffy) rules on simplices.
//!
//! The simplex rules never place a point on a vertex, and the collapsed vertex
//! (vertex 0) carries the vanishing Jacobian factor, so integrands with a
//! `1/|x - v0|` singularity are integrated without loss of order.

use crate::scalar::Real;

/// Gauss–Legendre rule mapped to `[0, 1]`; weights sum to one.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1,1] -> [0,1]
            nodes[i] = T::of(0.5 * (1.0 - x));
            nodes[n - 1 - i] = T::of(0.5 * (1.0 + x));
            weights[i] = T::of(0.5 * w);
            weights[n - 1 - i] = T::of(0.5 * w);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(a + h * x))
            .sum::<T>()
            * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature rule on the reference simplex in barycentric coordinates.
/// Weights sum to one; multiply by the cell measure.
#[derive(Debug, Clone)]
pub struct SimplexRule<T> {
    pub bary: Vec<[T; 4]>,
    pub weights: Vec<T>,
}

impl<T: Real> SimplexRule<T> {
    /// Collapsed tensor rule with `n` Gauss points per direction on a triangle
    /// (`dim == 2`) or tetrahedron (`dim == 3`).
    pub fn collapsed(dim: usize, n: usize) -> Self {
        let g = GaussLegendre::<T>::new(n);
        let mut bary = Vec::new();
        let mut weights = Vec::new();
        match dim {
            2 => {
                // l1 = s(1-t), l2 = s t, Jacobian s; reference area 1/2.
                for (&s, &ws) in g.nodes.iter().zip(&g.weights) {
                    for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
                        let l1 = s * (T::one() - t);
                        let l2 = s * t;
                        bary.push([T::one() - l1 - l2, l1, l2, T::zero()]);
                        weights.push(T::of(2.0) * ws * wt * s);
                    }
                }
            }
            3 => {
                // l1 = s(1-t), l2 = s t (1-w), l3 = s t w, Jacobian s^2 t; reference volume 1/6.
                for (&s, &ws) in g.nodes.iter().zip(&g.weights) {
                    for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
                        for (&w, &ww) in g.nodes.iter().zip(&g.weights) {
                            let l1 = s * (T::one() - t);
                            let l2 = s * t * (T::one() - w);
                            let l3 = s * t * w;
                            bary.push([T::one() - l1 - l2 - l3, l1, l2, l3]);
                            weights.push(T::of(6.0) * ws * wt * ww * s * s * t);
                        }
                    }
                }
            }
            _ => panic!("simplex rules exist for dim 2 and 3 only"),
        }
        Self { bary, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..=10 {
            let g = GaussLegendre::<f64>::new(n);
            assert_relative_eq!(g.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            for deg in 0..(2 * n) {
                let exact = 1.0 / (deg as f64 + 1.0);
                let got = g.integrate(0.0, 1.0, |x| x.powi(deg as i32));
                assert_relative_eq!(got, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn collapsed_rules_integrate_monomials() {
        // Reference triangle: int l1^a l2^b = a! b! 2! / (a+b+2)! (normalised to area 1)
        let r = SimplexRule::<f64>::collapsed(2, 4);
        let sum: f64 = r.weights.iter().sum();
        assert_relative_eq!(sum, 1.0, epsilon = 1e-14);
        let got: f64 = r.bary.iter().zip(&r.weights).map(|(b, w)| w * b[1] * b[1] * b[2]).sum();
        // 2!*1!*2!/5! = 4/120
        assert_relative_eq!(got, 4.0 / 120.0, epsilon = 1e-14);

        let r3 = SimplexRule::<f64>::collapsed(3, 3);
        assert_relative_eq!(r3.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        let got: f64 = r3.bary.iter().zip(&r3.weights).map(|(b, w)| w * b[1] * b[3]).sum();
        // 1!*1!*3!/5! = 6/120
        assert_relative_eq!(got, 6.0 / 120.0, epsilon = 1e-14);
        assert!(r3.bary.iter().all(|b| b[0] < 1.0));
    }

    #[test]
    fn collapsed_rule_handles_vertex_singularity() {
        // int_T 1/|x| over the triangle (0,0),(1,0),(0,1) = sqrt(2) * asinh(1)
        let r = SimplexRule::<f64>::collapsed(2, 14);
        let v = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let got: f64 = r
            .bary
            .iter()
            .zip(&r.weights)
            .map(|(b, w)| {
                let x = b[1] * v[1][0] + b[2] * v[2][0];
                let y = b[1] * v[1][1] + b[2] * v[2][1];
                w * 0.5 / (x * x + y * y).sqrt()
            })
            .sum();
        let exact = std::f64::consts::SQRT_2 * 1.0f64.asinh();
        assert_relative_eq!(got, exact, epsilon = 1e-10);
    }
}
