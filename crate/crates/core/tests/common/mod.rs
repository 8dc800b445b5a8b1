//! Checks shared by the property suite and the acceptance run.
#![allow(dead_code)]

use plap_core::function_spaces::{
    decreasing_rearrangement, distribution_function, hardy_check, lorentz_one_norm, lorentz_weak_norm, rearranged_product,
    uniform_partition, AnalyticDatum, Datum, ScalarField,
};
use plap_core::grid::RadialGrid;
use plap_core::mesh::{cell_gradient, interpolate, FeSpace, RadialMesh};
use plap_core::scalar::norm;
use plap_core::solver::{solve_fixed_p, DiscreteProblem, Drift, SolverOptions, Source};

pub fn datum(kind: u8, alpha: f64, beta: f64) -> AnalyticDatum<f64> {
    match kind % 3 {
        0 => AnalyticDatum::constant(alpha, 1.0),
        1 => AnalyticDatum::inverse_radius(alpha, 1.0),
        _ => AnalyticDatum::plateau(alpha, beta, 1.0),
    }
}

/// Drift coefficient `s * 0.8 (N - p) / p`, so that `|lambda| p / (N - p) <= 0.8`.
pub fn coercive_lambda(n: usize, p: f64, s: f64) -> f64 {
    let nf = n as f64;
    (s * 0.8 * (nf - p) / p).clamp(-(nf - 1.0) * 0.99, (nf - 1.0) * 0.99)
}

pub fn drift(lambda: f64) -> Drift<f64> {
    if lambda == 0.0 {
        Drift::None
    } else {
        Drift::Hardy { lambda }
    }
}

pub fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `max |c^{1/(p-1)} u(f) - u(cf)| / ||u(cf)||_inf` and `min u(f) / ||u(f)||_inf` on a radial mesh.
pub fn discrete_homogeneity(n: usize, p: f64, lambda: f64, d: AnalyticDatum<f64>, c: f64) -> (f64, f64, f64) {
    let mesh = RadialMesh::new(n, &RadialGrid::geometric(1.0, 1.1, 1e-4).unwrap()).unwrap();
    let opts = SolverOptions {
        truncation: f64::INFINITY,
        ..SolverOptions::default()
    };
    let solve = |d: AnalyticDatum<f64>| {
        solve_fixed_p(&DiscreteProblem::new(&mesh, p, drift(lambda), Source::Analytic(d)).with_options(opts), None).unwrap()
    };
    let (a, b) = (solve(d), solve(d.scaled(c)));
    let k = c.powf(1.0 / (p - 1.0));
    let err = a.solution.iter().zip(&b.solution).map(|(x, y)| (k * x - y).abs()).fold(0.0, f64::max) / sup(&b.solution);
    let min = a.solution.iter().copied().fold(f64::INFINITY, f64::min) / sup(&a.solution);
    (err, min, opts.tolerance)
}

/// Hardy inequality for the P1 function with nodal values
/// `sum_k a_k cos((2k+1) pi r / 2) + rough[i mod len]` on a radial mesh.
pub fn hardy_holds(n: usize, p: f64, coeffs: &[f64], rough: &[f64]) -> bool {
    let mesh = RadialMesh::new(n, &RadialGrid::geometric(1.0, 1.05, 1e-6).unwrap()).unwrap();
    let u: Vec<f64> = (0..mesh.num_nodes())
        .map(|i| {
            if mesh.is_dirichlet(i) {
                return 0.0;
            }
            let r = norm(&mesh.node_position(i));
            let smooth: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a * ((2 * k + 1) as f64 * std::f64::consts::FRAC_PI_2 * r).cos())
                .sum();
            smooth + rough[i % rough.len()]
        })
        .collect();
    let (mut vals, mut wts, mut coords, mut grads) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for c in 0..mesh.num_cells() {
        let g = norm(&cell_gradient(&mesh, c, &u));
        mesh.visit_quadrature(c, &mut |q| {
            vals.push(interpolate(&mesh, c, &u, q));
            wts.push(q.weight);
            coords.extend_from_slice(&q.x);
            grads.push(g);
        });
    }
    let f = ScalarField::with_points(vals, wts, coords, 3).unwrap();
    hardy_check(&f, &grads, p, n).unwrap().holds(0.0)
}

/// `int f g <= int f* g*` with relative slack `1e-8`, for nonnegative fields.
pub fn hardy_littlewood_holds(f: &ScalarField<f64>, g: &ScalarField<f64>) -> bool {
    f.inner_product(g).unwrap() <= rearranged_product(f, g) * (1.0 + 1e-8) + 1e-300
}

/// `|int f g| <= ||f||_{N,inf} ||g||_{N',1}` with relative slack `1e-6`.
pub fn lorentz_holder_holds(f: &ScalarField<f64>, g: &ScalarField<f64>, n: usize) -> bool {
    let q = n as f64 / (n as f64 - 1.0);
    f.inner_product(g).unwrap().abs() <= lorentz_weak_norm(f, n) * lorentz_one_norm(g, q) * (1.0 + 1e-6) + 1e-300
}

/// Distribution of the sampled preset and of its rearrangement against the
/// closed form at level `s`; the allowed defect is one shell plus one partition cell.
pub fn preset_equimeasurable(n: usize, d: AnalyticDatum<f64>, s: f64) -> bool {
    let grid = RadialGrid::geometric(1.0, 1.01, 1e-6).unwrap();
    let Datum::Sampled(f) = Datum::Analytic(d).sample_on(&grid, n).unwrap() else {
        unreachable!("analytic data sample to fields")
    };
    let shell = f.weights().iter().fold(0.0f64, |m, &w| m.max(w));
    let exact = d.distribution(n, s).unwrap();
    let star = decreasing_rearrangement(&f, &uniform_partition(f.measure(), 400)).unwrap();
    (distribution_function(&f, s).unwrap() - exact).abs() <= shell && (star.distribution(s) - exact).abs() <= shell + star.resolution()
}

/// Largest level to probe for a preset: its value at the first positive node.
pub fn preset_top(d: &AnalyticDatum<f64>) -> f64 {
    let grid = RadialGrid::geometric(1.0, 1.01, 1e-6).unwrap();
    d.value_at(grid.nodes()[1])
}
