use approx::assert_relative_eq;

use super::*;
use crate::function_spaces::AnalyticDatum;
use crate::grid::RadialGrid;
use crate::mesh::{disk, relative_l2_error, square, FeSpace, Grading, RadialMesh};

fn torsion(p: f64, r: f64) -> f64 {
    (p - 1.0) / p * 0.5f64.powf(1.0 / (p - 1.0)) * (1.0 - r.powf(p / (p - 1.0)))
}

fn radial_mesh(n: usize) -> RadialMesh<f64> {
    RadialMesh::new(n, &RadialGrid::geometric(1.0, 1.05, 1e-6).unwrap()).unwrap()
}

#[test]
fn truncation_examples() {
    assert_eq!(truncate(3.0, 5.0).unwrap(), 3.0);
    assert_eq!(truncate(-7.0, 5.0).unwrap(), -5.0);
    assert_eq!(gk_part(7.0, 5.0).unwrap(), 2.0);
    assert!(truncate(1.0, 0.0).is_err());
}

#[test]
fn zero_datum_gives_zero() {
    let mesh = square::<f64>(1.0, 0.25).unwrap();
    let dp = DiscreteProblem::new(&mesh, 1.5, Drift::None, Source::function(|_| 0.0));
    let rep = solve_fixed_p(&dp, None).unwrap();
    assert!(rep.iterations <= 1);
    assert!(rep.solution.iter().all(|&v| v == 0.0));
    let b = energy_and_bound(&rep, &dp, 1e-12).unwrap();
    assert_eq!((b.lhs, b.rhs, b.ok), (0.0, 0.0, true));
    let l = linf_via_levels(&mesh, &rep, 3.0).unwrap();
    assert_eq!(l.estimate, 0.0);
    assert!(l.table.is_empty());
}

#[test]
fn torsion_on_radial_mesh() {
    let mesh = radial_mesh(2);
    let dp = DiscreteProblem::new(&mesh, 1.5, Drift::None, Source::Analytic(AnalyticDatum::constant(1.0, 1.0)));
    let rep = solve_fixed_p(&dp, None).unwrap();
    let err = relative_l2_error(&mesh, &rep.solution, |r| torsion(1.5, r));
    assert!(err < 1e-3);
}

#[test]
fn cone_schedule_on_radial_mesh() {
    let mesh = radial_mesh(3);
    for alpha in [0.5, 1.0, 1.5] {
        let base = DiscreteProblem::new(&mesh, 1.2, Drift::Hardy { lambda: -1.0 }, Source::Analytic(AnalyticDatum::inverse_radius(alpha, 1.0)));
        let mut warm: Option<Vec<f64>> = None;
        for k in 0..7 {
            let p = 1.0 + 0.2 * 0.5f64.powi(k);
            let mut dp = base.with_exponent(p);
            dp.options.truncation = f64::INFINITY;
            let rep = solve_fixed_p(&dp, warm.as_deref()).unwrap();
            let err = relative_l2_error(&mesh, &rep.solution, |r| alpha.powf(1.0 / (p - 1.0)) * (1.0 - r));
            assert!(err < 1e-9, "alpha {alpha} p {p}: {err:e}");
            if rep.linf > 1e8 {
                break;
            }
            warm = Some(rep.solution);
        }
    }
}

/// Slow: reports the mesh error of the cone on a graded ball as p decreases.
#[test]
#[ignore]
fn ball_cone_timing() {
    use crate::mesh::ball;
    for h in [1.0 / 8.0, 1.0 / 12.0] {
        let t = std::time::Instant::now();
        let mesh = ball::<f64>(1.0, h, Grading::default()).unwrap();
        eprintln!("mesh nodes {} cells {} {:?}", mesh.num_nodes(), mesh.num_cells(), t.elapsed());
        let mut dp = DiscreteProblem::new(&mesh, 1.2, Drift::Hardy { lambda: -1.0 }, Source::Analytic(AnalyticDatum::inverse_radius(1.0, 1.0)));
        dp.options.truncation = f64::INFINITY;
        let rep = solve_fixed_p(&dp, None).unwrap();
        let err = relative_l2_error(&mesh, &rep.solution, |r| 1.0 - r);
        eprintln!("h {h} err {err:e} its {} hist {:?} {:?}", rep.iterations, rep.history, t.elapsed());
        let dp2 = dp.with_exponent(1.1);
        let rep2 = solve_fixed_p(&dp2, Some(&rep.solution)).unwrap();
        let err = relative_l2_error(&mesh, &rep2.solution, |r| 1.0 - r);
        eprintln!("p 1.1 err {err:e} its {} {:?}", rep2.iterations, t.elapsed());
    }
}

fn torsion_problem(mesh: &dyn FeSpace<f64>) -> DiscreteProblem<'_, f64> {
    DiscreteProblem::new(mesh, 1.5, Drift::None, Source::Analytic(AnalyticDatum::constant(1.0, 1.0)))
}

#[test]
fn torsion_on_disk_with_diagnostics() {
    let mesh = disk::<f64>(1.0, 1.0 / 32.0, Grading::Uniform).unwrap();
    let dp = torsion_problem(&mesh);
    let rep = solve_fixed_p(&dp, None).unwrap();
    assert!(rep.residual <= 1e-8);
    assert!(relative_l2_error(&mesh, &rep.solution, |r| torsion(1.5, r)) < 1e-3);
    // int |u'|^p = 2 pi int (r/2)^3 r dr = pi / 20
    let b = energy_and_bound(&rep, &dp, 1e-12).unwrap();
    assert_relative_eq!(b.lhs, std::f64::consts::PI / 20.0, max_relative = 1e-3);
    assert!(b.ok && b.rhs > b.lhs);
    let l = linf_via_levels(&mesh, &rep, 4.0).unwrap();
    assert_relative_eq!(l.estimate, torsion(1.5, 0.0), max_relative = 1e-3);
    assert!(l.decay_holds(), "worst ratio {}", l.worst_ratio);
    assert!(l.table.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 >= w[1].1));
    assert!(matches!(linf_via_levels(&mesh, &rep, 2.0), Err(crate::Error::EstimateNotGuaranteed(_))));
    assert!(rep.solution.iter().all(|&v| v >= -1e-8));
}

#[test]
fn discrete_homogeneity() {
    let mesh = disk::<f64>(1.0, 1.0 / 8.0, Grading::default()).unwrap();
    let f = |x: [f64; 3]| 1.0 + x[0] * x[0] + 0.5 * x[1];
    for (p, c) in [(1.5, 3.0), (1.2, 0.25), (1.8, 7.0)] {
        let mut opts = SolverOptions::default();
        opts.truncation = f64::INFINITY;
        opts.tolerance = 1e-10;
        let base = DiscreteProblem::new(&mesh, p, Drift::None, Source::function(f)).with_options(opts);
        let scaled = DiscreteProblem::new(&mesh, p, Drift::None, Source::function(move |x| c * f(x))).with_options(opts);
        let u = solve_fixed_p(&base, None).unwrap().solution;
        let v = solve_fixed_p(&scaled, None).unwrap().solution;
        let k = c.powf(1.0 / (p - 1.0));
        let scale = u.iter().fold(0.0f64, |m, &x| m.max(x.abs())) * k;
        for (a, b) in u.iter().zip(&v) {
            assert!((a * k - b).abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn custom_drift_damping_is_cauchy() {
    let mesh = square::<f64>(1.0, 1.0 / 8.0).unwrap();
    let drift = Drift::custom(|x: [f64; 3]| [0.1 + 0.1 * x[0] * x[1], -0.05, 0.0]);
    let mut prev: Option<Vec<f64>> = None;
    let mut diffs = Vec::new();
    for n in [1e2, 1e3, 1e4, 1e5, 1e6] {
        let mut dp = DiscreteProblem::new(&mesh, 1.5, drift.clone(), Source::function(|_| 50.0));
        dp.options.truncation = n;
        let rep = solve_fixed_p(&dp, None).unwrap();
        assert!(rep.residual <= 1e-8);
        if let Some(p) = prev {
            let d = p.iter().zip(&rep.solution).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            diffs.push(d);
        }
        prev = Some(rep.solution);
    }
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
    assert!(diffs.last().unwrap() < &(1e-2 * diffs[0]));
}

#[test]
fn warm_start_does_not_change_the_answer() {
    let mesh = radial_mesh(3);
    let f = Source::Analytic(AnalyticDatum::plateau(1.0, 1.5, 1.0));
    let base = DiscreteProblem::new(&mesh, 1.1, Drift::Hardy { lambda: -1.0 }, f);
    let cold = solve_fixed_p(&base, None).unwrap();
    let prev = solve_fixed_p(&base.with_exponent(1.2), None).unwrap();
    let warm = solve_fixed_p(&base, Some(&prev.solution)).unwrap();
    let scale = cold.linf;
    for (a, b) in cold.solution.iter().zip(&warm.solution) {
        assert!((a - b).abs() <= 1e-7 * scale);
    }
}

#[test]
fn rejects_invalid_problems() {
    let mesh = radial_mesh(3);
    let f = Source::Analytic(AnalyticDatum::inverse_radius(1.0, 1.0));
    let dp = DiscreteProblem::new(&mesh, 1.0, Drift::None, f.clone());
    assert!(matches!(solve_fixed_p(&dp, None), Err(crate::Error::InvalidExponent { .. })));
    // p / (N - p) |lambda| > 1 for p > 1.5
    let dp = DiscreteProblem::new(&mesh, 1.6, Drift::Hardy { lambda: -1.0 }, f.clone());
    assert!(matches!(solve_fixed_p(&dp, None), Err(crate::Error::InvalidExponent { .. })));
    let dp = DiscreteProblem::new(&mesh, 1.2, Drift::Hardy { lambda: -2.5 }, f.clone());
    assert!(matches!(solve_fixed_p(&dp, None), Err(crate::Error::OutOfRangeLambda { .. })));
    let dp = DiscreteProblem::new(&mesh, 1.2, Drift::None, f.clone());
    assert!(matches!(solve_fixed_p(&dp, Some(&[1.0, 2.0])), Err(crate::Error::MismatchedMeshes(_))));
    let mut dp = DiscreteProblem::new(&mesh, 1.2, Drift::None, f);
    dp.options.truncation = 0.5;
    assert!(dp.validate().is_err());
}

#[test]
fn reports_divergence() {
    let mesh = disk::<f64>(1.0, 0.25, Grading::Uniform).unwrap();
    let mut dp = torsion_problem(&mesh);
    dp.options.max_iterations = 0;
    assert!(matches!(solve_fixed_p(&dp, None), Err(crate::Error::Diverged { iterations: 0, .. })));
}

#[test]
fn bound_requires_non_supercritical_data() {
    let mesh = radial_mesh(3);
    let f = Source::Analytic(AnalyticDatum::inverse_radius(1.5, 1.0));
    let mut dp = DiscreteProblem::new(&mesh, 1.2, Drift::Hardy { lambda: -1.0 }, f);
    dp.options.truncation = f64::INFINITY;
    let rep = solve_fixed_p(&dp, None).unwrap();
    assert!(matches!(energy_and_bound(&rep, &dp, 1e-12), Err(crate::Error::BoundNotApplicable(_))));
}

#[test]
fn critical_bound_is_finite() {
    let mesh = radial_mesh(3);
    let f = Source::Analytic(AnalyticDatum::inverse_radius(1.0, 1.0));
    let mut dp = DiscreteProblem::new(&mesh, 1.1, Drift::Hardy { lambda: -1.0 }, f);
    dp.options.truncation = 1e12;
    let rep = solve_fixed_p(&dp, None).unwrap();
    let b = energy_and_bound(&rep, &dp, 1e-10).unwrap();
    assert!(b.ok && b.rhs.is_finite());
    // |grad u| = 1 so the energy is |B_1|
    assert_relative_eq!(b.lhs, 4.0 * std::f64::consts::PI / 3.0, max_relative = 1e-3);
}

#[test]
fn single_precision_solve() {
    let mesh = RadialMesh::<f32>::new(2, &RadialGrid::uniform(1.0f32, 200).unwrap()).unwrap();
    let mut dp = DiscreteProblem::new(&mesh, 1.5f32, Drift::None, Source::Analytic(AnalyticDatum::constant(1.0f32, 1.0)));
    // single precision stalls near 1e-4 on this conditioning
    dp.options.tolerance = 2e-3;
    dp.options.linear_tolerance = 1e-6;
    let rep = solve_fixed_p(&dp, None).unwrap();
    let err = relative_l2_error(&mesh, &rep.solution, |r| torsion(1.5, r as f64) as f32);
    assert!(err < 1e-2, "{err}");
}


#[test]
fn flux_inversion_round_trips() {
    use super::assemble::flux;
    for &p in &[1.003, 1.2, 1.5, 2.5] {
        for &eps in &[0.0, 1e-12, 1e-3] {
            for &g in &[1e-30, 1e-9, 1e-3, 0.7, 3.0, 1e4] {
                let (_, s) = flux::<f64>(&[g, 0.0, 0.0], p, eps);
                if s[0] > 0.0 && s[0].is_finite() {
                    assert_relative_eq!(solve::invert_flux(s[0], p, eps), g, max_relative = 1e-10);
                }
            }
        }
    }
}

#[test]
fn flux_predictor_is_exact_on_radial_meshes() {
    let mesh = radial_mesh(4);
    let mut opts = SolverOptions::default();
    opts.truncation = 1e12;
    let src = Source::Analytic(AnalyticDatum::plateau(1.0, 1.5, 1.0));
    let problem = |p| DiscreteProblem::new(&mesh, p, Drift::Hardy { lambda: -2.0 }, src.clone()).with_options(opts);
    let mut prev = solve_fixed_p(&problem(1.2), None).unwrap();
    for &p in &[1.1, 1.05, 1.025] {
        let dp = problem(p);
        let start = flux_predictor(&dp, &prev).unwrap();
        prev = solve_fixed_p(&dp, Some(&start)).unwrap();
        assert!(prev.iterations <= 1, "p = {p}: {} iterations", prev.iterations);
    }
    let other = RadialMesh::new(4, &RadialGrid::geometric(1.0, 1.1, 1e-6).unwrap()).unwrap();
    let dp = DiscreteProblem::new(&other, 1.1, Drift::None, src.clone());
    assert!(matches!(flux_predictor(&dp, &prev), Err(crate::Error::MismatchedMeshes(_))));
}
