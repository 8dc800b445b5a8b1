use plap_core::function_spaces::AnalyticDatum;
use plap_core::mesh::{ball, relative_l2_error, Grading};
use plap_core::solver::{solve_fixed_p, DiscreteProblem, Drift, SolverOptions, Source};

#[test]
#[ignore = "three-dimensional mesh with about 340k nodes"]
fn critical_cone_on_the_ball_at_p_1_2() {
    let mesh = ball::<f64>(1.0, 1.0 / 24.0, Grading::default()).unwrap();
    let dp = DiscreteProblem::new(&mesh, 1.2, Drift::Hardy { lambda: -1.0 }, Source::Analytic(AnalyticDatum::inverse_radius(1.0, 1.0)))
        .with_options(SolverOptions {
            truncation: 1e12,
            ..SolverOptions::default()
        });
    let rep = solve_fixed_p(&dp, None).unwrap();
    let err = relative_l2_error(&mesh, &rep.solution, |r| 1.0 - r);
    println!("relative L2 error {err:.3e}, sup {:.4}", rep.linf);
    assert!(err < 5e-3, "{err}");
}
