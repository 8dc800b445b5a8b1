use approx::assert_relative_eq;

use super::*;
use crate::error::Error;
use crate::function_spaces::AnalyticDatum;
use crate::grid::RadialGrid;
use crate::trichotomy::{geometric_schedule, Trichotomy};

fn inverse_radius(alpha: f64, p: f64) -> RadialProblem<f64> {
    RadialProblem::new(3, 1.0, -1.0, RadialProfile::Analytic(AnalyticDatum::inverse_radius(alpha, 1.0)), p).unwrap()
}

fn torsion(p: f64) -> RadialProblem<f64> {
    RadialProblem::new(2, 1.0, 0.0, RadialProfile::Analytic(AnalyticDatum::constant(1.0, 1.0)), p).unwrap()
}

fn grid() -> RadialGrid<f64> {
    RadialOptions::default().grid(1.0).unwrap()
}

#[test]
fn flux_closed_forms() {
    let g = grid();
    let v = flux_potential(&inverse_radius(0.7, 1.5), &g).unwrap();
    for (r, v) in g.nodes().iter().zip(&v) {
        assert_relative_eq!(*v, -0.7 * r * r, epsilon = 1e-15);
    }
    let v = flux_potential(&torsion(1.5), &g).unwrap();
    for (r, v) in g.nodes().iter().zip(&v) {
        assert_relative_eq!(*v, -r * r / 2.0, epsilon = 1e-15);
    }
    let zero = torsion(1.5).with_profile(RadialProfile::Analytic(AnalyticDatum::constant(0.0, 1.0))).unwrap();
    assert!(flux_potential(&zero, &g).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn cone_solution_is_exact() {
    let g = grid();
    for p in [1.5, 1.1, 1.01] {
        for alpha in [0.5, 1.0, 1.5] {
            let sol = radial_solution(&inverse_radius(alpha, p), &g).unwrap();
            let c = f64::powf(alpha, 1.0 / (p - 1.0));
            for (r, u) in sol.nodes.iter().zip(&sol.values) {
                assert_relative_eq!(*u, c * (1.0 - r), max_relative = 1e-12, epsilon = 1e-300);
            }
            let res = strong_residual(&inverse_radius(alpha, p), &sol);
            assert!(res.iter().all(|e| *e < 1e-10), "p={p} alpha={alpha}");
            assert!(consistency_residual(&sol) < 1e-12);
        }
    }
}

#[test]
fn torsion_matches_closed_form() {
    let p = 1.5;
    let sol = radial_solution(&torsion(p), &grid()).unwrap();
    let c = (p - 1.0) / p * 0.5f64.powf(1.0 / (p - 1.0));
    for (r, u) in sol.nodes.iter().zip(&sol.values) {
        assert_relative_eq!(*u, c * (1.0 - r.powf(p / (p - 1.0))), epsilon = 1e-12);
    }
    assert_relative_eq!(sol.sup(), 1.0 / 12.0, epsilon = 1e-12);
}

#[test]
fn zero_datum_gives_zero() {
    let prob = torsion(1.3).with_profile(RadialProfile::Analytic(AnalyticDatum::constant(0.0, 1.0))).unwrap();
    let sol = radial_solution(&prob, &grid()).unwrap();
    assert!(sol.values.iter().all(|u| *u == 0.0));
}

#[test]
fn rejects_negative_data_and_bad_parameters() {
    let neg = RadialProfile::Analytic(AnalyticDatum::constant(-1.0, 1.0));
    assert!(matches!(RadialProblem::new(2, 1.0, 0.0, neg, 1.5), Err(Error::UnsupportedDatum(_))));
    let tab = RadialProfile::tabulated(vec![0.0, 0.5, 1.0], vec![1.0, -1.0, 1.0]).unwrap();
    assert!(RadialProblem::new(2, 1.0, 0.0, tab, 1.5).is_err());
    let f = RadialProfile::Analytic(AnalyticDatum::constant(1.0, 1.0));
    assert!(RadialProblem::new(3, 1.0, 2.0, f.clone(), 1.5).is_err());
    assert!(RadialProblem::new(3, 1.0, 0.0, f.clone(), 1.0).is_err());
    assert!(RadialProblem::new(3, 2.0, 0.0, f, 1.5).is_err());
}

#[test]
fn blow_up_at_origin_is_reported() {
    // f = r^{-1.8} sampled on a table: w ~ r^{-0.8}, |w|^{1/(p-1)} not integrable for p = 1.5
    let radii: Vec<f64> = (0..=200).map(|i| (i as f64 / 200.0).powi(4)).collect();
    let values: Vec<f64> = radii.iter().map(|&r| if r == 0.0 { 1e12 } else { r.powf(-1.8).min(1e12) }).collect();
    let prob = RadialProblem::new(3, 1.0, 0.0, RadialProfile::tabulated(radii, values).unwrap(), 1.5).unwrap();
    let g = RadialGrid::geometric(1.0, 1.05, 1e-2).unwrap();
    assert!(matches!(radial_solution(&prob, &g), Err(Error::BlowUpAtOrigin { .. })));
}

#[test]
fn refinement_reduces_residual() {
    // N = 3 torsion: v = -r^3 / 3 is not reproduced exactly by the difference stencil
    let prob = RadialProblem::new(3, 1.0, 0.0, RadialProfile::Analytic(AnalyticDatum::constant(1.0, 1.0)), 1.5).unwrap();
    let mut g = RadialGrid::uniform(1.0, 20).unwrap();
    let mut last = f64::INFINITY;
    for _ in 0..4 {
        let sol = radial_solution(&prob, &g).unwrap();
        // the first nodes never resolve r^3 relative to its size, so compare away from the origin
        let res = strong_residual(&prob, &sol)
            .into_iter()
            .zip(&sol.nodes[1..])
            .filter(|(_, r)| **r >= 0.1)
            .fold(0.0, |m, (e, _)| f64::max(m, e));
        assert!(last / res >= 1.8, "{last} -> {res}");
        last = res;
        g = g.refine();
    }
}

#[test]
fn trichotomy_of_inverse_radius_family() {
    let ps = geometric_schedule(1.2, 7);
    for (alpha, want) in [(0.5, Trichotomy::Degenerate), (1.0, Trichotomy::Nontrivial), (1.5, Trichotomy::Unbounded), (0.999, Trichotomy::Degenerate)] {
        let rec = limit_p_to_one(&inverse_radius(alpha, 1.2), &ps, &RadialOptions::default(), &LimitOptions::default()).unwrap();
        assert_eq!(rec.classification().unwrap(), want, "alpha = {alpha}");
        if alpha == 1.0 {
            for (r, u) in rec.limit_profile() {
                assert_relative_eq!(u, 1.0 - r, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn plateau_is_degenerate() {
    let prob = RadialProblem::new(4, 1.0, -2.0, RadialProfile::Analytic(AnalyticDatum::plateau(1.0, 1.5, 1.0)), 1.2).unwrap();
    let rec = limit_p_to_one(&prob, &geometric_schedule(1.2, 7), &RadialOptions::default(), &LimitOptions::default()).unwrap();
    assert_eq!(rec.classification().unwrap(), Trichotomy::Degenerate);
    assert!(rec.sup_norms.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn certificate_for_critical_instance() {
    let g = grid();
    for n in [2usize, 3, 4] {
        let lambda = -(n as f64 - 2.0);
        let prob = RadialProblem::new(n, 1.0, lambda, RadialProfile::Analytic(AnalyticDatum::inverse_radius(1.0, 1.0)), 1.1).unwrap();
        let certs = radial_limit_certificate(&prob, &g);
        assert_eq!(certs.len(), 2);
        for c in &certs {
            assert!(c.passes(1e-12), "{c:?}");
        }
    }
}

#[test]
fn wrong_datum_fails_certificate() {
    let prob = RadialProblem::new(3, 1.0, -1.0, RadialProfile::Analytic(AnalyticDatum::inverse_radius(1.1, 1.0)), 1.1).unwrap();
    assert!(radial_limit_certificate(&prob, &grid()).iter().all(|c| !c.passes(1e-3)));
}

#[test]
fn forward_datum_round_trip() {
    let g = RadialGrid::<f64>::geometric(1.0, 1.05, 1e-4).unwrap();
    for (r, f) in forward_datum(2, -0.5, &g) {
        assert_relative_eq!(f, 0.5 / r, max_relative = 1e-12);
    }
}

#[test]
fn weighted_identity_holds() {
    let g = grid();
    let prob = inverse_radius(0.8, 1.3);
    let sol = radial_solution(&prob, &g).unwrap();
    assert!(weighted_identity_residual(&prob, &sol) < 1e-10);
}
