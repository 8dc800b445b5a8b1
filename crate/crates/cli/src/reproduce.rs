//! The example bundles: certificate residuals for the critical `1/|x|` instance,
//! the critical-but-degenerate plateau trace, and the `alpha/|x|` trichotomy table.

use std::fmt::Write as _;

use plap_core::continuation::{
    cone_pair, richardson_limit, run_schedule, verify_certificate, CertificateOptions, Corruption, LimitEstimate,
    Schedule, ScheduleRun,
};
use plap_core::function_spaces::{threshold_classify, AnalyticDatum, Datum, Regime, ThresholdReport};
use plap_core::mesh::{relative_l2_error, FeSpace, RadialMesh};
use plap_core::output::{format_number, plot_csv};
use plap_core::radial::{
    limit_p_to_one, radial_limit_certificate, radial_solution_with, LimitOptions, RadialCertificate, RadialProblem, RadialProfile,
};
use plap_core::solver::{energy_and_bound, level_decay, DiscreteProblem, Drift, Source, SolverOptions};
use plap_core::Trichotomy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::{pass, radial_options};
use crate::config::RunConfig;
use crate::{radial_grid, sampling_grid, Artifacts, CliError, Report};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub bundle: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, bundle: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            bundle,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

fn num(x: f64) -> String {
    format_number(x)
}

fn run_cone(
    cfg: &RunConfig,
    mesh: &RadialMesh<f64>,
    lambda: f64,
    datum: AnalyticDatum<f64>,
) -> Result<(ScheduleRun<f64>, Result<LimitEstimate<f64>, plap_core::Error>), CliError> {
    let schedule = Schedule {
        exponents: cfg.schedule.clone(),
        solver: cfg.solver,
    };
    let run = run_schedule(mesh, &Drift::Hardy { lambda }, &Source::Analytic(datum), &schedule, &cfg.continuation)?;
    let lim = richardson_limit(mesh, &run, &cfg.continuation);
    Ok((run, lim))
}

/// Energy bound and level-set decay at every step.
fn uniform_bounds(
    mesh: &dyn FeSpace<f64>,
    run: &ScheduleRun<f64>,
    lambda: f64,
    datum: AnalyticDatum<f64>,
    solver: SolverOptions<f64>,
) -> Result<(bool, bool, String), CliError> {
    let (mut energy_ok, mut decay_ok) = (true, true);
    let mut worst: f64 = 0.0;
    for r in &run.reports {
        let dp = DiscreteProblem::new(mesh, r.exponent, Drift::Hardy { lambda }, Source::Analytic(datum)).with_options(solver);
        let b = energy_and_bound(r, &dp, 1e-10)?;
        energy_ok &= b.ok;
        worst = worst.max(b.lhs / b.rhs);
        decay_ok &= level_decay(mesh, r)?.decay_holds();
    }
    Ok((energy_ok, decay_ok, format!("max energy / bound = {}", num(worst))))
}

#[derive(Serialize)]
struct Example71 {
    dimension: usize,
    lambda: f64,
    analytic: ThresholdReport<f64>,
    sampled: ThresholdReport<f64>,
    radial_candidates: Vec<RadialCertificate<f64>>,
    mesh: Vec<(Corruption, plap_core::continuation::LimitCertificate<f64>)>,
}

fn example_7_1(cfg: &RunConfig, checks: &mut Checks) -> Result<(), CliError> {
    const B: &str = "example-7-1";
    let radius = cfg.problem.radius;
    let grid = radial_grid(cfg)?;
    let fine = sampling_grid(cfg)?;
    let mut csv = String::from("N,pair,z_sup,residual_pde,residual_pairing,residual_boundary,failed,expected\n");
    let mut bundle = Vec::new();
    for n in [3usize, 4, 5] {
        let lambda = -(n as f64 - 2.0);
        let datum = AnalyticDatum::inverse_radius(1.0, radius);
        let analytic = threshold_classify(lambda, &Datum::Analytic(datum), None, n, None)?;
        let sampled = threshold_classify(lambda, &Datum::Analytic(datum).sample_on(&fine, n)?, None, n, None)?;
        checks.add(B, format!("N={n} analytic threshold"), (analytic.theta_lorentz - 1.0).abs() <= 1e-10, num(analytic.theta_lorentz));
        checks.add(B, format!("N={n} sampled threshold"), (sampled.theta_lorentz - 1.0).abs() <= 1e-4, num(sampled.theta_lorentz));

        // any admissible exponent: the candidate pairs do not depend on p
        let prob = RadialProblem::new(n, radius, lambda, RadialProfile::Analytic(datum), 1.1)?;
        let candidates = radial_limit_certificate(&prob, &grid);
        for c in &candidates {
            checks.add(B, format!("N={n} radial {:?} certificate", c.profile), c.passes(1e-8), num(c.residual_pde));
        }

        let mesh = RadialMesh::new(n, &grid)?;
        let drift = Drift::Hardy { lambda };
        let mut rows = Vec::new();
        for corruption in Corruption::ALL {
            let case = cone_pair(&mesh, radius, corruption);
            let cert = verify_certificate(&mesh, &case.u, &case.z, &drift, &case.source, &CertificateOptions::default())?;
            let failed = cert.failed_checks();
            let expected: Vec<&str> = corruption.target().into_iter().collect();
            checks.add(
                B,
                format!("N={n} pair {corruption:?}"),
                failed == expected,
                format!("failed [{}], expected [{}]", failed.join(" "), expected.join(" ")),
            );
            let _ = writeln!(
                csv,
                "{n},{corruption:?},{},{},{},{},{},{}",
                num(cert.z_sup),
                num(cert.residual_pde),
                num(cert.residual_pairing),
                num(cert.residual_boundary),
                failed.join(" "),
                expected.join(" ")
            );
            rows.push((corruption, cert));
        }
        bundle.push(Example71 {
            dimension: n,
            lambda,
            analytic,
            sampled,
            radial_candidates: candidates,
            mesh: rows,
        });
    }
    let art = Artifacts::new(cfg, B);
    art.csv("certificates.csv", &csv)?;
    art.json("certificates.json", &bundle)?;
    Ok(())
}

#[derive(Serialize)]
struct Example72 {
    beta: f64,
    threshold: ThresholdReport<f64>,
    oracle_classification: Option<Trichotomy>,
    oracle_sup_norms: Vec<f64>,
    mesh_sup_norms: Vec<f64>,
    limit: Option<LimitEstimate<f64>>,
}

fn example_7_2(cfg: &RunConfig, checks: &mut Checks) -> Result<(), CliError> {
    const B: &str = "example-7-2";
    let (n, lambda, radius, beta) = (4usize, -2.0, cfg.problem.radius, cfg.problem.beta);
    let datum = AnalyticDatum::plateau(1.0, beta, radius);
    let threshold = threshold_classify(lambda, &Datum::Analytic(datum), None, n, None)?;
    checks.add(B, "Lorentz threshold equals 1", (threshold.theta_lorentz - 1.0).abs() <= 1e-10, num(threshold.theta_lorentz));
    checks.add(B, "L^N threshold below 1", threshold.theta_ln < 1.0, num(threshold.theta_ln));

    let prob = RadialProblem::new(n, radius, lambda, RadialProfile::Analytic(datum), cfg.schedule[0])?;
    let record = limit_p_to_one(&prob, &cfg.schedule, &radial_options(cfg), &LimitOptions::default())?;
    checks.add(
        B,
        "oracle classification",
        record.classification == Some(Trichotomy::Degenerate),
        format!("{:?}", record.classification),
    );

    let mesh = RadialMesh::new(n, &radial_grid(cfg)?)?;
    let (run, lim) = run_cone(cfg, &mesh, lambda, datum)?;
    let sups = run.sup_norms();
    let monotone = sups.windows(2).all(|w| w[1] < w[0]);
    checks.add(B, "sup norms decrease", monotone && run.is_complete(), format!("{} steps", run.reports.len()));
    let lim = lim.ok();
    let (class, slope) = lim.as_ref().map_or((None, f64::NAN), |l| (Some(l.classification), l.sup_slope.slope));
    checks.add(B, "continuation classification", class == Some(Trichotomy::Degenerate), format!("{class:?}"));
    checks.add(B, "log-slope below -0.05", slope < -0.05, num(slope));
    let (energy_ok, decay_ok, detail) = uniform_bounds(&mesh, &run, lambda, datum, cfg.solver)?;
    checks.add(B, "energy bound", energy_ok, detail);
    checks.add(B, "level-set decay", decay_ok, "");

    let mut csv = String::from("p,sup_oracle,sup_mesh,energy\n");
    for (k, &p) in cfg.schedule.iter().enumerate() {
        let energy = run.reports.get(k).map_or(f64::NAN, |r| r.energy);
        let _ = writeln!(csv, "{},{},{},{}", num(p), num(record.sup_norms[k]), num(sups[k]), num(energy));
    }
    let art = Artifacts::new(cfg, B);
    art.csv("degeneracy.csv", &csv)?;
    art.csv("plot.csv", &plot_csv(&[("plateau".to_string(), &run)])?)?;
    art.json(
        "degeneracy.json",
        &Example72 {
            beta,
            threshold,
            oracle_classification: record.classification,
            oracle_sup_norms: record.sup_norms,
            mesh_sup_norms: sups,
            limit: lim,
        },
    )?;
    Ok(())
}

/// The classification a log-slope fit with tolerance `tol` gives for `alpha^{1/(p-1)}`.
fn resolved_class(alpha: f64, tol: f64) -> Trichotomy {
    let s = alpha.ln();
    if s < -tol {
        Trichotomy::Degenerate
    } else if s > tol {
        Trichotomy::Unbounded
    } else {
        Trichotomy::Nontrivial
    }
}

#[derive(Serialize)]
struct Example73Row {
    alpha: f64,
    theta: f64,
    regime: Regime,
    expected: Trichotomy,
    oracle: Option<Trichotomy>,
    continuation: Option<Trichotomy>,
    sup_norms: Vec<f64>,
    profile_l2_error: Option<f64>,
}

fn example_7_3(cfg: &RunConfig, alphas: &[f64], checks: &mut Checks, lines: &mut Vec<String>) -> Result<(), CliError> {
    const B: &str = "example-7-3";
    let pr = &cfg.problem;
    let (n, lambda, radius) = (pr.dimension, pr.lambda, pr.radius);
    let mesh = RadialMesh::new(n, &radial_grid(cfg)?)?;
    let guard = cfg.continuation.guard;
    let mut table = String::from("alpha,theta,regime,expected,oracle,continuation\n");
    let mut ratios = String::from("alpha,p,sup_mesh,sup_predicted,relative_error\n");
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &alpha in alphas {
        let datum = AnalyticDatum::inverse_radius(alpha, radius);
        let th = threshold_classify(lambda, &Datum::Analytic(datum), None, n, None)?;
        let expected = match th.governing_regime {
            Regime::Subcritical => Trichotomy::Degenerate,
            Regime::Critical => Trichotomy::Nontrivial,
            Regime::Supercritical => Trichotomy::Unbounded,
        };
        let prob = RadialProblem::new(n, radius, lambda, RadialProfile::Analytic(datum), cfg.schedule[0])?;
        let record = limit_p_to_one(&prob, &cfg.schedule, &radial_options(cfg), &LimitOptions::default())?;
        checks.add(B, format!("alpha={alpha} oracle"), record.classification == Some(expected), format!("{:?}", record.classification));

        let (run, lim) = run_cone(cfg, &mesh, lambda, datum)?;
        let class = lim.as_ref().ok().map(|l| l.classification);
        let mesh_expected = resolved_class(alpha, cfg.continuation.slope_tolerance);
        checks.add(B, format!("alpha={alpha} continuation"), class == Some(mesh_expected), format!("{class:?}"));

        // the cone alpha^{1/(p-1)} (R - r) peaks at r = 0
        let sups = run.sup_norms();
        let mut ratio_ok = true;
        let mut worst: f64 = 0.0;
        for (&p, &s) in cfg.schedule.iter().zip(&sups) {
            let predicted = alpha.powf(1.0 / (p - 1.0)) * radius;
            let err = if s.is_finite() { (s / predicted - 1.0).abs() } else { f64::NAN };
            if s.is_finite() {
                worst = worst.max(err);
                ratio_ok &= err <= 0.05;
            } else {
                ratio_ok &= predicted > guard;
            }
            let _ = writeln!(ratios, "{alpha},{},{},{},{}", num(p), num(s), num(predicted), num(err));
        }
        checks.add(B, format!("alpha={alpha} sup-norm ratios"), ratio_ok, format!("max relative error {}", num(worst)));

        // the critical amplitude has the cone R - r as its limit
        let mut profile_err = None;
        if alpha == 1.0 {
            let profile = lim.as_ref().ok().and_then(|l| l.profile.as_ref());
            let e = profile.map_or(f64::INFINITY, |u| relative_l2_error(&mesh, u, |r| radius - r));
            checks.add(B, format!("alpha={alpha} limit profile"), e <= 0.02, num(e));
            profile_err = Some(e);
        }
        if th.governing_regime != Regime::Supercritical && run.failure.is_none() {
            let (energy_ok, decay_ok, detail) = uniform_bounds(&mesh, &run, lambda, datum, cfg.solver)?;
            checks.add(B, format!("alpha={alpha} energy bound"), energy_ok, detail);
            checks.add(B, format!("alpha={alpha} level-set decay"), decay_ok, "");
        }
        let reported = record.classification;
        lines.push(format!(
            "alpha = {alpha}: {} (oracle), {} (continuation)",
            reported.map_or("inconclusive".to_string(), |c| format!("{c:?}")),
            class.map_or("none".to_string(), |c| format!("{c:?}"))
        ));
        let _ = writeln!(
            table,
            "{alpha},{},{:?},{expected:?},{:?},{:?}",
            num(th.governing_theta()),
            th.governing_regime,
            reported,
            class
        );
        rows.push(Example73Row {
            alpha,
            theta: th.governing_theta(),
            regime: th.governing_regime,
            expected,
            oracle: reported,
            continuation: class,
            sup_norms: sups,
            profile_l2_error: profile_err,
        });
        runs.push((format!("alpha={alpha}"), run));
    }
    let art = Artifacts::new(cfg, B);
    art.csv("trichotomy.csv", &table)?;
    art.csv("ratios.csv", &ratios)?;
    let refs: Vec<(String, &ScheduleRun<f64>)> = runs.iter().map(|(l, r)| (l.clone(), r)).collect();
    art.csv("plot.csv", &plot_csv(&refs)?)?;
    art.json("trichotomy.json", &rows)?;
    Ok(())
}

/// Seeded homogeneity battery on random radial instances.
fn homogeneity(cfg: &RunConfig, checks: &mut Checks) -> Result<(), CliError> {
    const B: &str = "properties";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ro = radial_options(cfg);
    let mut csv = String::from("N,lambda,p,datum,c,relative_error\n");
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=5usize);
        let nf = n as f64;
        let p = rng.gen_range(1.1..(1.9f64).min(nf - 0.1));
        let lam_max = 0.9 * (nf - 1.0).min((nf - p) / p);
        let lambda = rng.gen_range(-lam_max..lam_max);
        let alpha = rng.gen_range(0.2..2.0);
        let datum = match rng.gen_range(0..3) {
            0 => AnalyticDatum::constant(alpha, 1.0),
            1 => AnalyticDatum::inverse_radius(alpha, 1.0),
            _ => AnalyticDatum::plateau(alpha, rng.gen_range(1.2..3.0), 1.0),
        };
        let c = rng.gen_range(0.25..4.0);
        let prob = RadialProblem::new(n, 1.0, lambda, RadialProfile::Analytic(datum), p)?;
        let grid = ro.grid(1.0)?;
        let u = radial_solution_with(&prob, &grid, ro.gauss_points)?;
        let uc = radial_solution_with(&prob.with_profile(RadialProfile::Analytic(datum.scaled(c)))?, &grid, ro.gauss_points)?;
        let k = c.powf(1.0 / (p - 1.0));
        let scale = k * u.sup();
        let err = u.values.iter().zip(&uc.values).map(|(a, b)| (k * a - b).abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(err);
        let _ = writeln!(csv, "{n},{},{},{datum:?},{},{}", num(lambda), num(p), num(c), num(err));
    }
    checks.add(B, "homogeneity battery", worst <= 1e-10, format!("max relative error {}", num(worst)));
    Artifacts::new(cfg, B).csv("homogeneity.csv", &csv)?;
    Ok(())
}

/// Writes the bundles and runs their checks; a failed check gives exit status 4.
pub fn reproduce(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut checks = Checks::default();
    let mut lines = Vec::new();
    if cfg.alpha_given {
        example_7_3(cfg, &[cfg.problem.alpha], &mut checks, &mut lines)?;
    } else {
        example_7_1(cfg, &mut checks)?;
        example_7_2(cfg, &mut checks)?;
        example_7_3(cfg, &[0.5, 1.0, 1.5], &mut checks, &mut lines)?;
        homogeneity(cfg, &mut checks)?;
    }
    for c in &checks.0 {
        lines.push(format!("{} {}/{}: {}", pass(c.passed), c.bundle, c.name, c.detail));
    }
    Artifacts::new(cfg, "").json("checks.json", &checks.0)?;
    let failed = checks.0.iter().filter(|c| !c.passed).count();
    lines.push(format!("{} checks, {failed} failed", checks.0.len()));
    let status = if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Check(format!("{failed} of {} checks failed", checks.0.len())))
    };
    Ok(Report { lines, status })
}
