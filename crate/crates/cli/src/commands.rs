use std::path::Path;

use plap_core::continuation::{
    cone_pair, extract_z, richardson_limit, run_schedule, verify_certificate, CertificateOptions, Corruption, LimitCertificate,
    LimitEstimate, Schedule, ScheduleRun, ZField, ZNorms,
};
use plap_core::function_spaces::{threshold_classify, Datum, ThresholdReport};
use plap_core::mesh::{relative_l2_error, FeSpace};
use plap_core::output::{field_csv, format_number, plot_csv, radial_csv, read_field_csv};
use plap_core::radial::{
    limit_p_to_one, radial_limit_certificate, radial_solution_with, strong_residual, LimitOptions, RadialCertificate, RadialOptions,
    RadialProblem, RadialProfile, TrichotomyRecord,
};
use plap_core::solver::{energy_and_bound, level_decay, linf_via_levels, solve_fixed_p, DiscreteProblem, EnergyBound, LevelEstimate, SolveReport};
use plap_core::Error;
use serde::Serialize;

use crate::config::{DatumKind, PairKind, RunConfig};
use crate::{drift_of, sampling_grid, source_of, Artifacts, CliError, Report, Space};

fn num(x: f64) -> String {
    format_number(x)
}

#[derive(Serialize)]
struct ThresholdResult {
    analytic: ThresholdReport<f64>,
    /// The analytic datum sampled on the graded radial grid.
    sampled: ThresholdReport<f64>,
    /// The datum read from `--field`, if any.
    ingested: Option<ThresholdReport<f64>>,
}

pub fn threshold(cfg: &RunConfig, field: Option<&Path>) -> Result<Report, CliError> {
    let p = &cfg.problem;
    let datum = Datum::Analytic(p.analytic_datum());
    let analytic = threshold_classify(p.lambda, &datum, None, p.dimension, None)?;
    let sampled = threshold_classify(p.lambda, &datum.sample_on(&sampling_grid(cfg)?, p.dimension)?, None, p.dimension, None)?;
    let ingested = match field {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read field {}: {e}", path.display())))?;
            let f = read_field_csv::<f64>(&text)?;
            Some(threshold_classify(p.lambda, &Datum::Sampled(f), None, p.dimension, None)?)
        }
        None => None,
    };
    let mut lines = vec![
        format!("N = {}, lambda = {}", p.dimension, num(p.lambda)),
        format!("theta = {:?} ({:?})", analytic.governing_theta(), analytic.governing_regime),
        format!("theta_lorentz = {}", num(analytic.theta_lorentz)),
        format!("theta_ln = {}", num(analytic.theta_ln)),
        format!("theta_lorentz (sampled) = {} ({:?})", num(sampled.theta_lorentz), sampled.regime_lorentz),
    ];
    if let Some(r) = &ingested {
        lines.push(format!("theta_lorentz (field) = {} ({:?})", num(r.theta_lorentz), r.regime_lorentz));
    }
    let art = Artifacts::new(cfg, "");
    let path = art.json(
        "threshold.json",
        &ThresholdResult {
            analytic,
            sampled,
            ingested,
        },
    )?;
    lines.push(format!("wrote {}", path.display()));
    Ok(Report::ok(lines))
}

#[derive(Serialize)]
struct OracleStep {
    exponent: f64,
    sup: f64,
    max_strong_residual: f64,
    file: String,
}

#[derive(Serialize)]
struct OracleResult {
    steps: Vec<OracleStep>,
    trichotomy: Option<TrichotomyRecord<f64>>,
    /// Candidate limit pairs `(u, z = -x/|x|)` of the `alpha/|x|` family.
    certificates: Vec<RadialCertificate<f64>>,
}

pub fn radial_problem(cfg: &RunConfig, p: f64) -> Result<RadialProblem<f64>, CliError> {
    let pr = &cfg.problem;
    Ok(RadialProblem::new(pr.dimension, pr.radius, pr.lambda, RadialProfile::Analytic(pr.analytic_datum()), p)?)
}

pub fn radial_options(cfg: &RunConfig) -> RadialOptions {
    RadialOptions {
        ratio: cfg.mesh.ratio,
        inner_fraction: cfg.mesh.inner_fraction,
        ..RadialOptions::default()
    }
}

pub fn oracle(cfg: &RunConfig, single: bool) -> Result<Report, CliError> {
    let exps = if single { vec![cfg.problem.exponent] } else { cfg.schedule.clone() };
    let prob = radial_problem(cfg, exps[0])?;
    let ro = radial_options(cfg);
    let grid = ro.grid(cfg.problem.radius)?;
    let art = Artifacts::new(cfg, "oracle");
    let mut steps = Vec::new();
    let mut lines = Vec::new();
    for (k, &p) in exps.iter().enumerate() {
        let pp = prob.with_exponent(p)?;
        let sol = radial_solution_with(&pp, &grid, ro.gauss_points)?;
        let res = strong_residual(&pp, &sol).into_iter().fold(0.0, f64::max);
        let name = format!("radial_{k:02}.csv");
        art.csv(&name, &format!("# p {}\n{}", num(p), radial_csv(&sol)))?;
        lines.push(format!("p = {}  sup u = {}  residual = {}", num(p), num(sol.sup()), num(res)));
        steps.push(OracleStep {
            exponent: p,
            sup: sol.sup(),
            max_strong_residual: res,
            file: name,
        });
    }
    let lo = LimitOptions::default();
    let trichotomy = if exps.len() >= lo.window {
        let rec = limit_p_to_one(&prob, &exps, &ro, &lo)?;
        lines.push(match rec.classification {
            Some(c) => format!("classification: {c:?}"),
            None => "classification: inconclusive".into(),
        });
        Some(rec)
    } else {
        None
    };
    let certificates = if cfg.problem.datum == DatumKind::InverseRadius {
        radial_limit_certificate(&prob, &grid)
    } else {
        Vec::new()
    };
    let path = art.json(
        "oracle.json",
        &OracleResult {
            steps,
            trichotomy,
            certificates,
        },
    )?;
    lines.push(format!("wrote {}", path.display()));
    Ok(Report::ok(lines))
}

/// A solve report without the nodal values.
#[derive(Serialize)]
pub struct StepSummary {
    pub exponent: f64,
    pub iterations: usize,
    pub residual: f64,
    pub epsilon: f64,
    pub energy: f64,
    pub total_variation: f64,
    pub l1: f64,
    pub l1star: f64,
    /// `null` once the blow-up guard fired.
    pub linf: f64,
    pub z: Option<ZNorms<f64>>,
}

impl StepSummary {
    pub fn new(r: &SolveReport<f64>, z: Option<ZNorms<f64>>) -> Self {
        Self {
            exponent: r.exponent,
            iterations: r.iterations,
            residual: r.residual,
            epsilon: r.epsilon,
            energy: r.energy,
            total_variation: r.total_variation,
            l1: r.l1,
            l1star: r.l1star,
            linf: r.linf,
            z,
        }
    }
}

#[derive(Serialize)]
struct Bounds {
    energy: Option<EnergyBound<f64>>,
    energy_note: Option<String>,
    levels: Option<LevelEstimate<f64>>,
    /// Whether the datum is bounded, so the level estimate is a guaranteed bound.
    levels_guaranteed: bool,
}

fn bounds(cfg: &RunConfig, dp: &DiscreteProblem<'_, f64>, report: &SolveReport<f64>) -> Result<Bounds, CliError> {
    let (energy, energy_note) = match energy_and_bound(report, dp, 1e-10) {
        Ok(b) => (Some(b), None),
        Err(e @ Error::BoundNotApplicable(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let guaranteed = cfg.problem.datum != DatumKind::InverseRadius;
    let levels = if guaranteed {
        linf_via_levels(dp.space, report, f64::INFINITY)?
    } else {
        level_decay(dp.space, report)?
    };
    Ok(Bounds {
        energy,
        energy_note,
        levels: Some(levels),
        levels_guaranteed: guaranteed,
    })
}

/// Relative L2 distance to the radial oracle, when the mesh is a centred ball.
fn oracle_error(cfg: &RunConfig, space: &Space, p: f64, u: &[f64]) -> Option<f64> {
    if !space.is_ball(cfg) {
        return None;
    }
    let prob = radial_problem(cfg, p).ok()?;
    let ro = radial_options(cfg);
    let sol = radial_solution_with(&prob, &ro.grid(cfg.problem.radius).ok()?, ro.gauss_points).ok()?;
    Some(relative_l2_error(space.get(), u, |r| sol.value_at(r)))
}

#[derive(Serialize)]
struct SolveResult {
    report: StepSummary,
    history: Vec<f64>,
    bounds: Bounds,
    oracle_l2_error: Option<f64>,
    nodes: usize,
    cells: usize,
}

pub fn solve(cfg: &RunConfig) -> Result<Report, CliError> {
    let space = Space::build(cfg)?;
    let s = space.get();
    let dp = DiscreteProblem::new(s, cfg.problem.exponent, drift_of(cfg.problem.lambda), source_of(cfg)).with_options(cfg.solver);
    let report = solve_fixed_p(&dp, None)?;
    let z = extract_z(s, &report.solution, report.exponent, report.epsilon);
    let b = bounds(cfg, &dp, &report)?;
    let err = oracle_error(cfg, &space, report.exponent, &report.solution);
    let art = Artifacts::new(cfg, "solve");
    art.csv("field.csv", &field_csv(s, &report.solution, report.exponent, report.epsilon))?;
    let mut lines = vec![
        format!("nodes = {}, cells = {}", s.num_nodes(), s.num_cells()),
        format!(
            "p = {}  iterations = {}  residual = {}",
            num(report.exponent),
            report.iterations,
            num(report.residual)
        ),
        format!("sup u = {}  energy = {}", num(report.linf), num(report.energy)),
    ];
    if let Some(e) = &b.energy {
        lines.push(format!("energy bound: {} <= {} ({})", num(e.lhs), num(e.rhs), if e.ok { "ok" } else { "violated" }));
    }
    if let Some(e) = err {
        lines.push(format!("relative L2 error vs radial oracle = {}", num(e)));
    }
    let path = art.json(
        "solve.json",
        &SolveResult {
            report: StepSummary::new(&report, Some(z.norms)),
            history: report.history.clone(),
            bounds: b,
            oracle_l2_error: err,
            nodes: s.num_nodes(),
            cells: s.num_cells(),
        },
    )?;
    lines.push(format!("wrote {}", path.display()));
    Ok(Report::ok(lines))
}

#[derive(Serialize)]
struct ContinuationResult {
    steps: Vec<StepSummary>,
    /// Per scheduled exponent; `null` for steps beyond the guard or lost to a failure.
    sup_norms: Vec<f64>,
    blow_up: bool,
    failure: Option<String>,
    /// Smallest `c` with `||z_p||_inf <= 1 + c (p - 1)`.
    z_growth: f64,
    limit: Option<LimitEstimate<f64>>,
    limit_note: Option<String>,
}

pub fn schedule_run(cfg: &RunConfig, space: &dyn FeSpace<f64>) -> Result<ScheduleRun<f64>, CliError> {
    let schedule = Schedule {
        exponents: cfg.schedule.clone(),
        solver: cfg.solver,
    };
    Ok(run_schedule(space, &drift_of(cfg.problem.lambda), &source_of(cfg), &schedule, &cfg.continuation)?)
}

pub fn continuation(cfg: &RunConfig) -> Result<Report, CliError> {
    let space = Space::build(cfg)?;
    let s = space.get();
    let run = schedule_run(cfg, s)?;
    let art = Artifacts::new(cfg, "continuation");
    let mut lines = Vec::new();
    for (k, r) in run.reports.iter().enumerate() {
        art.csv(&format!("steps/step_{k:02}.csv"), &field_csv(s, &r.solution, r.exponent, r.epsilon))?;
        lines.push(format!("p = {}  sup u = {}  iterations = {}", num(r.exponent), num(r.linf), r.iterations));
    }
    art.csv("plot.csv", &plot_csv(&[("run".to_string(), &run)])?)?;
    let (limit, limit_note) = match richardson_limit(s, &run, &cfg.continuation) {
        Ok(l) => {
            lines.push(format!("classification: {:?} (sup-norm slope {})", l.classification, num(l.sup_slope.slope)));
            if let Some(profile) = &l.profile {
                let mut body = String::from("node,u\n");
                for (i, v) in profile.iter().enumerate() {
                    body.push_str(&format!("{i},{}\n", num(*v)));
                }
                art.csv("limit.csv", &body)?;
            }
            (Some(l), None)
        }
        Err(e @ (Error::Inconclusive(_) | Error::InvalidSchedule(_))) => {
            lines.push(format!("classification: none ({e})"));
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    if run.blow_up {
        lines.push("blow-up guard fired".into());
    }
    let result = ContinuationResult {
        steps: run.reports.iter().zip(&run.z_norms).map(|(r, z)| StepSummary::new(r, Some(*z))).collect(),
        sup_norms: run.sup_norms(),
        blow_up: run.blow_up,
        failure: run.failure.clone(),
        z_growth: run.z_growth(),
        limit,
        limit_note,
    };
    let path = art.json("continuation.json", &result)?;
    lines.push(format!("wrote {}", path.display()));
    let status = match &run.failure {
        Some(f) => Err(CliError::Numerical(f.clone())),
        None => Ok(()),
    };
    Ok(Report { lines, status })
}

#[derive(Serialize)]
struct VerifyResult {
    pair: PairKind,
    corruption: Corruption,
    /// The check the corruption targets.
    expected_failure: Option<&'static str>,
    certificate: LimitCertificate<f64>,
    failed_checks: Vec<&'static str>,
}

pub fn verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let space = Space::build(cfg)?;
    let s = space.get();
    let v = &cfg.verify;
    let opts = CertificateOptions {
        tol_pde: v.tol,
        tol_pairing: v.tol,
        tol_boundary: v.tol,
        tol_z: v.tol,
        ..CertificateOptions::default()
    };
    let drift = drift_of(cfg.problem.lambda);
    let cert = match v.pair {
        PairKind::Exact => {
            let n = cfg.problem.dimension as f64;
            if cfg.problem.lambda != -(n - 2.0) {
                return Err(CliError::Config(format!(
                    "the exact pair solves the problem with lambda = {}, not {}",
                    -(n - 2.0),
                    cfg.problem.lambda
                )));
            }
            let case = cone_pair(s, cfg.problem.radius, v.corrupt);
            verify_certificate(s, &case.u, &case.z, &drift, &case.source, &opts)?
        }
        PairKind::Computed => {
            if v.corrupt != Corruption::None {
                return Err(CliError::Config("corruptions apply to the exact pair only".into()));
            }
            let run = schedule_run(cfg, s)?;
            if let Some(f) = &run.failure {
                return Err(CliError::Numerical(f.clone()));
            }
            let lim = richardson_limit(s, &run, &cfg.continuation)?;
            let profile = lim
                .profile
                .ok_or_else(|| CliError::Check(format!("{:?} limit has no profile to certify", lim.classification)))?;
            let last = run.reports.last().expect("complete run");
            let z = extract_z(s, &last.solution, last.exponent, last.epsilon);
            verify_certificate(s, &profile, &ZField::PerCell(z.cells), &drift, &source_of(cfg), &opts)?
        }
    };
    let failed = cert.failed_checks();
    let mut lines = vec![
        format!("z_sup = {}", num(cert.z_sup)),
        format!("{} pde residual = {}", pass(cert.pde_ok), num(cert.residual_pde)),
        format!("{} pairing residual = {} ({} tests)", pass(cert.pairing_ok), num(cert.residual_pairing), cert.pairing_tests),
        format!("{} boundary residual = {} ({} faces)", pass(cert.boundary_ok), num(cert.residual_boundary), cert.active_faces),
        format!("{} norm bound", pass(cert.norm_ok)),
    ];
    let art = Artifacts::new(cfg, "verify");
    let path = art.json(
        "certificate.json",
        &VerifyResult {
            pair: v.pair,
            corruption: v.corrupt,
            expected_failure: v.corrupt.target(),
            certificate: cert,
            failed_checks: failed.clone(),
        },
    )?;
    lines.push(format!("wrote {}", path.display()));
    let status = if cert.accepted {
        Ok(())
    } else {
        Err(CliError::Check(format!("certificate rejected: {} failed", failed.join(", "))))
    };
    Ok(Report { lines, status })
}

pub fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
