//! Run configuration: TOML file sections and command-line flags share one set of
//! keys; flags override the file, the file overrides preset and built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use plap_core::continuation::{ContinuationOptions, Corruption};
use plap_core::function_spaces::{check_lambda, AnalyticDatum};
use plap_core::mesh::Grading;
use plap_core::solver::{Regularization, SolverOptions};
use plap_core::trichotomy::geometric_schedule;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Named fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Preset {
    /// `lambda = -(N-2)`, `f = 1/|x|` on the unit ball (critical, nontrivial limit).
    #[value(name = "example-7-1")]
    #[serde(rename = "example-7-1")]
    Example71,
    /// `N = 4`, `lambda = -(N-2)`, capped `1/|x|` with `beta = 1.5` (critical, degenerate limit).
    #[value(name = "example-7-2")]
    #[serde(rename = "example-7-2")]
    Example72,
    /// `N = 3`, `lambda = -1`, `f = alpha/|x|`.
    #[value(name = "example-7-3")]
    #[serde(rename = "example-7-3")]
    Example73,
    /// `N = 2`, `lambda = 0`, `f = 1` on the unit disk, `p = 1.5`.
    #[value(name = "torsion")]
    #[serde(rename = "torsion")]
    Torsion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum DatumKind {
    #[value(name = "constant")]
    #[serde(rename = "constant")]
    Constant,
    #[value(name = "inverse_radius")]
    #[serde(rename = "inverse_radius")]
    InverseRadius,
    #[value(name = "plateau_7_2")]
    #[serde(rename = "plateau_7_2")]
    Plateau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MeshChoice {
    /// P1 elements in the radial variable.
    Radial,
    Disk,
    Ball,
    /// `[-R, R]^2`.
    Square,
    /// ASCII mesh file given by `mesh_file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GradingChoice {
    Uniform,
    Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    /// The closed-form cone pair.
    Exact,
    /// The extrapolated continuation limit with `z` extracted from the last step.
    Computed,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Space dimension.
    #[arg(long = "N", value_name = "N")]
    pub dimension: Option<usize>,
    /// Ball radius (half width for the square mesh).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Hardy drift coefficient.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub datum: Option<DatumKind>,
    /// Datum amplitude.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Plateau parameter.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Exponent for single solves.
    #[arg(long = "p", value_name = "P")]
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleArgs {
    /// First exponent of the geometric schedule `p_k - 1 = (p0 - 1) 2^-k`.
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Explicit schedule, overriding `p0` and `steps`.
    #[arg(long, value_delimiter = ',')]
    pub exponents: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshArgs {
    #[arg(long = "mesh", value_enum)]
    pub kind: Option<MeshChoice>,
    /// Largest radial spacing of generated meshes.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, value_enum)]
    pub grading: Option<GradingChoice>,
    /// Node ratio of the geometric radial grid.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Smallest positive radial node as a fraction of the radius.
    #[arg(long)]
    pub inner_fraction: Option<f64>,
    #[arg(long)]
    pub mesh_file: Option<PathBuf>,
    /// Node ratio of the radial grid on which thresholds of sampled data are computed.
    #[arg(long)]
    pub sample_ratio: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverArgs {
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub linear_tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub max_linear_iterations: Option<usize>,
    /// Newton steps (`false` selects the lagged-coefficient iteration).
    #[arg(long)]
    pub newton: Option<bool>,
    #[arg(long)]
    pub damping: Option<f64>,
    #[arg(skip)]
    pub regularization: Option<Regularization<f64>>,
    /// Truncation level of datum and drift.
    #[arg(long)]
    pub truncation: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationArgs {
    /// Blow-up guard on the sup norm.
    #[arg(long)]
    pub guard: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub slope_tolerance: Option<f64>,
    #[arg(long)]
    pub richardson_points: Option<usize>,
    #[arg(long)]
    pub warm_start: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_corruption)]
    pub corrupt: Option<Corruption>,
    #[arg(long, value_enum)]
    pub pair: Option<PairKind>,
    /// Tolerance of all certificate checks.
    #[arg(long)]
    pub tol: Option<f64>,
}

fn parse_corruption(s: &str) -> Result<Corruption, String> {
    match s {
        "none" => Ok(Corruption::None),
        "z-scale" => Ok(Corruption::ZScale),
        "datum-scale" => Ok(Corruption::DatumScale),
        "boundary-sign" => Ok(Corruption::BoundarySign),
        _ => Err(format!("unknown corruption `{s}` (none, z-scale, datum-scale, boundary-sign)")),
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputArgs {
    pub dir: Option<PathBuf>,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed of the randomized property batteries.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub continuation: ContinuationArgs,
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub output: OutputArgs,
    pub problem: ProblemArgs,
    pub schedule: ScheduleArgs,
    pub mesh: MeshArgs,
    pub solver: SolverArgs,
    pub continuation: ContinuationArgs,
    pub verify: VerifyArgs,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    pub dimension: usize,
    pub radius: f64,
    pub lambda: f64,
    pub datum: DatumKind,
    pub alpha: f64,
    pub beta: f64,
    pub exponent: f64,
}

impl Problem {
    pub fn analytic_datum(&self) -> AnalyticDatum<f64> {
        match self.datum {
            DatumKind::Constant => AnalyticDatum::constant(self.alpha, self.radius),
            DatumKind::InverseRadius => AnalyticDatum::inverse_radius(self.alpha, self.radius),
            DatumKind::Plateau => AnalyticDatum::plateau(self.alpha, self.beta, self.radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshConfig {
    pub kind: MeshChoice,
    pub h: f64,
    pub grading: Grading,
    pub ratio: f64,
    pub inner_fraction: f64,
    pub mesh_file: Option<PathBuf>,
    pub sample_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub corrupt: Corruption,
    pub pair: PairKind,
    pub tol: f64,
}

/// Fully resolved configuration, echoed into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub preset: Option<Preset>,
    pub problem: Problem,
    pub schedule: Vec<f64>,
    pub mesh: MeshConfig,
    pub solver: SolverOptions<f64>,
    pub continuation: ContinuationOptions<f64>,
    pub verify: VerifyConfig,
    pub output: PathBuf,
    pub seed: u64,
    /// Whether the datum amplitude was set explicitly.
    #[serde(skip)]
    pub alpha_given: bool,
}

pub const DEFAULT_SEED: u64 = 20240917;

struct PresetDefaults {
    dimension: usize,
    lambda: Option<f64>,
    datum: DatumKind,
    alpha: f64,
    exponent: f64,
    mesh: MeshChoice,
    truncation: Option<f64>,
}

fn preset_defaults(preset: Option<Preset>) -> PresetDefaults {
    // the critical fixtures need the truncation limit taken before p -> 1
    let critical = Some(1e12);
    match preset {
        Some(Preset::Example71) => PresetDefaults {
            dimension: 3,
            lambda: None,
            datum: DatumKind::InverseRadius,
            alpha: 1.0,
            exponent: 1.2,
            mesh: MeshChoice::Radial,
            truncation: critical,
        },
        Some(Preset::Example72) => PresetDefaults {
            dimension: 4,
            lambda: None,
            datum: DatumKind::Plateau,
            alpha: 1.0,
            exponent: 1.2,
            mesh: MeshChoice::Radial,
            truncation: critical,
        },
        Some(Preset::Example73) => PresetDefaults {
            dimension: 3,
            lambda: Some(-1.0),
            datum: DatumKind::InverseRadius,
            alpha: 1.0,
            exponent: 1.2,
            mesh: MeshChoice::Radial,
            truncation: critical,
        },
        Some(Preset::Torsion) => PresetDefaults {
            dimension: 2,
            lambda: Some(0.0),
            datum: DatumKind::Constant,
            alpha: 1.0,
            exponent: 1.5,
            mesh: MeshChoice::Disk,
            truncation: None,
        },
        None => PresetDefaults {
            dimension: 3,
            lambda: Some(0.0),
            datum: DatumKind::Constant,
            alpha: 1.0,
            exponent: 1.5,
            mesh: MeshChoice::Radial,
            truncation: None,
        },
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    /// Merges flags over the file named by `--config` (if any) over defaults and validates.
    pub fn resolve(command: &str, args: &CommonArgs, verify: &VerifyArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let (fp, ap) = (&file.problem, &args.problem);
        // reproduction varies the example-7-3 instance; the exact pair belongs to example 7.1
        let fallback = match command {
            "reproduce-section-7" => Some(Preset::Example73),
            "verify" => Some(Preset::Example71),
            _ => None,
        };
        let preset = ap.preset.or(fp.preset).or(fallback);
        let d = preset_defaults(preset);
        let dimension = ap.dimension.or(fp.dimension).unwrap_or(d.dimension);
        if dimension < 2 {
            return Err(invalid(format!("N = {dimension}: need N >= 2")));
        }
        let lambda = ap.lambda.or(fp.lambda).or(d.lambda).unwrap_or(-(dimension as f64 - 2.0));
        check_lambda(lambda, dimension)?;
        let alpha_flag = ap.alpha.or(fp.alpha);
        let problem = Problem {
            dimension,
            radius: ap.radius.or(fp.radius).unwrap_or(1.0),
            lambda,
            datum: ap.datum.or(fp.datum).unwrap_or(d.datum),
            alpha: alpha_flag.unwrap_or(d.alpha),
            beta: ap.beta.or(fp.beta).unwrap_or(1.5),
            exponent: ap.exponent.or(fp.exponent).unwrap_or(d.exponent),
        };
        problem.analytic_datum().validate()?;
        if !(problem.alpha >= 0.0) {
            return Err(invalid(format!("alpha = {}: the datum must be nonnegative", problem.alpha)));
        }
        if !(problem.exponent > 1.0 && problem.exponent < dimension as f64) {
            return Err(invalid(format!("p = {}: need 1 < p < N", problem.exponent)));
        }

        let (fs, s) = (&file.schedule, &args.schedule);
        let schedule = match s.exponents.clone().or_else(|| fs.exponents.clone()) {
            Some(ps) => ps,
            None => geometric_schedule(s.p0.or(fs.p0).unwrap_or(1.2), s.steps.or(fs.steps).unwrap_or(7)),
        };
        if schedule.is_empty() || !schedule.windows(2).all(|w| w[0] > w[1]) || schedule.iter().any(|&p| !(p > 1.0)) {
            return Err(invalid("schedule must be nonempty, strictly decreasing and above 1"));
        }

        let (fm, m) = (&file.mesh, &args.mesh);
        let mesh = MeshConfig {
            kind: m.kind.or(fm.kind).unwrap_or(d.mesh),
            h: m.h.or(fm.h).unwrap_or(1.0 / 32.0),
            grading: match m.grading.or(fm.grading).unwrap_or(GradingChoice::Origin) {
                GradingChoice::Uniform => Grading::Uniform,
                GradingChoice::Origin => Grading::default(),
            },
            ratio: m.ratio.or(fm.ratio).unwrap_or(1.05),
            inner_fraction: m.inner_fraction.or(fm.inner_fraction).unwrap_or(1e-6),
            mesh_file: m.mesh_file.clone().or_else(|| fm.mesh_file.clone()),
            // the step-function weak norm of 1/|x| overshoots by about (ratio - 1) / 4
            sample_ratio: m.sample_ratio.or(fm.sample_ratio).unwrap_or(1.0002),
        };
        if !(mesh.h > 0.0 && mesh.ratio > 1.0 && mesh.sample_ratio > 1.0 && mesh.inner_fraction > 0.0 && mesh.inner_fraction < 1.0) {
            return Err(invalid("mesh needs h > 0, ratio > 1, sample_ratio > 1 and 0 < inner_fraction < 1"));
        }
        let needed = match mesh.kind {
            MeshChoice::Disk | MeshChoice::Square => Some(2),
            MeshChoice::Ball => Some(3),
            MeshChoice::Radial | MeshChoice::File => None,
        };
        if needed.is_some_and(|n| n != dimension) {
            return Err(invalid(format!("mesh {:?} is {}-dimensional, N = {dimension}", mesh.kind, needed.unwrap())));
        }
        if mesh.kind == MeshChoice::File && mesh.mesh_file.is_none() {
            return Err(invalid("mesh = file needs mesh_file"));
        }

        let (fsv, sv) = (&file.solver, &args.solver);
        let base = SolverOptions::<f64>::default();
        let solver = SolverOptions {
            tolerance: sv.tolerance.or(fsv.tolerance).unwrap_or(base.tolerance),
            linear_tolerance: sv.linear_tolerance.or(fsv.linear_tolerance).unwrap_or(base.linear_tolerance),
            max_iterations: sv.max_iterations.or(fsv.max_iterations).unwrap_or(base.max_iterations),
            max_linear_iterations: sv.max_linear_iterations.or(fsv.max_linear_iterations).unwrap_or(base.max_linear_iterations),
            newton: sv.newton.or(fsv.newton).unwrap_or(base.newton),
            damping: sv.damping.or(fsv.damping).unwrap_or(base.damping),
            regularization: sv.regularization.or(fsv.regularization).unwrap_or(base.regularization),
            truncation: sv.truncation.or(fsv.truncation).or(d.truncation).unwrap_or(base.truncation),
        };
        solver.validate()?;

        let (fc, c) = (&file.continuation, &args.continuation);
        let cbase = ContinuationOptions::<f64>::default();
        let continuation = ContinuationOptions {
            guard: c.guard.or(fc.guard).unwrap_or(cbase.guard),
            window: c.window.or(fc.window).unwrap_or(cbase.window),
            slope_tolerance: c.slope_tolerance.or(fc.slope_tolerance).unwrap_or(cbase.slope_tolerance),
            richardson_points: c.richardson_points.or(fc.richardson_points).unwrap_or(cbase.richardson_points),
            warm_start: c.warm_start.or(fc.warm_start).unwrap_or(cbase.warm_start),
        };
        if continuation.window < 2 || continuation.richardson_points < 1 || !(continuation.guard > 0.0) {
            return Err(invalid("continuation needs window >= 2, richardson_points >= 1 and guard > 0"));
        }

        let fv = &file.verify;
        let pair = verify.pair.or(fv.pair).unwrap_or(PairKind::Exact);
        let verify = VerifyConfig {
            corrupt: verify.corrupt.or(fv.corrupt).unwrap_or_default(),
            pair,
            tol: verify.tol.or(fv.tol).unwrap_or(match pair {
                PairKind::Exact => 1e-8,
                PairKind::Computed => 1e-2,
            }),
        };

        let output = args.out.clone().or_else(|| file.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
        fs::create_dir_all(&output).map_err(|e| invalid(format!("output directory {} is not writable: {e}", output.display())))?;
        if fs::metadata(&output).map(|m| m.permissions().readonly()).unwrap_or(true) {
            return Err(invalid(format!("output directory {} is not writable", output.display())));
        }

        Ok(RunConfig {
            command: command.to_string(),
            preset,
            problem,
            schedule,
            mesh,
            solver,
            continuation,
            verify,
            output,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            alpha_given: alpha_flag.is_some(),
        })
    }
}
