//! Experiment runner for `plap-core`.
//!
//! Every command resolves a [`config::RunConfig`] (defaults, preset, TOML file,
//! flags), runs, and writes JSON and CSV artifacts that embed the resolved
//! configuration, the seed and the crate versions.

pub mod commands;
pub mod config;
pub mod reproduce;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use plap_core::mesh::{ball, disk, read_mesh, square, FeSpace, RadialMesh, SimplexMesh};
use plap_core::output::write_atomic;
use plap_core::solver::{Drift, Source};
use plap_core::grid::RadialGrid;
use serde::Serialize;
use thiserror::Error;

use config::{CommonArgs, MeshChoice, RunConfig, VerifyArgs};

pub const CLI_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] plap_core::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("acceptance check failed: {0}")]
    Check(String),
}

impl CliError {
    /// 2 for rejected input, 3 for failed computations, 4 for failed checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Numerical(_) => 3,
            CliError::Check(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "plap", version, about = "p-Laplacian problems with Hardy drift as p -> 1")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical thresholds of the datum and drift.
    Threshold(ThresholdCmd),
    /// Radial oracle along the schedule (or at `--p`), with the trichotomy record.
    Oracle(CommonArgs),
    /// One finite element solve at `--p`.
    Solve(CommonArgs),
    /// Continuation along the schedule with limit extraction.
    Continuation(CommonArgs),
    /// Residuals of a candidate limit pair.
    Verify(VerifyCmd),
    /// Regenerates the example bundles and runs their checks.
    #[command(name = "reproduce-section-7")]
    ReproduceSection7(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdCmd {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Sampled datum as CSV (coordinates, value, weight).
    #[arg(long)]
    pub field: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyCmd {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub verify: VerifyArgs,
}

/// Console output of a command that ran to completion, with the outcome of its checks.
#[derive(Debug)]
pub struct Report {
    pub lines: Vec<String>,
    pub status: Result<(), CliError>,
}

impl Report {
    pub fn ok(lines: Vec<String>) -> Self {
        Self { lines, status: Ok(()) }
    }
}

/// Runs one parsed command.
pub fn run(cli: Cli) -> Result<Report, CliError> {
    let none = VerifyArgs::default();
    match cli.command {
        Command::Threshold(t) => {
            let cfg = RunConfig::resolve("threshold", &t.common, &none)?;
            commands::threshold(&cfg, t.field.as_deref())
        }
        Command::Oracle(c) => commands::oracle(&RunConfig::resolve("oracle", &c, &none)?, c.problem.exponent.is_some()),
        Command::Solve(c) => commands::solve(&RunConfig::resolve("solve", &c, &none)?),
        Command::Continuation(c) => commands::continuation(&RunConfig::resolve("continuation", &c, &none)?),
        Command::Verify(v) => commands::verify(&RunConfig::resolve("verify", &v.common, &v.verify)?),
        Command::ReproduceSection7(c) => reproduce::reproduce(&RunConfig::resolve("reproduce-section-7", &c, &none)?),
    }
}

#[derive(Serialize)]
struct Versions {
    #[serde(rename = "plap-cli")]
    cli: &'static str,
    #[serde(rename = "plap-core")]
    core: &'static str,
}

const VERSIONS: Versions = Versions {
    cli: CLI_VERSION,
    core: plap_core::VERSION,
};

#[derive(Serialize)]
struct Envelope<'a, R> {
    versions: Versions,
    seed: u64,
    config: &'a RunConfig,
    result: &'a R,
}

/// Writes artifacts under one directory. JSON files wrap the result with the
/// configuration; CSV files start with a `#` line carrying the same data.
pub struct Artifacts<'a> {
    cfg: &'a RunConfig,
    dir: PathBuf,
}

impl<'a> Artifacts<'a> {
    pub fn new(cfg: &'a RunConfig, dir: impl AsRef<Path>) -> Self {
        Self {
            cfg,
            dir: cfg.output.join(dir),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn json<R: Serialize>(&self, name: &str, result: &R) -> Result<PathBuf, CliError> {
        let env = Envelope {
            versions: VERSIONS,
            seed: self.cfg.seed,
            config: self.cfg,
            result,
        };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Numerical(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join(name);
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn csv(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let config = serde_json::to_string(self.cfg).map_err(|e| CliError::Numerical(e.to_string()))?;
        let text = format!(
            "# plap-cli {} plap-core {} seed {} config {config}\n{body}",
            VERSIONS.cli, VERSIONS.core, self.cfg.seed
        );
        let path = self.dir.join(name);
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

/// A mesh chosen at run time.
pub enum Space {
    Radial(RadialMesh<f64>),
    Simplex(SimplexMesh<f64>),
}

impl Space {
    pub fn build(cfg: &RunConfig) -> Result<Self, CliError> {
        Self::build_for(cfg, cfg.problem.dimension)
    }

    /// The configured mesh for dimension `n` (radial meshes only follow `n`).
    pub fn build_for(cfg: &RunConfig, n: usize) -> Result<Self, CliError> {
        let m = &cfg.mesh;
        let r = cfg.problem.radius;
        Ok(match m.kind {
            MeshChoice::Radial => Space::Radial(RadialMesh::new(n, &radial_grid(cfg)?)?),
            MeshChoice::Disk => Space::Simplex(disk(r, m.h, m.grading)?),
            MeshChoice::Ball => Space::Simplex(ball(r, m.h, m.grading)?),
            MeshChoice::Square => Space::Simplex(square(r, m.h)?),
            MeshChoice::File => {
                let path = m.mesh_file.as_ref().expect("validated");
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read mesh {}: {e}", path.display())))?;
                let mesh: SimplexMesh<f64> = read_mesh(&text)?;
                if mesh.dimension() != n {
                    return Err(CliError::Config(format!("mesh {} has dimension {}, N = {n}", path.display(), mesh.dimension())));
                }
                Space::Simplex(mesh)
            }
        })
    }

    pub fn get(&self) -> &dyn FeSpace<f64> {
        match self {
            Space::Radial(m) => m,
            Space::Simplex(m) => m,
        }
    }

    /// Whether the mesh covers a ball centred at the origin.
    pub fn is_ball(&self, cfg: &RunConfig) -> bool {
        matches!(cfg.mesh.kind, MeshChoice::Radial | MeshChoice::Disk | MeshChoice::Ball)
    }
}

pub fn radial_grid(cfg: &RunConfig) -> Result<RadialGrid<f64>, CliError> {
    let r = cfg.problem.radius;
    Ok(RadialGrid::geometric(r, cfg.mesh.ratio, r * cfg.mesh.inner_fraction)?)
}

/// The finer grid on which analytic data are sampled for threshold checks.
pub fn sampling_grid(cfg: &RunConfig) -> Result<RadialGrid<f64>, CliError> {
    let r = cfg.problem.radius;
    Ok(RadialGrid::geometric(r, cfg.mesh.sample_ratio, r * cfg.mesh.inner_fraction)?)
}

pub fn drift_of(lambda: f64) -> Drift<f64> {
    if lambda == 0.0 {
        Drift::None
    } else {
        Drift::Hardy { lambda }
    }
}

pub fn source_of(cfg: &RunConfig) -> Source<f64> {
    Source::Analytic(cfg.problem.analytic_datum())
}
