//! Numerical laboratory for p-Laplacian problems with Hardy-type drift as `p -> 1+`.
//!
//! The crate is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the root re-exports `f64` aliases for the common types.

pub mod continuation;
pub mod error;
pub mod function_spaces;
pub mod grid;
pub mod mesh;
pub mod output;
pub mod quadrature;
pub mod radial;
pub mod scalar;
pub mod solver;
pub mod trichotomy;

pub use error::{Error, Result};

/// Crate version, embedded in every written artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use function_spaces::Regime;
pub use scalar::Real;
pub use trichotomy::{Trend, Trichotomy};

pub type ScalarField = function_spaces::ScalarField<f64>;
pub type VectorField = function_spaces::VectorField<f64>;
pub type Constants = function_spaces::Constants<f64>;
pub type AnalyticDatum = function_spaces::AnalyticDatum<f64>;
pub type Datum = function_spaces::Datum<f64>;
pub type ThresholdReport = function_spaces::ThresholdReport<f64>;
pub type RadialGrid = grid::RadialGrid<f64>;
pub type RadialProblem = radial::RadialProblem<f64>;
pub type RadialProfile = radial::RadialProfile<f64>;
pub type RadialSolution = radial::RadialSolution<f64>;
pub type RadialMesh = mesh::RadialMesh<f64>;
pub type SimplexMesh = mesh::SimplexMesh<f64>;
pub type SolveReport = solver::SolveReport<f64>;
pub type SolverOptions = solver::SolverOptions<f64>;
pub type Schedule = continuation::Schedule<f64>;
pub type ScheduleRun = continuation::ScheduleRun<f64>;
pub type LimitCertificate = continuation::LimitCertificate<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type ScalarField = crate::function_spaces::ScalarField<f32>;
    pub type Constants = crate::function_spaces::Constants<f32>;
    pub type AnalyticDatum = crate::function_spaces::AnalyticDatum<f32>;
    pub type Datum = crate::function_spaces::Datum<f32>;
    pub type RadialGrid = crate::grid::RadialGrid<f32>;
    pub type RadialMesh = crate::mesh::RadialMesh<f32>;
    pub type SimplexMesh = crate::mesh::SimplexMesh<f32>;
    pub type SolveReport = crate::solver::SolveReport<f32>;
}
