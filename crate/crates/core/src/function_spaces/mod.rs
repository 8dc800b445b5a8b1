//! Rearrangements, Lorentz norms, sharp constants and the threshold classifier.

mod analytic;
mod constants;
mod field;
mod hardy;
mod norms;
mod rearrangement;
mod threshold;

pub use analytic::AnalyticDatum;
pub use constants::{ball_volume, sharp_constants, Constants};
pub use field::{ScalarField, VectorField};
pub use hardy::{hardy_check, HardyCheck};
pub use norms::{lorentz_one_norm, lorentz_weak_norm, lq_norm, rearranged_product, Datum};
pub use rearrangement::{decreasing_rearrangement, distribution_function, uniform_partition, Rearrangement, SortedProfile};
pub use threshold::{check_lambda, threshold_classify, Regime, ThresholdReport, ANALYTIC_TOLERANCE};
