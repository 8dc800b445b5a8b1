//! Continuation in `p -> 1+`: warm-started schedules, the flux field `z_p`,
//! extrapolated limits, and verification of limit pairs `(u, z)`.

mod certificate;
mod field;
mod limit;
mod schedule;

pub use certificate::{cone_pair, verify_certificate, CertificateCase, CertificateOptions, Corruption, LimitCertificate};
pub use field::{extract_z, ExtractedZ, ZField, ZNorms};
pub use limit::{richardson_limit, LimitEstimate};
pub use schedule::{run_schedule, ContinuationOptions, Schedule, ScheduleRun};

#[cfg(test)]
mod tests;
