//! Verification harness: seeded generators, canonical fixture families,
//! convention calibration and per-reduction checks with JSON reports.

pub mod calibrate;
pub mod families;
pub mod gen;
pub mod harness;
pub mod report;

pub use calibrate::{AeConfiguration, CalibrationError, CwConfiguration, FrozenConfiguration, Role};
pub use harness::{generate_sources, run_batch, verify_reduction, Budgets, HarnessError, ReductionKind, Source};
pub use report::{fingerprint, CheckRecord, CheckStatus, Summary, VerificationReport};
