//! Verification laboratory: conformal linearization, identity checks and the
//! suites that run them over models and random samples.

pub mod checks;
pub mod linearize;
pub mod report;
mod suites;

pub use linearize::{linearize, linearize_fd, Linearization, Linearizer, Method, Quantity};
pub use report::{Check, Collector, Residual, Tolerance, VerificationReport};
pub use suites::{run_suite, ModelChoice, Precision, SuiteName, SuiteOptions};
