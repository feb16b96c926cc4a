//! Configuration, suite runner and reports for the command-line verifier.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{InstanceConfig, Mutation};
pub use report::{CheckRecord, Format, Status, VerificationReport};
pub use suites::run_suites;
