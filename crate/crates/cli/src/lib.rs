//! Job runner and reproduction suite on top of `puncture-core`.

pub mod config;
pub mod error;
pub mod jobs;
pub mod report;
pub mod suite;

pub use config::{Command, JobConfig, NumericOptions, OutputOptions, RingSpec};
pub use error::{CliError, ErrorObject};
pub use jobs::run_job;
pub use report::{fmt_float, ReportBundle, Tagged, Trace};
pub use suite::{power_shift_inner_dilatation, power_shift_majorant, run_suite, run_suite_with, SuiteRow};
