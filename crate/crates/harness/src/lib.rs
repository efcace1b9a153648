//! Scenario files, the builtin catalog, deterministic runs of both sides of the index
//! pairing, property suites and CSV reports for `leafwise-core`.

pub mod error;
pub mod props;
pub mod report;
pub mod run;
pub mod scenario;
pub mod suite;

pub use error::{HarnessError, Result};
pub use report::Outcome;
pub use run::{run_scenario, ResultRecord};
pub use scenario::{builtin, catalog, load_scenario, Scenario};
pub use suite::{run_suite, SuiteReport, Which};
