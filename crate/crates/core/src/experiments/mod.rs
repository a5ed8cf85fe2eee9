//! Config-driven scenarios, their reports and CSV/JSON emission.

pub mod config;
pub mod emit;
pub mod report;
pub mod run;

pub use config::{HRule, OutputFormat, Scenario, ScenarioConfig};
pub use emit::emit;
pub use report::Report;
pub use run::{
    run, run_bias_search, run_polya_check, run_rmf_oracle, run_theorem1, run_theorem2, run_theorem3, run_theorem4,
};
