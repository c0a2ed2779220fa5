//! Scenario files, command pipelines and reports for `filtration-lab`.

pub mod generate;
pub mod report;
pub mod run;
pub mod scenario;
