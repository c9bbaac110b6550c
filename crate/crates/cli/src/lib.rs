//! Command-line front end for the integration library: a small declarative
//! job language, a runner, and human or JSON reports.

pub mod dsl;
pub mod run;

pub use dsl::{parse_jobs, parse_spec, render, Command, FunctionSpec, JobSpec, ParseError, Payload};
pub use run::{run, Outcome, Report, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
