//! Young, Dushnik and Kurzweil-Stieltjes integrals of regulated functions.
//!
//! Step-function pairs are integrated exactly through the decomposition of a
//! step function into the five elementary functions `1`, `chi_(a,b]`,
//! `chi_(tau,b]`, `chi_[tau,b]` and `chi_[b]`. General regulated pairs where
//! one side has bounded variation are integrated through certified step
//! approximants, with an error bound from the classical Stieltjes estimates.
//! The [`oracle`] module recomputes all three integrals from their
//! definitions by brute force.

pub mod error;
pub mod integrators;
pub mod numeric;
pub mod oracle;
pub mod partition;
pub mod regulated;
pub mod sampling;
pub mod sums;

pub use error::{Error, Result};
pub use integrators::{
    boundary_term, by_parts, elementary_backward, elementary_forward, integrate_limit, integrate_limit_with,
    integrate_step_pair, Elementary, IntegralKind, IntegralResult, LimitRoute, Route,
};
pub use oracle::{oracle_gauge, oracle_refinement, OracleConfig, OracleReport};
pub use partition::{
    cousin_fine_partition, interior_tags, is_fine, refine, Division, Gauge, Partition, TagMode, TagRule,
};
pub use regulated::{
    bv_norm, Approximant, Decomposition, Formula, Interval, Jump, LipschitzPieces, MonotoneJumps, Regulated,
    StepFunction,
};
pub use sums::{check_sum_bounds, sum_s, sum_sy, SumBoundReport, SumKind, SumValue};
