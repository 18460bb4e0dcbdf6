//! STRIPS subset of PDDL: parsing, grounding, and the successor function.
//!
//! Supported requirements are `:strips`, `:typing`, `:negative-preconditions`
//! and `:equality`. The initial state is closed-world: every atom not listed
//! in `:init` is false.

mod ast;
mod ground;
mod parse;
mod plan;
pub mod sexpr;
mod state;
mod task;

pub use ast::*;
pub use ground::{ground, ground_with, GroundLimits};
pub use parse::{parse_domain, parse_problem};
pub use plan::{parse_plan, validate_plan, write_plan, PlanStep, Validation};
pub use state::State;
pub use task::{ActionId, AtomId, GroundAction, GroundAtom, GroundTask, NOT_FLUENT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PddlError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("grounding exceeded the limit of {limit} {resource}")]
    Resource { resource: &'static str, limit: usize },
}

/// Parses both files and grounds the problem.
pub fn load_task(domain_src: &str, problem_src: &str) -> Result<GroundTask, PddlError> {
    let d = parse_domain(domain_src)?;
    let p = parse_problem(problem_src, &d)?;
    ground(&d, &p)
}
