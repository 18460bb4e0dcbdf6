//! Breadth-first search, IW(k), IW, and serialized IW driven by either the
//! goal counter (SIW) or a policy sketch (SIW_R).

mod bfs;
mod iw;
mod novelty;
mod serialized;

pub use bfs::bfs;
pub use iw::{iw, iw_k, node_bound};
pub use novelty::NoveltyTable;
pub use serialized::{
    serialized_iw, siw, width_stats, Episode, GoalCounter, SerialConfig, SerialOutcome, SerialResult, Serialization,
    WidthStats,
};

use serde::Serialize;

use crate::pddl::{ActionId, GroundTask, State};

pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const MAX_WIDTH: u32 = 3;

/// Per-call generated-node budget, overridable with `SKETCHPLAN_BUDGET`.
pub fn default_budget() -> u64 {
    std::env::var("SKETCHPLAN_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Solved,
    Exhausted,
    BudgetExceeded,
}

/// What made a search stop at a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminus {
    TopGoal,
    GoalCount,
    Rule(usize),
    Target,
}

pub trait GoalTest {
    fn check(&self, state: &State) -> Option<Terminus>;
}

impl<F: Fn(&State) -> bool> GoalTest for F {
    fn check(&self, state: &State) -> Option<Terminus> {
        self(state).then_some(Terminus::Target)
    }
}

/// The task's own goal.
pub struct TopGoal<'a>(pub &'a GroundTask);

impl GoalTest for TopGoal<'_> {
    fn check(&self, state: &State) -> Option<Terminus> {
        self.0.is_goal(state).then_some(Terminus::TopGoal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IterationStats {
    pub k: u32,
    pub expanded: u64,
    pub generated: u64,
    pub status: Status,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub status: Status,
    pub plan: Vec<ActionId>,
    pub expanded: u64,
    pub generated: u64,
    pub effective_width: Option<u32>,
    pub end_state: Option<State>,
    pub terminus: Option<Terminus>,
    /// One entry per IW(k) call made; empty for plain BFS.
    pub iterations: Vec<IterationStats>,
    /// True when no node was discarded, so exhaustion proves unsolvability.
    pub complete: bool,
}

impl SearchResult {
    pub fn plan_length(&self) -> usize {
        self.plan.len()
    }

    pub fn solved(&self) -> bool {
        self.status == Status::Solved
    }
}

pub(crate) struct Node {
    pub state: State,
    pub parent: u32,
    pub action: ActionId,
}

pub(crate) const NO_PARENT: u32 = u32::MAX;

pub(crate) fn extract_plan(nodes: &[Node], mut idx: u32) -> Vec<ActionId> {
    let mut plan = Vec::new();
    while nodes[idx as usize].parent != NO_PARENT {
        plan.push(nodes[idx as usize].action);
        idx = nodes[idx as usize].parent;
    }
    plan.reverse();
    plan
}
