use std::collections::HashSet;

use serde::Serialize;

use super::{iw, GoalTest, IterationStats, Status, Terminus};
use crate::pddl::{ActionId, GroundTask, State};

#[derive(Clone, Copy, Debug)]
pub struct SerialConfig {
    pub max_k: u32,
    /// Generated-node budget for each IW call.
    pub budget: u64,
    pub max_episodes: usize,
}

impl Default for SerialConfig {
    fn default() -> Self {
        SerialConfig {
            max_k: 2,
            budget: super::default_budget(),
            max_episodes: 100_000,
        }
    }
}

/// Chooses the subgoal of each episode from the state it starts in.
pub trait Serialization {
    /// `Err` carries a description of why no episode can start here.
    fn episode<'a>(&'a self, task: &'a GroundTask, start: &State) -> Result<Box<dyn GoalTest + 'a>, String>;
}

/// Episodes end at any state with fewer unsatisfied goal literals.
pub struct GoalCounter;

struct FewerGoals<'a> {
    task: &'a GroundTask,
    bound: usize,
}

impl GoalTest for FewerGoals<'_> {
    fn check(&self, s: &State) -> Option<Terminus> {
        (self.task.unsatisfied_goals(s) < self.bound).then_some(Terminus::GoalCount)
    }
}

impl Serialization for GoalCounter {
    fn episode<'a>(&'a self, task: &'a GroundTask, start: &State) -> Result<Box<dyn GoalTest + 'a>, String> {
        Ok(Box::new(FewerGoals {
            task,
            bound: task.unsatisfied_goals(start),
        }))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Episode {
    pub start_digest: u64,
    pub terminus: Terminus,
    pub width: u32,
    pub length: usize,
    pub expanded: u64,
    pub generated: u64,
    pub iterations: Vec<IterationStats>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SerialOutcome {
    Solved,
    Exhausted,
    BudgetExceeded,
    /// No episode could be started from a non-goal state.
    Deadend(String),
    /// An episode started from a state already used as a start.
    Cycle,
    EpisodeLimit,
}

#[derive(Clone, Debug)]
pub struct SerialResult {
    pub outcome: SerialOutcome,
    pub plan: Vec<ActionId>,
    pub trace: Vec<Episode>,
    pub expanded: u64,
    pub generated: u64,
    /// IW calls of the episode that failed, if any.
    pub failed_iterations: Vec<IterationStats>,
}

impl SerialResult {
    pub fn solved(&self) -> bool {
        self.outcome == SerialOutcome::Solved
    }
}

/// Repeatedly runs IW from the current state towards the episode subgoal
/// until the task goal holds.
pub fn serialized_iw<S: Serialization + ?Sized>(task: &GroundTask, ser: &S, cfg: SerialConfig) -> SerialResult {
    let mut res = SerialResult {
        outcome: SerialOutcome::Solved,
        plan: Vec::new(),
        trace: Vec::new(),
        expanded: 0,
        generated: 0,
        failed_iterations: Vec::new(),
    };
    let mut s = task.init.clone();
    let mut starts: HashSet<State> = HashSet::new();
    while !task.is_goal(&s) {
        if res.trace.len() >= cfg.max_episodes {
            res.outcome = SerialOutcome::EpisodeLimit;
            return res;
        }
        if !starts.insert(s.clone()) {
            res.outcome = SerialOutcome::Cycle;
            return res;
        }
        let test = match ser.episode(task, &s) {
            Ok(t) => t,
            Err(why) => {
                res.outcome = SerialOutcome::Deadend(why);
                return res;
            }
        };
        let r = iw(task, &s, test.as_ref(), cfg.max_k, cfg.budget);
        res.expanded += r.expanded;
        res.generated += r.generated;
        match r.status {
            Status::Solved => {
                res.trace.push(Episode {
                    start_digest: s.digest(),
                    terminus: r.terminus.expect("solved searches record a terminus"),
                    width: r.effective_width.expect("solved searches record a width"),
                    length: r.plan.len(),
                    expanded: r.expanded,
                    generated: r.generated,
                    iterations: r.iterations,
                });
                res.plan.extend(&r.plan);
                s = r.end_state.expect("solved searches record the end state");
            }
            Status::Exhausted | Status::BudgetExceeded => {
                res.outcome = if r.status == Status::Exhausted {
                    SerialOutcome::Exhausted
                } else {
                    SerialOutcome::BudgetExceeded
                };
                res.failed_iterations = r.iterations;
                return res;
            }
        }
    }
    res
}

/// SIW: serialized IW over the goal counter.
pub fn siw(task: &GroundTask, cfg: SerialConfig) -> SerialResult {
    serialized_iw(task, &GoalCounter, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WidthStats {
    pub episodes: usize,
    pub average: f64,
    pub max: u32,
}

/// Average and maximum effective width over all episodes, the last included.
pub fn width_stats(trace: &[Episode]) -> Result<WidthStats, &'static str> {
    if trace.is_empty() {
        return Err("empty trace has no width statistics");
    }
    let sum: u64 = trace.iter().map(|e| e.width as u64).sum();
    Ok(WidthStats {
        episodes: trace.len(),
        average: sum as f64 / trace.len() as f64,
        max: trace.iter().map(|e| e.width).max().unwrap_or(0),
    })
}
