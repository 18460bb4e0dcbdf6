use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::{check_termination, Sketch, TerminationReport};
use crate::features::{CompileError, Evaluator};
use crate::pddl::{GroundTask, State};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error("task {task}: more than {limit} reachable states")]
    StateLimit { task: usize, limit: usize },
    #[error("task {task}: {source}")]
    Compile { task: usize, source: CompileError },
}

/// A non-goal state whose Boolean projection also occurs at a goal state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationWitness {
    pub task: usize,
    /// Fluent atoms true in the state.
    pub atoms: Vec<String>,
    pub valuation: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub separating: bool,
    /// Projections observed at goal states, over all tasks.
    pub goal_valuations: BTreeSet<Vec<bool>>,
    pub witness: Option<SeparationWitness>,
    pub states_checked: usize,
}

fn reachable(task: &GroundTask, limit: usize) -> Option<Vec<State>> {
    let mut seen: HashSet<State> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(task.init.clone());
    queue.push_back(task.init.clone());
    let mut acts = Vec::new();
    while let Some(s) = queue.pop_front() {
        task.applicable_actions(&s, &mut acts);
        for &a in &acts {
            let t = task.apply(&s, a);
            if !seen.contains(&t) {
                if seen.len() >= limit {
                    return None;
                }
                seen.insert(t.clone());
                queue.push_back(t);
            }
        }
        order.push(s);
    }
    Some(order)
}

/// Enumerates every reachable state of each task and checks that goal
/// membership is a function of the Boolean projection of the features.
pub fn check_goal_separation(
    sketch: &Sketch,
    tasks: &[GroundTask],
    state_limit: usize,
) -> Result<SeparationReport, SeparationError> {
    let mut goal_valuations = BTreeSet::new();
    // First non-goal state seen for each projection.
    let mut non_goal: HashMap<Vec<bool>, (usize, State)> = HashMap::new();
    let mut states_checked = 0;
    for (ti, task) in tasks.iter().enumerate() {
        let ev = Evaluator::new(task, &sketch.feature_exprs())
            .map_err(|source| SeparationError::Compile { task: ti, source })?;
        let states = reachable(task, state_limit).ok_or(SeparationError::StateLimit {
            task: ti,
            limit: state_limit,
        })?;
        for s in states {
            let b = sketch.project(&ev.eval(&s));
            states_checked += 1;
            if task.is_goal(&s) {
                goal_valuations.insert(b);
            } else {
                non_goal.entry(b).or_insert((ti, s));
            }
        }
    }
    let mut clash: Vec<(&Vec<bool>, &(usize, State))> =
        non_goal.iter().filter(|(b, _)| goal_valuations.contains(*b)).collect();
    clash.sort_by(|x, y| (x.1 .0, x.0).cmp(&(y.1 .0, y.0)));
    let witness = clash.first().map(|(b, (ti, s))| {
        let task = &tasks[*ti];
        SeparationWitness {
            task: *ti,
            atoms: s
                .iter()
                .filter(|&a| !task.is_static[a as usize])
                .map(|a| task.atom_name(a))
                .collect(),
            valuation: (*b).clone(),
        }
    });
    Ok(SeparationReport {
        separating: witness.is_none(),
        goal_valuations,
        witness,
        states_checked,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WellFormedReport {
    pub termination: TerminationReport,
    pub separation: SeparationReport,
}

impl WellFormedReport {
    /// Well-formed under strict reading: certified terminating and separating.
    pub fn well_formed(&self) -> bool {
        self.termination.terminating && self.separation.separating
    }

    /// Lenient reading: an uncertified termination verdict is only a warning.
    pub fn acceptable(&self, strict: bool) -> bool {
        self.separation.separating && (self.termination.terminating || !strict)
    }
}

pub fn check_well_formed(
    sketch: &Sketch,
    tasks: &[GroundTask],
    state_limit: usize,
) -> Result<WellFormedReport, SeparationError> {
    Ok(WellFormedReport {
        termination: check_termination(sketch),
        separation: check_goal_separation(sketch, tasks, state_limit)?,
    })
}
