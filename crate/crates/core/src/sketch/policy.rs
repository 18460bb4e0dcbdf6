use std::fmt;

use super::{check_termination, Sketch, TerminationReport};
use crate::features::{CompileError, Evaluator, Value};
use crate::pddl::{GroundTask, State};
use crate::search::{serialized_iw, GoalTest, SerialConfig, SerialResult, Serialization, Terminus};

/// A sketch bound to one task: features are compiled once and evaluated at
/// the start of every episode and at every generated state.
pub struct SketchPolicy<'t> {
    pub sketch: &'t Sketch,
    pub evaluator: Evaluator<'t>,
}

impl<'t> SketchPolicy<'t> {
    pub fn new(task: &'t GroundTask, sketch: &'t Sketch) -> Result<SketchPolicy<'t>, CompileError> {
        Ok(SketchPolicy {
            sketch,
            evaluator: Evaluator::new(task, &sketch.feature_exprs())?,
        })
    }

    pub fn valuation(&self, s: &State) -> Vec<Value> {
        self.evaluator.eval(s)
    }

    /// Rules whose condition holds in `f`, in file order.
    pub fn applicable_rules(&self, f: &[Value]) -> Vec<usize> {
        (0..self.sketch.rules.len())
            .filter(|&i| self.sketch.rules[i].condition_holds(f))
            .collect()
    }

    /// First rule satisfied by the pair `(f, g)`.
    pub fn satisfied_rule(&self, f: &[Value], g: &[Value]) -> Option<usize> {
        self.sketch.rules.iter().position(|r| r.pair_satisfies(f, g))
    }
}

struct Subgoals<'a> {
    policy: &'a SketchPolicy<'a>,
    task: &'a GroundTask,
    root: Vec<Value>,
    rules: Vec<usize>,
}

impl GoalTest for Subgoals<'_> {
    fn check(&self, s: &State) -> Option<Terminus> {
        if self.task.is_goal(s) {
            return Some(Terminus::TopGoal);
        }
        let g = self.policy.valuation(s);
        let rules = &self.policy.sketch.rules;
        self.rules
            .iter()
            .copied()
            .find(|&i| rules[i].pair_satisfies(&self.root, &g))
            .map(Terminus::Rule)
    }
}

impl Serialization for SketchPolicy<'_> {
    fn episode<'a>(&'a self, task: &'a GroundTask, start: &State) -> Result<Box<dyn GoalTest + 'a>, String> {
        let root = self.valuation(start);
        let rules = self.applicable_rules(&root);
        if rules.is_empty() {
            return Err(format!(
                "no sketch rule applies in state {:016x} [{}]",
                start.digest(),
                self.sketch.format_valuation(&root)
            ));
        }
        Ok(Box::new(Subgoals {
            policy: self,
            task,
            root,
            rules,
        }))
    }
}

#[derive(Debug)]
pub enum SiwrError {
    Compile(CompileError),
    /// Strict mode refuses sketches the termination check cannot certify.
    NotTerminating(TerminationReport),
}

impl fmt::Display for SiwrError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiwrError::Compile(e) => write!(f, "sketch features do not compile: {e}"),
            SiwrError::NotTerminating(r) => write!(
                f,
                "sketch is not certified terminating ({} rule(s) left uneliminated)",
                r.remaining.len()
            ),
        }
    }
}

impl std::error::Error for SiwrError {}

impl From<CompileError> for SiwrError {
    fn from(e: CompileError) -> Self {
        SiwrError::Compile(e)
    }
}

/// SIW_R: serialized IW whose episodes end at the top goal or at a subgoal
/// of any rule applicable where the episode started.
pub fn siwr(task: &GroundTask, sketch: &Sketch, cfg: SerialConfig, strict: bool) -> Result<SerialResult, SiwrError> {
    if strict {
        let rep = check_termination(sketch);
        if !rep.terminating {
            return Err(SiwrError::NotTerminating(rep));
        }
    }
    let policy = SketchPolicy::new(task, sketch)?;
    Ok(serialized_iw(task, &policy, cfg))
}
