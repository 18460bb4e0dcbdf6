use super::sexpr::{err_at, Pos};
use super::task::{ActionId, GroundTask};
use super::PddlError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStep {
    pub line: usize,
    pub name: String,
    pub args: Vec<String>,
}

/// IPC plan text: one `(action arg ...)` per line, `;` comments allowed.
pub fn write_plan(task: &GroundTask, plan: &[ActionId]) -> String {
    let mut out = String::new();
    for &a in plan {
        out.push_str(&task.action_name(a));
        out.push('\n');
    }
    out
}

pub fn parse_plan(src: &str) -> Result<Vec<PlanStep>, PddlError> {
    let mut steps = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let pos = Pos { line: i + 1, col: 1 };
        let inner = line
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| err_at(pos, "expected (action arg ...)"))?;
        let mut words = inner.split_whitespace().map(str::to_lowercase);
        let name = words.next().ok_or_else(|| err_at(pos, "empty plan step"))?;
        steps.push(PlanStep {
            line: i + 1,
            name,
            args: words.collect(),
        });
    }
    Ok(steps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validation {
    Valid { length: usize },
    UnknownAction { step: usize, text: String },
    Inapplicable { step: usize, action: String },
    GoalNotReached { length: usize, unsatisfied: usize },
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid { .. })
    }
}

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Validation::Valid { length } => write!(f, "valid plan of length {length}"),
            Validation::UnknownAction { step, text } => write!(f, "step {step}: unknown action {text}"),
            Validation::Inapplicable { step, action } => write!(f, "step {step}: {action} is not applicable"),
            Validation::GoalNotReached { length, unsatisfied } => {
                write!(f, "goal not reached after {length} steps ({unsatisfied} goal atoms unsatisfied)")
            }
        }
    }
}

fn known_schema(task: &GroundTask, step: &PlanStep) -> bool {
    let Some(schema) = task.domain.actions.iter().find(|a| a.name == step.name) else {
        return false;
    };
    schema.params.len() == step.args.len()
        && schema.params.iter().zip(&step.args).all(|(p, a)| {
            task.object_id(a)
                .is_some_and(|o| task.domain.is_subtype(&task.object_types[o as usize], &p.ty))
        })
}

/// Replays `steps` from the initial state. Step indices start at 0.
pub fn validate_plan(task: &GroundTask, steps: &[PlanStep]) -> Validation {
    let mut s = task.init.clone();
    for (i, step) in steps.iter().enumerate() {
        let args: Vec<&str> = step.args.iter().map(String::as_str).collect();
        let text = format!("({} {})", step.name, args.join(" "));
        match task.find_action(&step.name, &args) {
            Some(a) if task.applicable(&s, a) => s = task.apply(&s, a),
            Some(a) => {
                return Validation::Inapplicable {
                    step: i,
                    action: task.action_name(a),
                }
            }
            // A well-typed instantiation missing from the table failed a static precondition.
            None if known_schema(task, step) => return Validation::Inapplicable { step: i, action: text },
            None => return Validation::UnknownAction { step: i, text },
        }
    }
    if task.is_goal(&s) {
        Validation::Valid { length: steps.len() }
    } else {
        Validation::GoalNotReached {
            length: steps.len(),
            unsatisfied: task.unsatisfied_goals(&s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::load_task;

    const DOMAIN: &str = "(define (domain lamps)
      (:requirements :strips :typing)
      (:types lamp)
      (:predicates (off ?x - lamp) (on ?x - lamp))
      (:action switch :parameters (?x - lamp) :precondition (off ?x) :effect (and (on ?x) (not (off ?x)))))";

    fn task(goal: &str) -> GroundTask {
        let p = format!("(define (problem p) (:domain lamps) (:objects a b - lamp) (:init (off a) (off b)) (:goal {goal}))");
        load_task(DOMAIN, &p).unwrap()
    }

    #[test]
    fn written_plans_parse_back() {
        let t = task("(and (on a) (on b))");
        let plan = vec![t.find_action("switch", &["b"]).unwrap(), t.find_action("switch", &["a"]).unwrap()];
        let text = write_plan(&t, &plan);
        assert_eq!(text, "(switch b)\n(switch a)\n");
        let steps = parse_plan(&format!("; cost 2\n{text}\n")).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].line, 2);
        assert_eq!(validate_plan(&t, &steps), Validation::Valid { length: 2 });
    }

    #[test]
    fn parse_plan_is_case_insensitive_and_strict_on_shape() {
        let steps = parse_plan("(SWITCH A)  ; go").unwrap();
        assert_eq!(steps[0].name, "switch");
        assert_eq!(steps[0].args, ["a"]);
        assert!(parse_plan("switch a").is_err());
        assert!(parse_plan("()").is_err());
    }

    #[test]
    fn empty_plan_on_goal_instance_is_valid() {
        let t = task("(off a)");
        assert!(validate_plan(&t, &[]).is_valid());
        assert_eq!(validate_plan(&t, &[]).to_string(), "valid plan of length 0");
    }

    #[test]
    fn failures_name_the_first_bad_step() {
        let t = task("(and (on a) (on b))");
        let twice = parse_plan("(switch a)\n(switch a)").unwrap();
        assert!(matches!(validate_plan(&t, &twice), Validation::Inapplicable { step: 1, .. }));
        let unknown = parse_plan("(toggle a)").unwrap();
        assert_eq!(validate_plan(&t, &unknown), Validation::UnknownAction { step: 0, text: "(toggle a)".into() });
        let wrong_arity = parse_plan("(switch a b)").unwrap();
        assert!(matches!(validate_plan(&t, &wrong_arity), Validation::UnknownAction { step: 0, .. }));
        let short = parse_plan("(switch a)").unwrap();
        assert_eq!(
            validate_plan(&t, &short),
            Validation::GoalNotReached { length: 1, unsatisfied: 1 }
        );
    }
}
