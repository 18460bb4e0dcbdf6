//! Running one algorithm on one task and recording Table-style statistics,
//! plus the benchmark driver over generated suites.

mod bench;
mod table;

pub use bench::{bench, summarize, BenchReport, BenchRun, InstanceEntry, Manifest, ManifestError, SuiteEntry, Summary};
pub use table::{records_csv, summary_text};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::features::CompileError;
use crate::pddl::{parse_plan, validate_plan, write_plan, ActionId, GroundTask};
use crate::search::{self, SerialConfig, SerialOutcome, SerialResult, Status, Terminus, TopGoal, MAX_WIDTH};
use crate::sketch::{siwr, SiwrError, Sketch, TerminationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bfs,
    Iw,
    Siw,
    Siwr,
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" => Ok(Algorithm::Bfs),
            "iw" => Ok(Algorithm::Iw),
            "siw" => Ok(Algorithm::Siw),
            "siwr" | "siw_r" | "siw-r" => Ok(Algorithm::Siwr),
            _ => Err(format!("unknown algorithm `{s}` (expected bfs, iw, siw or siwr)")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Bfs => "bfs",
            Algorithm::Iw => "iw",
            Algorithm::Siw => "siw",
            Algorithm::Siwr => "siwr",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub max_k: u32,
    /// Generated-node budget per search call.
    pub budget: u64,
    pub sketch: Option<Sketch>,
    /// Refuse sketches the termination check cannot certify.
    pub strict: bool,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> RunConfig {
        RunConfig {
            algorithm,
            max_k: 2,
            budget: search::default_budget(),
            sketch: None,
            strict: true,
        }
    }

    pub fn check(&self) -> Result<(), RunError> {
        if self.max_k > MAX_WIDTH {
            return Err(RunError::WidthTooLarge(self.max_k));
        }
        if self.algorithm == Algorithm::Siwr && self.sketch.is_none() {
            return Err(RunError::MissingSketch);
        }
        Ok(())
    }

    fn serial(&self) -> SerialConfig {
        SerialConfig {
            max_k: self.max_k,
            budget: self.budget,
            ..SerialConfig::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("siwr needs a sketch")]
    MissingSketch,
    #[error("width bound {0} exceeds the supported maximum of {MAX_WIDTH}")]
    WidthTooLarge(u32),
    #[error("sketch features do not compile: {0}")]
    Compile(CompileError),
    #[error("sketch is not certified terminating (rules left: {})", .0.remaining.len())]
    NotTerminating(TerminationReport),
}

impl From<SiwrError> for RunError {
    fn from(e: SiwrError) -> Self {
        match e {
            SiwrError::Compile(c) => RunError::Compile(c),
            SiwrError::NotTerminating(r) => RunError::NotTerminating(r),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Solved,
    Exhausted,
    Deadend,
    Cycle,
    EpisodeLimit,
    BudgetExceeded,
    /// The run could not be set up; only produced by the bench driver.
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Solved => 0,
            Outcome::Exhausted | Outcome::Deadend | Outcome::Cycle | Outcome::EpisodeLimit => 1,
            Outcome::Error => 2,
            Outcome::BudgetExceeded => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Solved => "solved",
            Outcome::Exhausted => "exhausted",
            Outcome::Deadend => "deadend",
            Outcome::Cycle => "cycle",
            Outcome::EpisodeLimit => "episode-limit",
            Outcome::BudgetExceeded => "budget-exceeded",
            Outcome::Error => "error",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One run of one algorithm on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsRecord {
    pub domain: String,
    pub instance: String,
    pub algorithm: Algorithm,
    pub max_k: u32,
    pub solved: bool,
    pub outcome: Outcome,
    pub plan_length: Option<usize>,
    pub wall_ms: f64,
    pub expanded: u64,
    pub generated: u64,
    /// Effective width of each episode, in order. Empty for bfs and iw.
    pub widths: Vec<u32>,
    pub aw: Option<f64>,
    pub mw: Option<u32>,
    /// What ended each episode: a rule id, `goal` or `goal-count`.
    pub termini: Vec<String>,
    /// Result of replaying the written plan, for solved runs.
    pub valid: Option<bool>,
    pub detail: Option<String>,
}

impl StatsRecord {
    pub fn failed(domain: &str, instance: &str, cfg: &RunConfig, detail: String) -> StatsRecord {
        StatsRecord {
            domain: domain.to_string(),
            instance: instance.to_string(),
            algorithm: cfg.algorithm,
            max_k: cfg.max_k,
            solved: false,
            outcome: Outcome::Error,
            plan_length: None,
            wall_ms: 0.0,
            expanded: 0,
            generated: 0,
            widths: Vec::new(),
            aw: None,
            mw: None,
            termini: Vec::new(),
            valid: None,
            detail: Some(detail),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats records serialize")
    }
}

pub struct RunOutput {
    pub record: StatsRecord,
    pub plan: Vec<ActionId>,
}

impl RunOutput {
    pub fn plan_text(&self, task: &GroundTask) -> String {
        write_plan(task, &self.plan)
    }
}

fn search_outcome(s: Status) -> Outcome {
    match s {
        Status::Solved => Outcome::Solved,
        Status::Exhausted => Outcome::Exhausted,
        Status::BudgetExceeded => Outcome::BudgetExceeded,
    }
}

fn serial_outcome(o: &SerialOutcome) -> (Outcome, Option<String>) {
    match o {
        SerialOutcome::Solved => (Outcome::Solved, None),
        SerialOutcome::Exhausted => (Outcome::Exhausted, None),
        SerialOutcome::BudgetExceeded => (Outcome::BudgetExceeded, None),
        SerialOutcome::Deadend(why) => (Outcome::Deadend, Some(why.clone())),
        SerialOutcome::Cycle => (Outcome::Cycle, None),
        SerialOutcome::EpisodeLimit => (Outcome::EpisodeLimit, None),
    }
}

fn terminus_name(t: Terminus, sketch: Option<&Sketch>) -> String {
    match (t, sketch) {
        (Terminus::Rule(i), Some(sk)) => sk.rules[i].id.clone(),
        (Terminus::Rule(i), None) => format!("rule{i}"),
        (Terminus::TopGoal, _) => "goal".into(),
        (Terminus::GoalCount, _) => "goal-count".into(),
        (Terminus::Target, _) => "target".into(),
    }
}

/// Mean of the episode widths; zero for a task whose goal holds initially.
pub fn average_width(widths: &[u32]) -> f64 {
    if widths.is_empty() {
        0.0
    } else {
        widths.iter().map(|&w| w as f64).sum::<f64>() / widths.len() as f64
    }
}

/// Replays the plan through its IPC text form, as `validate` would.
pub fn self_check(task: &GroundTask, plan: &[ActionId]) -> bool {
    parse_plan(&write_plan(task, plan)).is_ok_and(|steps| validate_plan(task, &steps).is_valid())
}

pub fn run_instance(task: &GroundTask, cfg: &RunConfig, domain: &str, instance: &str) -> Result<RunOutput, RunError> {
    cfg.check()?;
    let t0 = Instant::now();
    let mut rec = StatsRecord::failed(domain, instance, cfg, String::new());
    rec.detail = None;
    let plan = match cfg.algorithm {
        Algorithm::Bfs | Algorithm::Iw => {
            let goal = TopGoal(task);
            let r = if cfg.algorithm == Algorithm::Bfs {
                search::bfs(task, &task.init, &goal, cfg.budget)
            } else {
                search::iw(task, &task.init, &goal, cfg.max_k, cfg.budget)
            };
            rec.outcome = search_outcome(r.status);
            rec.expanded = r.expanded;
            rec.generated = r.generated;
            r.plan
        }
        Algorithm::Siw | Algorithm::Siwr => {
            let sketch = cfg.sketch.as_ref().filter(|_| cfg.algorithm == Algorithm::Siwr);
            let r: SerialResult = match sketch {
                Some(sk) => siwr(task, sk, cfg.serial(), cfg.strict)?,
                None => search::siw(task, cfg.serial()),
            };
            let (outcome, detail) = serial_outcome(&r.outcome);
            rec.outcome = outcome;
            rec.detail = detail;
            rec.expanded = r.expanded;
            rec.generated = r.generated;
            if r.solved() {
                rec.widths = r.trace.iter().map(|e| e.width).collect();
                rec.termini = r.trace.iter().map(|e| terminus_name(e.terminus, sketch)).collect();
                rec.aw = Some(average_width(&rec.widths));
                rec.mw = Some(rec.widths.iter().copied().max().unwrap_or(0));
            }
            r.plan
        }
    };
    rec.wall_ms = t0.elapsed().as_secs_f64() * 1000.0;
    rec.solved = rec.outcome == Outcome::Solved;
    if rec.solved {
        rec.plan_length = Some(plan.len());
        rec.valid = Some(self_check(task, &plan));
    }
    let plan = if rec.solved { plan } else { Vec::new() };
    Ok(RunOutput { record: rec, plan })
}
