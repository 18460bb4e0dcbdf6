use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{run_instance, Algorithm, RunConfig, StatsRecord};
use crate::domains::{pack, suites, DomainPack, GenParams};
use crate::pddl::ground;
use crate::sketch::{parse_sketch, Sketch};

fn default_k() -> u32 {
    2
}

fn yes() -> bool {
    true
}

fn standard() -> String {
    "standard".into()
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default = "default_k")]
    pub max_k: u32,
    pub budget: Option<u64>,
    pub workers: Option<usize>,
    #[serde(default = "yes")]
    pub strict: bool,
    #[serde(default)]
    pub suite: Vec<SuiteEntry>,
    #[serde(default)]
    pub instance: Vec<InstanceEntry>,
}

/// A built-in suite of one domain.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub domain: String,
    #[serde(default = "standard")]
    pub name: String,
    pub algorithms: Vec<String>,
    pub sketch: Option<PathBuf>,
}

/// One generated instance.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceEntry {
    pub domain: String,
    #[serde(default)]
    pub params: String,
    #[serde(default = "one")]
    pub seed: u64,
    pub algorithms: Vec<String>,
    pub sketch: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest: {0}")]
    Syntax(String),
    #[error("manifest: {0}")]
    Entry(String),
    #[error("sketch {path}: {msg}")]
    Sketch { path: PathBuf, msg: String },
}

struct Job {
    pack: &'static DomainPack,
    params: GenParams,
    cfg: RunConfig,
}

#[derive(Clone, Debug)]
pub struct BenchRun {
    pub record: StatsRecord,
    /// Problem text of the instance, when it was generated.
    pub problem: Option<String>,
    /// IPC plan text, for solved runs.
    pub plan: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub domain: String,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub solved: usize,
    /// Slowest solved run.
    pub max_t_ms: Option<f64>,
    /// Mean effective width over every episode of every solved run.
    pub aw: Option<f64>,
    pub mw: Option<u32>,
    pub invalid_plans: usize,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub runs: Vec<BenchRun>,
    pub summaries: Vec<Summary>,
}

impl BenchReport {
    pub fn records(&self) -> Vec<StatsRecord> {
        self.runs.iter().map(|r| r.record.clone()).collect()
    }
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, ManifestError> {
        toml::from_str(text).map_err(|e| ManifestError::Syntax(e.to_string()))
    }

    fn base_config(&self, algorithm: Algorithm) -> RunConfig {
        let mut cfg = RunConfig::new(algorithm);
        cfg.max_k = self.max_k;
        cfg.strict = self.strict;
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        cfg
    }

    fn jobs(&self, base: &Path, budget: Option<u64>) -> Result<Vec<Job>, ManifestError> {
        let mut out = Vec::new();
        let mut push = |domain: &str, params: GenParams, algs: &[String], sketch: &Option<PathBuf>| {
            let pk = pack(domain).map_err(|e| ManifestError::Entry(e.to_string()))?;
            let sk = load_sketch(pk, base, sketch.as_deref())?;
            for a in algs {
                let alg: Algorithm = a.parse().map_err(ManifestError::Entry)?;
                let mut cfg = self.base_config(alg);
                if let Some(b) = budget {
                    cfg.budget = b;
                }
                if alg == Algorithm::Siwr {
                    cfg.sketch = Some(sk.clone());
                }
                cfg.check().map_err(|e| ManifestError::Entry(e.to_string()))?;
                out.push(Job {
                    pack: pk,
                    params: params.clone(),
                    cfg,
                });
            }
            Ok::<(), ManifestError>(())
        };
        for s in &self.suite {
            let list = match s.name.as_str() {
                "standard" => suites::standard(&s.domain),
                "micro" => suites::micro(&s.domain),
                other => return Err(ManifestError::Entry(format!("unknown suite `{other}`"))),
            };
            if list.is_empty() {
                return Err(ManifestError::Entry(format!("no {} suite for `{}`", s.name, s.domain)));
            }
            for gp in list {
                push(&s.domain, gp, &s.algorithms, &s.sketch)?;
            }
        }
        for i in &self.instance {
            let gp = GenParams::parse(&i.params, i.seed).map_err(|e| ManifestError::Entry(e.to_string()))?;
            push(&i.domain, gp, &i.algorithms, &i.sketch)?;
        }
        Ok(out)
    }
}

fn load_sketch(pk: &DomainPack, base: &Path, path: Option<&Path>) -> Result<Sketch, ManifestError> {
    let Some(p) = path else {
        return Ok(pk.sketch());
    };
    let full = base.join(p);
    let text = std::fs::read_to_string(&full).map_err(|e| ManifestError::Sketch {
        path: full.clone(),
        msg: e.to_string(),
    })?;
    parse_sketch(&text).map_err(|e| ManifestError::Sketch {
        path: full,
        msg: e.to_string(),
    })
}

fn run_job(job: &Job) -> BenchRun {
    let name = job.pack.name;
    let label = job.params.to_string();
    let fail = |msg: String| BenchRun {
        record: StatsRecord::failed(name, &label, &job.cfg, msg),
        problem: None,
        plan: None,
    };
    let prob = match job.pack.generate(&job.params) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let instance = prob.name.clone();
    let task = match ground(&job.pack.domain_def(), &prob) {
        Ok(t) => t,
        Err(e) => return fail(e.to_string()),
    };
    match run_instance(&task, &job.cfg, name, &instance) {
        Ok(out) => BenchRun {
            plan: out.record.solved.then(|| out.plan_text(&task)),
            record: out.record,
            problem: Some(prob.to_pddl()),
        },
        Err(e) => {
            let mut r = fail(e.to_string());
            r.record.instance = instance;
            r
        }
    }
}

/// Runs every (instance, algorithm) pair of the manifest on a bounded pool
/// of worker threads. Records come back in manifest order. `budget`
/// overrides the manifest's budget.
pub fn bench(manifest: &Manifest, base: &Path, budget: Option<u64>) -> Result<BenchReport, ManifestError> {
    let jobs = manifest.jobs(base, budget)?;
    let workers = manifest
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, jobs.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<BenchRun>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let run = run_job(job);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(run);
            });
        }
    });
    let runs: Vec<BenchRun> = slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect();
    let summaries = summarize(&runs.iter().map(|r| r.record.clone()).collect::<Vec<_>>());
    Ok(BenchReport { runs, summaries })
}

/// One summary row per (domain, algorithm), in order of first appearance.
pub fn summarize(records: &[StatsRecord]) -> Vec<Summary> {
    let mut out: Vec<Summary> = Vec::new();
    let mut widths: Vec<Vec<u32>> = Vec::new();
    for r in records {
        let idx = match out.iter().position(|s| s.domain == r.domain && s.algorithm == r.algorithm) {
            Some(i) => i,
            None => {
                out.push(Summary {
                    domain: r.domain.clone(),
                    algorithm: r.algorithm,
                    runs: 0,
                    solved: 0,
                    max_t_ms: None,
                    aw: None,
                    mw: None,
                    invalid_plans: 0,
                });
                widths.push(Vec::new());
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.runs += 1;
        if r.valid == Some(false) {
            s.invalid_plans += 1;
        }
        if !r.solved {
            continue;
        }
        s.solved += 1;
        s.max_t_ms = Some(s.max_t_ms.map_or(r.wall_ms, |t| t.max(r.wall_ms)));
        if let Some(mw) = r.mw {
            s.mw = Some(s.mw.map_or(mw, |m| m.max(mw)));
            widths[idx].extend(&r.widths);
        }
    }
    for (s, w) in out.iter_mut().zip(&widths) {
        if s.mw.is_some() {
            s.aw = Some(super::average_width(w));
        }
    }
    out
}
