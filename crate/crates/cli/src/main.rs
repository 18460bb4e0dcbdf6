use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};

use sketchplan::domains::{pack, suites, GenParams};
use sketchplan::harness::{self, Algorithm, Manifest, RunConfig, RunError, StatsRecord};
use sketchplan::pddl::{ground, parse_domain, parse_plan, parse_problem, validate_plan, GroundTask};
use sketchplan::search::{default_budget, SerialConfig};
use sketchplan::sketch::{check_goal_separation, check_termination, parse_sketch, siwr, Sketch};

#[derive(Parser)]
#[command(name = "sketchplan", version, about = "Width-based planning with policy sketches")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a PDDL problem and write an IPC plan
    Plan(PlanArgs),
    /// Replay a plan and check that it reaches the goal
    Validate {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
    },
    /// Run a benchmark manifest and print summary rows
    Bench(BenchArgs),
    /// Check a sketch for termination and goal separation
    Check(CheckArgs),
    /// Generate a problem for one of the shipped domains
    Gen(GenArgs),
}

#[derive(Args)]
struct PlanArgs {
    domain: PathBuf,
    problem: PathBuf,
    #[arg(long, default_value = "siwr")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 2)]
    max_width: u32,
    /// Generated-node budget per search call
    #[arg(long)]
    budget: Option<u64>,
    /// Sketch file; defaults to the shipped sketch when the domain is known
    #[arg(long)]
    sketch: Option<PathBuf>,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    strict: bool,
    /// Plan file; printed to stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV stats file; a JSON record is written next to it
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    manifest: PathBuf,
    #[arg(long)]
    budget: Option<u64>,
    /// Directory for generated problems and plans
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV stats file; JSON records, one per line, are written next to it
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    sketch: PathBuf,
    /// Domain for the separation check; defaults to the sketch's header
    #[arg(long)]
    domain: Option<String>,
    /// Generator parameters of a single sample; the micro suite otherwise
    #[arg(long)]
    params: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also run SIW_R on the samples and print effective widths
    #[arg(long)]
    widths: bool,
    #[arg(long, default_value_t = 2)]
    max_width: u32,
    #[arg(long, default_value_t = 100_000)]
    state_limit: usize,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    strict: bool,
}

#[derive(Args)]
struct GenArgs {
    domain: String,
    /// Comma-separated knobs, e.g. `markets=3,goods=2`
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the domain file
    #[arg(long)]
    domain_out: Option<PathBuf>,
    /// Print the knob table instead of generating
    #[arg(long)]
    schema: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Plan(a) => cmd_plan(a),
        Cmd::Validate { domain, problem, plan } => cmd_validate(&domain, &problem, &plan),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Gen(a) => cmd_gen(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load(domain: &Path, problem: &Path) -> Result<GroundTask> {
    let d = parse_domain(&read(domain)?).with_context(|| format!("{}", domain.display()))?;
    let p = parse_problem(&read(problem)?, &d).with_context(|| format!("{}", problem.display()))?;
    ground(&d, &p).with_context(|| format!("grounding {}", problem.display()))
}

fn load_sketch(path: &Path) -> Result<Sketch> {
    parse_sketch(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn write_stats(path: &Path, records: &[StatsRecord]) -> Result<()> {
    write(path, &harness::records_csv(records))?;
    let json: Vec<String> = records.iter().map(StatsRecord::to_json).collect();
    write(&path.with_extension("json"), &(json.join("\n") + "\n"))
}

fn cmd_plan(a: PlanArgs) -> Result<u8> {
    let task = load(&a.domain, &a.problem)?;
    let mut cfg = RunConfig::new(a.algorithm);
    cfg.max_k = a.max_width;
    cfg.budget = a.budget.unwrap_or_else(default_budget);
    cfg.strict = a.strict;
    if a.algorithm == Algorithm::Siwr {
        cfg.sketch = Some(match &a.sketch {
            Some(p) => load_sketch(p)?,
            None => match pack(&task.domain.name) {
                Ok(pk) => pk.sketch(),
                Err(_) => bail!("siwr needs --sketch for domain `{}`", task.domain.name),
            },
        });
    }
    let out = match harness::run_instance(&task, &cfg, &task.domain.name, &task.problem.name) {
        Ok(o) => o,
        Err(RunError::NotTerminating(rep)) => {
            eprintln!("sketch termination not certified; rules left: {:?}", rep.remaining);
            eprintln!("pass --strict false to run it anyway");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    let rec = &out.record;
    if rec.solved {
        let text = out.plan_text(&task);
        match &a.out {
            Some(p) => write(p, &text)?,
            None => print!("{text}"),
        }
    }
    let mut line = format!("{}: {} expanded={} generated={}", rec.algorithm, rec.outcome, rec.expanded, rec.generated);
    if let Some(n) = rec.plan_length {
        line += &format!(" length={n}");
    }
    if let (Some(aw), Some(mw)) = (rec.aw, rec.mw) {
        line += &format!(" AW={aw:.2} MW={mw}");
    }
    if let Some(d) = &rec.detail {
        line += &format!(" ({d})");
    }
    eprintln!("{line}");
    if let Some(p) = &a.stats {
        write_stats(p, std::slice::from_ref(rec))?;
    }
    Ok(rec.outcome.exit_code() as u8)
}

fn cmd_validate(domain: &Path, problem: &Path, plan: &Path) -> Result<u8> {
    let task = load(domain, problem)?;
    let steps = parse_plan(&read(plan)?).with_context(|| format!("{}", plan.display()))?;
    let v = validate_plan(&task, &steps);
    println!("{v}");
    Ok(if v.is_valid() { 0 } else { 1 })
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    let m = Manifest::parse(&read(&a.manifest)?)?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let rep = harness::bench(&m, base, a.budget)?;
    print!("{}", harness::summary_text(&rep.summaries));
    let records = rep.records();
    if let Some(p) = &a.stats {
        write_stats(p, &records)?;
    }
    if let Some(dir) = &a.out {
        for run in &rep.runs {
            let r = &run.record;
            if let Some(prob) = &run.problem {
                write(&dir.join(format!("{}.pddl", r.instance)), prob)?;
            }
            if let Some(plan) = &run.plan {
                write(&dir.join(format!("{}.{}.plan", r.instance, r.algorithm)), plan)?;
            }
        }
        for pk in m.suite.iter().map(|s| &s.domain).chain(m.instance.iter().map(|i| &i.domain)) {
            write(&dir.join(format!("{pk}-domain.pddl")), pack(pk)?.domain)?;
        }
    }
    for r in records.iter().filter(|r| r.detail.is_some() && !r.solved) {
        eprintln!("{} {} {}: {}", r.domain, r.instance, r.algorithm, r.detail.as_deref().unwrap_or(""));
    }
    let invalid: usize = rep.summaries.iter().map(|s| s.invalid_plans).sum();
    if invalid > 0 {
        eprintln!("{invalid} plan(s) failed validation");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_check(a: CheckArgs) -> Result<u8> {
    let sk = load_sketch(&a.sketch)?;
    let mut failed = false;
    let term = check_termination(&sk);
    let verdict = if term.terminating { "terminating" } else { "unknown" };
    println!("termination: {verdict}");
    let order: Vec<String> = term
        .eliminations
        .iter()
        .map(|e| format!("{} ({:?}, {})", sk.rules[e.rule].id, e.case, sk.features[e.feature].name))
        .collect();
    println!("elimination order: {}", if order.is_empty() { "-".into() } else { order.join(", ") });
    if !term.terminating {
        let left: Vec<&str> = term.remaining.iter().map(|&r| sk.rules[r].id.as_str()).collect();
        println!("not eliminated: {}", left.join(", "));
        failed |= a.strict;
    }

    let Some(domain) = a.domain.clone().or_else(|| sk.domain.clone()) else {
        println!("separation: skipped (no domain given)");
        return Ok(failed as u8);
    };
    let pk = pack(&domain)?;
    let samples = match &a.params {
        Some(p) => vec![GenParams::parse(p, a.seed)?],
        None => suites::micro(&domain),
    };
    let dom = pk.domain_def();
    let mut tasks = Vec::new();
    for gp in &samples {
        tasks.push(ground(&dom, &pk.generate(gp)?)?);
    }
    match check_goal_separation(&sk, &tasks, a.state_limit) {
        Ok(rep) => {
            let verdict = if rep.separating { "separating" } else { "not separating" };
            println!("separation: {verdict} over {} sample(s), {} states", tasks.len(), rep.states_checked);
            println!("goal valuations:");
            for b in &rep.goal_valuations {
                println!("  {}", sk.format_projection(b));
            }
            if let Some(w) = &rep.witness {
                println!("witness (sample {}, non-goal): {}", w.task, sk.format_projection(&w.valuation));
                println!("  {}", w.atoms.join(" "));
                failed = true;
            }
        }
        Err(e) => {
            println!("separation: not checked ({e})");
            failed = true;
        }
    }

    if a.widths {
        let cfg = SerialConfig {
            max_k: a.max_width,
            ..SerialConfig::default()
        };
        let mut hist: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, t) in tasks.iter().enumerate() {
            let r = siwr(t, &sk, cfg, false)?;
            if !r.solved() {
                println!("sample {i}: siwr {:?}", r.outcome);
                failed = true;
            }
            for e in &r.trace {
                *hist.entry(e.width).or_default() += 1;
            }
        }
        println!("effective widths:");
        for (w, n) in &hist {
            println!("  {w}: {n}");
        }
    }
    Ok(failed as u8)
}

fn cmd_gen(a: GenArgs) -> Result<u8> {
    let pk = pack(&a.domain)?;
    if a.schema {
        print!("{}", pk.schema);
        return Ok(0);
    }
    let text = pk.generate_text(&GenParams::parse(&a.params, a.seed)?)?;
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &a.domain_out {
        write(p, pk.domain)?;
    }
    Ok(0)
}
