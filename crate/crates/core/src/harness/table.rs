use serde::Serialize;

use super::{StatsRecord, Summary};

/// Flat CSV row. List fields are `;`-separated, missing values are empty.
#[derive(Serialize)]
struct Row<'a> {
    domain: &'a str,
    instance: &'a str,
    algorithm: String,
    max_k: u32,
    solved: bool,
    outcome: &'static str,
    plan_length: Option<usize>,
    wall_ms: String,
    expanded: u64,
    generated: u64,
    widths: String,
    aw: Option<String>,
    mw: Option<u32>,
    termini: String,
    valid: Option<bool>,
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

pub fn records_csv(records: &[StatsRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(Row {
            domain: &r.domain,
            instance: &r.instance,
            algorithm: r.algorithm.to_string(),
            max_k: r.max_k,
            solved: r.solved,
            outcome: r.outcome.as_str(),
            plan_length: r.plan_length,
            wall_ms: format!("{:.3}", r.wall_ms),
            expanded: r.expanded,
            generated: r.generated,
            widths: join(&r.widths),
            aw: r.aw.map(|a| format!("{a:.4}")),
            mw: r.mw,
            termini: join(&r.termini),
            valid: r.valid,
        })
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

/// Aligned text table of summary rows: S, max T, AW and MW per domain and
/// algorithm.
pub fn summary_text(summaries: &[Summary]) -> String {
    let header = ["domain", "algorithm", "S", "max T (ms)", "AW", "MW"];
    let mut rows: Vec<[String; 6]> = vec![header.map(String::from)];
    for s in summaries {
        rows.push([
            s.domain.clone(),
            s.algorithm.to_string(),
            format!("{}/{}", s.solved, s.runs),
            s.max_t_ms.map_or("-".into(), |t| format!("{t:.1}")),
            s.aw.map_or("-".into(), |a| format!("{a:.2}")),
            s.mw.map_or("-".into(), |m| m.to_string()),
        ]);
    }
    let mut width = [0usize; 6];
    for r in &rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    for r in &rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, c)| if i < 2 { format!("{c:<w$}", w = width[i]) } else { format!("{c:>w$}", w = width[i]) })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
