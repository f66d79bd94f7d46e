//! Plain-text and CSV renderings of a cross-run comparison.

use std::fmt::Write;

use mechsynth_core::analysis::{ComparisonReport, ScoreRow, TracePattern};
use mechsynth_core::geometry::Placement;
use serde::Serialize;

/// Activation-trace patterns for one rnn run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTraces {
    pub label: String,
    pub patterns: Vec<TracePattern>,
}

/// Per-mechanism distance scores for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunScores {
    pub label: String,
    pub rows: Vec<ScoreRow>,
}

/// Machine-readable form written as `<prefix>.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareOutput {
    pub comparison: ComparisonReport,
    pub traces: Vec<RunTraces>,
    pub scores: Vec<RunScores>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn chain(gears: &[(u8, Placement)]) -> String {
    gears
        .iter()
        .map(|(id, p)| match p {
            Placement::First => id.to_string(),
            Placement::Linear => format!("-{id}"),
            Placement::Coaxial => format!("|{id}"),
        })
        .collect()
}

pub fn comparison_text(out: &CompareOutput) -> String {
    let r = &out.comparison;
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "runs");
    let _ = writeln!(w, "{:<24} {:<7} {:>6} {:>8} {:>8} {:>10} {:>9} {:>8}", "label", "enc", "seed", "entries", "coaxial", "diversity", "mean_in", "std_in");
    for run in &r.runs {
        let _ = writeln!(
            w,
            "{:<24} {:<7} {:>6} {:>8} {:>8} {:>10.4} {:>9} {:>8}",
            run.label,
            run.encoding.to_string(),
            run.seed,
            run.archive_size,
            run.coaxial_mechanisms,
            run.diversity,
            opt(run.score_mean_in),
            opt(run.score_std_in)
        );
    }
    let _ = writeln!(w, "\nper encoding");
    for e in &r.encodings {
        let _ = writeln!(
            w,
            "{:<7} runs={} mean_entries={:.2} mean_coaxial={:.2} mean_diversity={:.4} mean_score_std_in={}",
            e.encoding.to_string(),
            e.runs,
            e.mean_archive_size,
            e.mean_coaxial_mechanisms,
            e.mean_diversity,
            opt(e.mean_score_std_in)
        );
    }
    let _ = writeln!(w, "\nper seed (rnn vs direct)");
    if r.verdicts.is_empty() {
        let _ = writeln!(w, "no seed has both an rnn and a direct run");
    } else {
        let _ = writeln!(w, "{:>6} {:>10} {:>10} {:>6} {:>6} {:>12} {:>12}", "seed", "div_rnn", "div_dir", "cx_rnn", "cx_dir", "more_diverse", "coaxial_ge");
        for v in &r.verdicts {
            let _ = writeln!(
                w,
                "{:>6} {:>10.4} {:>10.4} {:>6} {:>6} {:>12} {:>12}",
                v.seed,
                v.rnn_diversity,
                v.direct_diversity,
                v.rnn_coaxial,
                v.direct_coaxial,
                yes_no(v.rnn_more_diverse),
                yes_no(v.rnn_at_least_as_coaxial)
            );
        }
        let n = r.verdicts.len();
        let _ = writeln!(
            w,
            "rnn more diverse in {}/{} pairs (majority: {})",
            r.rnn_more_diverse_pairs,
            n,
            yes_no(r.majority_more_diverse)
        );
        let _ = writeln!(
            w,
            "rnn at least as many coaxial mechanisms in {}/{} pairs (majority: {})",
            r.rnn_coaxial_pairs,
            n,
            yes_no(r.majority_coaxial)
        );
    }
    for t in &out.traces {
        let _ = writeln!(w, "\nactivation traces: {}", t.label);
        for p in &t.patterns {
            let _ = writeln!(
                w,
                "  gen {:>3} {:<18} {}{}",
                p.generation,
                chain(&p.gears),
                p.hidden_signs.join(" "),
                if p.alternating { "  alternating" } else { "" }
            );
        }
    }
    s
}

/// `label,index,generation,avg_in,min_in,max_in`, one row per scored entry.
pub fn scores_csv(scores: &[RunScores]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["label", "index", "generation", "avg_in", "min_in", "max_in"]).expect("in-memory write");
    for run in scores {
        for row in &run.rows {
            wtr.write_record([
                run.label.clone(),
                row.index.to_string(),
                row.generation.to_string(),
                format!("{:.3}", row.avg_in),
                format!("{:.3}", row.min_in),
                format!("{:.3}", row.max_in),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}
