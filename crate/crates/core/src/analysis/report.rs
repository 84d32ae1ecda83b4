//! Plain CSV renderings of analysis results. Numbers use the shortest
//! representation that parses back to the same value.

use std::fmt::Write;

use super::{ComponentSummary, KPosterior, SlmpReport};
use crate::sampler::PosteriorTrace;

pub fn k_histogram_csv(k: &KPosterior) -> String {
    let mut out = String::from("K,count,probability\n");
    for (&kv, &count) in &k.histogram {
        writeln!(out, "{kv},{count},{}", k.probability(kv)).unwrap();
    }
    out
}

pub fn k_trace_csv<T>(trace: &PosteriorTrace<T>) -> String {
    let mut out = String::from("iteration,K\n");
    for r in &trace.records {
        writeln!(out, "{},{}", r.iteration, r.k).unwrap();
    }
    out
}

/// Matrix with a leading row-name column.
pub fn matrix_csv(
    corner: &str,
    row_names: &[String],
    col_names: &[String],
    rows: &[Vec<f64>],
) -> String {
    let mut out = String::from(corner);
    for c in col_names {
        write!(out, ",{c}").unwrap();
    }
    out.push('\n');
    for (name, row) in row_names.iter().zip(rows) {
        out.push_str(name);
        for v in row {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn cooccurrence_csv(matrix: &[Vec<f64>]) -> String {
    let names = numbered("x", matrix.len());
    matrix_csv("observation", &names, &names, matrix)
}

pub fn slmp_csv(report: &SlmpReport) -> String {
    let d = report.per_component.first().map_or(0, Vec::len);
    matrix_csv(
        "observation",
        &numbered("x", report.per_component.len()),
        &numbered("gamma", d),
        &report.per_component,
    )
}

/// Long-format summaries: one line per (row, component).
pub fn summaries_csv(row_prefix: &str, summaries: &[Vec<ComponentSummary>]) -> String {
    let mut out = String::from("row,component,median,lower95,upper95\n");
    for (r, row) in summaries.iter().enumerate() {
        for (i, s) in row.iter().enumerate() {
            writeln!(
                out,
                "{row_prefix}{},gamma{},{},{},{}",
                r + 1,
                i + 1,
                s.median,
                s.lower,
                s.upper
            )
            .unwrap();
        }
    }
    out
}
