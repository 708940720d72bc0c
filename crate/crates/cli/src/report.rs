//! Result files (CSV, JSON) and the terminal metric table.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::json;

use crate::bench::{MetricSummary, RunRecord, RuntimeReport, SweepCell};

pub const CSV_HEADER: &str = "task_id,method,final_loss,iters,fwd_us,bwd_us";

/// One row per task; timing columns are per-iteration microsecond means.
pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let iters = r.iterations.max(1) as f64;
        let _ = writeln!(
            out,
            "{},{},{:e},{},{:.3},{:.3}",
            r.task_id,
            r.method,
            r.final_loss,
            r.iterations,
            r.fwd_nanos as f64 / 1000.0 / iters,
            r.bwd_nanos as f64 / 1000.0 / iters,
        );
    }
    out
}

pub fn write_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    fs::write(path, records_to_csv(records))
        .with_context(|| format!("writing {}", path.display()))
}

fn summary_json(s: &MetricSummary) -> serde_json::Value {
    json!({
        "d5": s.d5,
        "d9": s.d9,
        "acc": s.acc,
        "n_tasks": s.n_tasks,
    })
}

/// Per-method summaries for a plain benchmark run.
pub fn bench_summary_json(rows: &[(String, MetricSummary)]) -> serde_json::Value {
    json!({
        "kind": "bench",
        "cells": rows
            .iter()
            .map(|(method, s)| {
                let mut cell = summary_json(s);
                cell["method"] = json!(method);
                cell
            })
            .collect::<Vec<_>>(),
    })
}

/// One JSON summary per sweep cell.
pub fn sweep_summary_json(axis: &str, cells: &[SweepCell]) -> serde_json::Value {
    json!({
        "kind": "sweep",
        "axis": axis,
        "cells": cells
            .iter()
            .map(|c| {
                let mut cell = summary_json(&c.summary);
                cell["method"] = json!(c.method);
                cell["axis_value"] = json!(c.axis_value);
                cell
            })
            .collect::<Vec<_>>(),
    })
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)
        .with_context(|| format!("writing {}", path.display()))
}

/// Method-by-metric table in the style of the quantitative-comparison
/// tables: rows are methods, columns D5 / D9 / Acc.
pub fn format_metric_table(rows: &[(String, MetricSummary)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<18} {:>10} {:>10} {:>8} {:>8}", "method", "D5", "D9", "Acc(%)", "tasks");
    for (label, s) in rows {
        let _ = writeln!(
            out,
            "{:<18} {:>10.1e} {:>10.1e} {:>8.1} {:>8}",
            label,
            s.d5,
            s.d9,
            s.acc * 100.0,
            s.n_tasks
        );
    }
    out
}

pub fn format_runtime(label: &str, report: &RuntimeReport) -> String {
    format!(
        "{label}: forward {:.1} us/iter, backward {:.1} us/iter ({} samples)",
        report.forward_us, report.backward_us, report.iterations_sampled
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> RunRecord {
        RunRecord {
            task_id: 3,
            method: "ours",
            final_loss: 1.25e-9,
            trace: vec![1.0, 1e-9],
            iterations: 100,
            fwd_nanos: 1_000_000,
            bwd_nanos: 2_000_000,
            converged: true,
            forward_failures: 0,
        }
    }

    #[test]
    fn csv_header_is_stable() {
        let csv = records_to_csv(&[record()]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "task_id,method,final_loss,iters,fwd_us,bwd_us");
        let row = lines.next().unwrap();
        assert!(row.starts_with("3,ours,1.25e-9,100,"));
    }

    #[test]
    fn summary_json_schema_is_stable() {
        let s = MetricSummary {
            d5: 1e-8,
            d9: 1e-6,
            acc: 0.9,
            n_tasks: 10,
        };
        let v = bench_summary_json(&[("ours".to_string(), s)]);
        assert_eq!(v["kind"], "bench");
        let cell = &v["cells"][0];
        for key in ["method", "d5", "d9", "acc", "n_tasks"] {
            assert!(!cell[key].is_null(), "missing {key}");
        }
    }
}
