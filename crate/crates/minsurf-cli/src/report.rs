//! JSON artifacts. Keys are emitted in sorted order and numbers through the
//! shortest-roundtrip formatter, so identical runs produce identical bytes.

use minsurf::audit::{AuditReport, CheckStatus, GradientBoundFit};
use minsurf::solve::{SolveReport, Termination};
use serde_json::{json, Value};

pub fn solve_report_json(method: &str, report: &SolveReport) -> Value {
    let history: Vec<Value> = report
        .history
        .iter()
        .map(|h| {
            json!({
                "residual_sup": h.residual_sup,
                "sup_wedge2": h.sup_wedge2,
                "min_star_omega": h.min_star_omega,
                "volume": h.volume,
            })
        })
        .collect();
    json!({
        "schema": "1",
        "method": method,
        "converged": report.converged,
        "termination": termination_str(&report.termination),
        "iterations": report.iterations,
        "residual_sup": report.residual_sup,
        "residual_l2": report.residual_l2,
        "wall_time_secs": report.wall_time_secs,
        "history": history,
    })
}

fn termination_str(t: &Termination) -> String {
    match t {
        Termination::Converged => "converged".into(),
        Termination::MaxIter => "max_iter".into(),
        Termination::Diverged { node } => format!("diverged_at_node_{node}"),
        Termination::ContinuationIncomplete => "continuation_incomplete".into(),
    }
}

pub fn status_str(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "fail",
        CheckStatus::Info => "info",
    }
}

pub fn audit_report_json(
    report: &AuditReport,
    sup_wedge2: f64,
    violations: &[usize],
    identity: Option<(f64, f64)>,
    gradient_bound: Option<&GradientBoundFit>,
) -> Value {
    let checks: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "status": status_str(e.status),
                "worst_node": e.worst_node,
                "worst_value": e.worst_value,
                "tolerance": e.tolerance,
            })
        })
        .collect();
    let (pass, fail, info) = report
        .entries
        .iter()
        .fold((0, 0, 0), |(p, f, i), e| match e.status {
            CheckStatus::Pass => (p + 1, f, i),
            CheckStatus::Fail => (p, f + 1, i),
            CheckStatus::Info => (p, f, i + 1),
        });
    // Cap the listed violations; the count is always exact.
    let listed: Vec<usize> = violations.iter().take(100).copied().collect();
    let mut root = json!({
        "schema": "1",
        "solved": report.solved,
        "residual_sup": report.residual_sup,
        "checks": checks,
        "summary": { "pass": pass, "fail": fail, "info": info },
        "area_decreasing": {
            "sup_wedge2": sup_wedge2,
            "violation_count": violations.len(),
            "violations": listed,
        },
    });
    if let Some((sup_gap, mean_gap)) = identity {
        root["identity"] = json!({ "sup_gap": sup_gap, "mean_gap": mean_gap });
    }
    if let Some(fit) = gradient_bound {
        root["gradient_bound"] = json!({
            "c1": fit.c1,
            "c2": fit.c2,
            "nodes": fit.rows.len(),
        });
    }
    root
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON serialization");
    s.push('\n');
    s
}
