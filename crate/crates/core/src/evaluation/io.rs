use std::fmt::Write as _;

use super::{EvalError, ExperimentResult, FoldResult, ModelKind, TracePoint};
use crate::features::Composition;

pub const RESULTS_HEADER: &str = "composition,model,subject,nrmse,r2";
pub const TRACE_HEADER: &str = "t_s,paee_true_wkg,paee_pred_wkg";

/// One row per successful fold, in the order given.
pub fn write_results_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in results {
        for f in &r.folds {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.composition.name(),
                r.model.name(),
                f.subject,
                f.nrmse,
                f.r2
            );
        }
    }
    out
}

/// Groups rows into cells in order of first appearance. Traces are empty.
pub fn parse_results_csv(text: &str) -> Result<Vec<ExperimentResult>, EvalError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == RESULTS_HEADER => {}
        other => {
            return Err(EvalError::Parse(format!(
                "expected header `{RESULTS_HEADER}`, found `{}`",
                other.unwrap_or("")
            )))
        }
    }
    let mut cells: Vec<ExperimentResult> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |why: String| EvalError::Parse(format!("line {}: {why}", i + 2));
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(bad(format!("{} fields", cols.len())));
        }
        let comp: Composition = cols[0].parse().map_err(bad)?;
        let model: ModelKind = cols[1].parse().map_err(bad)?;
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        let fold = FoldResult {
            subject: cols[2].to_string(),
            nrmse: num(cols[3])?,
            r2: num(cols[4])?,
            trace: Vec::new(),
        };
        match cells
            .iter_mut()
            .find(|c| c.composition == comp && c.model == model)
        {
            Some(c) => c.folds.push(fold),
            None => cells.push(ExperimentResult {
                composition: comp,
                model,
                folds: vec![fold],
                failures: Vec::new(),
            }),
        }
    }
    Ok(cells)
}

pub fn trace_file_name(comp: Composition, model: ModelKind, subject: &str) -> String {
    format!("trace_{}_{}_{subject}.csv", comp.name(), model.slug())
}

pub fn write_trace_csv(trace: &[TracePoint]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for p in trace {
        let _ = writeln!(out, "{},{},{}", p.t_s, p.truth, p.pred);
    }
    out
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TracePoint>, EvalError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(TRACE_HEADER) {
        return Err(EvalError::Parse(format!("expected header `{TRACE_HEADER}`")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let v: Vec<f64> = line
                .split(',')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| EvalError::Parse(format!("line {}: {e}", i + 2)))?;
            if v.len() != 3 {
                return Err(EvalError::Parse(format!("line {}: {} fields", i + 2, v.len())));
            }
            Ok(TracePoint {
                t_s: v[0],
                truth: v[1],
                pred: v[2],
            })
        })
        .collect()
}

/// Failed folds as `composition,model,subject,reason`.
pub fn write_failures_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from("composition,model,subject,reason\n");
    for r in results {
        for f in &r.failures {
            let _ = writeln!(
                out,
                "{},{},{},\"{}\"",
                r.composition.name(),
                r.model.name(),
                f.subject,
                f.reason.replace('"', "'")
            );
        }
    }
    out
}
