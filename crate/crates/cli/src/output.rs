//! Report rendering. JSON is canonical; CSV is a flat one-row-per-check summary.

use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;

use reldec_core::engine::{ConvergenceReport, TheoremReport};
use reldec_core::scenario::ScenarioReport;

use crate::commands::WitnessOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn scenario_csv(r: &ScenarioReport) -> anyhow::Result<String> {
    let mut rows: Vec<Vec<String>> = r
        .assertions
        .iter()
        .map(|v| {
            vec![
                v.step.to_string(),
                v.discussion.clone(),
                v.assertion.clone(),
                v.expected.to_string(),
                v.actual.to_string(),
                v.pass.to_string(),
            ]
        })
        .collect();
    rows.push(vec![
        String::new(),
        String::new(),
        "relativity".into(),
        "no same-subject contradiction".into(),
        format!("{} contradiction(s)", r.relativity.contradictions.len()),
        r.relativity.pass.to_string(),
    ]);
    csv_table(&["step", "discussion", "assertion", "expected", "actual", "pass"], rows)
}

pub fn theorem_csv(r: &TheoremReport) -> anyhow::Result<String> {
    let rows = r
        .entries
        .iter()
        .map(|e| {
            vec![
                e.index.to_string(),
                e.value.clone(),
                e.weight.to_string(),
                e.count.to_string(),
                opt(e.mean),
                opt(e.stderr),
                opt(e.theory),
                opt(e.z),
                opt(e.pass),
                e.skipped.clone().unwrap_or_default(),
            ]
        })
        .collect();
    csv_table(&["index", "value", "weight", "count", "mean", "stderr", "theory", "z", "pass", "skipped"], rows)
}

pub fn frequency_csv(r: &ConvergenceReport) -> anyhow::Result<String> {
    let rows = r
        .entries
        .iter()
        .map(|e| {
            vec![
                e.index.to_string(),
                e.value.clone(),
                e.count.to_string(),
                e.frequency.to_string(),
                e.expected.to_string(),
                e.z.to_string(),
                e.pass.to_string(),
            ]
        })
        .collect();
    csv_table(&["index", "value", "count", "frequency", "expected", "z", "pass"], rows)
}

pub fn witness_csv(w: &WitnessOutput) -> anyhow::Result<String> {
    let r = &w.result;
    let rows = vec![vec![
        r.gap.to_string(),
        r.interference.to_string(),
        r.iterations.to_string(),
        r.restart.to_string(),
        opt(r.certificate),
        r.note.clone().unwrap_or_default(),
    ]];
    csv_table(&["gap", "interference", "iterations", "restart", "certificate", "note"], rows)
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
