use serde::Serialize;

use super::Ensemble;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyEntry {
    pub index: usize,
    pub value: String,
    pub count: usize,
    pub frequency: f64,
    pub expected: f64,
    pub z: f64,
    pub pass: bool,
}

/// Empirical beable frequencies `N_i/N` against the Born weights `w_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub schema: u32,
    pub n: usize,
    pub z_crit: f64,
    pub entries: Vec<FrequencyEntry>,
    pub pass: bool,
}

impl ConvergenceReport {
    /// `Σ N_i = N`, checked on the integer counts.
    pub fn counts_conserved(&self) -> bool {
        self.entries.iter().map(|e| e.count).sum::<usize>() == self.n
    }
}

/// z-score of `count/n` against a binomial with success probability `w`.
/// When `w` is 0 or 1 the binomial is degenerate and z is 0 by convention;
/// the entry still fails if the count contradicts the certain outcome.
fn z_score(count: usize, n: usize, w: f64) -> (f64, bool) {
    let freq = count as f64 / n as f64;
    let var = w * (1.0 - w) / n as f64;
    if var <= 0.0 {
        let consistent = if w <= 0.0 { count == 0 } else { count == n };
        return (0.0, consistent);
    }
    ((freq - w) / var.sqrt(), true)
}

/// Builds the report from raw counts and weights.
pub fn frequency_report_from_counts(
    counts: &[usize],
    weights: &[f64],
    names: &[String],
    z_crit: f64,
) -> ConvergenceReport {
    let n: usize = counts.iter().sum();
    let entries: Vec<FrequencyEntry> = counts
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (&count, &w))| {
            let (z, consistent) = z_score(count, n, w);
            FrequencyEntry {
                index: i,
                value: names.get(i).cloned().unwrap_or_else(|| i.to_string()),
                count,
                frequency: count as f64 / n as f64,
                expected: w,
                z,
                pass: consistent && z.abs() <= z_crit,
            }
        })
        .collect();
    let pass = entries.iter().all(|e| e.pass);
    ConvergenceReport { schema: SCHEMA_VERSION, n, z_crit, entries, pass }
}

/// Passes iff every `|z_i| ≤ z_crit`.
pub fn frequency_report(ensemble: &Ensemble, z_crit: f64) -> ConvergenceReport {
    let names: Vec<String> = (0..ensemble.beable().len()).map(|i| ensemble.beable().value_name(i)).collect();
    frequency_report_from_counts(&ensemble.counts(), ensemble.weights(), &names, z_crit)
}
