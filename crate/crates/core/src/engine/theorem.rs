use serde::Serialize;

use super::ensemble::occurs;
use super::{build_ensemble, Ensemble};
use crate::linalg;
use crate::operator::LocalOperator;
use crate::qstate::conditional_state;
use crate::rng::{domain, StreamKey};
use crate::{BeableObservable, Error, Ket, Observable, QuantumState, Result, SCHEMA_VERSION, TAU_ALG};

/// Note attached to every theorem report.
pub const LOCALITY_NOTE: &str =
    "simulated C1 measurements leave every member's beable value unchanged (locality of the beable)";

/// One beable value's comparison of the subensemble average of `C₁` with
/// the conditional-state prediction `Tr(C₁ ρ_1^(i))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremEntry {
    pub index: usize,
    pub value: String,
    pub weight: f64,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<f64>,
    /// Same prediction computed as `⟨Ψ|C₁ ⊗ Q_i|Ψ⟩ / w_i`, without a partial trace.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory_direct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub schema: u32,
    pub observable_support: Vec<String>,
    pub beable_support: Vec<String>,
    pub n: usize,
    pub seed: u64,
    pub z_crit: f64,
    pub entries: Vec<TheoremEntry>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn compared(&self) -> impl Iterator<Item = &TheoremEntry> {
        self.entries.iter().filter(|e| e.pass.is_some())
    }
}

/// `⟨Ψ|(C₁ ⊗ Q)|Ψ⟩ / w` by direct operator application.
fn direct_conditional_mean(psi: &Ket, q: &crate::Projector, c1: &Observable, weight: f64) -> Result<f64> {
    let layout = psi.layout();
    let qpsi = linalg::apply_local(layout, q.support(), q.matrix(), psi.amplitudes())?;
    let cqpsi = linalg::apply_local(layout, c1.support(), c1.matrix(), &qpsi)?;
    Ok(linalg::inner(psi.amplitudes(), &cqpsi).re / weight)
}

/// Runs the statistical check on an existing ensemble.
pub fn verify_on_ensemble(ensemble: &Ensemble, c1: &Observable, key: StreamKey, z_crit: f64) -> Result<TheoremReport> {
    if !(z_crit > 0.0) {
        return Err(Error::InvalidArgument("z_crit must be positive".into()));
    }
    let psi = ensemble.state();
    let beable = ensemble.beable();
    c1.check_in(psi.layout())?;
    if c1.support().iter().any(|l| beable.support().contains(l)) {
        return Err(Error::InvalidArgument("observable and beable must act on distinct subsystems".into()));
    }
    let counts = ensemble.counts();
    let mut entries = Vec::with_capacity(beable.len());
    for (i, (&weight, &count)) in ensemble.weights().iter().zip(&counts).enumerate() {
        let mut entry = TheoremEntry {
            index: i,
            value: beable.value_name(i),
            weight,
            count,
            mean: None,
            stderr: None,
            theory: None,
            theory_direct: None,
            z: None,
            pass: None,
            skipped: None,
        };
        if !occurs(weight) {
            entry.skipped = Some(format!("weight {weight:e} is at or below the branch threshold"));
        } else if count == 0 {
            entry.skipped = Some("subensemble is empty at this ensemble size".into());
        } else {
            let q = beable.projector(i);
            let (_, rho) = conditional_state(psi, q, c1.support())?;
            let theory = rho.expectation(c1.support(), c1.matrix())?.re;
            let direct = direct_conditional_mean(psi, q, c1, weight)?;
            let avg = super::subensemble_average(ensemble, i, c1, key)?;
            let dev = (avg.mean - theory).abs();
            let routes_agree = (theory - direct).abs() <= TAU_ALG;
            let within = dev <= (z_crit * avg.stderr).max(TAU_ALG);
            entry.mean = Some(avg.mean);
            entry.stderr = Some(avg.stderr);
            entry.theory = Some(theory);
            entry.theory_direct = Some(direct);
            entry.z = Some(if avg.stderr > 0.0 { (avg.mean - theory) / avg.stderr } else { 0.0 });
            entry.pass = Some(within && routes_agree);
        }
        entries.push(entry);
    }
    if entries.iter().all(|e| e.pass.is_none()) {
        return Err(Error::InvalidArgument(format!(
            "ensemble of {} systems leaves every occurring subensemble empty",
            ensemble.len()
        )));
    }
    let pass = entries.iter().filter_map(|e| e.pass).all(|p| p);
    Ok(TheoremReport {
        schema: SCHEMA_VERSION,
        observable_support: c1.support().to_vec(),
        beable_support: beable.support().to_vec(),
        n: ensemble.len(),
        seed: ensemble.seed(),
        z_crit,
        entries,
        pass,
        notes: vec![LOCALITY_NOTE.to_string()],
    })
}

/// Samples `n` systems, measures `c1` in every subensemble and compares the
/// averages with the conditional subsystem states. Values of negligible
/// weight or with empty subensembles are skipped with a note.
pub fn verify_conditional_state_theorem(
    psi: &Ket,
    beable: &BeableObservable,
    c1: &Observable,
    n: usize,
    seed: u64,
    z_crit: f64,
) -> Result<TheoremReport> {
    let ensemble = build_ensemble(psi, beable, n, seed)?;
    verify_on_ensemble(&ensemble, c1, StreamKey::new(seed, domain::MEASUREMENT), z_crit)
}
