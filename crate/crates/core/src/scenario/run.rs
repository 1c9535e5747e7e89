use serde::Serialize;
use serde_json::{json, Value};

use super::spec::{Action, MeasureExpect, ScenarioSpec, WitnessExpect};
use super::split::{convert_environment_to_subject, shift_cut, Split, SplitView};
use crate::engine::{build_ensemble, frequency_report, verify_on_ensemble, ConvergenceReport, TheoremReport};
use crate::linalg::{self, CMatrix};
use crate::qstate::{conditional_state, interference_term, partial_trace};
use crate::rng::{derive_seed, domain, StreamKey};
use crate::witness::{grid_certificate_on, optimize_witness_on, WitnessResult};
use crate::{Error, LocalOperator, QuantumState, Result, SCHEMA_VERSION, TAU_ALG, TAU_BRANCH};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub index: usize,
    pub value: String,
    pub weight: f64,
    /// Conditional object state `ρ^(i)`.
    pub state: Vec<Vec<[f64; 2]>>,
    pub purity: f64,
    /// `Tr(C ρ^(i))`.
    pub expectation: f64,
}

/// `ρ_O = Σ_i w_i ρ_O^(i)` relative to the subject beable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub object: Vec<String>,
    pub reduced: Vec<Vec<[f64; 2]>>,
    pub components: Vec<Component>,
    /// Largest entry of `|Σ w_i ρ^(i) − ρ_O|`.
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub observable: String,
    pub beable: String,
    pub weights: Vec<f64>,
    pub decomposition: Decomposition,
    pub frequencies: ConvergenceReport,
    pub theorem: TheoremReport,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub branches: String,
    pub branch_weights: Vec<f64>,
    pub p1_support: Vec<String>,
    pub p2_support: Vec<String>,
    /// `|interference|` at the projectors given in the spec.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimized: Option<WitnessResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<f64>,
    /// Best of the probe and optimized values.
    pub gap: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub discussion: String,
    pub op: &'static str,
    /// Split after the step.
    pub split: SplitView,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub step: usize,
    pub discussion: String,
    pub assertion: String,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    /// Object state decomposes into conditional states relative to the subject's beable.
    Decoherence,
    /// Nonzero interference between branches is witnessed on the object.
    Coherence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub step: usize,
    pub discussion: String,
    pub kind: ClaimKind,
    pub subject: String,
    pub object: Vec<String>,
}

/// Decoherence and coherence claims must never share a subject tag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relativity {
    pub claims: Vec<Claim>,
    pub contradictions: Vec<String>,
    pub pass: bool,
}

impl Relativity {
    fn from_claims(claims: Vec<Claim>) -> Self {
        let mut contradictions = Vec::new();
        for c in claims.iter().filter(|c| c.kind == ClaimKind::Coherence) {
            if let Some(d) = claims.iter().find(|d| d.kind == ClaimKind::Decoherence && d.subject == c.subject) {
                contradictions.push(format!(
                    "subject `{}` claims decoherence (step {}) and coherence (step {})",
                    c.subject, d.step, c.step
                ));
            }
        }
        let pass = contradictions.is_empty();
        Relativity { claims, contradictions, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub schema: u32,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub shots: usize,
    pub seed: u64,
    pub z_crit: f64,
    pub initial_split: SplitView,
    pub steps: Vec<StepReport>,
    pub assertions: Vec<Verdict>,
    pub relativity: Relativity,
    pub pass: bool,
}

impl ScenarioReport {
    pub fn failed_assertions(&self) -> impl Iterator<Item = &Verdict> {
        self.assertions.iter().filter(|v| !v.pass)
    }

    pub fn measure_steps(&self) -> impl Iterator<Item = (&StepReport, &MeasureReport)> {
        self.steps.iter().filter_map(|s| s.measure.as_ref().map(|m| (s, m)))
    }

    pub fn witness_steps(&self) -> impl Iterator<Item = (&StepReport, &WitnessReport)> {
        self.steps.iter().filter_map(|s| s.witness.as_ref().map(|w| (s, w)))
    }
}

struct Verdicts<'a> {
    step: usize,
    discussion: &'a str,
    out: &'a mut Vec<Verdict>,
}

impl Verdicts<'_> {
    fn push(&mut self, assertion: &str, expected: Value, actual: Value, pass: bool) {
        self.out.push(Verdict {
            step: self.step,
            discussion: self.discussion.to_string(),
            assertion: assertion.to_string(),
            expected,
            actual,
            pass,
        });
    }

    fn flag(&mut self, assertion: &str, expected: Option<bool>, actual: bool) {
        if let Some(e) = expected {
            self.push(assertion, json!(e), json!(actual), e == actual);
        }
    }
}

fn step_error(index: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Step { .. } => e,
        other => Error::Step { index, reason: other.to_string() },
    }
}

/// Executes the steps in order. Deterministic: the same spec yields the
/// same report, independent of the worker count.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioReport> {
    let mut split = spec.split.clone();
    let mut steps = Vec::with_capacity(spec.steps.len());
    let mut assertions = Vec::new();
    let mut claims = Vec::new();
    for (index, step) in spec.steps.iter().enumerate() {
        let fail = step_error(index);
        let mut notes = Vec::new();
        let mut measure = None;
        let mut witness = None;
        let mut verdicts = Verdicts { step: index, discussion: &step.discussion, out: &mut assertions };
        let seed = derive_seed(spec.sampling.seed, index as u64);
        match &step.action {
            Action::Shift { labels, direction } => {
                let out = shift_cut(&split, labels, *direction).map_err(&fail)?;
                notes.extend(out.note);
                split = out.split;
            }
            Action::Convert { beable, replace } => {
                split = convert_environment_to_subject(&split, beable, spec.beable(beable)?, *replace).map_err(&fail)?;
            }
            Action::Measure { observable, expect } => {
                let report = run_measure(spec, &split, observable, seed).map_err(&fail)?;
                check_measure(&mut verdicts, expect, &report);
                notes.extend(report.theorem.entries.iter().filter_map(|e| {
                    e.skipped.as_ref().map(|s| format!("value `{}` not compared: {s}", e.value))
                }));
                claims.push(Claim {
                    step: index,
                    discussion: step.discussion.clone(),
                    kind: ClaimKind::Decoherence,
                    subject: split.tag(),
                    object: split.object().to_vec(),
                });
                measure = Some(report);
            }
            Action::Witness { branches, probe, optimize, certify, expect } => {
                let report = run_witness(spec, &split, branches, probe.as_ref(), *optimize, *certify, seed).map_err(&fail)?;
                check_witness(&mut verdicts, expect, &report);
                if let Some(note) = report.optimized.as_ref().and_then(|o| o.note.clone()) {
                    notes.push(note);
                }
                if report.gap > TAU_ALG {
                    claims.push(Claim {
                        step: index,
                        discussion: step.discussion.clone(),
                        kind: ClaimKind::Coherence,
                        subject: split.tag(),
                        object: split.object().to_vec(),
                    });
                }
                witness = Some(report);
            }
        }
        steps.push(StepReport {
            index,
            discussion: step.discussion.clone(),
            op: step.action.op(),
            split: split.view(),
            notes,
            measure,
            witness,
        });
    }
    let relativity = Relativity::from_claims(claims);
    let pass = relativity.pass && assertions.iter().all(|v| v.pass);
    Ok(ScenarioReport {
        schema: SCHEMA_VERSION,
        name: spec.name.clone(),
        description: spec.description.clone(),
        shots: spec.sampling.shots,
        seed: spec.sampling.seed,
        z_crit: spec.sampling.z_crit,
        initial_split: spec.split.view(),
        steps,
        assertions,
        relativity,
        pass,
    })
}

fn run_measure(spec: &ScenarioSpec, split: &Split, observable: &str, seed: u64) -> Result<MeasureReport> {
    let subject = split
        .subject_beable()
        .ok_or_else(|| Error::InvalidArgument("measure needs a subject beable; convert the subject first".into()))?;
    let c = spec.observable(observable)?;
    if let Some(l) = c.support().iter().find(|l| !split.object().contains(l)) {
        return Err(Error::InvalidArgument(format!("observable `{observable}` acts on `{l}`, outside the object")));
    }
    let psi = &spec.psi;
    let beable = &subject.beable;
    let object = split.object();
    let reduced = partial_trace(psi, object)?;
    let dim = reduced.matrix().nrows();
    let mut mixture = CMatrix::zeros(dim, dim);
    let mut components = Vec::new();
    let mut weights = Vec::with_capacity(beable.len());
    for (i, q) in beable.projectors().iter().enumerate() {
        let w = crate::qstate::event_probability(psi, q)?;
        weights.push(w);
        if w <= TAU_BRANCH {
            continue;
        }
        let (w, rho) = conditional_state(psi, q, object)?;
        mixture += rho.matrix() * linalg::C64::new(w, 0.0);
        components.push(Component {
            index: i,
            value: beable.value_name(i),
            weight: w,
            state: linalg::matrix_to_pairs(rho.matrix()),
            purity: rho.purity(),
            expectation: rho.expectation(c.support(), c.matrix())?.re,
        });
    }
    let residual = linalg::max_abs_diff(&mixture, reduced.matrix());
    let ensemble = build_ensemble(psi, beable, spec.sampling.shots, seed)?;
    let frequencies = frequency_report(&ensemble, spec.sampling.z_crit);
    let theorem = verify_on_ensemble(&ensemble, c, StreamKey::new(seed, domain::MEASUREMENT), spec.sampling.z_crit)?;
    Ok(MeasureReport {
        observable: observable.to_string(),
        beable: subject.name.clone(),
        weights,
        decomposition: Decomposition {
            object: object.to_vec(),
            reduced: linalg::matrix_to_pairs(reduced.matrix()),
            components,
            residual,
            pass: residual <= TAU_ALG,
        },
        frequencies,
        theorem,
        seed,
    })
}

fn check_measure(v: &mut Verdicts, expect: &MeasureExpect, r: &MeasureReport) {
    if let Some(expected) = &expect.weights {
        let tol = expect.weights_tol.unwrap_or(TAU_ALG);
        let pass = expected.len() == r.weights.len()
            && expected.iter().zip(&r.weights).all(|(e, a)| (e - a).abs() <= tol);
        v.push("weights", json!(expected), json!(r.weights), pass);
    }
    v.flag("decomposition", expect.decomposition, r.decomposition.pass);
    v.flag("theorem", expect.theorem, r.theorem.pass);
    v.flag("frequencies", expect.frequencies, r.frequencies.pass);
    let pure = r.decomposition.components.iter().all(|c| (1.0 - c.purity).abs() <= TAU_ALG);
    v.flag("pure_conditionals", expect.pure_conditionals, pure);
    if let Some(expected) = &expect.conditional_means {
        let actual: Vec<Option<f64>> = (0..r.weights.len())
            .map(|i| r.decomposition.components.iter().find(|c| c.index == i).map(|c| c.expectation))
            .collect();
        let pass = expected.len() == actual.len()
            && expected.iter().zip(&actual).all(|(e, a)| match (e, a) {
                (None, _) => true,
                (Some(e), Some(a)) => (e - a).abs() <= TAU_ALG,
                (Some(_), None) => false,
            });
        v.push("conditional_means", json!(expected), json!(actual), pass);
    }
}

fn run_witness(
    spec: &ScenarioSpec,
    split: &Split,
    branches: &str,
    probe: Option<&(crate::Projector, crate::Projector)>,
    optimize: Option<super::spec::OptimizeSpec>,
    certify: Option<super::spec::CertifySpec>,
    seed: u64,
) -> Result<WitnessReport> {
    let beable = spec.beable(branches)?;
    let object = split.object();
    if let Some(l) = beable.support().iter().find(|l| !object.contains(l)) {
        return Err(Error::InvalidArgument(format!("branch beable `{branches}` acts on `{l}`, outside the object")));
    }
    let p1_support: Vec<String> = object.iter().filter(|l| !beable.support().contains(l)).cloned().collect();
    if p1_support.is_empty() {
        return Err(Error::InvalidArgument("object has no subsystem besides the branch beable's".into()));
    }
    let psi = &spec.psi;
    let probe_gap = match probe {
        Some((p1, p2)) => {
            if let Some(l) = p1.support().iter().find(|l| !p1_support.contains(l)) {
                return Err(Error::InvalidArgument(format!("p1 acts on `{l}`, outside object minus branch support")));
            }
            Some(interference_term(psi, beable, p1, p2)?.abs())
        }
        None => None,
    };
    let optimized = optimize
        .map(|o| optimize_witness_on(psi, beable, &p1_support, o.restarts, o.steps, seed))
        .transpose()?;
    let certificate = certify.map(|c| grid_certificate_on(psi, beable, &p1_support, c.resolution)).transpose()?;
    let gap = probe_gap.unwrap_or(0.0).max(optimized.as_ref().map_or(0.0, |o| o.gap));
    Ok(WitnessReport {
        branches: branches.to_string(),
        branch_weights: crate::engine::beable_weights(psi, beable)?,
        p1_support,
        p2_support: beable.support().to_vec(),
        probe_gap,
        optimized: optimized.map(|o| WitnessResult { certificate, ..o }),
        certificate,
        gap,
        seed,
    })
}

fn check_witness(v: &mut Verdicts, expect: &WitnessExpect, r: &WitnessReport) {
    v.flag("gap_positive", expect.gap_positive, r.gap > TAU_ALG);
    if let Some(min) = expect.min_gap {
        v.push("min_gap", json!(min), json!(r.gap), r.gap >= min);
    }
    if let Some(max) = expect.max_gap {
        v.push("max_gap", json!(max), json!(r.gap), r.gap <= max);
    }
    if let Some(min) = expect.min_certificate {
        let pass = r.certificate.is_some_and(|c| c >= min);
        v.push("min_certificate", json!(min), json!(r.certificate), pass);
    }
}
