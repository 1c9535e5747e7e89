use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::split::{Direction, Split};
use crate::engine::DEFAULT_Z_CRIT;
use crate::schema::{self, BeableSpec, LayoutSpec, ObservableSpec, ProjectorSpec, StateSpec};
use crate::witness::{DEFAULT_RESTARTS, DEFAULT_STEPS};
use crate::{BeableObservable, Error, Ket, LocalOperator, Observable, Projector, Result, SubsystemLayout};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub layout: LayoutSpec,
    pub state: StateSpec,
    #[serde(default)]
    pub beables: BTreeMap<String, BeableSpec>,
    #[serde(default)]
    pub observables: BTreeMap<String, ObservableSpec>,
    pub sampling: Sampling,
    pub split: SplitSpec,
    pub steps: Vec<StepDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub shots: usize,
    pub seed: u64,
    #[serde(default = "default_z_crit")]
    pub z_crit: f64,
}

fn default_z_crit() -> f64 {
    DEFAULT_Z_CRIT
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub object: Vec<String>,
    /// Optional; must be the complement of `object` when given.
    #[serde(default)]
    pub subject: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Toward {
    Object,
    Subject,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureExpect {
    /// Born weights of the subject beable's values, in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights_tol: Option<f64>,
    /// Object state equals the weighted sum of conditional states.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<bool>,
    /// Every conditional object state is pure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pure_conditionals: Option<bool>,
    /// `Tr(C ρ^(i))` per beable value (`null` skips a value).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional_means: Option<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessExpect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_positive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_certificate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSpec {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySpec {
    pub resolution: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepDoc {
    Shift {
        discussion: String,
        labels: Vec<String>,
        toward: Toward,
    },
    Convert {
        discussion: String,
        beable: String,
        #[serde(default)]
        replace: bool,
    },
    Measure {
        discussion: String,
        observable: String,
        #[serde(default)]
        expect: MeasureExpect,
    },
    Witness {
        discussion: String,
        /// Beable whose branches are tested for interference.
        branches: String,
        #[serde(default)]
        p1: Option<ProjectorSpec>,
        #[serde(default)]
        p2: Option<ProjectorSpec>,
        #[serde(default)]
        optimize: Option<OptimizeSpec>,
        #[serde(default)]
        certify: Option<CertifySpec>,
        #[serde(default)]
        expect: WitnessExpect,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Shift { labels: Vec<String>, direction: Direction },
    Convert { beable: String, replace: bool },
    Measure { observable: String, expect: MeasureExpect },
    Witness {
        branches: String,
        probe: Option<(Projector, Projector)>,
        optimize: Option<OptimizeSpec>,
        certify: Option<CertifySpec>,
        expect: WitnessExpect,
    },
}

impl Action {
    pub fn op(&self) -> &'static str {
        match self {
            Action::Shift { .. } => "shift",
            Action::Convert { .. } => "convert",
            Action::Measure { .. } => "measure",
            Action::Witness { .. } => "witness",
        }
    }

    fn changes_split(&self) -> bool {
        matches!(self, Action::Shift { .. } | Action::Convert { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub discussion: String,
    pub action: Action,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub name: String,
    pub description: Option<String>,
    pub layout: SubsystemLayout,
    pub psi: Ket,
    pub beables: BTreeMap<String, BeableObservable>,
    pub observables: BTreeMap<String, Observable>,
    pub sampling: Sampling,
    pub split: Split,
    pub steps: Vec<Step>,
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<Self> {
        schema::from_json::<ScenarioDoc>(text)?.build()
    }

    pub fn beable(&self, name: &str) -> Result<&BeableObservable> {
        self.beables.get(name).ok_or_else(|| Error::InvalidArgument(format!("unknown beable `{name}`")))
    }

    pub fn observable(&self, name: &str) -> Result<&Observable> {
        self.observables.get(name).ok_or_else(|| Error::InvalidArgument(format!("unknown observable `{name}`")))
    }
}

fn check_name<T>(map: &BTreeMap<String, T>, name: &str, kind: &str, path: String) -> Result<()> {
    if map.contains_key(name) {
        Ok(())
    } else {
        Err(Error::spec(path, format!("unknown {kind} `{name}`")))
    }
}

impl ScenarioDoc {
    pub fn build(&self) -> Result<ScenarioSpec> {
        schema::check_schema(self.schema)?;
        if self.name.trim().is_empty() {
            return Err(Error::spec("name", "empty scenario name"));
        }
        let layout = self.layout.build("layout")?;
        let psi = self.state.build(&layout, "state")?;
        let beables = self
            .beables
            .iter()
            .map(|(k, b)| Ok((k.clone(), b.build(&layout, &format!("beables.{k}"))?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let observables = self
            .observables
            .iter()
            .map(|(k, o)| Ok((k.clone(), o.build(&layout, &format!("observables.{k}"))?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        if self.sampling.shots == 0 {
            return Err(Error::spec("sampling.shots", "at least one shot is required"));
        }
        if !(self.sampling.z_crit > 0.0) {
            return Err(Error::spec("sampling.z_crit", "must be positive"));
        }
        let split = match &self.split.subject {
            Some(subject) => Split::with_sides(&layout, &self.split.object, subject),
            None => Split::new(&layout, &self.split.object),
        }
        .map_err(|e| Error::spec("split", e.to_string()))?;

        let mut steps = Vec::with_capacity(self.steps.len());
        for (k, doc) in self.steps.iter().enumerate() {
            let path = format!("steps[{k}]");
            let (discussion, action) = match doc {
                StepDoc::Shift { discussion, labels, toward } => {
                    layout.check_labels(labels).map_err(|e| Error::spec(format!("{path}.labels"), e.to_string()))?;
                    let direction = match toward {
                        Toward::Object => Direction::TowardObject,
                        Toward::Subject => Direction::TowardSubject,
                    };
                    (discussion, Action::Shift { labels: labels.clone(), direction })
                }
                StepDoc::Convert { discussion, beable, replace } => {
                    check_name(&beables, beable, "beable", format!("{path}.beable"))?;
                    (discussion, Action::Convert { beable: beable.clone(), replace: *replace })
                }
                StepDoc::Measure { discussion, observable, expect } => {
                    check_name(&observables, observable, "observable", format!("{path}.observable"))?;
                    (discussion, Action::Measure { observable: observable.clone(), expect: expect.clone() })
                }
                StepDoc::Witness { discussion, branches, p1, p2, optimize, certify, expect } => {
                    check_name(&beables, branches, "beable", format!("{path}.branches"))?;
                    let probe = match (p1, p2) {
                        (Some(a), Some(b)) => {
                            let p1 = a.build(&layout, None, &format!("{path}.p1"))?;
                            let support = beables[branches].support().to_vec();
                            let p2 = b.build(&layout, Some(&support), &format!("{path}.p2"))?;
                            if p2.support().iter().any(|l| !support.contains(l)) {
                                return Err(Error::spec(format!("{path}.p2.support"), "must lie within the branch beable's support"));
                            }
                            Some((p1, p2))
                        }
                        (None, None) => None,
                        _ => return Err(Error::spec(path, "give both `p1` and `p2`, or neither")),
                    };
                    if probe.is_none() && optimize.is_none() {
                        return Err(Error::spec(path, "a witness step needs `p1`/`p2`, `optimize`, or both"));
                    }
                    if let Some(c) = certify {
                        if c.resolution < 2 {
                            return Err(Error::spec(format!("{path}.certify.resolution"), "must be at least 2"));
                        }
                    }
                    (
                        discussion,
                        Action::Witness {
                            branches: branches.clone(),
                            probe,
                            optimize: *optimize,
                            certify: *certify,
                            expect: expect.clone(),
                        },
                    )
                }
            };
            if discussion.trim().is_empty() {
                return Err(Error::spec(format!("{path}.discussion"), "empty discussion id"));
            }
            steps.push(Step { discussion: discussion.clone(), action });
        }
        check_discussions(&steps)?;
        Ok(ScenarioSpec {
            name: self.name.clone(),
            description: self.description.clone(),
            layout,
            psi,
            beables,
            observables,
            sampling: self.sampling,
            split,
            steps,
        })
    }
}

/// A discussion is a contiguous run of steps; its split is fixed from its
/// first measure or witness step on.
fn check_discussions(steps: &[Step]) -> Result<()> {
    let mut finished: Vec<&str> = Vec::new();
    let mut current: Option<&str> = None;
    let mut locked = false;
    for (k, step) in steps.iter().enumerate() {
        let d = step.discussion.as_str();
        if current != Some(d) {
            if finished.contains(&d) {
                return Err(Error::spec(
                    format!("steps[{k}].discussion"),
                    format!("discussion `{d}` resumes after another discussion changed the split"),
                ));
            }
            if let Some(prev) = current {
                finished.push(prev);
            }
            current = Some(d);
            locked = false;
        }
        if step.action.changes_split() && locked {
            return Err(Error::spec(
                format!("steps[{k}]"),
                format!("`{}` changes the split in the middle of discussion `{d}`; start a new discussion", step.action.op()),
            ));
        }
        if !step.action.changes_split() {
            locked = true;
        }
    }
    Ok(())
}
