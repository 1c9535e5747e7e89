//! Object/subject splits and declarative scenarios.
//!
//! A scenario fixes a composite state, names its beables and observables,
//! and walks through `shift`, `convert`, `measure` and `witness` steps that
//! move the cut and evaluate what each subject sees.

mod run;
mod spec;
mod split;

use std::path::{Path, PathBuf};

pub use run::{
    run_scenario, Claim, ClaimKind, Component, Decomposition, MeasureReport, Relativity, ScenarioReport, StepReport, Verdict,
    WitnessReport,
};
pub use spec::{
    Action, CertifySpec, MeasureExpect, OptimizeSpec, Sampling, ScenarioDoc, ScenarioSpec, SplitSpec, Step, StepDoc, Toward,
    WitnessExpect,
};
pub use split::{convert_environment_to_subject, shift_cut, Direction, Shifted, Split, SplitView, SubjectBeable};

use crate::{Error, Result};

/// Colon-separated list of directories searched for `<name>.json`.
pub const SCENARIO_DIR_ENV: &str = "RELDEC_SCENARIO_DIR";

const BUILTINS: &[(&str, &str)] = &[
    ("measurement", include_str!("../../scenarios/measurement.json")),
    ("cat-i", include_str!("../../scenarios/cat-i.json")),
    ("cat-ii", include_str!("../../scenarios/cat-ii.json")),
    ("wigner", include_str!("../../scenarios/wigner.json")),
    ("zurek", include_str!("../../scenarios/zurek.json")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

/// JSON source of a built-in scenario.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load_spec_file(path: &Path) -> Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::spec(path.display().to_string(), format!("cannot read spec file: {e}")))?;
    ScenarioSpec::parse(&text)
}

fn search_dirs() -> Vec<PathBuf> {
    std::env::var_os(SCENARIO_DIR_ENV).map(|v| std::env::split_paths(&v).collect()).unwrap_or_default()
}

/// Built-ins first, then `<dir>/<name>.json` for each directory in
/// `RELDEC_SCENARIO_DIR`.
pub fn resolve_scenario(name: &str) -> Result<ScenarioSpec> {
    if let Some(src) = builtin_source(name) {
        return ScenarioSpec::parse(src);
    }
    for dir in search_dirs() {
        let candidate = dir.join(format!("{name}.json"));
        if candidate.is_file() {
            return load_spec_file(&candidate);
        }
    }
    Err(Error::InvalidArgument(format!(
        "unknown scenario `{name}` (built-ins: {}; set {SCENARIO_DIR_ENV} to add more)",
        builtin_names().collect::<Vec<_>>().join(", ")
    )))
}
