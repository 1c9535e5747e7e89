use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::Serialize;

use reldec_core::engine::{build_ensemble, frequency_report, verify_conditional_state_theorem, DEFAULT_Z_CRIT};
use reldec_core::scenario::{load_spec_file, resolve_scenario, run_scenario};
use reldec_core::schema::{parse_problem, Problem};
use reldec_core::witness::{grid_certificate, optimize_witness, WitnessResult};
use reldec_core::SCHEMA_VERSION;

use crate::output::{self, Format};
use crate::presets;

pub const DEFAULT_SHOTS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 0;

/// Outcome of a command that produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    AssertionFailed,
}

/// Where the input comes from: a built-in name or a JSON file.
#[derive(Debug, Clone)]
pub enum Source {
    Name(String),
    Spec(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: Source,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub z_crit: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.shots == Some(0) {
            bail!("--shots must be at least 1");
        }
        if let Some(z) = self.z_crit {
            if !(z > 0.0 && z.is_finite()) {
                bail!("--zcrit must be a positive number");
            }
        }
        Ok(())
    }

    fn shots(&self) -> usize {
        self.shots.unwrap_or(DEFAULT_SHOTS)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn z_crit(&self) -> f64 {
        self.z_crit.unwrap_or(DEFAULT_Z_CRIT)
    }

    fn problem(&self) -> anyhow::Result<Problem> {
        match &self.source {
            Source::Name(n) => presets::load(n),
            Source::Spec(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
                Ok(parse_problem(&text)?)
            }
        }
    }

    fn write(&self, json: anyhow::Result<String>, csv: impl FnOnce() -> anyhow::Result<String>) -> anyhow::Result<()> {
        let text = match self.format {
            Format::Json => json?,
            Format::Csv => csv()?,
        };
        output::emit(&text, self.out.as_deref())
    }
}

fn status(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::AssertionFailed
    }
}

pub fn cmd_scenario(cfg: &RunConfig) -> anyhow::Result<Status> {
    cfg.validate()?;
    let mut spec = match &cfg.source {
        Source::Name(n) => resolve_scenario(n)?,
        Source::Spec(p) => load_spec_file(p)?,
    };
    if let Some(n) = cfg.shots {
        spec.sampling.shots = n;
    }
    if let Some(s) = cfg.seed {
        spec.sampling.seed = s;
    }
    if let Some(z) = cfg.z_crit {
        spec.sampling.z_crit = z;
    }
    let report = run_scenario(&spec)?;
    cfg.write(output::json(&report), || output::scenario_csv(&report))?;
    Ok(status(report.pass))
}

pub fn cmd_verify_theorem(cfg: &RunConfig) -> anyhow::Result<Status> {
    cfg.validate()?;
    let p = cfg.problem()?;
    let c1 = p.observable.as_ref().context("spec error at `observable`: verify-theorem needs an observable")?;
    let report = verify_conditional_state_theorem(&p.psi, &p.beable, c1, cfg.shots(), cfg.seed(), cfg.z_crit())?;
    cfg.write(output::json(&report), || output::theorem_csv(&report))?;
    Ok(status(report.pass))
}

pub fn cmd_frequencies(cfg: &RunConfig) -> anyhow::Result<Status> {
    cfg.validate()?;
    let p = cfg.problem()?;
    let ensemble = build_ensemble(&p.psi, &p.beable, cfg.shots(), cfg.seed())?;
    let report = frequency_report(&ensemble, cfg.z_crit());
    cfg.write(output::json(&report), || output::frequency_csv(&report))?;
    Ok(status(report.pass))
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessOutput {
    pub schema: u32,
    pub seed: u64,
    pub restarts: usize,
    pub steps: usize,
    #[serde(flatten)]
    pub result: WitnessResult,
}

#[derive(Debug, Clone, Copy)]
pub struct WitnessConfig {
    pub restarts: usize,
    pub steps: usize,
    /// Grid resolution when a certificate is requested.
    pub certify: Option<usize>,
}

pub fn cmd_witness(cfg: &RunConfig, w: WitnessConfig) -> anyhow::Result<Status> {
    cfg.validate()?;
    let p = cfg.problem()?;
    let mut result = optimize_witness(&p.psi, &p.beable, w.restarts, w.steps, cfg.seed())?;
    if let Some(resolution) = w.certify {
        result.certificate = Some(grid_certificate(&p.psi, &p.beable, resolution)?);
    }
    let out = WitnessOutput { schema: SCHEMA_VERSION, seed: cfg.seed(), restarts: w.restarts, steps: w.steps, result };
    cfg.write(output::json(&out), || output::witness_csv(&out))?;
    Ok(Status::Pass)
}
