//! `reldec`: run relative-decoherence scenarios and verifications.
//!
//! Exit status: 0 when every assertion passes, 2 when a report was written
//! but an assertion failed, 1 on usage or spec errors.

mod commands;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{RunConfig, Source, Status, WitnessConfig};
use output::Format;
use reldec_core::witness::{DEFAULT_RESTARTS, DEFAULT_STEPS};

#[derive(Debug, Parser)]
#[command(name = "reldec", version, about = "Relative-decoherence scenarios, beable sampling and coherence witnesses")]
struct Cli {
    /// Worker threads for sampling and witness search (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Built-in scenario or preset name.
    #[arg(long)]
    name: Option<String>,
    /// Path to a JSON spec.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Common {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct Sampling {
    /// Ensemble size N.
    #[arg(long)]
    shots: Option<usize>,
    /// Critical |z| for the statistical checks.
    #[arg(long)]
    zcrit: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a built-in (`measurement`, `cat-i`, `cat-ii`, `wigner`, `zurek`) or user scenario.
    Scenario {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Compare subensemble averages with conditional-state predictions.
    VerifyTheorem {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Compare empirical beable frequencies with the Born weights.
    Frequencies {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Search for a product projector pair witnessing branch interference.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        /// Also compute the exhaustive grid lower bound.
        #[arg(long)]
        certify: bool,
        /// Grid points per angle for `--certify`.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
}

fn config(common: Common, sampling: Option<Sampling>) -> RunConfig {
    let source = match (common.input.name, common.input.spec) {
        (Some(n), _) => Source::Name(n),
        (None, Some(p)) => Source::Spec(p),
        (None, None) => unreachable!("clap enforces one input"),
    };
    let (shots, z_crit) = sampling.map_or((None, None), |s| (s.shots, s.zcrit));
    RunConfig { source, shots, seed: common.seed, z_crit, out: common.out, format: common.format }
}

fn dispatch(command: Command) -> anyhow::Result<Status> {
    match command {
        Command::Scenario { common, sampling } => commands::cmd_scenario(&config(common, Some(sampling))),
        Command::VerifyTheorem { common, sampling } => commands::cmd_verify_theorem(&config(common, Some(sampling))),
        Command::Frequencies { common, sampling } => commands::cmd_frequencies(&config(common, Some(sampling))),
        Command::Witness { common, restarts, steps, certify, resolution } => commands::cmd_witness(
            &config(common, None),
            WitnessConfig { restarts, steps, certify: certify.then_some(resolution) },
        ),
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.threads {
        Some(0) => anyhow::bail!("--threads must be at least 1"),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(|| dispatch(cli.command)),
        None => dispatch(cli.command),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::AssertionFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
