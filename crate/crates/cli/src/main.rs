use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use becreg::commands::{self, Outcome, Profile};
use becreg::config::{ConfigError, ScenarioConfig};
use becreg::output::RunWriter;
use becreg::pipeline;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "becreg", version, about = "Condensate-register quantum gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (JSON). Omitted keys take the reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for datasets and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for data-parallel stages (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = ProfileArg::Strict)]
    tolerance_profile: ProfileArg,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Derived trap, lattice, interaction and thermodynamic parameters.
    Derive,
    /// Mean-field condensate trajectories at the interference detuning.
    Josephson,
    /// CNOT truth tables (desk-scale exact and full-scale mean-field).
    Cnot,
    /// Oscillator-mediated √SWAP coupling and gate.
    Sqrtswap,
    /// Condensate imbalance readout traces.
    Readout,
    /// Ensemble-qubit loss probability curve.
    Loss,
    /// Lifetime budget and sensitivity report.
    Budget,
    /// Full acceptance suite; exits 1 if any criterion fails.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Josephson => "josephson",
            Command::Cnot => "cnot",
            Command::Sqrtswap => "sqrtswap",
            Command::Readout => "readout",
            Command::Loss => "loss",
            Command::Budget => "budget",
            Command::Validate => "validate",
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum ProfileArg {
    Strict,
    Fast,
}

fn load(cli: &Cli) -> anyhow::Result<ScenarioConfig> {
    let cfg = match &cli.config {
        Some(p) => ScenarioConfig::from_path(p)?,
        None => ScenarioConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &ScenarioConfig, profile: Profile) -> anyhow::Result<(Outcome, usize)> {
    let threads = match cli.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("building thread pool")?;
    let name = cli.command.name();
    let mut out = RunWriter::new(&cli.out)?;
    let needs_derived = !matches!(cli.command, Command::Loss | Command::Validate);
    let derived = if needs_derived {
        let d = pipeline::derive(cfg, cfg.trap_config()?)?;
        out.mark("derive");
        Some(d)
    } else {
        None
    };
    let d = derived.as_ref();
    let outcome = match cli.command {
        Command::Derive => commands::derive(cfg, d.unwrap(), &mut out),
        Command::Josephson => commands::josephson(cfg, d.unwrap(), &mut out),
        Command::Cnot => commands::cnot(cfg, d.unwrap(), &mut out),
        Command::Sqrtswap => commands::sqrtswap(cfg, d.unwrap(), &mut out),
        Command::Readout => commands::readout(cfg, d.unwrap(), &mut out),
        Command::Loss => commands::loss(cfg, &mut out),
        Command::Budget => commands::budget(cfg, d.unwrap(), &mut out),
        Command::Validate => commands::validate(cfg, profile, &mut out),
    }
    .with_context(|| format!("running `{name}`"))?;
    out.mark(name);
    out.finish(name, &cfg.canonical_json(), threads, profile.name())?;
    Ok((outcome, threads))
}

fn is_config_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<ConfigError>().is_some()
            || matches!(c.downcast_ref::<becreg_core::Error>(), Some(becreg_core::Error::Config(_)))
            || c.downcast_ref::<serde_json::Error>().is_some()
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let profile = match cli.tolerance_profile {
        ProfileArg::Strict => Profile::Strict,
        ProfileArg::Fast => Profile::Fast,
    };
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &cfg, profile) {
        Ok((outcome, threads)) => {
            for l in &outcome.lines {
                println!("{l}");
            }
            log::info!("{} finished on {threads} threads; outputs in {}", cli.command.name(), cli.out.display());
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 3 })
        }
    }
}
