//! `qsync`: run model scenarios from TOML configs and write CSV data plus a
//! JSON manifest.

mod config;
mod error;
mod output;
mod scenarios;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{ModelKind, ScenarioId, SCENARIOS};
use error::CliError;

#[derive(Parser)]
#[command(name = "qsync", version, about = "Synchronization scenarios for open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario.
    Run {
        config: PathBuf,
        /// Output directory; takes precedence over QSYNC_OUT and the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario that declares a sweep, with bounded parallelism.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value_t = default_jobs(), value_parser = clap::value_parser!(u64).range(1..))]
        jobs: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List scenario ids.
    ListScenarios,
    /// Print the full default config of a scenario.
    Defaults {
        scenario: String,
        /// Model for the `custom` scenario.
        #[arg(long)]
        model: Option<String>,
    },
}

fn default_jobs() -> u64 {
    std::thread::available_parallelism().map(|n| n.get() as u64).unwrap_or(1)
}

fn out_dir(cli: Option<PathBuf>, cfg: &config::Config) -> PathBuf {
    cli.or_else(|| std::env::var_os("QSYNC_OUT").filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("qsync-out").join(cfg.scenario.name()))
}

fn run(path: &Path, out: Option<PathBuf>, seed: Option<u64>, jobs: usize, sweep: bool) -> Result<(), CliError> {
    let start = Instant::now();
    let text = std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(text).map_err(|_| CliError::Schema("config is not UTF-8".into()))?;
    let cfg = config::parse(&text)?;
    if sweep && !cfg.has_sweep() {
        return Err(CliError::Schema(format!("scenario {} declares no sweep block", cfg.scenario.name())));
    }
    let seed = seed.or(cfg.seed);
    let dir = out_dir(out, &cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| scenarios::execute(&cfg, seed))?;
    let meta = output::RunMeta {
        command: if sweep { "sweep" } else { "run" },
        source: text.as_bytes(),
        config: &cfg,
        seed,
        jobs,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    output::write_bundle(&dir, &outcome, &meta)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Run { config, out, seed } => run(&config, out, seed, default_jobs() as usize, false),
        Command::Sweep { config, jobs, out, seed } => run(&config, out, seed, jobs as usize, true),
        Command::ListScenarios => {
            for (id, about) in SCENARIOS {
                println!("{:<22} {about}", id.name());
            }
            Ok(())
        }
        Command::Defaults { scenario, model } => defaults(&scenario, model.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn defaults(scenario: &str, model: Option<&str>) -> Result<(), CliError> {
    let id = ScenarioId::parse(scenario).ok_or_else(|| CliError::Schema(format!("unknown scenario `{scenario}`")))?;
    let model = model
        .map(|m| {
            serde_json::from_value::<ModelKind>(serde_json::Value::String(m.into()))
                .map_err(|_| CliError::Schema(format!("unknown model `{m}`")))
        })
        .transpose()?;
    print!("{}", config::defaults_toml(id, model)?);
    Ok(())
}
