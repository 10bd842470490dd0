use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mzak::harness::{self, ErrorRecord, Mode, RunConfig, OUT_ENV};
use mzak::Error;

#[derive(Parser)]
#[command(
    name = "mzak",
    version,
    about = "Simulator and estimate harness for the modified Zakharov system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured data, writing checkpoints and invariants.
    Simulate(RunArgs),
    /// Evolve and check invariant drift and structure residuals.
    Invariants(RunArgs),
    /// Estimate ratios for the bilinear lemmas over a random ensemble.
    BourgainCheck(RunArgs),
    /// Self-convergence table of the integrators.
    Convergence(RunArgs),
    /// Estimate c0 and check the energy trap along a run.
    TrapCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(..=harness::MAX_SEED))]
    seed: Option<u64>,
    /// Overrides the output directory (and MZAK_OUT).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Command {
    fn split(&self) -> (Mode, &RunArgs) {
        match self {
            Command::Simulate(a) => (Mode::Simulate, a),
            Command::Invariants(a) => (Mode::Invariants, a),
            Command::BourgainCheck(a) => (Mode::BourgainCheck, a),
            Command::Convergence(a) => (Mode::Convergence, a),
            Command::TrapCheck(a) => (Mode::TrapCheck, a),
        }
    }
}

fn prepare(mode: Mode, args: &RunArgs) -> Result<RunConfig, Error> {
    let mut config = harness::load_config(&args.config)?;
    if config.mode != mode {
        return Err(Error::Config(format!(
            "config mode is {:?} but the subcommand runs {:?}",
            config.mode.name(),
            mode.name()
        )));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
        config.validate()?;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    } else if let Some(out) = std::env::var_os(OUT_ENV) {
        config.output_dir = PathBuf::from(out);
    }
    Ok(config)
}

fn report_error(e: &Error, out: Option<&Path>) -> ExitCode {
    let record = ErrorRecord::new(e);
    let json = serde_json::to_string(&record)
        .unwrap_or_else(|_| format!("{{\"message\":{:?}}}", record.message));
    eprintln!("{json}");
    if let Some(dir) = out {
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = std::fs::write(dir.join("error.json"), json + "\n");
        }
    }
    ExitCode::from(record.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = cli.command.split();
    let config = match prepare(mode, args) {
        Ok(c) => c,
        Err(e) => return report_error(&e, args.out.as_deref()),
    };
    match harness::run(&config) {
        Ok(outcome) => {
            for v in &outcome.violations {
                eprintln!("violation: {v}");
            }
            println!(
                "{}: {} artifacts in {}",
                mode.name(),
                outcome.artifacts.len(),
                config.output_dir.display()
            );
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => report_error(&e, Some(&config.output_dir)),
    }
}
