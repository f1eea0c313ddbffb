use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gyroled_cli::{run, CliError, Pipeline, ScenarioConfig};

/// Spin and field dynamics of an extended charge at rest.
///
/// Thread count for the parallel loops follows RAYON_NUM_THREADS.
#[derive(Debug, Parser)]
#[command(name = "gyroled", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML scenario file; overrides the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// shell-soliton, shell-scatter or threshold-sweep.
    #[arg(long, global = true, default_value = "shell-scatter")]
    preset: String,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Kernel samples and norms.
    Kernel,
    /// Rotor maps ι, m and s_b over ω.
    Rotor,
    /// Field snapshot from the grid at the end time.
    Field,
    /// Kernel-solver trajectory and damping report.
    Scatter,
    /// Grid co-simulation trajectory.
    Cosim,
    /// Conservation audits of the co-simulation.
    Audit,
    /// Kernel solver against co-simulation at two resolutions.
    Compare,
    /// Smallness margin across the coupling e²/(m_b R).
    Sweep,
}

impl From<Command> for Pipeline {
    fn from(c: Command) -> Self {
        match c {
            Command::Kernel => Pipeline::Kernel,
            Command::Rotor => Pipeline::Rotor,
            Command::Field => Pipeline::Field,
            Command::Scatter => Pipeline::Scatter,
            Command::Cosim => Pipeline::Cosim,
            Command::Audit => Pipeline::Audit,
            Command::Compare => Pipeline::Compare,
            Command::Sweep => Pipeline::Sweep,
        }
    }
}

fn load(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            ScenarioConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => ScenarioConfig::preset(&cli.preset)?,
    };
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => return fail(&CliError::Config(e.to_string())),
    };
    let config = match load(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cli.print_config {
        print!("{}", config.to_toml());
        return ExitCode::SUCCESS;
    }
    match run(cli.command.into(), &config) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome).expect("json"));
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => fail(&e),
    }
}
