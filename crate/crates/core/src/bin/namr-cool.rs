use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use namr_cool::cli::{exit_code, run, Format, Mode, Overrides, Preset, RunConfig};
use namr_cool::Error;

#[derive(Parser)]
#[command(
    name = "namr-cool",
    version,
    about = "Periodic qubit-kick cooling of a mechanical resonator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    preset: Option<PresetArg>,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Worker threads for sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Include the first-order kick fidelity in steady states
    #[arg(long, global = true)]
    with_fidelity: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Transient of the coarse-grained dynamics
    Evolve,
    /// Free damping interleaved with instantaneous kicks
    Strobe,
    /// Steady-state populations
    Steady,
    /// Steady state over a grid of N_th, r_a/kappa and p
    Sweep,
    /// Derived device parameters and schedule feasibility
    Device,
}

#[derive(ValueEnum, Clone, Copy)]
enum PresetArg {
    Fig2,
    Fig3,
    DevicePaper,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let mode = match cli.command {
        Command::Evolve => Mode::Evolve,
        Command::Strobe => Mode::Strobe,
        Command::Steady => Mode::Steady,
        Command::Sweep => Mode::Sweep,
        Command::Device => Mode::Device,
    };
    let overrides = Overrides {
        output: cli.output.clone(),
        format: cli.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
        n_max: cli.n_max,
        jobs: cli.jobs,
        with_fidelity: cli.with_fidelity,
    };
    let config = match (&cli.config, cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            RunConfig::parse(mode, &text, &overrides)?
        }
        (None, Some(p)) => {
            let preset = match p {
                PresetArg::Fig2 => Preset::Fig2,
                PresetArg::Fig3 => Preset::Fig3,
                PresetArg::DevicePaper => Preset::DevicePaper,
            };
            RunConfig::preset(mode, preset, &overrides)?
        }
        (None, None) => return Err(Error::Config("give --config or --preset".into())),
    };
    let report = run(&config)?;
    report.write(config.format, config.output.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("namr-cool: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
