use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lightstore_cli::{parse_config, run, CliError, Formats, Mode};

#[derive(Parser)]
#[command(name = "lightstore", version, about = "Light storage in inhomogeneously broadened solids")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides output.dir)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for the solvers
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Comma-separated output formats (overrides output.formats)
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<String>>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Maxwell-Bloch ensemble simulation of a storage protocol
    SimulateFull,
    /// Reduced dark-polariton evolution
    SimulateReduced,
    /// Storage-condition report for a material and protocol
    Feasibility,
    /// Built-in self-checks
    Validate,
}

impl From<Command> for Mode {
    fn from(c: Command) -> Self {
        match c {
            Command::SimulateFull => Mode::SimulateFull,
            Command::SimulateReduced => Mode::SimulateReduced,
            Command::Feasibility => Mode::Feasibility,
            Command::Validate => Mode::Validate,
        }
    }
}

fn execute(args: Args) -> Result<u8, CliError> {
    if let Some(n) = args.workers {
        if n == 0 {
            return Err(CliError::invalid("--workers", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::invalid("--workers", e.to_string()))?;
    }
    let mut config = parse_config(args.config.as_deref(), args.command.into())?;
    if let Some(dir) = args.output {
        config.output = dir;
    }
    if let Some(list) = args.format {
        config.formats = Formats::parse(&list, "--format")?;
    }
    run(&config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Args::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
