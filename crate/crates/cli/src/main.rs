//! `qstream` — linear stability of one- and two-stream quantum plasmas:
//! closed-form dispersion branches with numeric cross-checks, stability maps,
//! unstable-band reports, kinetic simulation, root continuation, and a
//! self-verification suite.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunSpec;
use output::OutputFormat;

#[derive(Parser)]
#[command(
    name = "qstream",
    about = "Quantum multistream plasma stability toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form dispersion branches with a numeric cross-check.
    Dispersion(CommonArgs),
    /// Stability map over (K̄, H) at fixed α, with traced boundaries.
    Map(CommonArgs),
    /// Unstable K̄ intervals at fixed (H, α).
    Bands(CommonArgs),
    /// Kinetic initial-value run measuring the seeded mode's rate.
    Simulate(CommonArgs),
    /// Follow a dielectric root along a parameter path.
    Sweep(CommonArgs),
    /// Run the built-in verification matrix (config optional).
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file (top-level `command`, nested `[params]`).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for result files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output format for data files.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional config; `verify` takes no parameters.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    JsonLines,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::JsonLines => OutputFormat::JsonLines,
        }
    }
}

fn load_spec(path: &PathBuf, cli_command: &str) -> Result<RunSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let spec = config::parse_config(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    if spec.command_name() != cli_command {
        bail!(
            "config declares command `{}` but the CLI invoked `{cli_command}`",
            spec.command_name()
        );
    }
    Ok(spec)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Dispersion(a) => dispatch(&a, "dispersion"),
        Command::Map(a) => dispatch(&a, "map"),
        Command::Bands(a) => dispatch(&a, "bands"),
        Command::Simulate(a) => dispatch(&a, "simulate"),
        Command::Sweep(a) => dispatch(&a, "sweep"),
        Command::Verify(a) => {
            if let Some(path) = &a.config {
                let spec = load_spec(path, "verify")?;
                commands::run_command(&spec, &PathBuf::from("."), OutputFormat::Csv)?;
            } else {
                commands::run_command(
                    &RunSpec::Verify(Default::default()),
                    &PathBuf::from("."),
                    OutputFormat::Csv,
                )?;
            }
            Ok(())
        }
    }
}

fn dispatch(args: &CommonArgs, name: &str) -> Result<()> {
    let spec = load_spec(&args.config, name)?;
    commands::run_command(&spec, &args.out, args.format.into())
}
