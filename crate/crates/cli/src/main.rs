//! `dadcf` command-line tool.
//!
//! Exit codes: 0 ok, 1 invariant failure, 2 bad arguments, 3 I/O, 4 solver.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmd;
mod error;
mod manifest;

use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "dadcf",
    version,
    about = "Directional block frames and compressive-sensing recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write transform and frame matrices, the subband map and the Givens cascade.
    Design(cmd::design::DesignArgs),
    /// Check the invariants of a frame and print a JSON report.
    Verify(cmd::verify::VerifyArgs),
    /// Split an image into per-subband coefficient planes.
    Decompose(cmd::decompose::DecomposeArgs),
    /// Take compressive measurements of an image.
    Sense(cmd::pipeline::SenseArgs),
    /// Recover an image from an observation file.
    Recover(cmd::pipeline::RecoverArgs),
    /// Aggregate recovery reports into a PSNR table.
    Report(cmd::report::ReportArgs),
    /// Write a synthetic test image.
    Synth(cmd::synth::SynthArgs),
    /// Re-run the command recorded in a manifest.
    Replay(cmd::replay::ReplayArgs),
}

fn parse(argv: &[String]) -> Result<Cli, clap::Error> {
    Cli::try_parse_from(std::iter::once("dadcf".to_string()).chain(argv.iter().cloned()))
}

fn run(command: Command, argv: &[String]) -> CliResult<()> {
    match command {
        Command::Design(a) => cmd::design::run(a, argv),
        Command::Verify(a) => cmd::verify::run(a, argv),
        Command::Decompose(a) => cmd::decompose::run(a, argv),
        Command::Sense(a) => cmd::pipeline::sense(a, argv),
        Command::Recover(a) => cmd::pipeline::recover(a, argv),
        Command::Report(a) => cmd::report::run(a, argv),
        Command::Synth(a) => cmd::synth::run(a, argv),
        Command::Replay(a) => {
            let m = manifest::read_manifest(&a.manifest)?;
            if m.working_dir.is_dir() {
                std::env::set_current_dir(&m.working_dir)?;
            }
            let cli = parse(&m.argv).map_err(|e| CliError::BadArgs(e.to_string()))?;
            if matches!(cli.command, Command::Replay(_)) {
                return Err(CliError::BadArgs(
                    "a manifest cannot replay another replay".into(),
                ));
            }
            eprintln!("replaying `{}`", m.argv.join(" "));
            run(cli.command, &m.argv)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
