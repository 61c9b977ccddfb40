use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stpa_rv_cli::{cmd_chain, cmd_matrix, cmd_run, cmd_stubs, cmd_validate, Outcome, EXIT_LOAD_ERROR};

#[derive(Debug, Parser)]
#[command(name = "stpa-rv", version, about = "STPA-driven runtime monitoring of an emergency-braking simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the loss-to-constraint chain of an STPA model.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Generate monitor stubs from component constraints.
    Stubs {
        #[arg(long)]
        model: PathBuf,
        /// Write monitors.mon and properties.tmpl here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show everything linked to one id, from losses down to monitors.
    Chain {
        manifest: PathBuf,
        id: String,
    },
    /// Simulate a run manifest with its campaign faults and monitor it.
    Run {
        manifest: PathBuf,
        /// Override the scenario's noise seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "STPA_RV_OUT", default_value = "out")]
        out: PathBuf,
        /// Feed the monitors tick by tick instead of over the finished trace.
        #[arg(long)]
        online: bool,
    },
    /// Run each campaign fault separately and print the coverage matrix.
    Matrix {
        manifest: PathBuf,
        #[arg(long, env = "STPA_RV_OUT")]
        out: Option<PathBuf>,
    },
}

fn dispatch(cmd: Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Validate { model } => cmd_validate(&model),
        Command::Stubs { model, out } => cmd_stubs(&model, out.as_deref()),
        Command::Chain { manifest, id } => cmd_chain(&manifest, &id),
        Command::Run { manifest, seed, out, online } => cmd_run(&manifest, seed, &out, online).map(|(o, _)| o),
        Command::Matrix { manifest, out } => cmd_matrix(&manifest, out.as_deref()).map(|(o, _)| o),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_LOAD_ERROR as u8)
        }
    }
}
