use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zkwave::driver::{load_config, run, Command, Overrides};

#[derive(Parser)]
#[command(name = "zkwave", version, about = "Zakharov–Kuznetsov wave-turbulence laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte-Carlo ensemble spectrum.
    Simulate(Flags),
    /// Tree terms and expansion residuals for one sample.
    Expand(Flags),
    /// One-node resonance counts against their bound.
    Count(Flags),
    /// Ensemble spectrum versus n_in + n1 and the kinetic prediction.
    Compare(Flags),
}

#[derive(Args)]
struct Flags {
    /// Configuration document (TOML with dotted sections).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the environment and the file).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; affects timing only.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Simulate(f) => (Command::Simulate, f),
        Cmd::Expand(f) => (Command::Expand, f),
        Cmd::Count(f) => (Command::Count, f),
        Cmd::Compare(f) => (Command::Compare, f),
    };
    let overrides = Overrides { out: flags.out, seed: flags.seed, ..Overrides::from_env() };
    let result = load_config(command, flags.config.as_deref(), &overrides).and_then(|cfg| run(&cfg, flags.threads));
    match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
