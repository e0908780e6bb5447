use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use padic_sde::runner::{run, Command};

#[derive(Clone, Copy, ValueEnum)]
enum Sub {
    Sample,
    Solve,
    Evolve,
    Verify,
    Charfun,
}

#[derive(Parser)]
#[command(name = "padic-sde", about = "Fixed-precision p-adic stochastic calculus runner")]
struct Cli {
    #[arg(value_enum)]
    subcommand: Sub,
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long, env = "PADIC_SDE_SEED")]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.subcommand {
        Sub::Sample => Command::Sample,
        Sub::Solve => Command::Solve,
        Sub::Evolve => Command::Evolve,
        Sub::Verify => Command::Verify,
        Sub::Charfun => Command::Charfun,
    };
    match run(cmd, &cli.config, cli.seed, &cli.out) {
        Ok(o) => {
            println!("{} {}", o.out_dir.join("manifest.json").display(), o.content_hash);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
