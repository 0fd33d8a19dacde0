//! `tasksyn` command-line tool.
//!
//! Exit codes: 0 success, 1 input error, 2 empty synthesis, 3 check failure.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_EMPTY: u8 = 2;
pub const EXIT_CHECK: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tasksyn",
    version,
    about = "Synthesize turtle-graphics practice tasks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize new tasks from a reference task and its solution.
    Synth(SynthArgs),
    /// Check whether a code solves a task.
    Check(PairArgs),
    /// Rotate/flip the reference task.
    Baseline(BaselineArgs),
    /// Draw a task as SVG.
    Render(RenderArgs),
    /// Synthesize 3 easy, 4 medium and 3 hard tasks for each reference.
    Batch(BatchArgs),
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    task: PathBuf,
    #[arg(long)]
    code: PathBuf,
}

#[derive(Args)]
struct SynthOptions {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// TOML file with `threshold` and `[weights]`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write an SVG per task.
    #[arg(long)]
    render: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, value_parser = ["easy", "medium", "hard"])]
    difficulty: String,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[command(flatten)]
    opts: SynthOptions,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, value_parser = ["easy", "medium", "hard"])]
    difficulty: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    task: PathBuf,
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BatchArgs {
    /// Reference task; the bundled suite is used when omitted.
    #[arg(long, requires = "code")]
    task: Option<PathBuf>,
    #[arg(long, requires = "task")]
    code: Option<PathBuf>,
    #[command(flatten)]
    opts: SynthOptions,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Check(a) => commands::check(a),
        Command::Baseline(a) => commands::baseline(a),
        Command::Render(a) => commands::render(a),
        Command::Batch(a) => commands::batch(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
