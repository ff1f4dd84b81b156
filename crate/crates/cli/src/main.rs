use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use conic_extrema_cli::{run, thread_limit, CliError, Command, Job};

/// Exparabolas, maximal parabolas and minimal horocycles from JSON inputs.
#[derive(Debug, Parser)]
#[command(name = "conic-extrema", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Also draw the result as an SVG figure.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Angle grid of the minimal horocycle solver.
    #[arg(long)]
    grid: Option<usize>,
    /// Multi-start count of the maximal parabola solver.
    #[arg(long)]
    starts: Option<usize>,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return fail(&CliError::Parse(first.to_string()));
        }
    };
    let threads = match thread_limit(std::env::var("CONIC_EXTREMA_THREADS").ok().as_deref()) {
        Ok(n) => n,
        Err(e) => return fail(&e),
    };
    let job = Job {
        command: args.command,
        input: args.input,
        output: args.output,
        svg: args.svg,
        seed: args.seed,
        grid: args.grid,
        starts: args.starts,
    };
    match run(&job, threads) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
