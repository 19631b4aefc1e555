use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flagcurv::Exec;

mod canonical;
mod error;
mod run;
mod spec;

use spec::TaskName;

/// Flag curvature of invariant Finsler metrics on compact homogeneous spaces.
#[derive(Debug, Parser)]
#[command(name = "flagcurv", version)]
struct Cli {
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimensions, ranks, regularity, invariant decomposition and metric checks.
    CheckSpace { file: PathBuf },
    /// Flag curvature of the flag (u, u∧v) given in the file.
    Curvature { file: PathBuf },
    /// Seeded multi-start search for zero-curvature flags.
    FindFlat {
        file: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rebuild and certify one of the five worked flat flags.
    VerifyExample {
        file: PathBuf,
        #[arg(long)]
        id: u8,
    },
    /// Ad-rotation speeds of a circle on the root planes in m.
    Speeds { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let (file, opts) = match cli.command {
        Command::CheckSpace { file } => (file, (TaskName::CheckSpace, None, None, None)),
        Command::Curvature { file } => (file, (TaskName::Curvature, None, None, None)),
        Command::FindFlat { file, budget, seed } => (file, (TaskName::FindFlat, budget, seed, None)),
        Command::VerifyExample { file, id } => (file, (TaskName::VerifyExample, None, None, Some(id))),
        Command::Speeds { file } => (file, (TaskName::Speeds, None, None, None)),
    };
    let opts = run::Options {
        task: opts.0,
        budget: opts.1,
        seed: opts.2,
        id: opts.3,
        exec,
    };
    let outcome = spec::parse_space_spec(&file).and_then(|s| run::run(&s, &opts));
    match outcome {
        Ok(o) => {
            print!("{}", canonical::to_string(&o.report));
            if o.exit != 0 {
                eprintln!("verification failed; see the assertions in the report");
            }
            ExitCode::from(o.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
