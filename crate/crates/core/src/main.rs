use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mashup_core::pipeline::{cmd_bench, cmd_check, cmd_compose, cmd_emit, cmd_run, Outcome, EXIT_PARSE};
use mashup_core::runtime::ContractPolicy;

#[derive(Parser)]
#[command(
    name = "mashup",
    version,
    about = "Compose and run DSLs built from a metamodel, constraints and action semantics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Contracts {
    Off,
    Prepost,
    Full,
}

impl From<Contracts> for ContractPolicy {
    fn from(c: Contracts) -> Self {
        match c {
            Contracts::Off => ContractPolicy::Off,
            Contracts::Prepost => ContractPolicy::PrePostOnly,
            Contracts::Full => ContractPolicy::Full,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Weave the units a manifest requires and report diagnostics.
    Compose {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Evaluate every invariant on a model.
    Check {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Accepted for symmetry with `run`; checking always evaluates invariants.
        #[arg(long, value_enum, default_value = "full")]
        contracts: Contracts,
    },
    /// Execute the entry operation and print the trace.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Entry point as Class.op; defaults to the manifest's `main`.
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, value_enum, default_value = "prepost")]
        contracts: Contracts,
    },
    /// Print the composition report.
    Emit {
        #[arg(long)]
        manifest: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Time repeated executions, excluding model loading.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, value_enum, default_value = "prepost")]
        contracts: Contracts,
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
    },
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Compose { manifest } => cmd_compose(&manifest),
        Command::Check { manifest, model, .. } => cmd_check(&manifest, &model),
        Command::Run {
            manifest,
            model,
            entry,
            contracts,
        } => cmd_run(&manifest, &model, entry.as_deref(), contracts.into()),
        Command::Emit { manifest, emit } => {
            let mut o = cmd_emit(&manifest);
            if let (Some(path), 0) = (emit, o.code) {
                if let Err(e) = std::fs::write(&path, &o.stdout) {
                    return Outcome {
                        code: EXIT_PARSE,
                        stdout: String::new(),
                        stderr: vec![format!("{}: {e}", path.display())],
                    };
                }
                o.stdout.clear();
            }
            o
        }
        Command::Bench {
            manifest,
            model,
            entry,
            contracts,
            reps,
        } => cmd_bench(&manifest, &model, entry.as_deref(), contracts.into(), reps as usize),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE as u8 } else { 0 });
        }
    };
    // Deeply recursive DSL programs need more stack than the main thread has.
    let outcome = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || dispatch(cli))
        .expect("spawn interpreter thread")
        .join()
        .expect("interpreter thread panicked");
    print!("{}", outcome.stdout);
    for line in &outcome.stderr {
        eprintln!("{line}");
    }
    ExitCode::from(outcome.code as u8)
}
