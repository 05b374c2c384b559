use std::path::PathBuf;

use clap::Parser;

use mashup_core::gen::{action_count, element_count, recursive_model};

/// Writes the recursive benchmark activity model.
#[derive(Parser)]
#[command(name = "gen-recursive")]
struct Args {
    /// Recursion depth; 4 gives 686 model elements.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(0..=8))]
    depth: u32,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let args = Args::parse();
    let text = recursive_model(args.depth);
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("{}: {e}", p.display());
                std::process::exit(1);
            }
            println!(
                "depth {}: {} elements, expected NodeExecuted count {}",
                args.depth,
                element_count(args.depth),
                action_count(args.depth)
            );
        }
        None => print!("{text}"),
    }
}
