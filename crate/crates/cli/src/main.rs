mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Type checking, cost-bound synthesis and Turing machine compilation for
/// LFPL programs.
#[derive(Parser, Debug)]
#[command(name = "lfpl", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type-check every definition in a program.
    Check { file: PathBuf },
    /// Evaluate a definition, applied to a value literal if one is given.
    Eval {
        file: PathBuf,
        def: String,
        input: Option<String>,
        /// `default`, `paper-example` or a file of `name = natural` lines.
        #[arg(long, default_value = "default")]
        costs: String,
    },
    /// Print the cost polynomial of a definition.
    Bound {
        file: PathBuf,
        def: String,
        #[arg(long, default_value = "default")]
        costs: String,
        /// Check the bound on inputs of sizes `n0..n1`.
        #[arg(long, value_name = "N0..N1")]
        verify: Option<String>,
    },
    /// Compile a Turing machine description to an LFPL term.
    CompileTm {
        file: PathBuf,
        /// Produce the list-to-list variant.
        #[arg(long)]
        list_out: bool,
        /// Compare against the host simulator on all inputs up to this length.
        #[arg(long, value_name = "MAXLEN")]
        test: Option<usize>,
        /// Write the compiled program here.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites.
    Selftest {
        /// Run only these suites.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random terms.
        #[arg(long)]
        terms: Option<usize>,
        /// Random stack scripts per construction and size.
        #[arg(long)]
        scripts: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let handle = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || cmd::run(&cli.command, cli.json))
        .expect("spawn worker thread");
    match handle.join() {
        Ok(code) => ExitCode::from(code),
        Err(_) => ExitCode::from(2),
    }
}
