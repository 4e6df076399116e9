mod commands;
mod play;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Node-blocking solver and QBF reduction checker.
#[derive(Parser, Debug)]
#[command(name = "nbg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a position stored in NBG format.
    Solve {
        file: PathBuf,
        /// Also print the principal variation.
        #[arg(long)]
        pv: bool,
        /// Plain depth-first search without a transposition table.
        #[arg(long)]
        no_memo: bool,
        #[arg(long, value_name = "N")]
        max_states: Option<u64>,
    },
    /// Compile a QDIMACS formula into a node-blocking instance.
    Reduce {
        file: PathBuf,
        #[arg(short, long, value_name = "OUT.nbg")]
        output: PathBuf,
        /// Write the vertex label map here.
        #[arg(long, value_name = "OUT.map")]
        labels: Option<PathBuf>,
    },
    /// Evaluate a QDIMACS formula by brute force.
    Eval { file: PathBuf },
    /// Check formula truth against the compiled game's outcome.
    Verify(VerifyArgs),
    /// Generate a random restricted formula.
    Gen {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long, value_name = "OUT.qdimacs")]
        output: Option<PathBuf>,
    },
    /// Play a position interactively against the solver.
    Play {
        file: PathBuf,
        /// Side controlled by the human (W or B).
        #[arg(long, value_name = "W|B")]
        human: String,
    },
    /// Run the scripted gadget scenarios.
    Gadgets,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_name = "FILE", conflicts_with_all = ["n", "m", "count", "seed"])]
    qdimacs: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    max_states: Option<u64>,
    #[arg(long)]
    no_memo: bool,
    /// Worker threads for batches; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(commands::EXIT_USAGE),
            };
        }
    };

    let result = match cli.command {
        Command::Solve {
            file,
            pv,
            no_memo,
            max_states,
        } => commands::solve(&file, pv, no_memo, max_states),
        Command::Reduce {
            file,
            output,
            labels,
        } => commands::reduce(&file, &output, labels.as_deref()),
        Command::Eval { file } => commands::eval(&file),
        Command::Verify(args) => match (args.qdimacs, args.n, args.m, args.count, args.seed) {
            (Some(file), None, None, None, None) => {
                commands::verify_file(&file, args.max_states, args.no_memo)
            }
            (None, Some(n), Some(m), Some(count), Some(seed)) => commands::verify_batch(
                n,
                m,
                count,
                seed,
                args.max_states,
                args.no_memo,
                args.threads,
            ),
            _ => Err(commands::Failure::Usage(
                "verify needs either --qdimacs FILE or all of --n --m --count --seed".into(),
            )),
        },
        Command::Gen { n, m, seed, output } => commands::gen(n, m, seed, output.as_deref()),
        Command::Play { file, human } => commands::play(&file, &human),
        Command::Gadgets => commands::gadgets(),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
