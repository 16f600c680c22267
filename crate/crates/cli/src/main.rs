use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::Report;

#[derive(Parser, Debug)]
#[command(name = "polybase", version, about = "Integer decompositions in base polytopes of submodular functions")]
struct Cli {
    /// Largest ground set accepted when loading instances.
    #[arg(long, global = true, env = "POLYBASE_LIMIT_N", default_value_t = polybase::DEFAULT_LIMIT_N)]
    limit_n: usize,

    /// Worker threads; only directory inputs are processed concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Submodularity and matroid-rank verdicts, f(E), bounding box, dimension.
    Check(Input),
    /// Decompose w ∈ k·B_f into at most dim B_f + 1 distinct integer bases.
    Decompose {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        target: Target,
        /// Attach the recursion trace to the certificate.
        #[arg(long)]
        trace: bool,
        /// Re-check the certificate with the independent verifier.
        #[arg(long)]
        verify: bool,
    },
    /// Exhaustive lower bound on the Carathéodory rank of B_f ∩ Z^E.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        k_max: i64,
    },
    /// Dump the integer points and vertices of k·B_f (k = 1 by default).
    Enumerate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: Option<i64>,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Instance file, or a directory of *.json instances.
    path: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct Target {
    /// Target vector, comma separated; overrides "w" in the instance.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub w: Option<Vec<i64>>,
    /// Multiplicity; overrides "k" in the instance.
    #[arg(long)]
    pub k: Option<i64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let limit = cli.limit_n;
    let run = |path: &Path| -> Report {
        match &cli.command {
            Command::Check(_) => commands::check(path, limit),
            Command::Decompose { target, trace, verify, .. } => {
                commands::decompose(path, limit, target, *trace, *verify)
            }
            Command::Oracle { k_max, .. } => commands::oracle(path, limit, *k_max),
            Command::Enumerate { k, .. } => commands::enumerate(path, limit, *k),
        }
    };
    let path = match &cli.command {
        Command::Check(input)
        | Command::Decompose { input, .. }
        | Command::Oracle { input, .. }
        | Command::Enumerate { input, .. } => input.path.clone(),
    };
    let code = pool.install(|| {
        if path.is_dir() {
            run_directory(&path, run)
        } else {
            emit(&run(&path))
        }
    });
    ExitCode::from(code)
}

fn emit(report: &Report) -> u8 {
    print!("{}", report.out);
    eprint!("{}", report.err);
    report.code
}

/// Runs every `*.json` file in sorted order; reports are printed in that order
/// regardless of which worker finished first. Exit code is the worst one seen.
fn run_directory(dir: &Path, run: impl Fn(&Path) -> Report + Sync) -> u8 {
    use rayon::prelude::*;
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.display());
            return 1;
        }
    };
    files.sort();
    let reports: Vec<Report> = files.par_iter().map(|p| run(p)).collect();
    let mut worst = 0;
    for (file, report) in files.iter().zip(&reports) {
        let name = file.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        println!("# {name}");
        worst = worst.max(emit(report));
    }
    worst
}
