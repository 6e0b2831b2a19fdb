//! `polya`: reproducible command-line access to the Pólya tree workbench.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polya_core::Error;
use serde_json::json;

use report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "polya",
    version,
    about = "Exact counts, automorphism oracles, singularity constants and uniform sampling for the C-tree / D-forest decomposition of random Pólya trees",
    after_help = "Exit codes: 0 success, 2 usage or invalid range, 3 resource cap, 4 numeric non-convergence, 5 internal consistency failure, 1 I/O failure.\nErrors are also written to stderr as a JSON object {\"error\": {...}}."
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SeedArg {
    /// Random seed, decimal or 0x-prefixed hexadecimal.
    #[arg(long, default_value = "0x5EED0001", value_parser = parse_seed)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pólya tree counts t_1..t_N from the divisor-sum recurrence
    /// (n-1) t_n = sum_i t_{n-i} sum_{m|i} m t_m.
    Counts {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// D-forest weights d_0..d_N (coefficients of D(z) = exp(sum_{i>=2} T(z^i)/i),
    /// computed by recurrence and by exponentiation) and Cayley weights
    /// c_n = n^(n-1)/n!.
    Weights {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// C-tree polynomials t_{c,n}(u) = [z^n] C(u z D(z)) for n = 1..N: the
    /// coefficient of u^k weights trees whose C-tree has k nodes.
    Polys {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Singularity constants: rho with rho D(rho) = 1/e, b, c = b^2/3 and the
    /// tail constant c1 of the maximal forest size.
    Constants {
        /// Truncation order of the D-series.
        #[arg(long, default_value_t = 128)]
        order: usize,
        /// Working precision in decimal digits.
        #[arg(long, default_value_t = 50)]
        precision: usize,
    },
    /// Cross-checks the series against brute force: d_n against the
    /// fixed-point-free automorphism fractions of all D-forests, t_{c,n}(u)
    /// against the sum of fixed-point polynomials t_T(u), and node-orbit sums
    /// against the pointed series T/(1-T). Exit code 5 on any mismatch.
    Oracle {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Uniformly random Pólya trees of size N (exact recursive method), as
    /// balanced-parenthesis strings.
    Sample {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Number of trees.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Decomposes a tree along a uniform automorphism: C-nodes are the fixed
    /// points, D-forests the moved subtrees. The tree is sampled uniformly
    /// unless given with --tree.
    Decompose {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), required_unless_present = "tree")]
        n: Option<u64>,
        /// A tree in balanced-parenthesis form, e.g. "(()()())".
        #[arg(long, conflicts_with = "n")]
        tree: Option<String>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Monte Carlo run over decompositions of uniform trees of size N: C-tree
    /// size moments (mean 2n/(b^2 rho), variance 11n/(12 b^2 rho) in the
    /// limit), the forest size at a random C-node, and the maximal forest
    /// size L_n. CSV output is the (m, freq) histogram.
    Experiment {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        /// Histogram over every C-node instead of one random C-node per trial.
        #[arg(long)]
        all_nodes: bool,
        /// Decimal places for reals.
        #[arg(long, default_value_t = 6)]
        digits: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Limiting law of the forest size at a random C-node,
    /// P(|F| = m) = d_m rho^m / D(rho), and P(|F| >= m) by tail summation.
    Table1 {
        #[arg(long, default_value_t = 7)]
        max_m: usize,
        #[arg(long, default_value_t = 128)]
        order: usize,
        /// Decimal places for probabilities.
        #[arg(long, default_value_t = 4)]
        digits: usize,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.replace('_', "");
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::ResourceCap { .. }) => 3,
            Failure::Core(Error::NonConvergence(_)) => 4,
            Failure::Core(Error::Consistency(_)) => 5,
            Failure::Core(_) | Failure::Usage(_) => 2,
            Failure::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Core(Error::ResourceCap { .. }) => "resource_cap",
            Failure::Core(Error::NonConvergence(_)) => "non_convergence",
            Failure::Core(Error::Consistency(_)) => "consistency",
            Failure::Core(Error::Parse(_)) => "parse",
            Failure::Core(_) | Failure::Usage(_) => "invalid_argument",
            Failure::Io(_) => "io",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
            Failure::Usage(m) => m.clone(),
        }
    }
}

fn fail(f: &Failure) -> ExitCode {
    let obj = json!({"error": {"kind": f.kind(), "exit_code": f.code(), "message": f.message()}});
    eprintln!("{obj}");
    ExitCode::from(f.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or_default();
            return fail(&Failure::Usage(first.trim_start_matches("error: ").to_string()));
        }
    };
    let result = commands::run(&cli.command).and_then(|r| Ok(r.emit(cli.format, cli.out.as_deref())?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&f),
    }
}
