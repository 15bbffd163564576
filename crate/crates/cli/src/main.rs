//! `abcocycle`: classify quadratic forms, emit and verify abelian 3-cocycles,
//! and work with presentations.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "abcocycle", version, about = "Abelian 3-cocycles from quadratic forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the quadratic forms on a finite group.
    Classify {
        #[arg(long)]
        group: String,
        /// Partition forms by the largest denominator among their cocycle values.
        #[arg(long)]
        split_torsion: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Emit the cocycle of a quadratic form.
    Cocycle {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_enum, default_value_t = Method::Quinn)]
        method: Method,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check pentagon, hexagon and normalization identities.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Half-width of the sampling box on groups with free factors.
        #[arg(long = "box", default_value_t = abelian_cocycles::quadforms::DEFAULT_BOX)]
        box_bound: i64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = abelian_cocycles::cocycles::DEFAULT_MAX_FAILURES)]
        max_failures: usize,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Compute the quadratic form x ↦ c(x,x).
    Trace {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Check the normal-form identities of the skeletal model.
    NormalForm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "box", default_value_t = abelian_cocycles::quadforms::DEFAULT_BOX)]
        box_bound: i64,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Decide whether a form admits a strictly associative skeletal model.
    Strictify {
        #[command(flatten)]
        form: FormArgs,
        /// Node budget for the bilinear witness search.
        #[arg(long, default_value_t = abelian_cocycles::quadforms::DEFAULT_SEARCH_LIMIT)]
        limit: u128,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Optimize a presentation and validate the result.
    Optimize {
        #[arg(long)]
        presentation: PathBuf,
        /// Replace C by a form vanishing on the relations first (divisible targets).
        #[arg(long)]
        make_admissible: bool,
        /// Only validate the presentation as given.
        #[arg(long)]
        validate_only: bool,
        #[arg(long = "box", default_value_t = abelian_cocycles::quadforms::DEFAULT_BOX)]
        box_bound: i64,
        #[command(flatten)]
        out: ReportArgs,
    },
}

#[derive(Args)]
struct FormArgs {
    /// Comma-separated moduli; 0 denotes a free factor.
    #[arg(long)]
    group: String,
    /// Diagonal exponents p^(k), comma-separated.
    #[arg(long)]
    p: Option<String>,
    /// Off-diagonal exponent `k,l=v`; repeatable.
    #[arg(long)]
    q: Vec<String>,
    /// Diagonal values q(e_k), comma-separated (alternative to --p).
    #[arg(long, conflicts_with_all = ["p", "q"])]
    diag: Option<String>,
    /// Off-diagonal value `k,l=v` of the polarization; repeatable.
    #[arg(long, conflicts_with_all = ["p", "q"])]
    offdiag: Vec<String>,
    #[arg(long, default_value = "Q/Z")]
    target: String,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Also write the JSON report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Quinn,
    Exp,
    Presentation,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

/// Whether every check a command ran succeeded.
pub enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
