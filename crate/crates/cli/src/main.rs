//! `algeval`: evaluate classifier ensembles from their decision counts,
//! label items by group decision, and generate synthetic tests.

macro_rules! say {
    () => { $crate::output::say(format_args!("")) };
    ($($t:tt)*) => { $crate::output::say(format_args!($($t)*)) };
}

mod commands;
mod input;
mod output;
mod render;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use algeval::{Method, SelectionPolicy};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status for unreadable or invalid input and bad flags.
pub const EXIT_INPUT: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "algeval", version, about = "Unsupervised evaluation of binary classifier ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate prevalence and label accuracies of every trio in a sketch.
    Evaluate(EvaluateArgs),
    /// Label items (or decision patterns) by group decision.
    Decide(DecideArgs),
    /// Generate synthetic sketches with independent or coupled errors.
    Simulate(SimulateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// JSON sketch, with or without true labels.
    Sketch,
    /// JSON sketch; any true labels are ignored.
    Counts,
    /// CSV of per-item decisions.
    Records,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Candidate selection: better-than-random, low-prevalence, index:0 or index:1.
    #[arg(long, default_value = "better-than-random", value_parser = parse_policy)]
    pub policy: SelectionPolicy,

    /// Significant digits kept when approximating irrational roots.
    #[arg(long, default_value_t = algeval::solver::DEFAULT_PRECISION)]
    pub precision: u32,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted (.csv → records).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write report.json here.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Print the machine-readable report instead of tables.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct DecideArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Partition used for the decisions.
    #[arg(long, default_value = "ae", value_parser = parse_method)]
    pub method: Method,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory for labels.csv and decisions.json.
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Prevalence of `a` followed by π_a,π_b per classifier, e.g.
    /// `1/10,0.502,0.898,0.6,0.7,0.687,0.712` (the default). Three values give a
    /// uniform trio.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 20_000)]
    pub q: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Error coupling: `R` (classifiers 1 and 2), `X:Y=R` or `X:Y=Ra/Rb`,
    /// 1-based. Negative weights couple antithetically. Repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Vec<String>,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    /// Also write the per-item decisions as CSV.
    #[arg(long)]
    pub records: bool,
    #[arg(long)]
    pub json: bool,
}

fn parse_policy(s: &str) -> Result<SelectionPolicy, String> {
    s.parse().map_err(|e: algeval::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: algeval::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Decide(args) => commands::decide(&args),
        Command::Simulate(args) => simulate::run(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
