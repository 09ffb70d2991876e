//! `qcube`: generate operators, analyze them, verify inequalities, sweep.
//!
//! Exit codes: 0 success, 1 some report failed, 2 usage or IO error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "qcube", version, about = "Fourier analysis on quantum Boolean cubes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated operator as JSON.
    Generate(GenerateArgs),
    /// Spectrum, weights, influences and noise stability of an operator.
    Analyze(AnalyzeArgs),
    /// Check inequalities on one operator.
    Verify(VerifyArgs),
    /// Check inequalities over a generated family; writes CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct GenerateArgs {
    /// dictator, pauli-string, embedded-classical, random-hermitian-unitary,
    /// random-low-degree or random-projector-boolean.
    #[arg(long)]
    pub kind: String,
    /// Qubit count; inferred from --table or --word when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated ±1 truth table, qubit 0 as the most significant bit.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub table: Option<Vec<i64>>,
    /// Base-4 Pauli word for pauli-string, qubit 0 first.
    #[arg(long)]
    pub word: Option<String>,
    /// Degree cap for random-low-degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Projector rank for random-projector-boolean.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Fraction of dictator truth-table points to flip.
    #[arg(long)]
    pub corruption: Option<f64>,
    /// Qubit carrying the dictator.
    #[arg(long)]
    pub qubit: Option<usize>,
    /// Coefficient map (pauli) or dense rows (matrix).
    #[arg(long, default_value = "pauli")]
    pub format: String,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5])]
    pub delta: Vec<f64>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// Law parameters. List-valued flags form a grid.
#[derive(Args, Clone)]
pub struct LawArgs {
    /// Comma-separated law ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub laws: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub delta: Vec<f64>,
    /// Semigroup time (hyper) or t0 (l2_integral).
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Exponent q of the degree law.
    #[arg(long)]
    pub q: Option<f64>,
    /// Replaces the law's constant.
    #[arg(long)]
    pub constant_override: Option<f64>,
    /// `proof-case` selects the alternative talagrand_l1 constant.
    #[arg(long)]
    pub variant: Option<String>,
    /// Coordinates J for bmo, inter and g_bounds.
    #[arg(long, value_delimiter = ',')]
    pub subset: Option<Vec<usize>>,
}

#[derive(Args)]
pub struct VerifyArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// FamilySpec JSON.
    pub spec: PathBuf,
    #[command(flatten)]
    pub law: LawArgs,
    /// Members per qubit count; defaults to the spec's `count`, then 1.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Where a failing operator is written; defaults to `<out>.failure.json`.
    #[arg(long)]
    pub failure_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Verify(a) => commands::verify(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
