//! `semigen` — classify growth conditions of operators on graded sequence
//! spaces and evaluate the semigroups they generate through truncated
//! exponential series with certified error bounds.
//!
//! Exit codes: 0 — every requested check resolved and passed; 1 — a check
//! ran but did not resolve or did not pass (inconclusive classification,
//! missing series certificate, violated bound, merge conflict); 2 —
//! malformed input (flags, files, expressions).

mod commands;
mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "semigen",
    version,
    about = "Growth-condition classification and certified semigroup evaluation \
             for operators on graded sequence spaces"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the condition checkers and emit one record per verdict.
    Classify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        probe: ProbeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate the generated semigroup by truncated exponential series.
    Evaluate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        probe: ProbeArgs,
        #[command(flatten)]
        params: EvalParams,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the evolution law, the generator limit, and time continuity.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        probe: ProbeArgs,
        #[command(flatten)]
        params: VerifyParams,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit counterexample constructions and closed-form witnesses.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Merge classification record files and audit their consistency.
    ReportMerge {
        /// Record files produced by `classify` (line-delimited JSON).
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
pub struct ProblemArgs {
    /// Space description file (TOML: kind, entry, order).
    #[arg(long, value_name = "FILE")]
    pub space: Option<PathBuf>,
    /// Operator description file (TOML: kind, symbol).
    #[arg(long, value_name = "FILE")]
    pub operator: Option<PathBuf>,
    /// Built-in weight family: omega, rapid-decay, banded.
    #[arg(long, value_name = "NAME", conflicts_with = "space")]
    pub family: Option<String>,
    /// Summation order of the seminorms: "inf" or a number r >= 1.
    #[arg(long, default_value = "inf", value_name = "ORD")]
    pub order: String,
    /// Diagonal symbol expression in j (e.g. "j", "log(j)", "1/j").
    #[arg(long, value_name = "EXPR", conflicts_with = "operator")]
    pub symbol: Option<String>,
    /// Use the coefficient shift (Ax)_j = j * x_{j+1} as the operator.
    #[arg(long, conflicts_with_all = ["operator", "symbol"])]
    pub taylor_shift: bool,
    /// Function model: disc-taylor, entire-taylor, periodic-smooth.
    #[arg(
        long,
        value_name = "NAME",
        conflicts_with_all = ["space", "operator", "family", "symbol", "taylor_shift"]
    )]
    pub model: Option<String>,
}

#[derive(Args)]
pub struct ProbeArgs {
    /// Row-scan horizon for weight windows.
    #[arg(long, default_value_t = 100_000, value_name = "INT")]
    pub jmax: u64,
    /// Largest probed series order in growth scans.
    #[arg(long, default_value_t = 128, value_name = "INT")]
    pub nprobe: u32,
    /// Grading indices to probe (comma separated).
    #[arg(long = "p", value_delimiter = ',', default_value = "1,2,3", value_name = "LIST")]
    pub p: Vec<u32>,
    /// Offsets of the controlling index q above p; the largest sets the
    /// search span (comma separated).
    #[arg(long = "q-candidates", value_delimiter = ',', value_name = "LIST")]
    pub q_candidates: Option<Vec<u32>>,
    /// Series horizons R to certify (comma separated).
    #[arg(long = "R", value_delimiter = ',', value_name = "LIST")]
    pub r: Option<Vec<f64>>,
    /// Truncation tolerance for series evaluation.
    #[arg(long, default_value_t = 1e-10, value_name = "FLOAT")]
    pub tol: f64,
}

#[derive(Args)]
pub struct EvalParams {
    /// Initial coordinates x_1,x_2,... (comma separated).
    #[arg(
        long = "x",
        value_delimiter = ',',
        value_name = "LIST",
        allow_hyphen_values = true,
        conflicts_with = "unit"
    )]
    pub x: Option<Vec<f64>>,
    /// Use the basis vector e_J as the initial vector (default e_1).
    #[arg(long, value_name = "J")]
    pub unit: Option<u64>,
    /// Times to evaluate at (comma separated; negative times run the group).
    #[arg(
        long = "t",
        value_delimiter = ',',
        required = true,
        value_name = "LIST",
        allow_hyphen_values = true
    )]
    pub t: Vec<f64>,
    /// Series horizon for the certificate (default: largest --R, else 1;
    /// for --taylor-shift, max |t| + 1).
    #[arg(long, value_name = "FLOAT")]
    pub horizon: Option<f64>,
    /// Compose certified steps of this length to reach times beyond the
    /// horizon.
    #[arg(long, value_name = "R_STEP")]
    pub piecewise: Option<f64>,
    /// Number of leading coordinates to report.
    #[arg(long, default_value_t = 8, value_name = "INT")]
    pub window: u64,
}

#[derive(Args)]
pub struct VerifyParams {
    /// First evolution-law time.
    #[arg(long = "t", default_value_t = 0.3, value_name = "FLOAT")]
    pub t: f64,
    /// Second evolution-law time.
    #[arg(long = "s", default_value_t = 0.4, value_name = "FLOAT")]
    pub s: f64,
    /// Series horizon for the certificate (default 1.5).
    #[arg(long, value_name = "FLOAT")]
    pub horizon: Option<f64>,
    /// Probe coordinates x_1,x_2,... (comma separated).
    #[arg(
        long = "x",
        value_delimiter = ',',
        value_name = "LIST",
        allow_hyphen_values = true,
        conflicts_with = "unit"
    )]
    pub x: Option<Vec<f64>>,
    /// Use the basis vector e_J as the probe vector (default e_1).
    #[arg(long, value_name = "J")]
    pub unit: Option<u64>,
    /// Number of halvings in the generator difference-quotient ladder.
    #[arg(long, default_value_t = 8, value_name = "INT")]
    pub hsteps: u32,
    /// Corrupt the law residual to exercise the failure path (self-test).
    #[arg(long, hide = true)]
    pub self_test_corrupt_tail: bool,
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Sparse-ramp diagonal on a grading whose weight columns all vanish
    /// somewhere: bounded on each seminorm, unbounded globally.
    Cor44 {
        /// Space description file (TOML; only the weight family is used).
        #[arg(long, value_name = "FILE")]
        space: Option<PathBuf>,
        /// Built-in weight family (default omega).
        #[arg(long, value_name = "NAME", conflicts_with = "space")]
        family: Option<String>,
        /// Number of ramp steps.
        #[arg(long, default_value_t = 8, value_name = "INT")]
        count: u32,
        /// Row-scan horizon for the kernel search.
        #[arg(long, default_value_t = 10_000, value_name = "INT")]
        jmax: u64,
        #[command(flatten)]
        out: OutFileArg,
    },
    /// Partial theta sums whose low-order norms outrun every geometric
    /// lower bound.
    HdDivergence {
        /// Truncation order k of the partial sum.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=200))]
        k: u32,
        #[command(flatten)]
        out: OutFileArg,
    },
    /// Frequency witness beating a claimed derivative-norm domination.
    Cinfty {
        /// Source grading index.
        #[arg(long)]
        p: u32,
        /// Controlling grading index (must exceed p).
        #[arg(long)]
        q: u32,
        /// Claimed constants mu_1..mu_{q-p+1} (comma separated).
        #[arg(long, value_delimiter = ',', required = true, value_name = "LIST")]
        mu: Vec<f64>,
        #[command(flatten)]
        out: OutFileArg,
    },
}

#[derive(Args)]
pub struct OutputArgs {
    /// Write records here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Emit a CSV table instead of line-delimited JSON.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Args)]
pub struct OutFileArg {
    /// Write the witness record here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Command::Classify { problem, probe, out } => commands::run_classify(&problem, &probe, &out),
        Command::Evaluate {
            problem,
            probe,
            params,
            out,
        } => commands::run_evaluate(&problem, &probe, &params, &out),
        Command::Verify {
            problem,
            probe,
            params,
            out,
        } => commands::run_verify(&problem, &probe, &params, &out),
        Command::Witness(w) => match w {
            WitnessCmd::Cor44 {
                space,
                family,
                count,
                jmax,
                out,
            } => commands::run_witness_ramp(space.as_deref(), family.as_deref(), count, jmax, &out),
            WitnessCmd::HdDivergence { k, out } => commands::run_witness_divergence(k, &out),
            WitnessCmd::Cinfty { p, q, mu, out } => {
                commands::run_witness_frequency(p, q, &mu, &out)
            }
        },
        Command::ReportMerge { files, out } => commands::run_report_merge(&files, &out),
    }
}
