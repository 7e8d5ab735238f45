use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::{Outcome, RunReport};

#[derive(Parser, Debug)]
#[command(
    name = "multicolor",
    version,
    about = "Exact multicoloring solvers, reductions and monomial-testing circuits"
)]
struct Cli {
    /// Seed for detecting-family construction.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the run report as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(flatten)]
    caps: Caps,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Caps {
    /// Node budget of the backtracking solver.
    #[arg(long, global = true, default_value_t = multicolor::solvers::DEFAULT_NODE_BUDGET)]
    pub cap_nodes: u64,
    /// State bound of the dynamic program (states times palette size).
    #[arg(long, global = true, default_value_t = multicolor::solvers::DEFAULT_DP_CAP)]
    pub cap_dp: u64,
    /// Largest variable count the brute-force SAT oracle accepts.
    #[arg(long, global = true, default_value_t = multicolor::sat::DEFAULT_SAT_VAR_CAP)]
    pub cap_sat_vars: usize,
    /// Largest Kneser graph list removal may build.
    #[arg(long, global = true, default_value_t = multicolor::reduction::DEFAULT_KNESER_CAP)]
    pub cap_kneser: u64,
    /// Vector bound of the detecting-family verifier.
    #[arg(long, global = true, default_value_t = multicolor::detecting::DEFAULT_VERIFY_CAP)]
    pub cap_verify: u64,
    /// Term bound of circuit expansion.
    #[arg(long, global = true, default_value_t = multicolor::circuits::DEFAULT_TERM_CAP)]
    pub cap_terms: usize,
    /// Bound on enumerated independent sets.
    #[arg(long, global = true, default_value_t = multicolor::graph::DEFAULT_INDEPENDENT_SET_CAP)]
    pub cap_sets: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a multicoloring instance given as JSON.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Backtracking)]
        engine: EngineArg,
        /// Write the coloring found to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Reduce a DIMACS formula to a multicoloring instance.
    Reduce {
        cnf: PathBuf,
        #[arg(short, long)]
        b: usize,
        #[arg(long, value_enum, default_value_t = StageArg::Plain)]
        stage: StageArg,
        /// Instance output file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Stage statistics output file.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Check that the formula and its nonuniform instance agree.
    Verify {
        cnf: PathBuf,
        #[arg(short, long)]
        b: usize,
    },
    /// Build or verify d-detecting families.
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Emit the Kneser graph KG(a, b).
    Kneser {
        #[arg(short, long)]
        a: usize,
        #[arg(short, long)]
        b: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build, expand and filter arithmetic circuits.
    #[command(subcommand)]
    Circuit(CircuitCommand),
}

#[derive(Subcommand, Debug)]
pub enum DetectCommand {
    /// Build a verified family; random draws of `--size` sets when given,
    /// greedy halving otherwise.
    Build {
        #[arg(short, long)]
        universe: usize,
        #[arg(short, long)]
        d: usize,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = multicolor::detecting::DEFAULT_ATTEMPTS)]
        attempts: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check whether a family file is d-detecting.
    Verify { family: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum CircuitCommand {
    /// q_G of a list instance, or p_G with `--filtered`.
    Graph {
        instance: PathBuf,
        #[arg(long)]
        filtered: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// q_S of a carry-less instance, or p_S with `--filtered`.
    SubsetSum {
        instance: PathBuf,
        /// Block count; 1 unless `--sigma` asks for the block-ratio search.
        #[arg(short, long, conflicts_with = "sigma")]
        t: Option<usize>,
        /// Pick the block count by the block-ratio search with this exponent.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        filtered: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Expand a circuit into its polynomial.
    Expand {
        circuit: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Degree-k part of a circuit.
    Filter {
        circuit: PathBuf,
        #[arg(short, long)]
        k: usize,
        /// Degree bound; defaults to k.
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Whether the expansion has a term with every exponent at most r.
    Monomial {
        circuit: PathBuf,
        #[arg(short, long, default_value_t = 1)]
        r: u32,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum EngineArg {
    Backtracking,
    Dp,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum StageArg {
    Nonuniform,
    Uniform,
    Plain,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = RunReport::new(cli.command.name());
    let res = commands::run(&cli.command, cli.seed, &cli.caps, &mut report);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    if let Err(e) = res {
        report.result = Outcome::Error;
        report.error = Some(e.to_string());
        eprintln!("error: {e}");
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else if report.result != Outcome::Error {
        // keep stdout parseable when it carries an artifact
        match report.artifact.take() {
            Some(text) => {
                print!("{text}");
                eprintln!("{}", report.result);
            }
            None => println!("{}", report.result),
        }
    }
    ExitCode::from(report.result.exit_code())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::Reduce { .. } => "reduce",
            Command::Verify { .. } => "verify",
            Command::Detect(DetectCommand::Build { .. }) => "detect build",
            Command::Detect(DetectCommand::Verify { .. }) => "detect verify",
            Command::Kneser { .. } => "kneser",
            Command::Circuit(c) => match c {
                CircuitCommand::Graph { .. } => "circuit graph",
                CircuitCommand::SubsetSum { .. } => "circuit subset-sum",
                CircuitCommand::Expand { .. } => "circuit expand",
                CircuitCommand::Filter { .. } => "circuit filter",
                CircuitCommand::Monomial { .. } => "circuit monomial",
            },
        }
    }
}
