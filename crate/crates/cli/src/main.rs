//! `rncplus` command-line tool.
//!
//! Exit codes: 0 success or property holds, 1 property fails or a
//! counterexample was found, 2 usage or I/O error, 3 numeric nonconvergence.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rncplus::automata::DEFAULT_MONOID_CAP;
use rncplus::extraction::ExtractionConfig;
use rncplus::tanh_analysis::{DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Parser, Debug)]
#[command(name = "rncplus", version, about = "Positive-weight tanh cascades and their automata")]
pub struct Cli {
    /// Print machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a network on a word and print its trajectory and output.
    Simulate {
        /// Network file (JSON)
        #[arg(long)]
        net: PathBuf,
        #[command(flatten)]
        word: WordArg,
    },
    /// Settle a state under the identity letter.
    Settle {
        /// Network file (JSON)
        #[arg(long)]
        net: PathBuf,
        /// Space-separated state; defaults to the state after --word.
        #[arg(long, allow_hyphen_values = true)]
        state: Option<String>,
        #[command(flatten)]
        word: WordArg,
        #[command(flatten)]
        numeric: Numeric,
    },
    /// Pivots, stationary points and fixpoints of tanh(wx + v).
    AnalyzeNeuron {
        #[arg(long, allow_hyphen_values = true)]
        weight: f64,
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        margin: f64,
    },
    /// Extract a cascade of three-state semiautomata from a network.
    Extract {
        /// Network file (JSON)
        #[arg(long)]
        net: PathBuf,
        /// Write the extraction report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the flat automaton as Graphviz here.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        extraction: ExtractionArgs,
    },
    /// Extract (or load a report) and check it against the network.
    Verify {
        /// Network file (JSON)
        #[arg(long)]
        net: PathBuf,
        /// A report previously written by `extract`.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        extraction: ExtractionArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Minimize an automaton.
    Minimize {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Letters acting as identity transformations on the minimal automaton.
    CheckIdentity {
        #[arg(long)]
        automaton: PathBuf,
        /// Fail unless this letter is an identity transformation.
        #[arg(long)]
        letter: Option<String>,
    },
    /// Decide whether the transition monoid of the minimal automaton is aperiodic.
    CheckAperiodic {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MONOID_CAP)]
        cap: usize,
    },
    /// Compare an automaton with another automaton or with a network.
    Equiv {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, conflicts_with = "net", required_unless_present = "net")]
        other: Option<PathBuf>,
        #[arg(long)]
        net: Option<PathBuf>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// List the fixture catalog, export a fixture, or query its oracle.
    Fixtures {
        #[arg(long)]
        name: Option<String>,
        /// Write the fixture (network or automaton) as JSON here.
        #[arg(long, requires = "name")]
        out: Option<PathBuf>,
        /// Print the brute-force oracle's output on this word.
        #[arg(long, requires = "name", allow_hyphen_values = true)]
        word: Option<String>,
    },
    /// Render an automaton (or the flat automaton of a report) as Graphviz.
    ExportDot {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, alias = "out")]
        dot: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct WordArg {
    /// Space-separated letters.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub word: String,
}

impl WordArg {
    pub fn letters(&self) -> Vec<&str> {
        self.word.split_whitespace().collect()
    }
}

#[derive(Args, Debug)]
pub struct Numeric {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Iteration budget per neuron
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Args, Debug)]
pub struct ExtractionArgs {
    /// Settling step tolerance.
    #[arg(long, default_value_t = ExtractionConfig::default().settle_tol)]
    pub tol: f64,
    /// Distance from a pivot below which a digit is reported ambiguous.
    #[arg(long, default_value_t = ExtractionConfig::default().digit_margin)]
    pub margin: f64,
    /// Largest accepted gap between limits of one tuple's representatives.
    #[arg(long, default_value_t = ExtractionConfig::default().rep_consistency_tol)]
    pub rep_tol: f64,
    /// Iteration budget per neuron while settling
    #[arg(long, default_value_t = ExtractionConfig::default().max_settle_iter)]
    pub max_iter: usize,
}

impl ExtractionArgs {
    pub fn config(&self) -> ExtractionConfig {
        ExtractionConfig {
            settle_tol: self.tol,
            digit_margin: self.margin,
            rep_consistency_tol: self.rep_tol,
            max_settle_iter: self.max_iter,
        }
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Compare every word up to this length
    #[arg(long, default_value_t = 10)]
    pub max_len: usize,
    /// Random words tried after the exhaustive pass
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rncplus: {e}");
            e.exit_code()
        }
    }
}
