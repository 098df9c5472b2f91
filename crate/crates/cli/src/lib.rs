//! Command-line workflows for skew Gaussian decomposable graphical models.
//! Each subcommand is a thin wrapper over a function in [`commands`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod error;
pub mod io;

use commands::check_graph::{check_graph, GraphReport};
use commands::compare::{compare, CompareConfig};
use commands::fit::{fit, FitConfig, PriorKind};
use commands::simulate::{simulate, Case, SimulateConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "sgdg",
    version,
    about = "Skew Gaussian decomposable graphical models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report whether a graph is decomposable and how it factorizes
    CheckGraph {
        #[arg(long)]
        graph: PathBuf,
        /// Also write the report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw a dataset from a built-in design or a custom truth file
    Simulate(SimulateArgs),
    /// Run the Gibbs sampler on a dataset
    Fit(FitArgs),
    /// Log Bayes factor between two traces fitted to the same data
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub case: Case,
    /// δ for case A, L12 = L23 for case B
    #[arg(long, allow_negative_numbers = true)]
    pub value: Option<f64>,
    /// Truth file (μ, δ, ω², L, graph) for the custom case
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "proper")]
    pub prior: PriorKind,
    /// Hyperparameter override, repeatable: b1..b5, mu0, psi, psi_scale
    #[arg(long = "hyper", value_name = "KEY=VALUE", value_parser = parse_key_value)]
    pub hyper: Vec<(String, String)>,
    #[arg(long, default_value_t = 50_000)]
    pub iters: usize,
    #[arg(long = "burnin", default_value_t = 10_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10)]
    pub thin: usize,
    #[arg(long)]
    pub seed: u64,
    /// Fit the Gaussian graphical model (δ = 0)
    #[arg(long)]
    pub fix_delta_zero: bool,
    /// Relabel the graph (and data columns) to a perfect elimination ordering if needed
    #[arg(long)]
    pub reorder: bool,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Trace of the model in the numerator
    #[arg(long)]
    pub a: PathBuf,
    /// Trace of the model in the denominator
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = sgdg::evidence::DEFAULT_MIX_WEIGHT)]
    pub mix_weight: f64,
    #[arg(long, default_value_t = sgdg::evidence::DEFAULT_TOL)]
    pub tol: f64,
    /// Directory for compare.json and compare.txt
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
            Ok((k.trim().to_owned(), v.trim().to_owned()))
        }
        _ => Err(format!("expected KEY=VALUE, got '{s}'")),
    }
}

/// Runs a parsed command and returns what should go to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::CheckGraph { graph, json } => {
            let spec = io::read_graph(&graph)?;
            let report: GraphReport = check_graph(&spec);
            if let Some(path) = json {
                io::write_json(&path, &report)?;
            }
            Ok(commands::check_graph::render(&report))
        }
        Command::Simulate(a) => {
            let out = simulate(&SimulateConfig {
                case: a.case,
                value: a.value,
                truth: a.truth,
                n: a.n,
                seed: a.seed,
                out: a.out,
            })?;
            Ok(format!(
                "wrote {} rows to {}\ntruth: {}\ngraph: {}\n",
                a.n,
                out.data.display(),
                out.truth.display(),
                out.graph.display()
            ))
        }
        Command::Fit(a) => {
            let out = fit(&FitConfig {
                data: a.data,
                graph: a.graph,
                prior: a.prior,
                hyper: a.hyper,
                iters: a.iters,
                burn_in: a.burn_in,
                thin: a.thin,
                seed: a.seed,
                fix_delta_zero: a.fix_delta_zero,
                reorder: a.reorder,
                bins: a.bins,
                out: a.out,
            })?;
            Ok(commands::fit::render(&out))
        }
        Command::Compare(a) => {
            let report = compare(&CompareConfig {
                a: a.a,
                b: a.b,
                mix_weight: a.mix_weight,
                tol: a.tol,
                out: a.out.clone(),
            })?;
            let text = commands::compare::render(&report);
            if let Some(dir) = a.out {
                let dir = io::ensure_dir(&dir)?;
                io::write_json(&dir.join("compare.json"), &report)?;
                io::write_text(&dir.join("compare.txt"), &text)?;
            }
            Ok(text)
        }
    }
}
