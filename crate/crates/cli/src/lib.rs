//! Command-line front end: argument parsing, command dispatch and reports.

pub mod commands;
pub mod fanfile;
pub mod report;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::run;
pub use report::{ExitStatus, JobReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Clone, Parser)]
#[command(name = "toric-k", version, about = "Equivariant K₀ of toric varieties from fan data")]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Emit a machine-readable JobReport
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for all random sampling
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Number of random trials
    #[arg(long, global = true, default_value_t = 25)]
    pub trials: usize,
    /// Support-closure rounds before the solver gives up
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    /// Run the exactness and extension checks on non-smooth fans
    #[arg(long, global = true)]
    pub experimental_nonsmooth: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// List cones, face data and smoothness flags
    Info {
        /// Fan file, or corpus:NAME
        fan: String,
    },
    /// K₀ of the affine piece of one cone
    K0Affine {
        fan: String,
        /// Comma-separated ray indices, or "zero"
        #[arg(long)]
        cone: String,
        #[arg(long, default_value = "k")]
        coeff: String,
    },
    /// Membership of a tuple in the global K₀, or sampled character tuples
    K0Global {
        fan: String,
        /// JSON list, one entry per maximal cone, of [[m, coeff], ...] with m ∈ M
        #[arg(long)]
        element: Option<String>,
    },
    /// Solve random Čech cocycles of one level
    CheckExactness {
        fan: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Extend random sections from random subfans
    CheckFlasque { fan: String },
    /// Hilbert basis of σ∨ ∩ M (or of σ ∩ N with --primal)
    Hilbert {
        fan: String,
        #[arg(long)]
        cone: String,
        #[arg(long)]
        primal: bool,
    },
    /// K₀ class of a graded free module ⊕ R[A][m]
    Kclass {
        /// JSON list of monoid generators
        #[arg(long, conflicts_with_all = ["fan", "cone"])]
        generators: Option<String>,
        /// Use A = σ∨ ∩ M for a cone of this fan
        #[arg(long, requires = "cone")]
        fan: Option<String>,
        #[arg(long)]
        cone: Option<String>,
        /// JSON list of degrees m
        #[arg(long)]
        shifts: String,
        #[arg(long, default_value = "k")]
        coeff: String,
        /// Treat the coefficient ring as having no rank-based K₀
        #[arg(long)]
        symbolic: bool,
    },
}
