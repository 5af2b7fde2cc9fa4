use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itc_core::control::{DEFAULT_HORIZON, DEFAULT_RESTARTS, DEFAULT_SEGMENTS, DEFAULT_STRENGTH};
use itc_core::geometry::{DEFAULT_GROMOV_BUDGET, DEFAULT_RANK_TOL, DEFAULT_ZERO_TOL};
use itc_core::CouplingKind;

/// Maximum information transfer capacity of spin networks: ITC distances,
/// their geometry, threshold clustering and bang-bang control.
///
/// Nodes are numbered from 1.
#[derive(Debug, Parser)]
#[command(name = "spin-itc", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Uniform open chain with nearest-neighbour coupling.
    Chain {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Coupling strength.
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[command(flatten)]
        analysis: Analysis,
    },
    /// Network read from a JSON spec file.
    Network {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        analysis: Analysis,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Xx,
    Heisenberg,
}

impl From<Kind> for CouplingKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Xx => CouplingKind::Xx,
            Kind::Heisenberg => CouplingKind::Heisenberg,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Analysis {
    /// Maximum transfer probabilities and ITC distances (the default analysis).
    #[arg(long)]
    pub itc: bool,

    /// Equivalence classes, class metric, triangle audit, embedding, Gromov δ and inertia.
    #[arg(long)]
    pub geometry: bool,
    /// Inertia exponent.
    #[arg(long, default_value_t = 2.0, requires = "geometry")]
    pub alpha: f64,
    /// Gram anchor: the class containing this node (default: the last class).
    #[arg(long, requires = "geometry")]
    pub anchor: Option<usize>,
    /// Quadruples evaluated exhaustively up to this count, sampled beyond it.
    #[arg(long, default_value_t = DEFAULT_GROMOV_BUDGET, requires = "geometry")]
    pub gromov_budget: u64,

    /// Threshold clustering hierarchy of the node distances.
    #[arg(long)]
    pub cluster: bool,

    /// Optimise bang-bang switching times for transfer FROM -> TO.
    #[arg(long, requires_all = ["from", "to"])]
    pub control: bool,
    /// Controlled node.
    #[arg(long, default_value_t = 1)]
    pub site: usize,
    #[arg(long, default_value_t = DEFAULT_STRENGTH)]
    pub strength: f64,
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub segments: usize,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: f64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Search for the first time the transfer FROM -> TO comes within EPS of its bound.
    #[arg(long, requires_all = ["from", "to", "eps"])]
    pub attain: bool,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Largest coefficient in the search for rational relations among eigenvalues.
    #[arg(long, default_value_t = 5)]
    pub max_coeff: u32,
    #[arg(long, default_value_t = 1e-9)]
    pub relation_tol: f64,

    /// Transfer probability FROM -> TO on the grid {0, DT, ..., TMAX}.
    #[arg(long, requires_all = ["from", "to", "tmax", "dt"])]
    pub series: bool,

    #[arg(long)]
    pub from: Option<usize>,
    #[arg(long)]
    pub to: Option<usize>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,

    /// Distances at or below this are treated as zero.
    #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
    pub zero_tol: f64,
    /// Relative cutoff for the embedding rank.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    /// Absolute tolerance for degenerate eigenvalues (default 1e-9 times the spectral norm).
    #[arg(long)]
    pub degeneracy_tol: Option<f64>,

    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write CSV series as PREFIX_dist.csv, PREFIX_series.csv, ...
    #[arg(long)]
    pub csv: Option<String>,
}
