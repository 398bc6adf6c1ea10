use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Decide Birkhoff-James orthogonality, compute operator norms and run the
/// verification suites.
///
/// Exit status: 0 holds / passes, 1 fails, 2 indeterminate, 64 usage error.
#[derive(Debug, Parser)]
#[command(name = "bjorth", version, max_term_width = 100)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

/// Numerical configuration shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Tolerance below which a margin counts as zero
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Width of the indeterminate band below zero
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub band: f64,

    /// Mesh resolution for planar scans and norm computations (>= 8)
    #[arg(long, global = true, default_value_t = 4096)]
    pub resolution: usize,

    /// Seed for every randomized search
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Also write the report as JSON to this path
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print the JSON report on stdout instead of the human rendering
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    /// Space as inline JSON, a path to a JSON file, or `hexagon`.
    /// Defaults to l_p^dim built from --p and --dim.
    #[arg(long)]
    pub space: Option<String>,

    /// Exponent for the default l_p space (a number or `inf`)
    #[arg(long, default_value = "2")]
    pub p: String,

    /// Dimension for the default l_p space
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Vectors,
    Operators,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "example-1-1")]
    Example11,
    #[value(name = "example-2-2")]
    Example22,
    #[value(name = "prop-2-8")]
    Prop28,
    #[value(name = "prop-2-9")]
    Prop29,
    #[value(name = "thm-2-10")]
    Thm210,
    BhatiaSemrl,
    Invertibility,
    RightAsymmetry,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide x ⊥_B y for vectors or T ⊥_B A for operators
    CheckOrth {
        #[command(flatten)]
        space: SpaceArgs,

        #[arg(long, value_enum, default_value = "vectors")]
        mode: Mode,

        /// {"x": [...], "y": [...]} for vectors, {"t": {"matrix": ...},
        /// "a": {"matrix": ...}} for operators (inline or a file path)
        #[arg(long)]
        operands: Option<String>,

        /// Operator T (operators mode, instead of --operands)
        #[arg(long)]
        matrix: Option<String>,

        /// Operator A (operators mode, instead of --operands)
        #[arg(long)]
        matrix2: Option<String>,
    },

    /// Operator norm and the set of unit vectors where it is attained
    OperatorNorm {
        #[command(flatten)]
        space: SpaceArgs,

        /// {"matrix": [[...], ...]} or a bare row list (inline or a file path)
        #[arg(long)]
        matrix: String,
    },

    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: Suite,

        /// Exponent for the l_p suites (default depends on the suite)
        #[arg(long)]
        p: Option<f64>,

        /// Dimension for bhatia-semrl
        #[arg(long, alias = "dim", default_value_t = 2)]
        n: usize,

        /// Random trials (default depends on the suite)
        #[arg(long)]
        trials: Option<usize>,
    },

    /// Scan the unit sphere for left or right symmetric points
    ScanSymmetric {
        #[command(flatten)]
        space: SpaceArgs,

        #[arg(long, value_enum, default_value = "left")]
        kind: Kind,
    },

    /// Search random operators of l_p^n for nonzero left-symmetric ones
    ConjectureSearch {
        #[arg(long, alias = "dim", default_value_t = 2)]
        n: usize,

        #[arg(long, default_value_t = 3.0)]
        p: f64,

        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}
