//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "suprank",
    version,
    about = "Track influence networks over time: cumulative snapshots, centrality rankings, \
             and per-node Bayesian surprise in bits",
    after_help = "Exit codes: 0 success, 1 usage error, 2 data error."
)]
pub struct Cli {
    /// Declarative TOML config; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Edge-list input (`src,dst,year[,weight]` rows).
    #[arg(long, global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Years per snapshot.
    #[arg(long, global = true, value_name = "YEARS")]
    pub delta: Option<u32>,

    /// First year of the snapshot range (default: earliest event).
    #[arg(long, global = true, value_name = "YEAR")]
    pub start: Option<i32>,

    /// Last year of the snapshot range (default: latest event).
    #[arg(long, global = true, value_name = "YEAR")]
    pub end: Option<i32>,

    /// Read a weight column (see --weight-col).
    #[arg(long, global = true, conflicts_with = "unweighted")]
    pub weighted: bool,

    /// Ignore any weight column; every row counts 1.
    #[arg(long, global = true)]
    pub unweighted: bool,

    /// Zero-based weight column, implies --weighted.
    #[arg(long, global = true, value_name = "COL")]
    pub weight_col: Option<usize>,

    /// Field delimiter for the input.
    #[arg(long, global = true, value_name = "CHAR")]
    pub delimiter: Option<char>,

    /// Skip a header row.
    #[arg(long, global = true)]
    pub header: bool,

    /// Zero-based source-label column.
    #[arg(long, global = true, value_name = "COL")]
    pub src_col: Option<usize>,

    /// Zero-based destination-label column.
    #[arg(long, global = true, value_name = "COL")]
    pub dst_col: Option<usize>,

    /// Zero-based year column.
    #[arg(long, global = true, value_name = "COL")]
    pub year_col: Option<usize>,

    /// Skip rows with years outside LO,HI (counted, not errors).
    #[arg(long, global = true, value_name = "LO,HI")]
    pub year_bounds: Option<String>,

    /// Flip the direction of every edge at ingestion.
    #[arg(long, global = true)]
    pub reverse_edges: bool,

    /// Damping factor for the random walk.
    #[arg(long, global = true, value_name = "F")]
    pub damping: Option<f64>,

    /// L1 convergence tolerance for the walk.
    #[arg(long, global = true, value_name = "F")]
    pub tolerance: Option<f64>,

    /// Iteration cap for the walk.
    #[arg(long, global = true, value_name = "N")]
    pub max_iterations: Option<u32>,

    /// Comma-separated hypothesis set: past_rank, regular_growth, uniform.
    #[arg(long, global = true, value_name = "LIST")]
    pub hypotheses: Option<String>,

    /// Count bypassing citers in the disruption denominator.
    #[arg(long, global = true, value_name = "BOOL")]
    pub include_bypass: Option<bool>,

    /// Output directory for artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Trajectory artifact format.
    #[arg(long, global = true, value_name = "csv|json")]
    pub format: Option<String>,

    /// Generator seed (simulate).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Emit a connected-scatter SVG for this node (repeatable).
    #[arg(long, global = true, value_name = "NODE")]
    pub svg: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest an edge list, build snapshots, report per-snapshot sizes, and
    /// write the snapshot cache.
    Snapshot,
    /// Full analysis: centrality, rankings, correlations, surprise
    /// trajectories, and plot data.
    Analyze,
    /// Generate a synthetic influence network, analyze it, and score any
    /// injected shock against control nodes.
    Simulate(SimulateArgs),
    /// Show the top-k nodes of one measure at one snapshot, from a previous
    /// analyze run.
    Top(TopArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Nodes wired into the seed ring.
    #[arg(long, value_name = "N")]
    pub initial_nodes: Option<u32>,

    /// Growth steps (one snapshot per step).
    #[arg(long, value_name = "N")]
    pub steps: Option<u32>,

    /// New citers per step.
    #[arg(long, value_name = "N")]
    pub arrivals: Option<u32>,

    /// Distinct citations per arrival.
    #[arg(long, value_name = "N")]
    pub edges_per_arrival: Option<u32>,

    /// Rich-get-richer exponent; 0 picks targets uniformly.
    #[arg(long, value_name = "F")]
    pub bias: Option<f64>,

    /// Step receiving the citation burst.
    #[arg(long, value_name = "N")]
    pub shock_step: Option<u32>,

    /// Burst target: `rank:K` (K-th by in-degree) or `node:LABEL`.
    #[arg(long, value_name = "SEL")]
    pub shock_target: Option<String>,

    /// Number of isolated burst citers.
    #[arg(long, value_name = "N")]
    pub burst: Option<u32>,
}

#[derive(Debug, Args)]
pub struct TopArgs {
    /// pagerank or disruption.
    #[arg(long, value_name = "MEASURE")]
    pub measure: String,

    /// Snapshot timestamp.
    #[arg(long = "at", value_name = "T")]
    pub at: i32,

    /// How many nodes to list (ties at the cut are all included).
    #[arg(short = 'k', long = "top", value_name = "N", default_value_t = 10)]
    pub k: usize,
}
