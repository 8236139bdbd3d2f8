//! Temporal influence-network analysis.
//!
//! The pipeline: ingest timestamped directed citation events, materialize
//! cumulative graph snapshots at a configurable yearly granularity, score
//! each snapshot with PageRank and disruption centrality, convert scores to
//! rank positions, and quantify each node's rank movement as Bayesian
//! surprise — the divergence, in bits, between a Beta prior built from past
//! snapshots and its conjugate posterior after observing the current rank.
//!
//! A seedable synthetic-network generator with injectable structural shocks
//! closes the loop: a burst of isolated citations at a known step should be
//! the loudest surprise in the target's trajectory, and the `synth` module
//! reports whether it is.
//!
//! See the `pipeline` module for whole runs and the matching CLI commands.

pub mod centrality;
pub mod error;
pub mod export;
pub mod graph;
pub mod pipeline;
pub mod ranking;
pub mod special;
pub mod surprise;
pub mod synth;

#[cfg(test)]
pub(crate) mod testutil;

pub use centrality::{
    disruption, disruption_all, pagerank, Measure, PagerankConfig, PagerankResult, ScoreTable,
};
pub use error::{Error, Result};
pub use graph::{
    build_snapshots, ingest_edge_list, snapshot_stats, EdgeEvent, GraphSnapshot, IngestOptions,
    IngestReport, NodeId, NodeTable, SnapshotConfig, SnapshotSeries, SnapshotStats,
    TemporalEdgeList,
};
pub use ranking::{kendall_tau, rank, spearman_rho, RankEntry, RankTable};
pub use surprise::{
    kl_beta, node_surprise, past_rank_prior, posterior_update, regular_growth_prior,
    total_surprise, trajectories, BetaParams, Hypothesis, HypothesisKind, SurpriseEvaluation,
    SurpriseRecord, TotalSurprise, TrajectoryConfig, TrajectoryPoint,
};
pub use synth::{generate, shock_report, ShockSpec, ShockTarget, SynthConfig};
