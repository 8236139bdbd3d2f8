//! Per-snapshot centrality scores.
//!
//! Two measures are computed over a [`GraphSnapshot`]:
//!
//! * **PageRank** — stationary distribution of a damped random walk that
//!   follows out-edges with probability proportional to edge weight,
//!   teleports with probability `1 - damping`, and redistributes the mass of
//!   dangling nodes uniformly. Computed by power iteration over the nodes
//!   present in the snapshot.
//! * **Disruption** — for a focal node, partitions the graph into citers
//!   that cite it in isolation, citers that also cite one of its own
//!   influences, and bypassers that cite its influences without citing it,
//!   then scores `(only - both) / (only + both + bypass)` in `[-1, 1]`.
//!   Group membership ignores edge weights.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphSnapshot, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Pagerank,
    Disruption,
}

impl Measure {
    pub const ALL: [Measure; 2] = [Measure::Pagerank, Measure::Disruption];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Pagerank => "pagerank",
            Measure::Disruption => "disruption",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pagerank" => Ok(Measure::Pagerank),
            "disruption" => Ok(Measure::Disruption),
            other => Err(Error::UnknownMeasure { name: other.into() }),
        }
    }
}

/// Scores for every node present in one snapshot, for one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    t: i32,
    measure: Measure,
    /// Sorted by node index; covers exactly the snapshot's node set.
    entries: Vec<(NodeId, f64)>,
}

impl ScoreTable {
    /// Builds a table from `(node, score)` pairs; entries are kept sorted by
    /// node index. Each node may appear once.
    pub fn new(t: i32, measure: Measure, mut entries: Vec<(NodeId, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(n, _)| n);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        ScoreTable {
            t,
            measure,
            entries,
        }
    }

    pub fn t(&self) -> i32 {
        self.t
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, node: NodeId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&node, |&(n, _)| n)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.iter().map(|&(n, _)| n)
    }

    pub fn same_node_set(&self, other: &ScoreTable) -> bool {
        self.len() == other.len()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| a.0 == b.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PagerankConfig {
    /// Damping factor in (0, 1).
    pub damping: f64,
    /// L1 change per iteration below which the walk is converged.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for PagerankConfig {
    fn default() -> Self {
        PagerankConfig {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

impl PagerankConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in (0, 1), got {}",
                self.damping
            )));
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// PageRank scores plus how the iteration ended.
#[derive(Debug, Clone, PartialEq)]
pub struct PagerankResult {
    pub scores: ScoreTable,
    pub converged: bool,
    pub iterations: u32,
}

/// Power iteration over the nodes present in `snapshot`.
///
/// Non-convergence within `max_iterations` is not an error: the last iterate
/// is returned with `converged == false`.
pub fn pagerank(snapshot: &GraphSnapshot, config: &PagerankConfig) -> Result<PagerankResult> {
    config.validate()?;
    let present = snapshot.nodes();
    let m = present.len();
    if m == 0 {
        return Err(Error::EmptySnapshot { t: snapshot.t() });
    }

    // Dense slot per present node.
    let slot_of = |node: NodeId| present.binary_search(&node).expect("present node");
    let out_weight: Vec<f64> = present
        .iter()
        .map(|&n| {
            snapshot
                .out_edges(n)
                .iter()
                .map(|&(_, w)| w as f64)
                .sum::<f64>()
        })
        .collect();

    let d = config.damping;
    let teleport = (1.0 - d) / m as f64;
    let mut rank = vec![1.0 / m as f64; m];
    let mut next = vec![0.0; m];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let dangling: f64 = (0..m)
            .filter(|&i| out_weight[i] == 0.0)
            .map(|i| rank[i])
            .sum();
        let base = teleport + d * dangling / m as f64;
        next.iter_mut().for_each(|x| *x = base);
        for (i, &node) in present.iter().enumerate() {
            if out_weight[i] == 0.0 {
                continue;
            }
            let contrib = d * rank[i] / out_weight[i];
            for &(dst, w) in snapshot.out_edges(node) {
                next[slot_of(dst)] += contrib * w as f64;
            }
        }
        let l1_change: f64 = rank
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .sum();
        std::mem::swap(&mut rank, &mut next);
        if l1_change < config.tolerance {
            converged = true;
            break;
        }
    }

    let entries = present.iter().copied().zip(rank).collect();
    Ok(PagerankResult {
        scores: ScoreTable::new(snapshot.t(), Measure::Pagerank, entries),
        converged,
        iterations,
    })
}

/// Disruption of one focal node.
///
/// With `include_bypass` false, the bypass group is left out of the
/// denominator. A node with an empty denominator scores 0.
pub fn disruption(snapshot: &GraphSnapshot, focal: NodeId, include_bypass: bool) -> Result<f64> {
    if !snapshot.contains(focal) {
        return Err(Error::NodeNotPresent {
            label: format!("#{}", focal.0),
            t: snapshot.t(),
        });
    }
    Ok(disruption_unchecked(snapshot, focal, include_bypass))
}

fn disruption_unchecked(snapshot: &GraphSnapshot, focal: NodeId, include_bypass: bool) -> f64 {
    let influences: Vec<NodeId> = snapshot.out_edges(focal).iter().map(|&(n, _)| n).collect();
    let citers: Vec<NodeId> = snapshot.in_edges(focal).iter().map(|&(n, _)| n).collect();

    let cites_influence = |v: NodeId| -> bool {
        snapshot
            .out_edges(v)
            .iter()
            .any(|&(dst, _)| influences.binary_search(&dst).is_ok())
    };

    let mut n_both = 0u64;
    for &c in &citers {
        if cites_influence(c) {
            n_both += 1;
        }
    }
    let n_only = citers.len() as u64 - n_both;

    // Bypassers: everyone citing an influence of the focal node without
    // citing the focal node itself.
    let mut n_bypass = 0u64;
    if include_bypass {
        let mut seen: Vec<NodeId> = influences
            .iter()
            .flat_map(|&i| snapshot.in_edges(i).iter().map(|&(n, _)| n))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        n_bypass = seen
            .iter()
            .filter(|&&v| v != focal && citers.binary_search(&v).is_err())
            .count() as u64;
    }

    let denom = n_only + n_both + n_bypass;
    if denom == 0 {
        return 0.0;
    }
    (n_only as f64 - n_both as f64) / denom as f64
}

/// Disruption for every node in the snapshot. Parallelized across focal
/// nodes; the output is ordered by node index regardless of scheduling.
pub fn disruption_all(snapshot: &GraphSnapshot, include_bypass: bool) -> Result<ScoreTable> {
    let present = snapshot.nodes();
    if present.is_empty() {
        return Err(Error::EmptySnapshot { t: snapshot.t() });
    }
    let entries: Vec<(NodeId, f64)> = present
        .par_iter()
        .map(|&n| (n, disruption_unchecked(snapshot, n, include_bypass)))
        .collect();
    Ok(ScoreTable::new(snapshot.t(), Measure::Disruption, entries))
}
