//! Synthetic temporal influence networks.
//!
//! Growth model: a seed ring of nodes at year 1, then a fixed number of
//! arrivals per step, each citing distinct pre-existing nodes chosen with
//! probability proportional to `(in_degree + 1) ^ attachment_bias`. An
//! optional shock step injects a burst of brand-new citers that point only
//! at one target, moving both its incoming mass and its share of isolated
//! citations. Counts are deterministic functions of the config; only target
//! choices are random, drawn from a seeded ChaCha8 stream so equal seeds
//! give byte-equal edge lists on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeEvent, NodeId, NodeTable, SnapshotSeries, TemporalEdgeList};
use crate::surprise::TrajectoryPoint;

/// Name of the generator's RNG, echoed into metadata so outputs stay
/// reproducible across releases.
pub const RNG_NAME: &str = "chacha8";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub initial_nodes: u32,
    pub steps: u32,
    pub arrivals_per_step: u32,
    pub edges_per_arrival: u32,
    /// 0 = uniform target choice; larger values strengthen rich-get-richer.
    pub attachment_bias: f64,
    pub shock: Option<ShockSpec>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            initial_nodes: 10,
            steps: 10,
            arrivals_per_step: 10,
            edges_per_arrival: 2,
            attachment_bias: 1.0,
            shock: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockSpec {
    /// Step receiving the burst, in `2..=steps`.
    pub step: u32,
    pub target: ShockTarget,
    pub burst_edges: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockTarget {
    /// Node at this position when ordering by in-degree (0 = highest),
    /// evaluated just before the shock step.
    InDegreeRank(u32),
    /// Explicit node label.
    Node(String),
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_nodes < 2 {
            return Err(Error::InvalidConfig("initial_nodes must be >= 2".into()));
        }
        if self.steps < 3 {
            return Err(Error::InvalidConfig(format!(
                "steps must be >= 3 for insufficient snapshots never to block surprise, got {}",
                self.steps
            )));
        }
        if self.arrivals_per_step < 1 {
            return Err(Error::InvalidConfig("arrivals_per_step must be >= 1".into()));
        }
        if self.edges_per_arrival < 1 {
            return Err(Error::InvalidConfig("edges_per_arrival must be >= 1".into()));
        }
        if self.edges_per_arrival > self.initial_nodes {
            return Err(Error::InvalidConfig(format!(
                "edge budget impossible: each arrival cites {} distinct targets but only {} nodes exist at step 1",
                self.edges_per_arrival, self.initial_nodes
            )));
        }
        if !(self.attachment_bias >= 0.0 && self.attachment_bias.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "attachment_bias must be a finite non-negative real, got {}",
                self.attachment_bias
            )));
        }
        if let Some(shock) = &self.shock {
            if shock.step < 2 || shock.step > self.steps {
                return Err(Error::InvalidConfig(format!(
                    "shock step {} outside 2..={}",
                    shock.step, self.steps
                )));
            }
            if shock.burst_edges < 1 {
                return Err(Error::InvalidConfig("burst_edges must be >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Generator output: the edge list plus the shock target resolved to a
/// concrete node.
#[derive(Debug, Clone)]
pub struct Generated {
    pub list: TemporalEdgeList,
    pub shock: Option<ResolvedShock>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedShock {
    pub label: String,
    pub step: u32,
    pub burst_edges: u32,
    /// The target's in-degree just before the burst landed.
    pub prior_in_degree: u64,
}

pub fn generate(config: &SynthConfig) -> Result<Generated> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut nodes = NodeTable::new();
    let mut events: Vec<EdgeEvent> = Vec::new();
    let mut in_degree: Vec<u64> = Vec::new();

    fn add_node(nodes: &mut NodeTable, in_degree: &mut Vec<u64>, label: String) -> NodeId {
        let id = nodes.intern(&label);
        debug_assert_eq!(id.index(), in_degree.len());
        in_degree.push(0);
        id
    }

    // Seed ring at year 1: node i cites node (i + 1) mod m.
    let m = config.initial_nodes as usize;
    for i in 0..m {
        add_node(&mut nodes, &mut in_degree, format!("n{i:05}"));
    }
    for i in 0..m {
        let src = NodeId(i as u32);
        let dst = NodeId(((i + 1) % m) as u32);
        events.push(EdgeEvent {
            src,
            dst,
            year: 1,
            weight: 1,
        });
        in_degree[dst.index()] += 1;
    }

    let mut next_label = m;
    let mut shock_resolved = None;
    for step in 1..=config.steps {
        // Arrivals cite nodes that existed before this step began.
        let existing = nodes.len();
        let weights: Vec<f64> = in_degree[..existing]
            .iter()
            .map(|&d| ((d + 1) as f64).powf(config.attachment_bias))
            .collect();

        let mut step_citations: Vec<(NodeId, NodeId)> = Vec::new();
        for _ in 0..config.arrivals_per_step {
            let arrival = add_node(&mut nodes, &mut in_degree, format!("n{next_label:05}"));
            next_label += 1;
            let targets =
                sample_distinct_weighted(&mut rng, &weights, config.edges_per_arrival as usize);
            for target in targets {
                step_citations.push((arrival, NodeId(target as u32)));
            }
        }
        for (src, dst) in step_citations {
            events.push(EdgeEvent {
                src,
                dst,
                year: step as i32,
                weight: 1,
            });
            in_degree[dst.index()] += 1;
        }

        if let Some(shock) = &config.shock {
            if shock.step == step {
                // Resolve against the pre-step state so the burst measures
                // against the target's organic in-degree.
                let target = match &shock.target {
                    ShockTarget::Node(label) => nodes.get(label).ok_or_else(|| {
                        Error::InvalidConfig(format!("shock target `{label}` does not exist"))
                    })?,
                    ShockTarget::InDegreeRank(rank) => {
                        let mut order: Vec<usize> = (0..existing).collect();
                        order.sort_by_key(|&i| (std::cmp::Reverse(in_degree_before(&events, i, step)), i));
                        let idx = *order.get(*rank as usize).ok_or_else(|| {
                            Error::InvalidConfig(format!(
                                "shock target rank {rank} exceeds the {existing} available nodes"
                            ))
                        })?;
                        NodeId(idx as u32)
                    }
                };
                let prior_in_degree = in_degree_before(&events, target.index(), step);
                for b in 0..shock.burst_edges {
                    let citer = add_node(&mut nodes, &mut in_degree, format!("x{b:05}"));
                    events.push(EdgeEvent {
                        src: citer,
                        dst: target,
                        year: step as i32,
                        weight: 1,
                    });
                    in_degree[target.index()] += 1;
                }
                shock_resolved = Some(ResolvedShock {
                    label: nodes.label(target).to_string(),
                    step,
                    burst_edges: shock.burst_edges,
                    prior_in_degree,
                });
            }
        }
    }

    Ok(Generated {
        list: TemporalEdgeList::from_parts(nodes, events, false),
        shock: shock_resolved,
    })
}

/// In-degree of node `idx` from events strictly before `step`.
fn in_degree_before(events: &[EdgeEvent], idx: usize, step: u32) -> u64 {
    events
        .iter()
        .filter(|e| e.dst.index() == idx && e.year < step as i32)
        .map(|e| e.weight)
        .sum()
}

/// Draws `k` distinct indices with probability proportional to `weights`,
/// by repeated cumulative-sum inversion with chosen entries zeroed out.
fn sample_distinct_weighted(rng: &mut ChaCha8Rng, weights: &[f64], k: usize) -> Vec<usize> {
    debug_assert!(k <= weights.len());
    let mut working = weights.to_vec();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = working.iter().sum();
        debug_assert!(total > 0.0);
        let mut u = rng.random::<f64>() * total;
        let mut pick = working.len() - 1;
        for (i, &w) in working.iter().enumerate() {
            if u < w {
                pick = i;
                break;
            }
            u -= w;
        }
        // Rounding can walk past the last positive weight; back up to it.
        while working[pick] == 0.0 {
            pick = pick.checked_sub(1).expect("at least one positive weight");
        }
        chosen.push(pick);
        working[pick] = 0.0;
    }
    chosen
}

/// How clearly the shock stands out in a trajectory run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShockReport {
    pub target: String,
    pub shock_t: i32,
    /// False when the target has no applicable surprise at the shock step.
    pub target_applicable: bool,
    pub reason: Option<String>,
    pub target_shock_bits: Option<f64>,
    /// Snapshot where the target's total surprise peaks.
    pub target_argmax_t: Option<i32>,
    /// 1 = the shock step carries the target's highest surprise.
    pub target_rank_at_shock: Option<usize>,
    pub target_steps_with_evidence: usize,
    pub control_count: usize,
    /// Fraction of control nodes whose shock-step surprise falls below the
    /// target's.
    pub control_fraction_below: Option<f64>,
    /// 90th percentile (nearest-rank) of control shock-step surprises.
    pub control_p90: Option<f64>,
    /// Mean over controls of the rank their shock-step surprise holds within
    /// their own trajectory (1 = their peak).
    pub control_mean_rank_at_shock: Option<f64>,
    /// Shock argmax at the shock step and above the control 90th percentile.
    pub detected: bool,
}

/// Ranks the shock step's surprise inside the target's own trajectory and
/// against every other node observable at that step.
pub fn shock_report(
    series: &SnapshotSeries,
    points: &[TrajectoryPoint],
    target_label: &str,
    shock_step: u32,
) -> Result<ShockReport> {
    let shock_t = shock_step as i32;
    if series.get(shock_t).is_none() {
        return Err(Error::UnknownSnapshot {
            t: shock_t,
            available: series.timestamps(),
        });
    }
    let target = series
        .nodes()
        .get(target_label)
        .ok_or_else(|| Error::NodeNotPresent {
            label: target_label.to_string(),
            t: shock_t,
        })?;

    let target_points: Vec<&TrajectoryPoint> = points
        .iter()
        .filter(|p| p.node == target && p.has_evidence)
        .collect();
    let shock_point = target_points.iter().find(|p| p.t == shock_t);

    let mut report = ShockReport {
        target: target_label.to_string(),
        shock_t,
        target_applicable: shock_point.is_some(),
        reason: None,
        target_shock_bits: None,
        target_argmax_t: None,
        target_rank_at_shock: None,
        target_steps_with_evidence: target_points.len(),
        control_count: 0,
        control_fraction_below: None,
        control_p90: None,
        control_mean_rank_at_shock: None,
        detected: false,
    };
    let Some(shock_point) = shock_point else {
        report.reason = Some("insufficient history: no hypothesis applicable at the shock step".into());
        return Ok(report);
    };
    let shock_bits = shock_point.total_bits;
    report.target_shock_bits = Some(shock_bits);
    report.target_argmax_t = target_points
        .iter()
        .max_by(|a, b| a.total_bits.total_cmp(&b.total_bits))
        .map(|p| p.t);
    report.target_rank_at_shock = Some(
        target_points
            .iter()
            .filter(|p| p.total_bits > shock_bits)
            .count()
            + 1,
    );

    // Controls: every other node with applicable surprise at the shock step.
    let controls: Vec<&TrajectoryPoint> = points
        .iter()
        .filter(|p| p.t == shock_t && p.has_evidence && p.node != target)
        .collect();
    report.control_count = controls.len();
    if !controls.is_empty() {
        let mut bits: Vec<f64> = controls.iter().map(|p| p.total_bits).collect();
        bits.sort_by(f64::total_cmp);
        let below = bits.iter().filter(|&&b| b < shock_bits).count();
        report.control_fraction_below = Some(below as f64 / bits.len() as f64);
        let p90_idx = ((0.9 * bits.len() as f64).ceil() as usize).clamp(1, bits.len()) - 1;
        report.control_p90 = Some(bits[p90_idx]);

        let mut rank_sum = 0.0;
        let mut ranked = 0usize;
        for c in &controls {
            let own: Vec<&TrajectoryPoint> = points
                .iter()
                .filter(|p| p.node == c.node && p.has_evidence)
                .collect();
            let rank = own.iter().filter(|p| p.total_bits > c.total_bits).count() + 1;
            rank_sum += rank as f64;
            ranked += 1;
        }
        if ranked > 0 {
            report.control_mean_rank_at_shock = Some(rank_sum / ranked as f64);
        }
    }

    report.detected = report.target_argmax_t == Some(shock_t)
        && match report.control_p90 {
            Some(p90) => shock_bits > p90,
            None => false,
        };
    Ok(report)
}
