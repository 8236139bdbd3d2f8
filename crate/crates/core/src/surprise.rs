//! Bayesian surprise over rank trajectories.
//!
//! A node's relative position `x = g / n` is treated as the success rate of
//! an aggregate Bernoulli batch: a Beta prior built from past snapshots is
//! updated with the current observation `(g, n)` to the conjugate posterior
//! `Beta(alpha + g, beta + n - g)`, and the surprise is the Kullback-Leibler
//! divergence `KL(posterior || prior)` — in that direction — reported in
//! bits.
//!
//! Two history-based hypotheses supply priors: *past rank* expects the
//! position not to move, *regular growth* extrapolates the rate of change of
//! the last two snapshots. Both are skipped (not defaulted) for nodes
//! lacking the required history; an opt-in *uniform* `Beta(1, 1)` hypothesis
//! scores every node. Divergences are additive, so hypotheses and measures
//! sum into a single total per node and snapshot.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::centrality::{self, Measure, PagerankConfig};
use crate::error::{Error, Result};
use crate::graph::{NodeId, SnapshotSeries};
use crate::ranking::{self, RankTable};
use crate::special::{digamma, ln_beta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidBeta { alpha, beta });
        }
        Ok(BetaParams { alpha, beta })
    }

    /// The uniform distribution on (0, 1).
    pub fn uniform() -> Self {
        BetaParams {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisKind {
    PastRank,
    RegularGrowth,
    Uniform,
}

impl HypothesisKind {
    pub const ALL: [HypothesisKind; 3] = [
        HypothesisKind::PastRank,
        HypothesisKind::RegularGrowth,
        HypothesisKind::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HypothesisKind::PastRank => "past_rank",
            HypothesisKind::RegularGrowth => "regular_growth",
            HypothesisKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for HypothesisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HypothesisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "past_rank" => Ok(HypothesisKind::PastRank),
            "regular_growth" => Ok(HypothesisKind::RegularGrowth),
            "uniform" => Ok(HypothesisKind::Uniform),
            other => Err(Error::UnknownHypothesis { name: other.into() }),
        }
    }
}

/// A prior-building rule plus the epsilon used to keep degenerate Beta
/// parameters strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub kind: HypothesisKind,
    pub clamp_epsilon: f64,
}

pub const DEFAULT_CLAMP_EPSILON: f64 = 1e-6;

impl Hypothesis {
    pub fn new(kind: HypothesisKind) -> Self {
        Hypothesis {
            kind,
            clamp_epsilon: DEFAULT_CLAMP_EPSILON,
        }
    }

    pub fn with_clamp_epsilon(kind: HypothesisKind, clamp_epsilon: f64) -> Result<Self> {
        if !(clamp_epsilon > 0.0 && clamp_epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "clamp epsilon must lie in (0, 1), got {clamp_epsilon}"
            )));
        }
        Ok(Hypothesis {
            kind,
            clamp_epsilon,
        })
    }
}

/// Conjugate update: `(g, n)` observed as `n` trials with `g` successes in
/// one batch.
pub fn posterior_update(prior: BetaParams, g: u64, n: u64) -> Result<BetaParams> {
    if g < 1 || g > n {
        return Err(Error::RankOutOfRange { g, n });
    }
    BetaParams::new(prior.alpha + g as f64, prior.beta + (n - g) as f64)
}

/// `KL(posterior || prior)` between two Beta distributions, in bits.
///
/// Closed form, evaluated in nats and converted:
/// `ln B(q) - ln B(p) + (pa - qa) psi(pa) + (pb - qb) psi(pb)
///  + (qa - pa + qb - pb) psi(pa + pb)`.
pub fn kl_beta(posterior: &BetaParams, prior: &BetaParams) -> Result<f64> {
    let p = BetaParams::new(posterior.alpha, posterior.beta)?;
    let q = BetaParams::new(prior.alpha, prior.beta)?;

    let nats = ln_beta(q.alpha, q.beta) - ln_beta(p.alpha, p.beta)
        + (p.alpha - q.alpha) * digamma(p.alpha)
        + (p.beta - q.beta) * digamma(p.beta)
        + (q.alpha - p.alpha + q.beta - p.beta) * digamma(p.alpha + p.beta);
    if !nats.is_finite() {
        return Err(Error::DivergenceOverflow {
            alpha: p.alpha,
            beta: p.beta,
        });
    }
    // The closed form can round to a tiny negative when p and q nearly
    // coincide; divergence is non-negative by Gibbs' inequality.
    debug_assert!(nats > -1e-9, "divergence {nats} below rounding floor");
    Ok(nats.max(0.0) / std::f64::consts::LN_2)
}

/// Prior expecting the node's position not to move: `Beta(g, n - g)` from
/// the previous snapshot, parameters clamped to at least `eps`.
pub fn past_rank_prior(g_prev: u64, n_prev: u64, eps: f64) -> Result<BetaParams> {
    if g_prev < 1 || g_prev > n_prev {
        return Err(Error::RankOutOfRange {
            g: g_prev,
            n: n_prev,
        });
    }
    let alpha = (g_prev as f64).max(eps);
    let beta = ((n_prev - g_prev) as f64).max(eps);
    BetaParams::new(alpha, beta)
}

/// Prior extrapolating the last rate of change: `alpha = g_prev^2 / g_prev2`
/// clamped into `[eps, n_prev - eps]`, `beta = n_prev - alpha`.
pub fn regular_growth_prior(g_prev: u64, g_prev2: u64, n_prev: u64, eps: f64) -> Result<BetaParams> {
    if g_prev < 1 || g_prev > n_prev {
        return Err(Error::RankOutOfRange {
            g: g_prev,
            n: n_prev,
        });
    }
    if g_prev2 < 1 {
        return Err(Error::RankOutOfRange { g: g_prev2, n: 0 });
    }
    let raw = (g_prev as f64) * (g_prev as f64) / (g_prev2 as f64);
    let alpha = raw.clamp(eps, n_prev as f64 - eps);
    let beta = n_prev as f64 - alpha;
    BetaParams::new(alpha, beta)
}

/// The outcome of scoring one `(node, t, measure, hypothesis)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurpriseRecord {
    pub node: NodeId,
    pub t: i32,
    pub measure: Measure,
    pub hypothesis: HypothesisKind,
    /// `None` when the hypothesis's required history is missing.
    pub evaluation: Option<SurpriseEvaluation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurpriseEvaluation {
    pub prior: BetaParams,
    pub posterior: BetaParams,
    pub kl_bits: f64,
}

impl SurpriseRecord {
    pub fn applicable(&self) -> bool {
        self.evaluation.is_some()
    }

    pub fn kl_bits(&self) -> Option<f64> {
        self.evaluation.as_ref().map(|e| e.kl_bits)
    }
}

/// Surprise of `node` at the snapshot labeled `t`, one record per
/// hypothesis. `history` holds the rank tables of consecutive snapshots for
/// one measure, ordered by time; hypotheses look back one or two entries
/// from `t`'s position in it.
pub fn node_surprise(
    history: &[RankTable],
    node: NodeId,
    t: i32,
    hypotheses: &[Hypothesis],
) -> Result<Vec<SurpriseRecord>> {
    let idx = history
        .iter()
        .position(|r| r.t() == t)
        .ok_or(Error::UnknownSnapshot {
            t,
            available: history.iter().map(|r| r.t()).collect(),
        })?;
    let current = &history[idx];
    let measure = current.measure();
    let entry = current.get(node).ok_or_else(|| Error::NodeNotPresent {
        label: format!("#{}", node.0),
        t,
    })?;
    let (g, n) = (entry.g, current.n());

    let lookback = |steps: usize| -> Option<(u64, u64)> {
        if idx < steps {
            return None;
        }
        let table = &history[idx - steps];
        table.get(node).map(|e| (e.g, table.n()))
    };

    let mut records = Vec::with_capacity(hypotheses.len());
    for hyp in hypotheses {
        let eps = hyp.clamp_epsilon;
        let prior = match hyp.kind {
            HypothesisKind::Uniform => Some(BetaParams::uniform()),
            HypothesisKind::PastRank => match lookback(1) {
                Some((g1, n1)) => Some(past_rank_prior(g1, n1, eps)?),
                None => None,
            },
            HypothesisKind::RegularGrowth => match (lookback(1), lookback(2)) {
                (Some((g1, n1)), Some((g2, _))) => Some(regular_growth_prior(g1, g2, n1, eps)?),
                _ => None,
            },
        };
        let evaluation = match prior {
            Some(prior) => {
                let posterior = posterior_update(prior, g, n)?;
                let kl_bits = kl_beta(&posterior, &prior)?;
                Some(SurpriseEvaluation {
                    prior,
                    posterior,
                    kl_bits,
                })
            }
            None => None,
        };
        records.push(SurpriseRecord {
            node,
            t,
            measure,
            hypothesis: hyp.kind,
            evaluation,
        });
    }
    Ok(records)
}

/// Sum of applicable divergences, with a flag separating "zero surprise"
/// from "nothing could be evaluated".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalSurprise {
    pub bits: f64,
    pub has_evidence: bool,
}

/// Adds up the applicable records of one `(node, t)` cell across measures
/// and hypotheses.
pub fn total_surprise(records: &[SurpriseRecord]) -> Result<TotalSurprise> {
    if let Some(first) = records.first() {
        if records
            .iter()
            .any(|r| r.node != first.node || r.t != first.t)
        {
            return Err(Error::InvalidConfig(
                "total_surprise expects records of a single (node, t) cell".into(),
            ));
        }
    }
    let mut bits = 0.0;
    let mut has_evidence = false;
    for r in records {
        if let Some(e) = &r.evaluation {
            bits += e.kl_bits;
            has_evidence = true;
        }
    }
    Ok(TotalSurprise { bits, has_evidence })
}

/// Full per-node, per-snapshot output of the surprise pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub node: NodeId,
    pub t: i32,
    pub x_pagerank: Option<f64>,
    pub x_disruption: Option<f64>,
    /// One record per requested `(measure, hypothesis)`, canonical order.
    pub records: Vec<SurpriseRecord>,
    pub total_bits: f64,
    pub has_evidence: bool,
}

/// What to compute along a trajectory run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    pub measures: Vec<Measure>,
    pub hypotheses: Vec<Hypothesis>,
    pub pagerank: PagerankConfig,
    pub include_bypass: bool,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig {
            measures: Measure::ALL.to_vec(),
            hypotheses: vec![
                Hypothesis::new(HypothesisKind::PastRank),
                Hypothesis::new(HypothesisKind::RegularGrowth),
            ],
            pagerank: PagerankConfig::default(),
            include_bypass: true,
        }
    }
}

impl TrajectoryConfig {
    fn validate(&self) -> Result<()> {
        if self.measures.is_empty() {
            return Err(Error::InvalidConfig("no measures requested".into()));
        }
        if self.hypotheses.is_empty() {
            return Err(Error::InvalidConfig("no hypotheses requested".into()));
        }
        Ok(())
    }

    /// Measures in canonical order, deduplicated.
    pub fn canonical_measures(&self) -> Vec<Measure> {
        Measure::ALL
            .into_iter()
            .filter(|m| self.measures.contains(m))
            .collect()
    }

    /// Hypotheses in canonical order, deduplicated by kind.
    pub fn canonical_hypotheses(&self) -> Vec<Hypothesis> {
        HypothesisKind::ALL
            .into_iter()
            .filter_map(|kind| self.hypotheses.iter().find(|h| h.kind == kind).copied())
            .collect()
    }
}

/// Rank tables for every snapshot of `series`, for one measure.
pub fn rank_history(
    series: &SnapshotSeries,
    measure: Measure,
    config: &TrajectoryConfig,
) -> Result<Vec<RankTable>> {
    series
        .snapshots()
        .iter()
        .map(|snap| {
            let scores = match measure {
                Measure::Pagerank => centrality::pagerank(snap, &config.pagerank)?.scores,
                Measure::Disruption => centrality::disruption_all(snap, config.include_bypass)?,
            };
            ranking::rank(&scores)
        })
        .collect()
}

/// Runs the full pipeline — centrality, ranks, per-hypothesis surprise — and
/// emits one point per node per snapshot it appears in, ordered by
/// `(node label, t)`.
pub fn trajectories(
    series: &SnapshotSeries,
    config: &TrajectoryConfig,
) -> Result<Vec<TrajectoryPoint>> {
    config.validate()?;
    if series.len() < 2 {
        return Err(Error::TooFewSnapshots {
            got: series.len(),
            need: 2,
        });
    }
    let measures = config.canonical_measures();
    let mut histories = Vec::with_capacity(measures.len());
    for &measure in &measures {
        histories.push((measure, rank_history(series, measure, config)?));
    }
    trajectories_from_ranks(series, &histories, config)
}

/// Surprise stage only, over precomputed rank histories (one per measure,
/// all aligned with `series`).
pub fn trajectories_from_ranks(
    series: &SnapshotSeries,
    histories: &[(Measure, Vec<RankTable>)],
    config: &TrajectoryConfig,
) -> Result<Vec<TrajectoryPoint>> {
    config.validate()?;
    let hypotheses = config.canonical_hypotheses();
    let mut points = Vec::new();
    for (snap_idx, snap) in series.snapshots().iter().enumerate() {
        for &node in snap.nodes() {
            let mut records = Vec::new();
            let mut x_pagerank = None;
            let mut x_disruption = None;
            for (measure, history) in histories {
                let x = history[snap_idx].get(node).map(|e| e.x);
                match measure {
                    Measure::Pagerank => x_pagerank = x,
                    Measure::Disruption => x_disruption = x,
                }
                records.extend(node_surprise(history, node, snap.t(), &hypotheses)?);
            }
            let total = total_surprise(&records)?;
            points.push(TrajectoryPoint {
                node,
                t: snap.t(),
                x_pagerank,
                x_disruption,
                records,
                total_bits: total.bits,
                has_evidence: total.has_evidence,
            });
        }
    }
    points.sort_by(|a, b| {
        series
            .label(a.node)
            .cmp(series.label(b.node))
            .then(a.t.cmp(&b.t))
    });
    Ok(points)
}
