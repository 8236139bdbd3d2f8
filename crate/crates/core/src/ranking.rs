//! Rankings and rank correlation.
//!
//! A score table becomes a rank table by counting, for each node, how many
//! nodes score at least as high (the node itself included): `g` ranges from
//! 1 for a unique top scorer to `n` at the bottom, tied nodes share the
//! largest `g` of their class, and the relative position is `x = g / n` in
//! `(0, 1]`. Score comparisons are exact floating-point comparisons; callers
//! that want epsilon bucketing should pre-round their scores.
//!
//! Correlations between two score tables over the same node set are
//! Kendall's tau-b (tie corrected, counted with a merge-sort) and Spearman's
//! rho over mid-ranks, both tolerant of heavy ties.

use crate::centrality::{Measure, ScoreTable};
use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankEntry {
    pub node: NodeId,
    /// Count of nodes scoring at least as high, self included.
    pub g: u64,
    /// Relative position `g / n`.
    pub x: f64,
}

/// Ranks for every node of one snapshot, for one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    t: i32,
    measure: Measure,
    n: u64,
    /// Sorted by node index.
    entries: Vec<RankEntry>,
}

impl RankTable {
    pub fn t(&self) -> i32 {
        self.t
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    /// Number of ranked nodes.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, node: NodeId) -> Option<&RankEntry> {
        self.entries
            .binary_search_by_key(&node, |e| e.node)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }
}

/// Ranks a score table. Any NaN score is an error; sanitize upstream.
pub fn rank(scores: &ScoreTable) -> Result<RankTable> {
    if scores.is_empty() {
        return Err(Error::EmptySnapshot { t: scores.t() });
    }
    for (node, s) in scores.iter() {
        if s.is_nan() {
            return Err(Error::NanScore {
                label: format!("#{}", node.0),
            });
        }
    }

    let n = scores.len() as u64;
    let mut by_score: Vec<(NodeId, f64)> = scores.iter().collect();
    by_score.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("NaN checked above"));

    let mut entries: Vec<RankEntry> = Vec::with_capacity(by_score.len());
    let mut i = 0;
    while i < by_score.len() {
        let mut j = i + 1;
        while j < by_score.len() && by_score[j].1 == by_score[i].1 {
            j += 1;
        }
        // Everyone in the tie class [i, j) shares g = j (count of nodes
        // scoring at least as high).
        let g = j as u64;
        let x = g as f64 / n as f64;
        for &(node, _) in &by_score[i..j] {
            entries.push(RankEntry { node, g, x });
        }
        i = j;
    }
    entries.sort_unstable_by_key(|e| e.node);
    Ok(RankTable {
        t: scores.t(),
        measure: scores.measure(),
        n,
        entries,
    })
}

fn paired_scores(a: &ScoreTable, b: &ScoreTable) -> Result<Vec<(f64, f64)>> {
    if !a.same_node_set(b) {
        return Err(Error::NodeSetMismatch);
    }
    let pairs: Vec<(f64, f64)> = a.iter().map(|(_, s)| s).zip(b.iter().map(|(_, s)| s)).collect();
    if pairs.iter().any(|&(x, y)| x.is_nan() || y.is_nan()) {
        return Err(Error::NanScore {
            label: "<paired scores>".into(),
        });
    }
    Ok(pairs)
}

/// Kendall's tau-b between two score tables over the same node set.
///
/// `tau_b = (C - D) / sqrt((n0 - t_x)(n0 - t_y))` with `n0 = n(n-1)/2` and
/// `t_x`, `t_y` the tied-pair counts per side. Discordant pairs are counted
/// as merge-sort swaps, so large tables stay `O(n log n)`. A side with all
/// values tied has zero variance and is an error.
pub fn kendall_tau(a: &ScoreTable, b: &ScoreTable) -> Result<f64> {
    let mut pairs = paired_scores(a, b)?;
    let n = pairs.len();
    if n < 2 {
        return Err(Error::ZeroVariance);
    }
    pairs.sort_by(|p, q| {
        p.0.partial_cmp(&q.0)
            .unwrap()
            .then(p.1.partial_cmp(&q.1).unwrap())
    });

    // Tie runs in x, and joint (x, y) ties within them.
    let mut tied_x = 0u64;
    let mut tied_xy = 0u64;
    {
        let mut run_x = 1u64;
        let mut run_xy = 1u64;
        for w in 1..n {
            if pairs[w].0 == pairs[w - 1].0 {
                run_x += 1;
                if pairs[w].1 == pairs[w - 1].1 {
                    run_xy += 1;
                } else {
                    tied_xy += run_xy * (run_xy - 1) / 2;
                    run_xy = 1;
                }
            } else {
                tied_x += run_x * (run_x - 1) / 2;
                tied_xy += run_xy * (run_xy - 1) / 2;
                run_x = 1;
                run_xy = 1;
            }
        }
        tied_x += run_x * (run_x - 1) / 2;
        tied_xy += run_xy * (run_xy - 1) / 2;
    }

    let swaps = merge_sort_swaps(&mut pairs);

    let mut tied_y = 0u64;
    {
        let mut run_y = 1u64;
        for w in 1..n {
            if pairs[w].1 == pairs[w - 1].1 {
                run_y += 1;
            } else {
                tied_y += run_y * (run_y - 1) / 2;
                run_y = 1;
            }
        }
        tied_y += run_y * (run_y - 1) / 2;
    }

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    if tied_x == n0 || tied_y == n0 {
        return Err(Error::ZeroVariance);
    }
    // C - D = n0 - t_x - t_y + t_xy - 2 * swaps
    let concordant_minus_discordant =
        n0 as f64 - tied_x as f64 - tied_y as f64 + tied_xy as f64 - 2.0 * swaps as f64;
    let denom = ((n0 - tied_x) as f64 * (n0 - tied_y) as f64).sqrt();
    Ok((concordant_minus_discordant / denom).clamp(-1.0, 1.0))
}

/// Stable merge sort on the `y` component, counting inversions. The input
/// must already be sorted by `(x, y)`; each inversion is one discordant pair.
fn merge_sort_swaps(pairs: &mut [(f64, f64)]) -> u64 {
    let n = pairs.len();
    let mut swaps = 0u64;
    let mut buf = vec![(0.0, 0.0); n];
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = usize::min(start + width, n);
            let end = usize::min(start + 2 * width, n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid || j < end {
                if i < mid && (j >= end || pairs[i].1 <= pairs[j].1) {
                    buf[k] = pairs[i];
                    i += 1;
                } else {
                    swaps += (mid - i) as u64;
                    buf[k] = pairs[j];
                    j += 1;
                }
                k += 1;
            }
            pairs[start..end].copy_from_slice(&buf[start..end]);
            start = end;
        }
        width *= 2;
    }
    swaps
}

/// Spearman's rho: Pearson correlation of mid-ranks (tied values share the
/// average of the ranks they span).
pub fn spearman_rho(a: &ScoreTable, b: &ScoreTable) -> Result<f64> {
    let pairs = paired_scores(a, b)?;
    if pairs.len() < 2 {
        return Err(Error::ZeroVariance);
    }
    let xs: Vec<f64> = pairs.iter().map(|&(x, _)| x).collect();
    let ys: Vec<f64> = pairs.iter().map(|&(_, y)| y).collect();
    let rx = mid_ranks(&xs);
    let ry = mid_ranks(&ys);
    pearson(&rx, &ry)
}

/// Ascending 1-based mid-ranks.
fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let mid = (i + 1 + j) as f64 / 2.0; // average of ranks i+1 ..= j
        for &idx in &order[i..j] {
            ranks[idx] = mid;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
