//! Independent oracles for the integration and acceptance suites.
//!
//! Nothing here calls into the implementation paths it checks: PageRank is
//! solved densely, disruption groups are enumerated literally, correlations
//! are counted pairwise, Beta divergences are integrated with tanh-sinh
//! quadrature, and the special functions are a separate Stirling-series
//! implementation.

#![allow(dead_code)]
// Matrix-style index loops read better than iterator chains in the dense
// solver below.
#![allow(clippy::needless_range_loop)]

use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use suprank::graph::{
    build_snapshots, ingest_from_reader, GraphSnapshot, IngestOptions, SnapshotConfig,
    SnapshotSeries,
};

// ---------------------------------------------------------------------------
// Random test graphs
// ---------------------------------------------------------------------------

/// Random weighted digraph as CSV rows (`n{i},n{j},year,w`), self-loop free,
/// no duplicate (src, dst) pairs. Node count is exactly `n`: a spanning
/// chain guarantees every node an incident edge.
pub fn random_digraph_rows(rng: &mut ChaCha8Rng, n: usize, extra_edges: usize, max_w: u64) -> String {
    assert!(n >= 2);
    let mut present = vec![false; n * n];
    let mut rows = String::new();
    let mut push = |present: &mut Vec<bool>, i: usize, j: usize, w: u64| {
        if i != j && !present[i * n + j] {
            present[i * n + j] = true;
            rows.push_str(&format!("n{i:03},n{j:03},2000,{w}\n"));
        }
    };
    for i in 1..n {
        let w = rng.random_range(1..=max_w);
        push(&mut present, i, i - 1, w);
    }
    for _ in 0..extra_edges {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let w = rng.random_range(1..=max_w);
        push(&mut present, i, j, w);
    }
    rows
}

/// Builds a single snapshot from `random_digraph_rows` output.
pub fn snapshot_from_rows(rows: &str) -> SnapshotSeries {
    let options = IngestOptions {
        weight_col: Some(3),
        ..IngestOptions::default()
    };
    let (list, _) = ingest_from_reader(rows.as_bytes(), "oracle-fixture", &options).unwrap();
    build_snapshots(&list, &SnapshotConfig::new(1, 2000, 2000).unwrap()).unwrap()
}

/// Dense `(slot -> slot, weight)` view of a snapshot, slots following the
/// snapshot's own node ordering.
pub struct DenseGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub adj: Vec<Vec<bool>>,
}

pub fn dense_view(snapshot: &GraphSnapshot) -> DenseGraph {
    let nodes = snapshot.nodes();
    let n = nodes.len();
    let slot = |id| nodes.binary_search(&id).unwrap();
    let mut edges = Vec::new();
    let mut adj = vec![vec![false; n]; n];
    for &src in nodes {
        for &(dst, w) in snapshot.out_edges(src) {
            let (i, j) = (slot(src), slot(dst));
            edges.push((i, j, w as f64));
            adj[i][j] = true;
        }
    }
    DenseGraph { n, edges, adj }
}

// ---------------------------------------------------------------------------
// PageRank oracle: dense linear solve of the stationary equation
// ---------------------------------------------------------------------------

/// Solves `x = G x`, `sum(x) = 1` for the damped walk matrix (weight
/// proportional transitions, uniform teleport, dangling mass spread
/// uniformly) by Gaussian elimination with partial pivoting.
pub fn dense_pagerank(graph: &DenseGraph, damping: f64) -> Vec<f64> {
    let n = graph.n;
    let mut out_weight = vec![0.0f64; n];
    for &(i, _, w) in &graph.edges {
        out_weight[i] += w;
    }
    // g[j][i]: probability mass flowing i -> j per step.
    let mut g = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        for i in 0..n {
            let transition = if out_weight[i] == 0.0 { 1.0 / n as f64 } else { 0.0 };
            g[j][i] = damping * transition + (1.0 - damping) / n as f64;
        }
    }
    for &(i, j, w) in &graph.edges {
        g[j][i] += damping * w / out_weight[i];
    }

    // (G - I) x = 0 with the last equation replaced by sum(x) = 1.
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| g[r][c] - if r == c { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let mut b = vec![0.0f64; n];
    m[n - 1] = vec![1.0; n];
    b[n - 1] = 1.0;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| m[r1][col].abs().total_cmp(&m[r2][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        b.swap(col, pivot);
        assert!(m[col][col].abs() > 1e-14, "singular oracle system");
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[row][c] -= f * m[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    x
}

// ---------------------------------------------------------------------------
// Disruption oracle: literal group enumeration
// ---------------------------------------------------------------------------

pub fn brute_disruption(graph: &DenseGraph, focal: usize, include_bypass: bool) -> f64 {
    let n = graph.n;
    let influences: Vec<usize> = (0..n).filter(|&j| graph.adj[focal][j]).collect();
    let citers: Vec<usize> = (0..n).filter(|&c| graph.adj[c][focal]).collect();

    let cites_an_influence =
        |v: usize| -> bool { influences.iter().any(|&i| graph.adj[v][i]) };

    let n_both = citers.iter().filter(|&&c| cites_an_influence(c)).count() as f64;
    let n_only = citers.len() as f64 - n_both;
    let n_bypass = if include_bypass {
        (0..n)
            .filter(|&v| v != focal && !citers.contains(&v) && cites_an_influence(v))
            .count() as f64
    } else {
        0.0
    };

    let denom = n_only + n_both + n_bypass;
    if denom == 0.0 {
        0.0
    } else {
        (n_only - n_both) / denom
    }
}

// ---------------------------------------------------------------------------
// Correlation oracles: O(n^2) pair counting, direct mid-rank Pearson
// ---------------------------------------------------------------------------

/// Tau-b by literal pair enumeration. `None` when a side has zero variance.
pub fn tau_b_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let (mut concordant, mut discordant) = (0f64, 0f64);
    let (mut tied_x, mut tied_y) = (0f64, 0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = (x[i] - x[j]).signum();
            let dy = (y[i] - y[j]).signum();
            if x[i] == x[j] {
                tied_x += 1.0;
            }
            if y[i] == y[j] {
                tied_y += 1.0;
            }
            if x[i] != x[j] && y[i] != y[j] {
                if dx == dy {
                    concordant += 1.0;
                } else {
                    discordant += 1.0;
                }
            }
        }
    }
    let n0 = (n * (n - 1)) as f64 / 2.0;
    if tied_x == n0 || tied_y == n0 {
        return None;
    }
    Some((concordant - discordant) / ((n0 - tied_x) * (n0 - tied_y)).sqrt())
}

/// Mid-rank of each value, counted directly: `#smaller + (#equal + 1) / 2`.
pub fn mid_ranks_oracle(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let smaller = values.iter().filter(|&&o| o < v).count() as f64;
            let equal = values.iter().filter(|&&o| o == v).count() as f64;
            smaller + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Spearman's rho as the textbook Pearson formula over oracle mid-ranks.
pub fn spearman_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let rx = mid_ranks_oracle(x);
    let ry = mid_ranks_oracle(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

// ---------------------------------------------------------------------------
// Beta divergence oracle: tanh-sinh quadrature
// ---------------------------------------------------------------------------

struct QuadNode {
    ln_x: f64,
    ln_1mx: f64,
    ln_w: f64,
}

struct QuadLevel {
    nodes: Vec<QuadNode>,
}

/// Node tables for levels h = 2^-1 .. 2^-12 on (0, 1). The change of
/// variable x = (1 + tanh((pi/2) sinh(u))) / 2 is evaluated in log space so
/// endpoint singularities like x^(a-1) with a >= 0.5 stay finite.
fn quad_levels() -> &'static [QuadLevel] {
    static LEVELS: OnceLock<Vec<QuadLevel>> = OnceLock::new();
    LEVELS.get_or_init(|| {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut levels = Vec::new();
        for level in 1..=12u32 {
            let h = 0.5f64.powi(level as i32);
            let k_max = (6.8 / h).ceil() as i64;
            let mut nodes = Vec::with_capacity((2 * k_max + 1) as usize);
            for k in -k_max..=k_max {
                let u = k as f64 * h;
                let s = half_pi * u.sinh();
                // ln x = -ln(1 + e^{-2s}) and ln(1-x) = -ln(1 + e^{2s}),
                // each rearranged so the exponential never overflows.
                let (ln_x, ln_1mx) = if s >= 0.0 {
                    let t = f64::ln_1p((-2.0 * s).exp());
                    (-t, -2.0 * s - t)
                } else {
                    let t = f64::ln_1p((2.0 * s).exp());
                    (2.0 * s - t, -t)
                };
                // ln cosh(s) = |s| + ln(1 + e^{-2|s|}) - ln 2
                let ln_cosh_s = s.abs() + f64::ln_1p((-2.0 * s.abs()).exp()) - std::f64::consts::LN_2;
                let ln_w = (half_pi * u.cosh() * h / 2.0).ln() - 2.0 * ln_cosh_s;
                nodes.push(QuadNode { ln_x, ln_1mx, ln_w });
            }
            levels.push(QuadLevel { nodes });
        }
        levels
    })
}

/// `\int_0^1 x^(a-1) (1-x)^(b-1) f(ln x, ln(1-x)) dx` by tanh-sinh
/// quadrature, refining until two levels agree to ~1e-13 relative.
pub fn beta_weighted_integral(a: f64, b: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let levels = quad_levels();
    let mut previous = f64::NAN;
    for (i, level) in levels.iter().enumerate() {
        let mut sum = 0.0;
        for node in &level.nodes {
            let ln_term = (a - 1.0) * node.ln_x + (b - 1.0) * node.ln_1mx + node.ln_w;
            if ln_term > -745.0 {
                sum += ln_term.exp() * f(node.ln_x, node.ln_1mx);
            }
        }
        if i >= 4 && (sum - previous).abs() <= 1e-13 * sum.abs().max(previous.abs()) {
            return sum;
        }
        previous = sum;
    }
    previous
}

/// `KL(p || q)` between Beta distributions in bits, computed without any
/// log-gamma or digamma: three expectations and two normalizers, all by
/// quadrature.
pub fn kl_beta_bits_quadrature(pa: f64, pb: f64, qa: f64, qb: f64) -> f64 {
    let z_p = beta_weighted_integral(pa, pb, |_, _| 1.0);
    let z_q = beta_weighted_integral(qa, qb, |_, _| 1.0);
    let e_ln_x = beta_weighted_integral(pa, pb, |lx, _| lx) / z_p;
    let e_ln_1mx = beta_weighted_integral(pa, pb, |_, l1| l1) / z_p;
    let nats = (pa - qa) * e_ln_x + (pb - qb) * e_ln_1mx + (z_q.ln() - z_p.ln());
    nats / std::f64::consts::LN_2
}

// ---------------------------------------------------------------------------
// Independent special functions (Stirling series) for the pipeline oracle
// ---------------------------------------------------------------------------

/// Bernoulli(2n) for n = 1..=8.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

pub fn ref_ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut x = x;
    let mut shift = 0.0;
    while x < 16.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let x2 = x * x;
    let mut series = 0.0;
    let mut x_pow = x;
    for (i, b) in BERNOULLI.iter().enumerate() {
        let k = (i + 1) as f64;
        series += b / (2.0 * k * (2.0 * k - 1.0) * x_pow);
        x_pow *= x2;
    }
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

pub fn ref_digamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut x = x;
    let mut shift = 0.0;
    while x < 16.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let x2 = x * x;
    let mut series = 0.0;
    let mut x_pow = x2;
    for (i, b) in BERNOULLI.iter().enumerate() {
        let k = (i + 1) as f64;
        series += b / (2.0 * k * x_pow);
        x_pow *= x2;
    }
    shift + x.ln() - 0.5 / x - series
}

pub fn ref_ln_beta(a: f64, b: f64) -> f64 {
    ref_ln_gamma(a) + ref_ln_gamma(b) - ref_ln_gamma(a + b)
}

/// Closed-form Beta divergence in bits over the reference special functions.
pub fn ref_kl_beta_bits(pa: f64, pb: f64, qa: f64, qb: f64) -> f64 {
    let nats = ref_ln_beta(qa, qb) - ref_ln_beta(pa, pb)
        + (pa - qa) * ref_digamma(pa)
        + (pb - qb) * ref_digamma(pb)
        + (qa - pa + qb - pb) * ref_digamma(pa + pb);
    nats / std::f64::consts::LN_2
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Scalar recomputation of the surprise pipeline on a fixed small series
// ---------------------------------------------------------------------------

/// Five nodes over four yearly snapshots, with rank movement and a late
/// arrival (`e` enters in year 3).
pub const FIXTURE_ROWS: &str = "\
b,a,1\nc,a,1\nc,b,1\n\
d,a,2\nd,c,2\n\
e,b,3\ne,d,3\na,c,3\n\
c,d,4\nd,b,4\ne,a,4\n";

const CLAMP_EPS: f64 = 1e-6;

/// Runs the real pipeline over [`FIXTURE_ROWS`], then recomputes every
/// surprise record with straight-line scalar code: literal `>=` counting for
/// g, the prior formulas with clamping, the conjugate update, and the closed
/// form over the Stirling-series special functions. Panics on any mismatch
/// beyond `tol_bits`; returns how many applicable records were checked.
pub fn verify_fixture_against_scalar_recomputation(tol_bits: f64) -> usize {
    use suprank::centrality::Measure;
    use suprank::surprise::{trajectories, Hypothesis, HypothesisKind, TrajectoryConfig};
    use suprank::NodeId;

    let options = IngestOptions::default();
    let (list, _) = ingest_from_reader(FIXTURE_ROWS.as_bytes(), "fixture", &options).unwrap();
    let series = build_snapshots(&list, &SnapshotConfig::new(1, 1, 4).unwrap()).unwrap();
    assert_eq!(series.len(), 4);
    assert_eq!(series.nodes().len(), 5);

    let config = TrajectoryConfig {
        hypotheses: vec![
            Hypothesis::new(HypothesisKind::PastRank),
            Hypothesis::new(HypothesisKind::RegularGrowth),
            Hypothesis::new(HypothesisKind::Uniform),
        ],
        ..TrajectoryConfig::default()
    };
    let points = trajectories(&series, &config).unwrap();

    let mut checked = 0;
    for measure in [Measure::Pagerank, Measure::Disruption] {
        // Scores come from the centrality stage (checked against its own
        // oracles); everything after them is recomputed here.
        let score_tables: Vec<Vec<(NodeId, f64)>> = series
            .snapshots()
            .iter()
            .map(|snap| match measure {
                Measure::Pagerank => {
                    suprank::pagerank(snap, &suprank::PagerankConfig::default())
                        .unwrap()
                        .scores
                        .iter()
                        .collect()
                }
                Measure::Disruption => {
                    suprank::disruption_all(snap, true).unwrap().iter().collect()
                }
            })
            .collect();

        let g_of = |idx: usize, node: NodeId| -> Option<(u64, u64)> {
            let table = &score_tables[idx];
            let (_, own) = table.iter().find(|&&(n, _)| n == node)?;
            let g = table.iter().filter(|&&(_, s)| s >= *own).count() as u64;
            Some((g, table.len() as u64))
        };

        for (idx, snap) in series.snapshots().iter().enumerate() {
            for &node in snap.nodes() {
                let (g, n) = g_of(idx, node).unwrap();
                let point = points
                    .iter()
                    .find(|p| p.node == node && p.t == snap.t())
                    .unwrap();
                let x = match measure {
                    Measure::Pagerank => point.x_pagerank.unwrap(),
                    Measure::Disruption => point.x_disruption.unwrap(),
                };
                assert!((x - g as f64 / n as f64).abs() <= 1e-15);

                for kind in HypothesisKind::ALL {
                    let record = point
                        .records
                        .iter()
                        .find(|r| r.measure == measure && r.hypothesis == kind)
                        .unwrap();
                    let expected_prior = match kind {
                        HypothesisKind::Uniform => Some((1.0, 1.0)),
                        HypothesisKind::PastRank => (idx >= 1)
                            .then(|| g_of(idx - 1, node))
                            .flatten()
                            .map(|(g1, n1)| {
                                ((g1 as f64).max(CLAMP_EPS), ((n1 - g1) as f64).max(CLAMP_EPS))
                            }),
                        HypothesisKind::RegularGrowth => match (
                            (idx >= 1).then(|| g_of(idx - 1, node)).flatten(),
                            (idx >= 2).then(|| g_of(idx - 2, node)).flatten(),
                        ) {
                            (Some((g1, n1)), Some((g2, _))) => {
                                let raw = g1 as f64 * g1 as f64 / g2 as f64;
                                let alpha = raw.clamp(CLAMP_EPS, n1 as f64 - CLAMP_EPS);
                                Some((alpha, n1 as f64 - alpha))
                            }
                            _ => None,
                        },
                    };
                    match expected_prior {
                        None => assert!(
                            !record.applicable(),
                            "{measure} {kind} at t={} should lack history",
                            snap.t()
                        ),
                        Some((alpha, beta)) => {
                            let eval = record.evaluation.as_ref().unwrap_or_else(|| {
                                panic!("{measure} {kind} at t={} should apply", snap.t())
                            });
                            assert_eq!(eval.prior.alpha, alpha);
                            assert_eq!(eval.prior.beta, beta);
                            let (post_a, post_b) = (alpha + g as f64, beta + (n - g) as f64);
                            assert_eq!(eval.posterior.alpha, post_a);
                            assert_eq!(eval.posterior.beta, post_b);
                            let expected_bits = ref_kl_beta_bits(post_a, post_b, alpha, beta);
                            assert!(
                                (eval.kl_bits - expected_bits).abs() <= tol_bits,
                                "{measure} {kind} t={} node {:?}: {} vs {}",
                                snap.t(),
                                node,
                                eval.kl_bits,
                                expected_bits
                            );
                            assert!(eval.kl_bits > 0.0);
                            checked += 1;
                        }
                    }
                }
            }
        }
    }

    // Totals are the sums of their applicable parts.
    for p in &points {
        let expected: f64 = p.records.iter().filter_map(|r| r.kl_bits()).sum();
        assert_eq!(p.total_bits, expected);
    }
    checked
}
