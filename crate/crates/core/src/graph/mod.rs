//! Temporal influence graphs.
//!
//! The model is a sequence of cumulative weighted digraph snapshots: the
//! snapshot labeled `t` holds every influence event with year `<= t`, with
//! repeated citations summed into edge weights. Nodes carry string labels
//! from the input and are interned to dense indices that stay stable across
//! every snapshot of a run.

mod cache;
mod ingest;

pub use cache::{input_digest, load_series, save_series, CacheKey, CACHE_FORMAT_VERSION};
pub use ingest::{ingest_edge_list, ingest_from_reader, IngestOptions, IngestReport};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index, valid for one [`NodeTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Injective label -> index mapping, shared by every snapshot of a series.
#[derive(Debug, Clone, Default)]
pub struct NodeTable {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = NodeId(self.labels.len() as u32);
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl PartialEq for NodeTable {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

/// One timestamped influence event: `src` cites `dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeEvent {
    pub src: NodeId,
    pub dst: NodeId,
    pub year: i32,
    pub weight: u64,
}

/// Ingested event stream plus its label table.
///
/// Events are kept in canonical `(year, src label, dst label)` order, with
/// self-loops removed and duplicate `(src, dst, year)` rows merged by weight
/// summation at ingestion time.
#[derive(Debug, Clone)]
pub struct TemporalEdgeList {
    nodes: NodeTable,
    events: Vec<EdgeEvent>,
    time_range: Option<(i32, i32)>,
    weighted: bool,
}

impl TemporalEdgeList {
    pub(crate) fn from_parts(nodes: NodeTable, mut events: Vec<EdgeEvent>, weighted: bool) -> Self {
        let sort_key = |e: &EdgeEvent| (e.year, e.src, e.dst);
        events.sort_by_key(sort_key);
        let time_range = match (
            events.iter().map(|e| e.year).min(),
            events.iter().map(|e| e.year).max(),
        ) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            _ => None,
        };
        TemporalEdgeList {
            nodes,
            events,
            time_range,
            weighted,
        }
    }

    pub fn nodes(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn events(&self) -> &[EdgeEvent] {
        &self.events
    }

    /// `(min_year, max_year)` over all events; `None` when the list is empty.
    pub fn time_range(&self) -> Option<(i32, i32)> {
        self.time_range
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Writes the list as `src,dst,year[,weight]` rows in canonical order.
    /// The weight column is emitted only for weighted lists.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut out = csv::WriterBuilder::new().from_writer(&mut w);
        for e in &self.events {
            let src = self.nodes.label(e.src);
            let dst = self.nodes.label(e.dst);
            if self.weighted {
                out.write_record([src, dst, &e.year.to_string(), &e.weight.to_string()])?;
            } else {
                debug_assert_eq!(e.weight, 1);
                out.write_record([src, dst, &e.year.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    fn labeled_events(&self) -> Vec<(&str, &str, i32, u64)> {
        self.events
            .iter()
            .map(|e| {
                (
                    self.nodes.label(e.src),
                    self.nodes.label(e.dst),
                    e.year,
                    e.weight,
                )
            })
            .collect()
    }
}

impl PartialEq for TemporalEdgeList {
    /// Label-based equality: two lists are equal when they describe the same
    /// labeled events, independent of interning order.
    fn eq(&self, other: &Self) -> bool {
        self.weighted == other.weighted
            && self.time_range == other.time_range
            && {
                let mut a = self.labeled_events();
                let mut b = other.labeled_events();
                a.sort();
                b.sort();
                a == b
            }
    }
}

/// Snapshot boundary layout: `delta` years per snapshot over
/// `start_year..=end_year`, labeling each snapshot with its inclusive
/// upper-bound year. A trailing period shorter than `delta` is emitted as a
/// partial snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotConfig {
    pub delta: u32,
    pub start_year: i32,
    pub end_year: i32,
}

impl SnapshotConfig {
    pub fn new(delta: u32, start_year: i32, end_year: i32) -> Result<Self> {
        let cfg = SnapshotConfig {
            delta,
            start_year,
            end_year,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta < 1 {
            return Err(Error::InvalidConfig("delta must be >= 1".into()));
        }
        if self.start_year > self.end_year {
            return Err(Error::InvalidConfig(format!(
                "start year {} is after end year {}",
                self.start_year, self.end_year
            )));
        }
        Ok(())
    }

    /// Snapshot timestamps, each `(t, partial)`.
    pub fn boundaries(&self) -> Vec<(i32, bool)> {
        let mut out = Vec::new();
        let delta = self.delta as i32;
        let mut t = self.start_year + delta - 1;
        while t < self.end_year {
            out.push((t, false));
            t += delta;
        }
        let span = (self.end_year - self.start_year + 1) as u32;
        out.push((self.end_year, !span.is_multiple_of(self.delta)));
        out
    }
}

/// Immutable cumulative digraph at one snapshot boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSnapshot {
    t: i32,
    partial: bool,
    /// Adjacency indexed by `NodeId`; lists sorted by neighbor index.
    out_edges: Vec<Vec<(NodeId, u64)>>,
    in_edges: Vec<Vec<(NodeId, u64)>>,
    /// Nodes with at least one incident edge, sorted by index.
    present: Vec<NodeId>,
    edge_count: u64,
    total_weight: u64,
}

impl GraphSnapshot {
    pub(crate) fn from_cumulative(
        t: i32,
        partial: bool,
        n_total: usize,
        edges: &HashMap<(NodeId, NodeId), u64>,
    ) -> Self {
        let mut out_edges: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); n_total];
        let mut in_edges: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); n_total];
        let mut incident = vec![false; n_total];
        let mut total_weight = 0u64;
        for (&(src, dst), &w) in edges {
            debug_assert_ne!(src, dst, "self-loops must be dropped at ingestion");
            out_edges[src.index()].push((dst, w));
            in_edges[dst.index()].push((src, w));
            incident[src.index()] = true;
            incident[dst.index()] = true;
            total_weight += w;
        }
        for list in out_edges.iter_mut().chain(in_edges.iter_mut()) {
            list.sort_unstable_by_key(|&(n, _)| n);
        }
        let present = incident
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p)
            .map(|(i, _)| NodeId(i as u32))
            .collect();
        GraphSnapshot {
            t,
            partial,
            out_edges,
            in_edges,
            present,
            edge_count: edges.len() as u64,
            total_weight,
        }
    }

    pub fn t(&self) -> i32 {
        self.t
    }

    /// True when the snapshot closes a trailing period shorter than delta.
    pub fn is_partial(&self) -> bool {
        self.partial
    }

    /// Nodes with degree >= 1, sorted by index.
    pub fn nodes(&self) -> &[NodeId] {
        &self.present
    }

    pub fn node_count(&self) -> usize {
        self.present.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.present.binary_search(&node).is_ok()
    }

    /// Outgoing citations of `node` (the nodes it cites), with weights.
    pub fn out_edges(&self, node: NodeId) -> &[(NodeId, u64)] {
        self.out_edges
            .get(node.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Incoming citations of `node` (the nodes citing it), with weights.
    pub fn in_edges(&self, node: NodeId) -> &[(NodeId, u64)] {
        self.in_edges
            .get(node.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn edge_weight(&self, src: NodeId, dst: NodeId) -> Option<u64> {
        self.out_edges(src)
            .binary_search_by_key(&dst, |&(n, _)| n)
            .ok()
            .map(|i| self.out_edges(src)[i].1)
    }
}

/// Ordered cumulative snapshots sharing one node table.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    nodes: NodeTable,
    snapshots: Vec<GraphSnapshot>,
}

impl SnapshotSeries {
    pub(crate) fn from_parts(nodes: NodeTable, snapshots: Vec<GraphSnapshot>) -> Self {
        debug_assert!(snapshots.windows(2).all(|w| w[0].t < w[1].t));
        SnapshotSeries { nodes, snapshots }
    }

    pub fn nodes(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn label(&self, id: NodeId) -> &str {
        self.nodes.label(id)
    }

    pub fn snapshots(&self) -> &[GraphSnapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn get(&self, t: i32) -> Option<&GraphSnapshot> {
        self.snapshots
            .binary_search_by_key(&t, |s| s.t())
            .ok()
            .map(|i| &self.snapshots[i])
    }

    pub fn timestamps(&self) -> Vec<i32> {
        self.snapshots.iter().map(|s| s.t()).collect()
    }
}

/// Materializes the cumulative snapshot series for `list` under `config`.
///
/// The snapshot at `t` holds every event with year `<= t` (events earlier
/// than `start_year` still accumulate; events after `end_year` never appear).
/// Nodes enter a snapshot only once they have an incident edge.
pub fn build_snapshots(list: &TemporalEdgeList, config: &SnapshotConfig) -> Result<SnapshotSeries> {
    config.validate()?;
    if list.is_empty() {
        return Err(Error::NoEventsInRange {
            start: config.start_year,
            end: config.end_year,
        });
    }
    let in_range = list
        .events()
        .iter()
        .any(|e| e.year >= config.start_year && e.year <= config.end_year);
    if !in_range {
        return Err(Error::NoEventsInRange {
            start: config.start_year,
            end: config.end_year,
        });
    }

    let n_total = list.nodes().len();
    let mut cumulative: HashMap<(NodeId, NodeId), u64> = HashMap::new();
    let mut events = list.events().iter().peekable();
    let mut snapshots = Vec::new();
    for (t, partial) in config.boundaries() {
        while let Some(e) = events.peek() {
            if e.year > t {
                break;
            }
            *cumulative.entry((e.src, e.dst)).or_insert(0) += e.weight;
            events.next();
        }
        snapshots.push(GraphSnapshot::from_cumulative(
            t,
            partial,
            n_total,
            &cumulative,
        ));
    }
    Ok(SnapshotSeries::from_parts(list.nodes().clone(), snapshots))
}

/// Per-snapshot size summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SnapshotStats {
    pub t: i32,
    pub partial: bool,
    pub nodes: usize,
    pub edges: u64,
    pub total_weight: u64,
}

pub fn snapshot_stats(series: &SnapshotSeries) -> Vec<SnapshotStats> {
    series
        .snapshots()
        .iter()
        .map(|s| SnapshotStats {
            t: s.t(),
            partial: s.is_partial(),
            nodes: s.node_count(),
            edges: s.edge_count(),
            total_weight: s.total_weight(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list_from(rows: &[(&str, &str, i32, u64)]) -> TemporalEdgeList {
        let mut nodes = NodeTable::new();
        let events = rows
            .iter()
            .map(|&(s, d, y, w)| EdgeEvent {
                src: nodes.intern(s),
                dst: nodes.intern(d),
                year: y,
                weight: w,
            })
            .collect();
        TemporalEdgeList::from_parts(nodes, events, true)
    }

    #[test]
    fn cumulative_node_and_edge_growth() {
        let list = list_from(&[("A", "B", 1955, 1), ("C", "B", 1968, 1)]);
        let config = SnapshotConfig::new(10, 1950, 1969).unwrap();
        let series = build_snapshots(&list, &config).unwrap();
        assert_eq!(series.timestamps(), vec![1959, 1969]);

        let s59 = series.get(1959).unwrap();
        let s69 = series.get(1969).unwrap();
        assert_eq!(s59.node_count(), 2);
        assert_eq!(s69.node_count(), 3);
        let a = series.nodes().get("A").unwrap();
        let b = series.nodes().get("B").unwrap();
        let c = series.nodes().get("C").unwrap();
        assert!(s59.contains(a) && s59.contains(b) && !s59.contains(c));
        assert!(s69.contains(c));
    }

    #[test]
    fn cumulative_weights_sum_over_time() {
        let list = list_from(&[("A", "B", 1955, 1), ("A", "B", 1968, 2)]);
        let config = SnapshotConfig::new(10, 1950, 1969).unwrap();
        let series = build_snapshots(&list, &config).unwrap();
        let a = series.nodes().get("A").unwrap();
        let b = series.nodes().get("B").unwrap();
        assert_eq!(series.get(1959).unwrap().edge_weight(a, b), Some(1));
        assert_eq!(series.get(1969).unwrap().edge_weight(a, b), Some(3));
    }

    #[test]
    fn yearly_granularity_boundary_count() {
        let list = list_from(&[("A", "B", 1940, 1), ("B", "C", 2019, 1)]);
        let config = SnapshotConfig::new(1, 1940, 2019).unwrap();
        let series = build_snapshots(&list, &config).unwrap();
        assert_eq!(series.len(), 80);
        assert!(series.snapshots().iter().all(|s| !s.is_partial()));
    }

    #[test]
    fn trailing_partial_snapshot_is_flagged() {
        let list = list_from(&[("A", "B", 1941, 1), ("B", "C", 1961, 1)]);
        let config = SnapshotConfig::new(10, 1940, 1962).unwrap();
        let series = build_snapshots(&list, &config).unwrap();
        assert_eq!(series.timestamps(), vec![1949, 1959, 1962]);
        let flags: Vec<bool> = series.snapshots().iter().map(|s| s.is_partial()).collect();
        assert_eq!(flags, vec![false, false, true]);
    }

    #[test]
    fn stats_match_counts() {
        let list = list_from(&[("A", "B", 1950, 1)]);
        let config = SnapshotConfig::new(10, 1950, 1959).unwrap();
        let series = build_snapshots(&list, &config).unwrap();
        let stats = snapshot_stats(&series);
        assert_eq!(
            stats,
            vec![SnapshotStats {
                t: 1959,
                partial: false,
                nodes: 2,
                edges: 1,
                total_weight: 1
            }]
        );
    }

    #[test]
    fn empty_prefix_snapshot_reports_zero_nodes() {
        let list = list_from(&[("A", "B", 1965, 1)]);
        let config = SnapshotConfig::new(10, 1950, 1969).unwrap();
        let series = build_snapshots(&list, &config).unwrap();
        let stats = snapshot_stats(&series);
        assert_eq!(stats[0].nodes, 0);
        assert_eq!(stats[1].nodes, 2);
    }

    #[test]
    fn final_snapshot_counts_cover_whole_dataset() {
        let list = list_from(&[
            ("A", "B", 1951, 1),
            ("B", "C", 1955, 1),
            ("C", "A", 1958, 1),
        ]);
        let config = SnapshotConfig::new(5, 1950, 1959).unwrap();
        let series = build_snapshots(&list, &config).unwrap();
        let last = snapshot_stats(&series).pop().unwrap();
        assert_eq!(last.edges, 3);
        assert_eq!(last.nodes, 3);
    }

    #[test]
    fn events_outside_range_is_an_error() {
        let list = list_from(&[("A", "B", 1900, 1)]);
        let config = SnapshotConfig::new(10, 1950, 1969).unwrap();
        let err = build_snapshots(&list, &config).unwrap_err();
        assert!(matches!(err, Error::NoEventsInRange { .. }));
    }

    #[test]
    fn pre_range_events_still_accumulate() {
        let list = list_from(&[("A", "B", 1940, 2), ("C", "B", 1955, 1)]);
        let config = SnapshotConfig::new(10, 1950, 1959).unwrap();
        let series = build_snapshots(&list, &config).unwrap();
        let s = series.get(1959).unwrap();
        let a = series.nodes().get("A").unwrap();
        let b = series.nodes().get("B").unwrap();
        assert_eq!(s.edge_weight(a, b), Some(2));
        assert_eq!(s.node_count(), 3);
    }

    #[test]
    fn boundary_layout_divisible_range() {
        let config = SnapshotConfig::new(10, 1940, 2019).unwrap();
        let bounds = config.boundaries();
        assert_eq!(bounds.len(), 8);
        assert_eq!(bounds[0], (1949, false));
        assert_eq!(bounds[7], (2019, false));
    }
}
