//! Shared fixtures for unit tests.

use crate::graph::{
    build_snapshots, ingest_from_reader, IngestOptions, SnapshotConfig, SnapshotSeries,
    TemporalEdgeList,
};

pub(crate) fn parse_rows(rows: &str) -> TemporalEdgeList {
    let (list, _) =
        ingest_from_reader(rows.as_bytes(), "fixture", &IngestOptions::default()).unwrap();
    list
}

/// One snapshot per year over the events' own range.
pub(crate) fn yearly_series(rows: &str) -> SnapshotSeries {
    let list = parse_rows(rows);
    let (lo, hi) = list.time_range().unwrap();
    build_snapshots(&list, &SnapshotConfig::new(1, lo, hi).unwrap()).unwrap()
}

/// A single snapshot containing every event.
pub(crate) fn single_snapshot(rows: &str) -> SnapshotSeries {
    let list = parse_rows(rows);
    let (_, hi) = list.time_range().unwrap();
    build_snapshots(&list, &SnapshotConfig::new(1, hi, hi).unwrap()).unwrap()
}
