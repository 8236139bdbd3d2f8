//! Delimited edge-list ingestion.
//!
//! Input rows are `src,dst,year[,weight]` with configurable delimiter and
//! column positions. Self-loops are dropped, duplicate `(src, dst, year)`
//! rows are merged by weight summation, and rows outside an optional year
//! window are skipped; all three are counted in the [`IngestReport`].

use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{EdgeEvent, NodeId, NodeTable, TemporalEdgeList};

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub src_col: usize,
    pub dst_col: usize,
    pub year_col: usize,
    /// Column holding a positive integer weight; `None` reads every row with
    /// weight 1 and marks the list unweighted.
    pub weight_col: Option<usize>,
    /// Swap src and dst on every row (flips the citation direction).
    pub reverse: bool,
    /// Rows with a year outside this window are skipped, not errors.
    pub year_bounds: Option<(i32, i32)>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            delimiter: b',',
            has_header: false,
            src_col: 0,
            dst_col: 1,
            year_col: 2,
            weight_col: None,
            reverse: false,
            year_bounds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct IngestReport {
    pub rows_read: u64,
    pub self_loops_dropped: u64,
    pub duplicates_merged: u64,
    pub rows_skipped_out_of_bounds: u64,
}

pub fn ingest_edge_list(
    path: &Path,
    options: &IngestOptions,
) -> Result<(TemporalEdgeList, IngestReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_from_reader(file, &path.display().to_string(), options)
}

/// Reader-based variant of [`ingest_edge_list`]; `source` names the input in
/// error messages.
pub fn ingest_from_reader<R: Read>(
    reader: R,
    source: &str,
    options: &IngestOptions,
) -> Result<(TemporalEdgeList, IngestReport)> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut nodes = NodeTable::new();
    let mut merged: HashMap<(NodeId, NodeId, i32), u64> = HashMap::new();
    let mut report = IngestReport::default();

    let needed = [
        Some(options.src_col),
        Some(options.dst_col),
        Some(options.year_col),
        options.weight_col,
    ]
    .into_iter()
    .flatten()
    .max()
    .unwrap();

    for record in csv_reader.records() {
        let record = record.map_err(|e| csv_error(source, &e))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(report.rows_read + 1);
        if record.len() == 1 && record[0].is_empty() {
            continue; // blank line
        }
        report.rows_read += 1;
        if record.len() <= needed {
            return Err(Error::Parse {
                path: source.to_string(),
                line,
                message: format!(
                    "expected at least {} columns, found {}",
                    needed + 1,
                    record.len()
                ),
            });
        }

        let raw_src = &record[options.src_col];
        let raw_dst = &record[options.dst_col];
        if raw_src.is_empty() || raw_dst.is_empty() {
            return Err(Error::Parse {
                path: source.to_string(),
                line,
                message: "empty node label".to_string(),
            });
        }
        let year: i32 = record[options.year_col].parse().map_err(|_| Error::Parse {
            path: source.to_string(),
            line,
            message: format!("invalid year `{}`", &record[options.year_col]),
        })?;
        let weight: u64 = match options.weight_col {
            Some(col) => {
                let w: u64 = record[col].parse().map_err(|_| Error::Parse {
                    path: source.to_string(),
                    line,
                    message: format!("invalid weight `{}`", &record[col]),
                })?;
                if w == 0 {
                    return Err(Error::Parse {
                        path: source.to_string(),
                        line,
                        message: "weight must be >= 1".to_string(),
                    });
                }
                w
            }
            None => 1,
        };

        if let Some((lo, hi)) = options.year_bounds {
            if year < lo || year > hi {
                report.rows_skipped_out_of_bounds += 1;
                continue;
            }
        }
        if raw_src == raw_dst {
            report.self_loops_dropped += 1;
            continue;
        }

        let (src_label, dst_label) = if options.reverse {
            (raw_dst, raw_src)
        } else {
            (raw_src, raw_dst)
        };
        let src = nodes.intern(src_label);
        let dst = nodes.intern(dst_label);
        match merged.entry((src, dst, year)) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += weight;
                report.duplicates_merged += 1;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(weight);
            }
        }
    }

    if report.rows_read == 0 {
        return Err(Error::EmptyInput {
            path: source.to_string(),
        });
    }

    let events: Vec<EdgeEvent> = merged
        .into_iter()
        .map(|((src, dst, year), weight)| EdgeEvent {
            src,
            dst,
            year,
            weight,
        })
        .collect();
    let weighted = options.weight_col.is_some();
    Ok((TemporalEdgeList::from_parts(nodes, events, weighted), report))
}

fn csv_error(source: &str, e: &csv::Error) -> Error {
    let line = match e.kind() {
        csv::ErrorKind::Utf8 { pos, .. } => pos.as_ref().map(|p| p.line()).unwrap_or(0),
        csv::ErrorKind::UnequalLengths { pos, .. } => pos.as_ref().map(|p| p.line()).unwrap_or(0),
        _ => 0,
    };
    Error::Parse {
        path: source.to_string(),
        line,
        message: e.to_string(),
    }
}
