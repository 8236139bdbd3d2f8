//! Versioned snapshot cache sidecar.
//!
//! A JSON file holding a fully materialized [`SnapshotSeries`], keyed by the
//! SHA-256 of the input file plus the snapshot configuration that produced
//! it. Loading validates both the format version and the key, so a stale or
//! foreign cache is rejected instead of silently reused.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{GraphSnapshot, NodeId, NodeTable, SnapshotSeries};

pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Identity of a cached series: which bytes were ingested and how they were
/// sliced into snapshots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub input_sha256: String,
    pub delta: u32,
    pub start_year: i32,
    pub end_year: i32,
    pub reverse: bool,
    pub weighted: bool,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    key: CacheKey,
    labels: Vec<String>,
    snapshots: Vec<CachedSnapshot>,
}

#[derive(Serialize, Deserialize)]
struct CachedSnapshot {
    t: i32,
    partial: bool,
    /// `(src index, dst index, cumulative weight)` triples.
    edges: Vec<(u32, u32, u64)>,
}

/// SHA-256 hex digest of a file's contents.
pub fn input_digest(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn save_series(path: &Path, series: &SnapshotSeries, key: &CacheKey) -> Result<()> {
    let snapshots = series
        .snapshots()
        .iter()
        .map(|s| {
            let mut edges: Vec<(u32, u32, u64)> = s
                .nodes()
                .iter()
                .flat_map(|&src| {
                    s.out_edges(src)
                        .iter()
                        .map(move |&(dst, w)| (src.0, dst.0, w))
                })
                .collect();
            edges.sort_unstable();
            CachedSnapshot {
                t: s.t(),
                partial: s.is_partial(),
                edges,
            }
        })
        .collect();
    let file = CacheFile {
        version: CACHE_FORMAT_VERSION,
        key: key.clone(),
        labels: series.nodes().labels().to_vec(),
        snapshots,
    };
    let out = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer(BufWriter::new(out), &file).map_err(|e| Error::CacheInvalid {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    Ok(())
}

/// Loads a cached series, verifying version and key. A key mismatch returns
/// `Ok(None)` (the cache is valid but belongs to different inputs); a corrupt
/// or version-incompatible file is an error.
pub fn load_series(path: &Path, expected_key: &CacheKey) -> Result<Option<SnapshotSeries>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let cache: CacheFile =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::CacheInvalid {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
    if cache.version != CACHE_FORMAT_VERSION {
        return Err(Error::CacheInvalid {
            path: path.display().to_string(),
            reason: format!(
                "format version {} (this build reads {})",
                cache.version, CACHE_FORMAT_VERSION
            ),
        });
    }
    if &cache.key != expected_key {
        return Ok(None);
    }

    let mut nodes = NodeTable::new();
    for label in &cache.labels {
        nodes.intern(label);
    }
    let n_total = nodes.len();
    let bad_index = |path: &Path| Error::CacheInvalid {
        path: path.display().to_string(),
        reason: "edge endpoint outside label table".to_string(),
    };
    let mut snapshots = Vec::with_capacity(cache.snapshots.len());
    for cached in &cache.snapshots {
        let mut edges: HashMap<(NodeId, NodeId), u64> = HashMap::with_capacity(cached.edges.len());
        for &(src, dst, w) in &cached.edges {
            if src as usize >= n_total || dst as usize >= n_total {
                return Err(bad_index(path));
            }
            edges.insert((NodeId(src), NodeId(dst)), w);
        }
        snapshots.push(GraphSnapshot::from_cumulative(
            cached.t,
            cached.partial,
            n_total,
            &edges,
        ));
    }
    Ok(Some(SnapshotSeries::from_parts(nodes, snapshots)))
}
