//! End-to-end runs: ingest, snapshot, analyze, simulate, top.
//!
//! The CLI is a thin shell over this module; keeping the orchestration here
//! makes whole runs testable in-process, including the guarantee that a
//! repeated run over identical inputs writes byte-identical artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::centrality::{self, Measure, ScoreTable};
use crate::error::{Error, Result};
use crate::export::{self, CorrelationRow};
use crate::graph::{
    self, build_snapshots, ingest_edge_list, snapshot_stats, CacheKey, IngestOptions,
    IngestReport, SnapshotConfig, SnapshotSeries, SnapshotStats,
};
use crate::ranking::{self, RankTable};
use crate::surprise::{self, TrajectoryConfig, TrajectoryPoint};
use crate::synth::{self, ShockReport, SynthConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!(
                "unknown output format `{other}`; valid: csv, json"
            ))),
        }
    }
}

/// Everything one `analyze` run needs.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub dataset: String,
    #[serde(skip)]
    pub ingest: IngestOptions,
    pub snapshot: SnapshotConfig,
    #[serde(skip)]
    pub trajectory: TrajectoryConfig,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub svg_nodes: Vec<String>,

    // Serialized mirrors of the skipped fields, kept flat for the config
    // hash and the run metadata echo.
    #[serde(rename = "ingest")]
    pub(crate) ingest_echo: IngestEcho,
    #[serde(rename = "trajectory")]
    pub(crate) trajectory_echo: TrajectoryEcho,
}

#[derive(Debug, Clone, Serialize, Default)]
pub(crate) struct IngestEcho {
    delimiter: char,
    has_header: bool,
    src_col: usize,
    dst_col: usize,
    year_col: usize,
    weight_col: Option<usize>,
    reverse: bool,
    year_bounds: Option<(i32, i32)>,
}

#[derive(Debug, Clone, Serialize, Default)]
pub(crate) struct TrajectoryEcho {
    measures: Vec<String>,
    hypotheses: Vec<String>,
    clamp_epsilon: Vec<f64>,
    damping: f64,
    tolerance: f64,
    max_iterations: u32,
    include_bypass: bool,
}

impl RunConfig {
    pub fn new(
        input: PathBuf,
        ingest: IngestOptions,
        snapshot: SnapshotConfig,
        trajectory: TrajectoryConfig,
        out_dir: PathBuf,
        format: OutputFormat,
        svg_nodes: Vec<String>,
    ) -> Self {
        let dataset = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string());
        let ingest_echo = IngestEcho {
            delimiter: ingest.delimiter as char,
            has_header: ingest.has_header,
            src_col: ingest.src_col,
            dst_col: ingest.dst_col,
            year_col: ingest.year_col,
            weight_col: ingest.weight_col,
            reverse: ingest.reverse,
            year_bounds: ingest.year_bounds,
        };
        let trajectory_echo = TrajectoryEcho {
            measures: trajectory
                .canonical_measures()
                .iter()
                .map(|m| m.name().to_string())
                .collect(),
            hypotheses: trajectory
                .canonical_hypotheses()
                .iter()
                .map(|h| h.kind.name().to_string())
                .collect(),
            clamp_epsilon: trajectory
                .canonical_hypotheses()
                .iter()
                .map(|h| h.clamp_epsilon)
                .collect(),
            damping: trajectory.pagerank.damping,
            tolerance: trajectory.pagerank.tolerance,
            max_iterations: trajectory.pagerank.max_iterations,
            include_bypass: trajectory.include_bypass,
        };
        RunConfig {
            input,
            dataset,
            ingest,
            snapshot,
            trajectory,
            out_dir,
            format,
            svg_nodes,
            ingest_echo,
            trajectory_echo,
        }
    }

    /// First 16 hex chars of the SHA-256 over the content-determining
    /// parameters. Input and output paths are deliberately left out: moving
    /// files around must not change what the artifacts say.
    pub fn config_hash(&self) -> String {
        #[derive(Serialize)]
        struct Hashed<'a> {
            dataset: &'a str,
            ingest: &'a IngestEcho,
            snapshot: &'a SnapshotConfig,
            trajectory: &'a TrajectoryEcho,
            format: OutputFormat,
            svg_nodes: &'a [String],
        }
        let hashed = Hashed {
            dataset: &self.dataset,
            ingest: &self.ingest_echo,
            snapshot: &self.snapshot,
            trajectory: &self.trajectory_echo,
            format: self.format,
            svg_nodes: &self.svg_nodes,
        };
        let json = serde_json::to_string(&hashed).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// In-memory products of the analysis stage.
#[derive(Debug, Clone)]
pub struct Analysis {
    /// Per measure, per snapshot: `(scores, ranks)`.
    pub tables: Vec<(Measure, Vec<(ScoreTable, RankTable)>)>,
    pub points: Vec<TrajectoryPoint>,
    pub correlations: Vec<CorrelationRow>,
    /// `(t, converged, iterations)` per snapshot, when pagerank ran.
    pub pagerank_convergence: Vec<(i32, bool, u32)>,
}

/// `(t, converged, iterations)` of one power-iteration run.
type PagerankRun = (i32, bool, u32);

/// Centrality -> ranks -> surprise -> correlations over a built series.
/// Snapshots are scored in parallel; outputs are canonically ordered.
pub fn analyze_series(series: &SnapshotSeries, config: &TrajectoryConfig) -> Result<Analysis> {
    if series.len() < 2 {
        return Err(Error::TooFewSnapshots {
            got: series.len(),
            need: 2,
        });
    }
    let measures = config.canonical_measures();
    let mut tables: Vec<(Measure, Vec<(ScoreTable, RankTable)>)> = Vec::new();
    let mut pagerank_convergence = Vec::new();

    for &measure in &measures {
        let scored: Vec<(ScoreTable, Option<PagerankRun>)> = series
            .snapshots()
            .par_iter()
            .map(|snap| -> Result<(ScoreTable, Option<PagerankRun>)> {
                match measure {
                    Measure::Pagerank => {
                        let result = centrality::pagerank(snap, &config.pagerank)?;
                        let info = (snap.t(), result.converged, result.iterations);
                        Ok((result.scores, Some(info)))
                    }
                    Measure::Disruption => {
                        let scores = centrality::disruption_all(snap, config.include_bypass)?;
                        Ok((scores, None))
                    }
                }
            })
            .collect::<Result<_>>()?;
        let mut per_snapshot = Vec::with_capacity(scored.len());
        for (scores, info) in scored {
            if let Some(info) = info {
                pagerank_convergence.push(info);
            }
            let ranks = ranking::rank(&scores)?;
            per_snapshot.push((scores, ranks));
        }
        tables.push((measure, per_snapshot));
    }

    let histories: Vec<(Measure, Vec<RankTable>)> = tables
        .iter()
        .map(|(m, per)| (*m, per.iter().map(|(_, r)| r.clone()).collect()))
        .collect();
    let points = surprise::trajectories_from_ranks(series, &histories, config)?;

    // Correlations need both measures.
    let mut correlations = Vec::new();
    if measures.len() == 2 {
        let pagerank_tables = &tables[0].1;
        let disruption_tables = &tables[1].1;
        for ((ps, _), (ds, _)) in pagerank_tables.iter().zip(disruption_tables) {
            let kendall = match ranking::kendall_tau(ps, ds) {
                Ok(v) => Some(v),
                Err(Error::ZeroVariance) => None,
                Err(e) => return Err(e),
            };
            let spearman = match ranking::spearman_rho(ps, ds) {
                Ok(v) => Some(v),
                Err(Error::ZeroVariance) => None,
                Err(e) => return Err(e),
            };
            correlations.push(CorrelationRow {
                t: ps.t(),
                kendall,
                spearman,
            });
        }
    }

    Ok(Analysis {
        tables,
        points,
        correlations,
        pagerank_convergence,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotRunOutput {
    pub stats: Vec<SnapshotStats>,
    pub ingest: IngestReport,
    pub cache_path: PathBuf,
    pub stats_path: PathBuf,
}

/// Ingests, builds the series, writes the cache sidecar and a stats CSV.
pub fn run_snapshot(config: &RunConfig) -> Result<SnapshotRunOutput> {
    let (list, report) = ingest_edge_list(&config.input, &config.ingest)?;
    let series = build_snapshots(&list, &config.snapshot)?;
    let stats = snapshot_stats(&series);

    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    let cache_path = config.out_dir.join("snapshots.json");
    let key = CacheKey {
        input_sha256: graph::input_digest(&config.input)?,
        delta: config.snapshot.delta,
        start_year: config.snapshot.start_year,
        end_year: config.snapshot.end_year,
        reverse: config.ingest.reverse,
        weighted: config.ingest.weight_col.is_some(),
    };
    graph::save_series(&cache_path, &series, &key)?;

    let stats_path = config.out_dir.join("snapshot_stats.csv");
    let hash = config.config_hash();
    let mut buf = Vec::new();
    use std::io::Write;
    writeln!(buf, "{}", export::meta_line("snapshot-stats/v1", &hash, &[])).unwrap();
    {
        let mut csv = csv::Writer::from_writer(&mut buf);
        csv.write_record(["t", "partial", "nodes", "edges", "total_weight"])
            .unwrap();
        for s in &stats {
            csv.write_record([
                &s.t.to_string(),
                &s.partial.to_string(),
                &s.nodes.to_string(),
                &s.edges.to_string(),
                &s.total_weight.to_string(),
            ])
            .unwrap();
        }
        csv.flush().unwrap();
    }
    fs::write(&stats_path, buf).map_err(|e| Error::io(&stats_path, e))?;

    Ok(SnapshotRunOutput {
        stats,
        ingest: report,
        cache_path,
        stats_path,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeSummary {
    pub snapshots: usize,
    pub final_nodes: usize,
    pub points: usize,
    pub config_hash: String,
    pub nonconverged: Vec<i32>,
    pub artifacts: Vec<PathBuf>,
}

/// Full analysis run: writes trajectories, correlations, plot data, rank and
/// score tables, run metadata, and any requested per-node SVGs under
/// `out_dir`.
pub fn run_analyze(config: &RunConfig) -> Result<AnalyzeSummary> {
    let (list, ingest_report) = ingest_edge_list(&config.input, &config.ingest)?;
    let series = build_snapshots(&list, &config.snapshot)?;
    let analysis = analyze_series(&series, &config.trajectory)?;
    write_artifacts(config, &series, &analysis, &ingest_report)
}

pub(crate) fn write_artifacts(
    config: &RunConfig,
    series: &SnapshotSeries,
    analysis: &Analysis,
    ingest_report: &IngestReport,
) -> Result<AnalyzeSummary> {
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    let hash = config.config_hash();
    let nodes = series.nodes();
    let measures = config.trajectory.canonical_measures();
    let hypotheses = config.trajectory.canonical_hypotheses();
    let mut artifacts = Vec::new();

    let write_file = |name: &str, bytes: &[u8]| -> Result<PathBuf> {
        let path = config.out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    };

    // Trajectories in the requested format.
    let (traj_name, traj_bytes) = match config.format {
        OutputFormat::Csv => (
            "trajectories.csv",
            export::trajectories_csv(&analysis.points, nodes, &measures, &hypotheses, &hash),
        ),
        OutputFormat::Json => (
            "trajectories.json",
            export::trajectories_json(&analysis.points, nodes, &measures, &hypotheses, &hash),
        ),
    };
    artifacts.push(write_file(traj_name, &traj_bytes)?);

    if !analysis.correlations.is_empty() {
        let buf = export::correlations_csv(&config.dataset, &analysis.correlations, &hash);
        artifacts.push(write_file("correlations.csv", &buf)?);
    }

    let buf = export::positions_csv(&analysis.points, nodes, &hash);
    artifacts.push(write_file("positions.csv", &buf)?);

    let buf = export::scatter_csv(&analysis.points, nodes, &hash);
    artifacts.push(write_file("scatter.csv", &buf)?);

    let buf = export::ranks_csv(&analysis.tables, nodes, &hash);
    artifacts.push(write_file("ranks.csv", &buf)?);

    let scores_dir = config.out_dir.join("scores");
    fs::create_dir_all(&scores_dir).map_err(|e| Error::io(&scores_dir, e))?;
    for (measure, per_snapshot) in &analysis.tables {
        for (scores, _) in per_snapshot {
            let buf = export::score_csv(scores, nodes, &hash);
            let path = scores_dir.join(format!("{}_{}.csv", measure.name(), scores.t()));
            fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
            artifacts.push(path);
        }
    }

    if !config.svg_nodes.is_empty() {
        let svg_dir = config.out_dir.join("svg");
        fs::create_dir_all(&svg_dir).map_err(|e| Error::io(&svg_dir, e))?;
        for label in &config.svg_nodes {
            let svg = export::node_scatter_svg(series, &analysis.points, label)?;
            let path = svg_dir.join(format!("{}.svg", sanitize_filename(label)));
            fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            artifacts.push(path);
        }
    }

    let nonconverged: Vec<i32> = analysis
        .pagerank_convergence
        .iter()
        .filter(|&&(_, converged, _)| !converged)
        .map(|&(t, _, _)| t)
        .collect();

    #[derive(Serialize)]
    struct RunMeta<'a> {
        tool: &'a str,
        version: &'a str,
        schema: &'a str,
        config_hash: &'a str,
        input_sha256: String,
        config: &'a RunConfig,
        ingest: &'a IngestReport,
        pagerank_convergence: &'a [(i32, bool, u32)],
    }
    let meta = RunMeta {
        tool: export::TOOL_NAME,
        version: export::TOOL_VERSION,
        schema: "run-meta/v1",
        config_hash: &hash,
        input_sha256: graph::input_digest(&config.input)?,
        config,
        ingest: ingest_report,
        pagerank_convergence: &analysis.pagerank_convergence,
    };
    let meta_json = serde_json::to_vec_pretty(&meta).expect("meta serializes");
    artifacts.push(write_file("run_meta.json", &meta_json)?);

    Ok(AnalyzeSummary {
        snapshots: series.len(),
        final_nodes: series.snapshots().last().map(|s| s.node_count()).unwrap_or(0),
        points: analysis.points.len(),
        config_hash: hash,
        nonconverged,
        artifacts,
    })
}

fn sanitize_filename(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub edges_path: PathBuf,
    pub meta_path: PathBuf,
    pub analyze: AnalyzeSummary,
    pub shock: Option<ShockReport>,
}

/// Generates a synthetic network, analyzes it end to end, and scores the
/// injected shock against control nodes when one was configured.
pub fn run_simulate(
    synth_config: &SynthConfig,
    trajectory: TrajectoryConfig,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<SimulateSummary> {
    let generated = synth::generate(synth_config)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let edges_path = out_dir.join("synthetic_edges.csv");
    let mut buf = Vec::new();
    generated
        .list
        .write_csv(&mut buf)
        .map_err(|e| Error::io(&edges_path, e))?;
    fs::write(&edges_path, &buf).map_err(|e| Error::io(&edges_path, e))?;

    #[derive(Serialize)]
    struct SynthMeta<'a> {
        tool: &'a str,
        version: &'a str,
        schema: &'a str,
        rng: &'a str,
        config: &'a SynthConfig,
        resolved_shock: &'a Option<synth::ResolvedShock>,
    }
    let meta_path = out_dir.join("synth_meta.json");
    let meta = SynthMeta {
        tool: export::TOOL_NAME,
        version: export::TOOL_VERSION,
        schema: "synth-meta/v1",
        rng: synth::RNG_NAME,
        config: synth_config,
        resolved_shock: &generated.shock,
    };
    fs::write(
        &meta_path,
        serde_json::to_vec_pretty(&meta).expect("meta serializes"),
    )
    .map_err(|e| Error::io(&meta_path, e))?;

    let snapshot = SnapshotConfig::new(1, 1, synth_config.steps as i32)?;
    let run = RunConfig::new(
        edges_path.clone(),
        IngestOptions::default(),
        snapshot,
        trajectory,
        out_dir.to_path_buf(),
        format,
        Vec::new(),
    );
    let series = build_snapshots(&generated.list, &run.snapshot)?;
    let analysis = analyze_series(&series, &run.trajectory)?;
    let ingest_report = IngestReport {
        rows_read: generated.list.len() as u64,
        ..IngestReport::default()
    };
    let analyze = write_artifacts(&run, &series, &analysis, &ingest_report)?;

    let shock = match &generated.shock {
        Some(resolved) => {
            let report =
                synth::shock_report(&series, &analysis.points, &resolved.label, resolved.step)?;
            let report_path = out_dir.join("shock_report.json");
            fs::write(
                &report_path,
                serde_json::to_vec_pretty(&report).expect("report serializes"),
            )
            .map_err(|e| Error::io(&report_path, e))?;
            Some(report)
        }
        None => None,
    };

    Ok(SimulateSummary {
        edges_path,
        meta_path,
        analyze,
        shock,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopRow {
    pub node: String,
    pub score: f64,
    pub g: u64,
    pub x: f64,
    pub total_bits: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopListing {
    pub t: i32,
    pub measure: Measure,
    pub rows: Vec<TopRow>,
}

/// Top-k listing for one measure at one snapshot, read back from the
/// `analyze` artifacts in `out_dir`. Nodes tied with the k-th score are all
/// included, so the listing can exceed `k`.
pub fn run_top(out_dir: &Path, measure: Measure, t: i32, k: usize) -> Result<TopListing> {
    let ranks_path = out_dir.join("ranks.csv");
    if !ranks_path.exists() {
        return Err(Error::MissingArtifact { path: ranks_path });
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(&ranks_path)
        .map_err(|e| Error::CacheInvalid {
            path: ranks_path.display().to_string(),
            reason: e.to_string(),
        })?;

    let parse = |path: &Path, field: &str| -> Error {
        Error::CacheInvalid {
            path: path.display().to_string(),
            reason: format!("bad field `{field}`"),
        }
    };
    let mut available: Vec<i32> = Vec::new();
    let mut rows: Vec<TopRow> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::CacheInvalid {
            path: ranks_path.display().to_string(),
            reason: e.to_string(),
        })?;
        let row_t: i32 = record[0].parse().map_err(|_| parse(&ranks_path, "t"))?;
        if !available.contains(&row_t) {
            available.push(row_t);
        }
        if row_t != t || record[1] != *measure.name() {
            continue;
        }
        rows.push(TopRow {
            node: record[2].to_string(),
            score: record[3].parse().map_err(|_| parse(&ranks_path, "score"))?,
            g: record[4].parse().map_err(|_| parse(&ranks_path, "g"))?,
            x: record[5].parse().map_err(|_| parse(&ranks_path, "x"))?,
            total_bits: None,
        });
    }
    available.sort_unstable();
    if !available.contains(&t) {
        return Err(Error::UnknownSnapshot { t, available });
    }

    // Join total surprise from the scatter artifact.
    let scatter_path = out_dir.join("scatter.csv");
    if scatter_path.exists() {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(&scatter_path)
            .map_err(|e| Error::CacheInvalid {
                path: scatter_path.display().to_string(),
                reason: e.to_string(),
            })?;
        let mut totals: Vec<(String, f64)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::CacheInvalid {
                path: scatter_path.display().to_string(),
                reason: e.to_string(),
            })?;
            let row_t: i32 = record[1].parse().map_err(|_| parse(&scatter_path, "t"))?;
            if row_t == t {
                let bits: f64 = record[4]
                    .parse()
                    .map_err(|_| parse(&scatter_path, "total_bits"))?;
                totals.push((record[0].to_string(), bits));
            }
        }
        for row in &mut rows {
            row.total_bits = totals
                .iter()
                .find(|(n, _)| n == &row.node)
                .map(|&(_, b)| b);
        }
    }

    rows.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.node.cmp(&b.node)));
    if rows.len() > k && k > 0 {
        let cutoff = rows[k - 1].score;
        rows.retain(|r| r.score >= cutoff);
    } else if k == 0 {
        rows.clear();
    }
    Ok(TopListing { t, measure, rows })
}
