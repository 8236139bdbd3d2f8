//! Declarative file configuration and flag merging.
//!
//! Every setting lives in an optional TOML file and has a matching flag;
//! flags win over the file, defaults apply last.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use suprank::centrality::PagerankConfig;
use suprank::graph::{IngestOptions, SnapshotConfig};
use suprank::pipeline::OutputFormat;
use suprank::surprise::{Hypothesis, HypothesisKind, TrajectoryConfig, DEFAULT_CLAMP_EPSILON};
use suprank::synth::{ShockSpec, ShockTarget, SynthConfig};
use suprank::{Error, Result};

use crate::args::{Cli, SimulateArgs};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<String>,
    pub reverse_edges: Option<bool>,
    #[serde(default)]
    pub svg: Vec<String>,
    #[serde(default)]
    pub ingest: IngestSection,
    #[serde(default)]
    pub snapshot: SnapshotSection,
    #[serde(default)]
    pub pagerank: PagerankSection,
    #[serde(default)]
    pub surprise: SurpriseSection,
    #[serde(default)]
    pub synth: SynthSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSection {
    pub delimiter: Option<String>,
    pub header: Option<bool>,
    pub src_col: Option<usize>,
    pub dst_col: Option<usize>,
    pub year_col: Option<usize>,
    pub weight_col: Option<usize>,
    pub year_bounds: Option<(i32, i32)>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotSection {
    pub delta: Option<u32>,
    pub start: Option<i32>,
    pub end: Option<i32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PagerankSection {
    pub damping: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurpriseSection {
    pub hypotheses: Option<Vec<String>>,
    pub clamp_epsilon: Option<f64>,
    pub include_bypass: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub seed: Option<u64>,
    pub initial_nodes: Option<u32>,
    pub steps: Option<u32>,
    pub arrivals_per_step: Option<u32>,
    pub edges_per_arrival: Option<u32>,
    pub attachment_bias: Option<f64>,
    pub shock: Option<ShockSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockSection {
    pub step: u32,
    pub target: String,
    pub burst_edges: u32,
}

pub fn load_file_config(cli: &Cli) -> Result<FileConfig> {
    let Some(path) = &cli.config else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!(
        "{}: {e}",
        path.display()
    )))
}

/// Everything a command needs, after merging flags over the file.
pub struct Resolved {
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub ingest: IngestOptions,
    /// `(delta, start, end)`; start/end fall back to the data's range.
    pub delta: u32,
    pub start: Option<i32>,
    pub end: Option<i32>,
    pub trajectory: TrajectoryConfig,
    pub svg: Vec<String>,
    pub seed: Option<u64>,
}

pub fn resolve(cli: &Cli, file: &FileConfig) -> Result<Resolved> {
    let delimiter = match (&cli.delimiter, &file.ingest.delimiter) {
        (Some(c), _) => delimiter_byte(&c.to_string())?,
        (None, Some(s)) => delimiter_byte(s)?,
        (None, None) => b',',
    };

    // --unweighted wins; otherwise an explicit column or --weighted's
    // default column 3, or the file's column.
    let weight_col = if cli.unweighted {
        None
    } else if let Some(col) = cli.weight_col {
        Some(col)
    } else if cli.weighted {
        Some(file.ingest.weight_col.unwrap_or(3))
    } else {
        file.ingest.weight_col
    };

    let year_bounds = match &cli.year_bounds {
        Some(raw) => Some(parse_year_bounds(raw)?),
        None => file.ingest.year_bounds,
    };

    let ingest = IngestOptions {
        delimiter,
        has_header: cli.header || file.ingest.header.unwrap_or(false),
        src_col: cli.src_col.or(file.ingest.src_col).unwrap_or(0),
        dst_col: cli.dst_col.or(file.ingest.dst_col).unwrap_or(1),
        year_col: cli.year_col.or(file.ingest.year_col).unwrap_or(2),
        weight_col,
        reverse: cli.reverse_edges || file.reverse_edges.unwrap_or(false),
        year_bounds,
    };

    let pagerank = PagerankConfig {
        damping: cli.damping.or(file.pagerank.damping).unwrap_or(0.85),
        tolerance: cli.tolerance.or(file.pagerank.tolerance).unwrap_or(1e-10),
        max_iterations: cli
            .max_iterations
            .or(file.pagerank.max_iterations)
            .unwrap_or(10_000),
    };

    let clamp_epsilon = file
        .surprise
        .clamp_epsilon
        .unwrap_or(DEFAULT_CLAMP_EPSILON);
    let hypothesis_names: Vec<String> = match (&cli.hypotheses, &file.surprise.hypotheses) {
        (Some(raw), _) => raw.split(',').map(|s| s.trim().to_string()).collect(),
        (None, Some(names)) => names.clone(),
        (None, None) => vec!["past_rank".into(), "regular_growth".into()],
    };
    if hypothesis_names.is_empty() || hypothesis_names.iter().all(|s| s.is_empty()) {
        return Err(Error::InvalidConfig("hypothesis set is empty".into()));
    }
    let mut hypotheses = Vec::new();
    for name in &hypothesis_names {
        let kind = HypothesisKind::from_str(name)?;
        hypotheses.push(Hypothesis::with_clamp_epsilon(kind, clamp_epsilon)?);
    }

    let trajectory = TrajectoryConfig {
        hypotheses,
        pagerank,
        include_bypass: cli
            .include_bypass
            .or(file.surprise.include_bypass)
            .unwrap_or(true),
        ..TrajectoryConfig::default()
    };

    let format = match (&cli.format, &file.format) {
        (Some(raw), _) => OutputFormat::from_str(raw)?,
        (None, Some(raw)) => OutputFormat::from_str(raw)?,
        (None, None) => OutputFormat::Csv,
    };

    let mut svg = cli.svg.clone();
    if svg.is_empty() {
        svg = file.svg.clone();
    }

    Ok(Resolved {
        input: cli.input.clone().or_else(|| file.input.clone()),
        out_dir: cli
            .out_dir
            .clone()
            .or_else(|| file.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        format,
        ingest,
        delta: cli.delta.or(file.snapshot.delta).unwrap_or(1),
        start: cli.start.or(file.snapshot.start),
        end: cli.end.or(file.snapshot.end),
        trajectory,
        svg,
        seed: cli.seed.or(file.synth.seed),
    })
}

impl Resolved {
    pub fn require_input(&self) -> Result<PathBuf> {
        self.input
            .clone()
            .ok_or_else(|| Error::InvalidConfig("no --input given".into()))
    }

    /// Snapshot layout, inferring missing ends from the data's own range.
    pub fn snapshot_config(&self, data_range: Option<(i32, i32)>) -> Result<SnapshotConfig> {
        let (lo, hi) = match (self.start, self.end) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                let (data_lo, data_hi) = data_range.ok_or_else(|| {
                    Error::InvalidConfig(
                        "input has no events; give --start and --end explicitly".into(),
                    )
                })?;
                (self.start.unwrap_or(data_lo), self.end.unwrap_or(data_hi))
            }
        };
        SnapshotConfig::new(self.delta, lo, hi)
    }
}

pub fn resolve_synth(
    args: &SimulateArgs,
    resolved: &Resolved,
    file: &SynthSection,
) -> Result<SynthConfig> {
    let shock = match (&args.shock_step, &args.shock_target, &args.burst, &file.shock) {
        (None, None, None, None) => None,
        (None, None, None, Some(section)) => Some(ShockSpec {
            step: section.step,
            target: parse_shock_target(&section.target)?,
            burst_edges: section.burst_edges,
        }),
        (step, target, burst, section) => {
            let step = step
                .or(section.as_ref().map(|s| s.step))
                .ok_or_else(|| Error::InvalidConfig("shock needs --shock-step".into()))?;
            let target_raw = target
                .clone()
                .or_else(|| section.as_ref().map(|s| s.target.clone()))
                .ok_or_else(|| Error::InvalidConfig("shock needs --shock-target".into()))?;
            let burst_edges = burst
                .or(section.as_ref().map(|s| s.burst_edges))
                .ok_or_else(|| Error::InvalidConfig("shock needs --burst".into()))?;
            Some(ShockSpec {
                step,
                target: parse_shock_target(&target_raw)?,
                burst_edges,
            })
        }
    };

    let defaults = SynthConfig::default();
    Ok(SynthConfig {
        seed: resolved.seed.unwrap_or(defaults.seed),
        initial_nodes: args
            .initial_nodes
            .or(file.initial_nodes)
            .unwrap_or(defaults.initial_nodes),
        steps: args.steps.or(file.steps).unwrap_or(defaults.steps),
        arrivals_per_step: args
            .arrivals
            .or(file.arrivals_per_step)
            .unwrap_or(defaults.arrivals_per_step),
        edges_per_arrival: args
            .edges_per_arrival
            .or(file.edges_per_arrival)
            .unwrap_or(defaults.edges_per_arrival),
        attachment_bias: args
            .bias
            .or(file.attachment_bias)
            .unwrap_or(defaults.attachment_bias),
        shock,
    })
}

fn parse_shock_target(raw: &str) -> Result<ShockTarget> {
    if let Some(rank) = raw.strip_prefix("rank:") {
        let rank: u32 = rank.parse().map_err(|_| {
            Error::InvalidConfig(format!("bad shock target rank `{raw}`"))
        })?;
        return Ok(ShockTarget::InDegreeRank(rank));
    }
    if let Some(label) = raw.strip_prefix("node:") {
        return Ok(ShockTarget::Node(label.to_string()));
    }
    Err(Error::InvalidConfig(format!(
        "shock target `{raw}` must be `rank:K` or `node:LABEL`"
    )))
}

fn delimiter_byte(raw: &str) -> Result<u8> {
    let unescaped = match raw {
        "\\t" | "tab" => "\t",
        other => other,
    };
    let bytes = unescaped.as_bytes();
    if bytes.len() != 1 {
        return Err(Error::InvalidConfig(format!(
            "delimiter `{raw}` must be a single byte"
        )));
    }
    Ok(bytes[0])
}

fn parse_year_bounds(raw: &str) -> Result<(i32, i32)> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(lo), Ok(hi)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            if lo <= hi {
                return Ok((lo, hi));
            }
        }
    }
    Err(Error::InvalidConfig(format!(
        "year bounds `{raw}` must be LO,HI with LO <= HI"
    )))
}
