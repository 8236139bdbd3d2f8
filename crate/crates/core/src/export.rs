//! Artifact rendering.
//!
//! Every emitted file starts with a `# suprank v... schema=... config=...`
//! metadata line so artifacts are self-describing, and all renderers are
//! deterministic: fixed column orders, canonical row ordering, and Rust's
//! shortest round-trip float formatting. Byte-identical inputs and
//! configuration produce byte-identical files.

use std::io::Write;

use crate::centrality::{Measure, ScoreTable};
use crate::error::{Error, Result};
use crate::graph::{NodeTable, SnapshotSeries};
use crate::ranking::RankTable;
use crate::surprise::{Hypothesis, TrajectoryPoint};

pub const TOOL_NAME: &str = "suprank";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `# suprank v0.1.0 schema=<name> config=<hash>[ extras]`
pub fn meta_line(schema: &str, config_hash: &str, extras: &[(&str, String)]) -> String {
    let mut line = format!("# {TOOL_NAME} v{TOOL_VERSION} schema={schema} config={config_hash}");
    for (k, v) in extras {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

/// Column names for the per-(measure, hypothesis) divergence cells, in
/// canonical order.
pub fn kl_columns(measures: &[Measure], hypotheses: &[Hypothesis]) -> Vec<String> {
    let mut cols = Vec::new();
    for m in measures {
        for h in hypotheses {
            cols.push(format!("kl_{}_{}", m.name(), h.kind.name()));
        }
    }
    cols
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn point_flags(p: &TrajectoryPoint) -> &'static str {
    if p.has_evidence {
        ""
    } else {
        "no_evidence"
    }
}

fn point_kl_cells(
    p: &TrajectoryPoint,
    measures: &[Measure],
    hypotheses: &[Hypothesis],
) -> Vec<Option<f64>> {
    let mut cells = Vec::with_capacity(measures.len() * hypotheses.len());
    for &m in measures {
        for h in hypotheses {
            let cell = p
                .records
                .iter()
                .find(|r| r.measure == m && r.hypothesis == h.kind)
                .and_then(|r| r.kl_bits());
            cells.push(cell);
        }
    }
    cells
}

pub fn trajectories_csv(
    points: &[TrajectoryPoint],
    nodes: &NodeTable,
    measures: &[Measure],
    hypotheses: &[Hypothesis],
    config_hash: &str,
) -> Vec<u8> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", meta_line("trajectories/v1", config_hash, &[])).unwrap();
    let mut csv = csv::Writer::from_writer(&mut buf);
    let mut header = vec![
        "node".to_string(),
        "t".to_string(),
        "x_pagerank".to_string(),
        "x_disruption".to_string(),
    ];
    header.extend(kl_columns(measures, hypotheses));
    header.push("total_bits".to_string());
    header.push("flags".to_string());
    csv.write_record(&header).unwrap();
    for p in points {
        let mut row = vec![
            nodes.label(p.node).to_string(),
            p.t.to_string(),
            fmt_opt(p.x_pagerank),
            fmt_opt(p.x_disruption),
        ];
        row.extend(point_kl_cells(p, measures, hypotheses).into_iter().map(fmt_opt));
        row.push(p.total_bits.to_string());
        row.push(point_flags(p).to_string());
        csv.write_record(&row).unwrap();
    }
    csv.flush().unwrap();
    drop(csv);
    buf
}

/// JSON mirror of the trajectory CSV: same fields in the same versioned
/// order, one object per point. Hand-rendered so field order is exact.
pub fn trajectories_json(
    points: &[TrajectoryPoint],
    nodes: &NodeTable,
    measures: &[Measure],
    hypotheses: &[Hypothesis],
    config_hash: &str,
) -> Vec<u8> {
    let mut buf = Vec::new();
    let kl_names = kl_columns(measures, hypotheses);
    writeln!(buf, "{{").unwrap();
    writeln!(
        buf,
        "  \"meta\": {{\"tool\": {}, \"version\": {}, \"schema\": \"trajectories/v1\", \"config\": {}}},",
        json_str(TOOL_NAME),
        json_str(TOOL_VERSION),
        json_str(config_hash)
    )
    .unwrap();
    writeln!(buf, "  \"points\": [").unwrap();
    for (i, p) in points.iter().enumerate() {
        let mut fields = vec![
            format!("\"node\": {}", json_str(nodes.label(p.node))),
            format!("\"t\": {}", p.t),
            format!("\"x_pagerank\": {}", json_opt(p.x_pagerank)),
            format!("\"x_disruption\": {}", json_opt(p.x_disruption)),
        ];
        for (name, cell) in kl_names.iter().zip(point_kl_cells(p, measures, hypotheses)) {
            fields.push(format!("{}: {}", json_str(name), json_opt(cell)));
        }
        fields.push(format!("\"total_bits\": {}", p.total_bits));
        fields.push(format!("\"flags\": {}", json_str(point_flags(p))));
        let sep = if i + 1 == points.len() { "" } else { "," };
        writeln!(buf, "    {{{}}}{}", fields.join(", "), sep).unwrap();
    }
    writeln!(buf, "  ]").unwrap();
    writeln!(buf, "}}").unwrap();
    buf
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

fn json_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "null".to_string(),
    }
}

/// One score table as `node,score`, ordered by node label.
pub fn score_csv(table: &ScoreTable, nodes: &NodeTable, config_hash: &str) -> Vec<u8> {
    let extras = [
        ("t", table.t().to_string()),
        ("measure", table.measure().name().to_string()),
    ];
    let mut buf = Vec::new();
    writeln!(buf, "{}", meta_line("scores/v1", config_hash, &extras)).unwrap();
    let mut csv = csv::Writer::from_writer(&mut buf);
    csv.write_record(["node", "score"]).unwrap();
    let mut rows: Vec<(&str, f64)> = table.iter().map(|(n, s)| (nodes.label(n), s)).collect();
    rows.sort_by(|a, b| a.0.cmp(b.0));
    for (label, score) in rows {
        csv.write_record([label, &score.to_string()]).unwrap();
    }
    csv.flush().unwrap();
    drop(csv);
    buf
}

/// All rank tables in one file: `t,measure,node,score,g,x`.
pub fn ranks_csv(
    tables: &[(Measure, Vec<(ScoreTable, RankTable)>)],
    nodes: &NodeTable,
    config_hash: &str,
) -> Vec<u8> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", meta_line("ranks/v1", config_hash, &[])).unwrap();
    let mut csv = csv::Writer::from_writer(&mut buf);
    csv.write_record(["t", "measure", "node", "score", "g", "x"])
        .unwrap();
    for (measure, per_snapshot) in tables {
        for (scores, ranks) in per_snapshot {
            let mut by_label: Vec<(&str, f64, u64, f64)> = ranks
                .entries()
                .iter()
                .map(|e| {
                    let score = scores.get(e.node).expect("rank covers scores");
                    (nodes.label(e.node), score, e.g, e.x)
                })
                .collect();
            by_label.sort_by(|a, b| a.0.cmp(b.0));
            for (label, score, g, x) in by_label {
                csv.write_record([
                    &ranks.t().to_string(),
                    measure.name(),
                    label,
                    &score.to_string(),
                    &g.to_string(),
                    &x.to_string(),
                ])
                .unwrap();
            }
        }
    }
    csv.flush().unwrap();
    drop(csv);
    buf
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub t: i32,
    pub kendall: Option<f64>,
    pub spearman: Option<f64>,
}

/// Per-snapshot correlation between the two measures:
/// `dataset,t,kendall,spearman`. Undefined coefficients (zero variance)
/// leave empty cells.
pub fn correlations_csv(dataset: &str, rows: &[CorrelationRow], config_hash: &str) -> Vec<u8> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", meta_line("correlations/v1", config_hash, &[])).unwrap();
    let mut csv = csv::Writer::from_writer(&mut buf);
    csv.write_record(["dataset", "t", "kendall", "spearman"])
        .unwrap();
    for row in rows {
        csv.write_record([
            dataset,
            &row.t.to_string(),
            &fmt_opt(row.kendall),
            &fmt_opt(row.spearman),
        ])
        .unwrap();
    }
    csv.flush().unwrap();
    drop(csv);
    buf
}

/// Position curves for plotting: `node,t,pos_pagerank,pos_disruption` where
/// `pos = 1 - x`, so larger means closer to the top.
pub fn positions_csv(points: &[TrajectoryPoint], nodes: &NodeTable, config_hash: &str) -> Vec<u8> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", meta_line("positions/v1", config_hash, &[])).unwrap();
    let mut csv = csv::Writer::from_writer(&mut buf);
    csv.write_record(["node", "t", "pos_pagerank", "pos_disruption"])
        .unwrap();
    for p in points {
        csv.write_record([
            nodes.label(p.node),
            &p.t.to_string(),
            &fmt_opt(p.x_pagerank.map(|x| 1.0 - x)),
            &fmt_opt(p.x_disruption.map(|x| 1.0 - x)),
        ])
        .unwrap();
    }
    csv.flush().unwrap();
    drop(csv);
    buf
}

/// Connected-scatter data: `node,t,x_pagerank,x_disruption,total_bits`.
pub fn scatter_csv(points: &[TrajectoryPoint], nodes: &NodeTable, config_hash: &str) -> Vec<u8> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", meta_line("scatter/v1", config_hash, &[])).unwrap();
    let mut csv = csv::Writer::from_writer(&mut buf);
    csv.write_record(["node", "t", "x_pagerank", "x_disruption", "total_bits"])
        .unwrap();
    for p in points {
        csv.write_record([
            nodes.label(p.node),
            &p.t.to_string(),
            &fmt_opt(p.x_pagerank),
            &fmt_opt(p.x_disruption),
            &p.total_bits.to_string(),
        ])
        .unwrap();
    }
    csv.flush().unwrap();
    drop(csv);
    buf
}

/// Minimal static connected-scatter SVG for one node: both axes are `1 - x`
/// positions (pagerank horizontal, disruption vertical), dot area tracks
/// total surprise.
pub fn node_scatter_svg(
    series: &SnapshotSeries,
    points: &[TrajectoryPoint],
    label: &str,
) -> Result<String> {
    let node = series
        .nodes()
        .get(label)
        .ok_or_else(|| Error::NodeNotPresent {
            label: label.to_string(),
            t: series.snapshots().last().map(|s| s.t()).unwrap_or(0),
        })?;
    let own: Vec<&TrajectoryPoint> = points.iter().filter(|p| p.node == node).collect();

    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 60.0;
    let sx = |x: f64| MARGIN + x * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - y * (H - 2.0 * MARGIN);
    let max_bits = own
        .iter()
        .map(|p| p.total_bits)
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "  <!-- {} -->\n",
        meta_line("scatter-svg/v1", "-", &[("node", label.to_string())])
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(0.0)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        sx(0.0),
        sy(0.0),
        sx(0.0),
        sy(1.0)
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">pagerank position (1 - x)</text>\n",
        sx(0.55),
        sy(0.0) + 32.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" transform=\"rotate(-90 {:.2} {:.2})\">disruption position (1 - x)</text>\n",
        sx(0.0) - 32.0,
        sy(0.45),
        sx(0.0) - 32.0,
        sy(0.45)
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"24\" font-size=\"14\">{}</text>\n",
        MARGIN,
        xml_escape(label)
    ));

    let coords: Vec<(f64, f64, f64, i32)> = own
        .iter()
        .filter_map(|p| match (p.x_pagerank, p.x_disruption) {
            (Some(xp), Some(xd)) => Some((sx(1.0 - xp), sy(1.0 - xd), p.total_bits, p.t)),
            _ => None,
        })
        .collect();
    if coords.len() > 1 {
        let path: Vec<String> = coords
            .iter()
            .map(|&(x, y, _, _)| format!("{x:.2},{y:.2}"))
            .collect();
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n",
            path.join(" ")
        ));
    }
    for &(x, y, bits, t) in &coords {
        let r = 2.0 + 10.0 * (bits / max_bits).sqrt();
        svg.push_str(&format!(
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" fill=\"#3366aa\" fill-opacity=\"0.6\"><title>t={t} bits={bits:.4}</title></circle>\n"
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
