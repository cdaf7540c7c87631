use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::SweepRow;
use super::ScenarioError;
use crate::grid::Network;
use crate::scalar::Scalar;
use crate::valuation::{Assessment, Tier};

pub const RANKING_HEADER: &str =
    "line_id,feeder_id,damaged_poles,t_rep_h,v_dyn,v_line_dyn,rank,tier";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

/// One row of the ranking report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RankingRow<T> {
    pub line_id: u32,
    pub feeder_id: String,
    pub damaged_poles: u32,
    pub t_rep_h: T,
    pub v_dyn: T,
    pub v_line_dyn: T,
    pub rank: usize,
    pub tier: Tier,
}

fn rows<T: Scalar>(assessment: &Assessment<T>) -> impl Iterator<Item = RankingRow<T>> + '_ {
    assessment.lines.iter().map(|l| RankingRow {
        line_id: l.line.0,
        feeder_id: l.feeder.0.clone(),
        damaged_poles: l.damaged_poles,
        t_rep_h: l.t_rep_h,
        v_dyn: l.v_dyn,
        v_line_dyn: l.v_line_dyn,
        rank: l.rank,
        tier: l.tier,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: PathBuf::from(path),
        source,
    }
}

pub fn write_ranking_csv<T: Scalar, W: Write>(
    assessment: &Assessment<T>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{RANKING_HEADER}")?;
    for r in rows(assessment) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.line_id,
            r.feeder_id,
            r.damaged_poles,
            r.t_rep_h,
            r.v_dyn,
            r.v_line_dyn,
            r.rank,
            r.tier
        )?;
    }
    Ok(())
}

pub fn write_ranking_json<T: Scalar, W: Write>(
    assessment: &Assessment<T>,
    mut out: W,
) -> std::io::Result<()> {
    let rows: Vec<RankingRow<T>> = rows(assessment).collect();
    serde_json::to_writer_pretty(&mut out, &rows)?;
    writeln!(out)
}

/// Writes the ranking table, one row per line ordered by feeder priority
/// then line rank.
pub fn export_ranking<T: Scalar>(
    assessment: &Assessment<T>,
    path: impl AsRef<Path>,
    format: ExportFormat,
) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut out = std::io::BufWriter::new(file);
    match format {
        ExportFormat::Csv => write_ranking_csv(assessment, &mut out),
        ExportFormat::Json => write_ranking_json(assessment, &mut out),
    }
    .and_then(|_| out.flush())
    .map_err(io_err(path))
}

pub fn read_ranking_csv<T: Scalar>(
    path: impl AsRef<Path>,
) -> Result<Vec<RankingRow<T>>, ScenarioError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| ScenarioError::from_csv(path, e))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| ScenarioError::from_csv(path, e)))
        .collect()
}

/// Graphviz digraph of the network with every line colored by its tier
/// and labeled with its rank.
pub fn heatmap_dot<T: Scalar>(assessment: &Assessment<T>, net: &Network<T>) -> String {
    let mut s = String::new();
    s.push_str("digraph heatmap {\n");
    s.push_str("    rankdir=TB;\n");
    s.push_str("    node [shape=circle, fontsize=10];\n");
    s.push_str("    edge [penwidth=2];\n");
    for bus in net.buses() {
        if bus.id == net.slack_bus() {
            let _ = writeln!(s, "    {} [shape=doublecircle];", bus.id);
        } else {
            let _ = writeln!(s, "    {};", bus.id);
        }
    }
    for line in net.lines() {
        let (color, label) = match assessment.line(line.id) {
            Some(v) => (v.tier.color(), v.rank.to_string()),
            None => (Tier::Low.color(), String::new()),
        };
        let _ = writeln!(
            s,
            "    {} -> {} [color={color}, label=\"{label}\"];",
            line.from_bus, line.to_bus
        );
    }
    s.push_str("}\n");
    s
}

pub fn export_heatmap<T: Scalar>(
    assessment: &Assessment<T>,
    net: &Network<T>,
    path: impl AsRef<Path>,
) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    std::fs::write(path, heatmap_dot(assessment, net)).map_err(io_err(path))
}

/// Long-format sweep table: one row per wind speed and feeder.
pub fn write_sweep_csv<T: Scalar, W: Write>(
    rows: &[SweepRow<T>],
    mut out: W,
) -> std::io::Result<()> {
    let classes: Vec<_> = rows
        .first()
        .and_then(|r| r.feeders.first())
        .map(|f| f.by_class.keys().copied().collect())
        .unwrap_or_default();
    let mut header = String::from("wind_speed,feeder_id");
    for c in &classes {
        let _ = write!(header, ",class_{c}");
    }
    header.push_str(",class_total,line_total");
    writeln!(out, "{header}")?;
    for row in rows {
        for f in &row.feeders {
            let mut line = format!("{},{}", row.v, f.feeder);
            for c in &classes {
                let _ = write!(line, ",{}", f.by_class.get(c).copied().unwrap_or(0));
            }
            let _ = write!(line, ",{},{}", f.class_total, f.line_total);
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}
