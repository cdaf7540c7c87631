//! Importer for the per-table CSV layout of a replicated-feeder case.
//!
//! Expected files in the directory:
//!
//! - `classes.csv`: `id,years_lo,years_hi,p0,v_th,v_max`
//! - `class_sizes.csv`: `feeder,class_id,count,note` (note may be empty)
//! - `topology.csv`: `from,to,load_kw`, one row per line; the receiving bus
//!   id doubles as the line id and the bus that never receives is the slack
//! - `line_params.csv`: `line,load_factor,voll`; the load factor and value
//!   of lost load of the bus a line feeds
//! - `poles.csv`: `feeder,line,class_<id>...` pole inventory per line
//! - `observed.csv` (optional): `feeder,line,class_<id>...,t_rep_h` field
//!   damage and recorded repair time per line
//!
//! Every feeder in `poles.csv` gets its own copy of the topology. The k-th
//! feeder (0-based, in order of first appearance) has its non-slack bus and
//! line ids offset by `k * stride`, where `stride` is the smallest power of
//! ten above the largest bus id. Crew travel time is recovered from the
//! recorded repair time as `t_rep_h - t_rep_av_h * damaged`, clamped to
//! [0, 1].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::dataset::{
    BusRecord, ClassRecord, DatasetFile, FeederRecord, LineRecord, ObservedRecord,
};
use super::{Invalid, ScenarioError};
use crate::scalar::Scalar;

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct ClassRow<T> {
    id: u32,
    years_lo: T,
    years_hi: T,
    p0: T,
    v_th: T,
    v_max: T,
}

#[derive(Deserialize)]
struct SizeRow {
    feeder: String,
    class_id: u32,
    count: u32,
    #[serde(default)]
    note: String,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct TopologyRow<T> {
    from: u32,
    to: u32,
    load_kw: T,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct ParamRow<T> {
    line: u32,
    load_factor: T,
    voll: T,
}

fn read_rows<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>, ScenarioError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| ScenarioError::from_csv(path, e))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| ScenarioError::from_csv(path, e)))
        .collect()
}

/// Rows keyed by `(feeder, line)` with `class_<id>` columns and optional
/// trailing extras.
type MatrixRow = (String, u32, BTreeMap<u32, u32>, BTreeMap<String, String>);

struct ClassMatrix {
    rows: Vec<MatrixRow>,
}

fn read_class_matrix(path: &Path) -> Result<ClassMatrix, ScenarioError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| ScenarioError::from_csv(path, e))?;
    let headers = reader
        .headers()
        .map_err(|e| ScenarioError::from_csv(path, e))?
        .clone();
    let parse_err = |line: usize, message: String| ScenarioError::Parse {
        path: path.to_path_buf(),
        line,
        column: 0,
        message,
    };
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| ScenarioError::from_csv(path, e))?;
        let at = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let mut feeder = None;
        let mut line = None;
        let mut classes = BTreeMap::new();
        let mut extra = BTreeMap::new();
        for (h, v) in headers.iter().zip(rec.iter()) {
            if h == "feeder" {
                feeder = Some(v.to_owned());
            } else if h == "line" {
                line = Some(
                    v.parse::<u32>()
                        .map_err(|e| parse_err(at, format!("line: {e}")))?,
                );
            } else if let Some(c) = h.strip_prefix("class_") {
                let c = c
                    .parse::<u32>()
                    .map_err(|e| parse_err(at, format!("{h}: {e}")))?;
                let n = if v.is_empty() || v == "-" {
                    0
                } else {
                    v.parse::<u32>()
                        .map_err(|e| parse_err(at, format!("{h}: {e}")))?
                };
                classes.insert(c, n);
            } else {
                extra.insert(h.to_owned(), v.to_owned());
            }
        }
        match (feeder, line) {
            (Some(f), Some(l)) => rows.push((f, l, classes, extra)),
            _ => return Err(parse_err(at, "missing feeder or line column".into())),
        }
    }
    Ok(ClassMatrix { rows })
}

/// Builds a dataset document from the CSV tables in `dir`.
pub fn import_tables<T: Scalar>(
    dir: impl AsRef<Path>,
    t_rep_av_h: T,
) -> Result<DatasetFile<T>, ScenarioError> {
    let dir = dir.as_ref();
    let file = |name: &str| dir.join(name);
    let invalid = |path: PathBuf, location: String, msg: String| ScenarioError::Validation {
        path,
        location,
        source: Invalid::Other(msg),
    };

    let classes: Vec<ClassRow<T>> = read_rows(&file("classes.csv"))?;
    let sizes: Vec<SizeRow> = read_rows(&file("class_sizes.csv"))?;
    let topology: Vec<TopologyRow<T>> = read_rows(&file("topology.csv"))?;
    let params: Vec<ParamRow<T>> = read_rows(&file("line_params.csv"))?;
    let poles = read_class_matrix(&file("poles.csv"))?;
    let observed_path = file("observed.csv");
    let observed = if observed_path.exists() {
        Some(read_class_matrix(&observed_path)?)
    } else {
        None
    };

    let receivers: Vec<u32> = topology.iter().map(|r| r.to).collect();
    let slack = topology
        .iter()
        .map(|r| r.from)
        .find(|b| !receivers.contains(b))
        .ok_or_else(|| {
            invalid(
                file("topology.csv"),
                "topology".into(),
                "no bus qualifies as slack".into(),
            )
        })?;
    let max_bus = topology.iter().map(|r| r.from.max(r.to)).max().unwrap_or(0);
    let mut stride = 10u32;
    while stride <= max_bus {
        stride *= 10;
    }
    let params: BTreeMap<u32, &ParamRow<T>> = params.iter().map(|p| (p.line, p)).collect();

    let mut feeders: Vec<String> = Vec::new();
    for (f, ..) in &poles.rows {
        if !feeders.contains(f) {
            feeders.push(f.clone());
        }
    }
    let shift = |k: usize, id: u32| {
        if id == slack {
            id
        } else {
            id + stride * k as u32
        }
    };
    let inventory: BTreeMap<(&str, u32), &BTreeMap<u32, u32>> = poles
        .rows
        .iter()
        .map(|(f, l, c, _)| ((f.as_str(), *l), c))
        .collect();
    type Observed<'a> = (&'a BTreeMap<u32, u32>, &'a BTreeMap<String, String>);
    let observed_rows: BTreeMap<(&str, u32), Observed> = observed
        .iter()
        .flat_map(|m| m.rows.iter())
        .map(|(f, l, c, e)| ((f.as_str(), *l), (c, e)))
        .collect();

    let mut buses = vec![BusRecord {
        id: slack,
        load_kw: T::zero(),
        load_factor: T::one(),
        voll: T::zero(),
    }];
    let mut lines = Vec::new();
    let mut damage = Vec::new();
    for (k, feeder) in feeders.iter().enumerate() {
        for row in &topology {
            let line_id = row.to;
            let p = params.get(&line_id).ok_or_else(|| {
                invalid(
                    file("line_params.csv"),
                    format!("line {line_id}"),
                    "missing row".into(),
                )
            })?;
            let inv = inventory.get(&(feeder.as_str(), line_id)).ok_or_else(|| {
                invalid(
                    file("poles.csv"),
                    format!("feeder {feeder}, line {line_id}"),
                    "missing row".into(),
                )
            })?;
            let mut travel = T::zero();
            if let Some((dmg, extra)) = observed_rows.get(&(feeder.as_str(), line_id)) {
                let bt: u32 = dmg.values().sum();
                if let Some(t) = extra.get("t_rep_h").filter(|t| !t.is_empty()) {
                    let t_rep: f64 = t.parse().map_err(|e| ScenarioError::Parse {
                        path: observed_path.clone(),
                        line: 0,
                        column: 0,
                        message: format!("t_rep_h for feeder {feeder}, line {line_id}: {e}"),
                    })?;
                    if bt > 0 {
                        let raw = T::lit(t_rep) - t_rep_av_h * T::from_u32(bt).unwrap();
                        let snapped = (raw * T::lit(1e9)).round() / T::lit(1e9);
                        travel = snapped.max(T::zero()).min(T::one());
                    }
                }
                let by_class: BTreeMap<u32, u32> = dmg
                    .iter()
                    .filter(|(_, &n)| n > 0)
                    .map(|(&c, &n)| (c, n))
                    .collect();
                if !by_class.is_empty() {
                    damage.push(ObservedRecord {
                        line: shift(k, line_id),
                        by_class,
                    });
                }
            }
            buses.push(BusRecord {
                id: shift(k, row.to),
                load_kw: row.load_kw,
                load_factor: p.load_factor,
                voll: p.voll,
            });
            lines.push(LineRecord {
                id: shift(k, line_id),
                from: shift(k, row.from),
                to: shift(k, row.to),
                feeder: feeder.clone(),
                travel_time_h: travel,
                poles: inv
                    .iter()
                    .filter(|(_, &n)| n > 0)
                    .map(|(&c, &n)| (c, n))
                    .collect(),
            });
        }
    }

    let mut feeder_records: Vec<FeederRecord> = feeders
        .iter()
        .map(|f| FeederRecord {
            id: f.clone(),
            class_sizes: BTreeMap::new(),
            note: None,
        })
        .collect();
    for s in &sizes {
        let rec = feeder_records
            .iter_mut()
            .find(|r| r.id == s.feeder)
            .ok_or_else(|| {
                invalid(
                    file("class_sizes.csv"),
                    format!("feeder {}", s.feeder),
                    "feeder has no lines in poles.csv".into(),
                )
            })?;
        rec.class_sizes.insert(s.class_id, s.count);
        if !s.note.is_empty() {
            rec.note = Some(match rec.note.take() {
                Some(n) => format!("{n} {}", s.note),
                None => s.note.clone(),
            });
        }
    }

    Ok(DatasetFile {
        name: None,
        notes: Vec::new(),
        slack_bus: slack,
        classes: classes
            .into_iter()
            .map(|c| ClassRecord {
                id: c.id,
                years: [c.years_lo, c.years_hi],
                p0: c.p0,
                v_th: c.v_th,
                v_max: c.v_max,
            })
            .collect(),
        feeders: feeder_records,
        buses,
        lines,
        observed_damage: damage,
    })
}
