use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Invalid, ScenarioError};
use crate::damage::ingest_observed_damage;
use crate::fragility::{validate_class_table, ClassId, ClassTable, FragilityError, LifetimeClass};
use crate::grid::{build_network, Bus, BusId, FeederId, GridError, Line, LineId, Network};
use crate::scalar::Scalar;

/// On-disk dataset document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct DatasetFile<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub slack_bus: u32,
    pub classes: Vec<ClassRecord<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub feeders: Vec<FeederRecord>,
    pub buses: Vec<BusRecord<T>>,
    pub lines: Vec<LineRecord<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observed_damage: Vec<ObservedRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct ClassRecord<T> {
    pub id: u32,
    pub years: [T; 2],
    pub p0: T,
    pub v_th: T,
    pub v_max: T,
}

/// Optional per-feeder metadata. `class_sizes` overrides the class pole
/// counts otherwise summed from the feeder's line inventories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeederRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub class_sizes: BTreeMap<u32, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct BusRecord<T> {
    pub id: u32,
    pub load_kw: T,
    pub load_factor: T,
    pub voll: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct LineRecord<T> {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    pub feeder: String,
    #[serde(default)]
    pub travel_time_h: T,
    pub poles: BTreeMap<u32, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservedRecord {
    pub line: u32,
    pub by_class: BTreeMap<u32, u32>,
}

/// Field-reported damaged poles per line and class.
pub type ObservedDamage = BTreeMap<LineId, BTreeMap<ClassId, u32>>;

/// A fully validated dataset.
#[derive(Debug, Clone)]
pub struct Dataset<T> {
    pub name: Option<String>,
    pub notes: Vec<String>,
    pub classes: ClassTable<T>,
    pub network: Network<T>,
    /// Pole count per class on each feeder, used to turn failure
    /// probabilities into damaged-pole counts.
    pub class_sizes: BTreeMap<FeederId, BTreeMap<ClassId, u32>>,
    pub observed: ObservedDamage,
}

impl<T: Scalar> Dataset<T> {
    /// Poles installed on lines, summed over the whole network.
    pub fn total_poles(&self) -> u64 {
        self.network.lines().iter().map(|l| l.total_poles()).sum()
    }

    /// Validates a parsed document. `origin` is used in error messages.
    pub fn from_file(file: DatasetFile<T>, origin: &Path) -> Result<Self, ScenarioError> {
        let invalid = |location: String, source: Invalid| ScenarioError::Validation {
            path: origin.to_path_buf(),
            location,
            source,
        };

        let classes: Vec<LifetimeClass<T>> = file
            .classes
            .iter()
            .map(|c| LifetimeClass::new(c.id, (c.years[0], c.years[1]), c.p0, c.v_th, c.v_max))
            .collect();
        let classes = validate_class_table(classes)
            .map_err(|e| invalid(locate_class(&file, &e), e.into()))?;

        let buses = file
            .buses
            .iter()
            .map(|b| Bus::new(b.id, b.load_kw, b.load_factor, b.voll))
            .collect();
        let lines: Vec<Line<T>> = file
            .lines
            .iter()
            .map(|l| {
                Line::new(
                    l.id,
                    l.from,
                    l.to,
                    l.feeder.clone(),
                    l.travel_time_h,
                    l.poles.iter().map(|(&c, &n)| (c, n)),
                )
            })
            .collect();
        for (i, l) in lines.iter().enumerate() {
            if let Some(c) = l.poles.keys().find(|c| classes.get(**c).is_none()) {
                return Err(invalid(
                    format!("lines[{i}] (id {})", l.id),
                    Invalid::Other(format!("poles reference unknown class {c}")),
                ));
            }
        }
        let network = build_network(buses, lines, BusId(file.slack_bus))
            .map_err(|e| invalid(locate_grid(&file, &e), e.into()))?;

        let mut class_sizes: BTreeMap<FeederId, BTreeMap<ClassId, u32>> = BTreeMap::new();
        for line in network.lines() {
            let sizes = class_sizes.entry(line.feeder.clone()).or_default();
            for (&c, &n) in &line.poles {
                *sizes.entry(c).or_default() += n;
            }
        }
        let mut seen_feeders = Vec::new();
        for (i, f) in file.feeders.iter().enumerate() {
            let at = || format!("feeders[{i}] (id {})", f.id);
            let id = FeederId(f.id.clone());
            if seen_feeders.contains(&id) {
                return Err(invalid(at(), Invalid::Other("duplicate feeder id".into())));
            }
            let Some(sizes) = class_sizes.get_mut(&id) else {
                return Err(invalid(at(), GridError::UnknownFeeder(id).into()));
            };
            for (&c, &n) in &f.class_sizes {
                if classes.get(ClassId(c)).is_none() {
                    return Err(invalid(
                        at(),
                        Invalid::Other(format!("class_sizes reference unknown class {c}")),
                    ));
                }
                sizes.insert(ClassId(c), n);
            }
            seen_feeders.push(id);
        }

        let mut observed = ObservedDamage::new();
        for (i, rec) in file.observed_damage.iter().enumerate() {
            let at = || format!("observed_damage[{i}] (line {})", rec.line);
            let line = network
                .line(LineId(rec.line))
                .map_err(|e| invalid(at(), e.into()))?;
            let by_class: BTreeMap<ClassId, u32> = rec
                .by_class
                .iter()
                .map(|(&c, &n)| (ClassId(c), n))
                .collect();
            ingest_observed_damage(line, &by_class).map_err(|e| invalid(at(), e.into()))?;
            if observed.insert(line.id, by_class).is_some() {
                return Err(invalid(
                    at(),
                    Invalid::Other("duplicate observation for line".into()),
                ));
            }
        }

        Ok(Dataset {
            name: file.name,
            notes: file.notes,
            classes,
            network,
            class_sizes,
            observed,
        })
    }
}

fn locate_class<T>(file: &DatasetFile<T>, err: &FragilityError) -> String {
    let id = match err {
        FragilityError::Empty => return "classes".into(),
        FragilityError::InvalidClass { class, .. } | FragilityError::DuplicateClass(class) => {
            *class
        }
        FragilityError::NonMonotoneP0 { older, .. }
        | FragilityError::NonMonotoneThreshold { older, .. } => *older,
        FragilityError::OverlappingLifetimes(_, b) | FragilityError::LifetimeGap(_, b) => *b,
    };
    match file.classes.iter().rposition(|c| c.id == id.0) {
        Some(i) => format!("classes[{i}] (id {id})"),
        None => "classes".into(),
    }
}

fn locate_grid<T>(file: &DatasetFile<T>, err: &GridError) -> String {
    let bus_at = |id: BusId| match file.buses.iter().rposition(|b| b.id == id.0) {
        Some(i) => format!("buses[{i}] (id {id})"),
        None => "buses".into(),
    };
    let line_at = |id: LineId| match file.lines.iter().rposition(|l| l.id == id.0) {
        Some(i) => format!("lines[{i}] (id {id})"),
        None => "lines".into(),
    };
    match err {
        GridError::DuplicateBus(b)
        | GridError::DisconnectedBus(b)
        | GridError::InvalidBus { bus: b, .. } => bus_at(*b),
        GridError::UnknownSlack(_) => "slack_bus".into(),
        GridError::DuplicateLine(l)
        | GridError::CycleDetected(l)
        | GridError::UnknownLine(l)
        | GridError::MissingValue(l)
        | GridError::DanglingReference { line: l, .. }
        | GridError::InvalidLine { line: l, .. }
        | GridError::FeederMismatch { line: l, .. } => line_at(*l),
        GridError::UnknownFeeder(_) => "feeders".into(),
    }
}

/// Parses and validates a dataset held in memory.
pub fn parse_dataset<T: Scalar>(text: &str, origin: &Path) -> Result<Dataset<T>, ScenarioError> {
    let file: DatasetFile<T> =
        serde_json::from_str(text).map_err(|e| ScenarioError::from_json(origin, e))?;
    Dataset::from_file(file, origin)
}

pub fn load_dataset<T: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<T>, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: PathBuf::from(path),
        source,
    })?;
    parse_dataset(&text, path)
}
