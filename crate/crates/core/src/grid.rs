//! Radial distribution network model.
//!
//! A [`Network`] is a forest of feeder trees hanging off one slack bus.
//! Construction orients every line away from the slack bus, so `from_bus`
//! is always the upstream end regardless of how the input listed it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fragility::ClassId;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BusId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeederId(pub String);

impl fmt::Display for BusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FeederId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for FeederId {
    fn from(s: &str) -> Self {
        FeederId(s.to_owned())
    }
}

/// A bus and the demand it serves.
#[derive(Debug, Clone, PartialEq)]
pub struct Bus<T> {
    pub id: BusId,
    /// Demand in kW.
    pub load_kw: T,
    /// Load factor in (0, 1].
    pub load_factor: T,
    /// Value of lost load.
    pub voll: T,
}

impl<T: Scalar> Bus<T> {
    pub fn new(id: u32, load_kw: T, load_factor: T, voll: T) -> Self {
        Bus {
            id: BusId(id),
            load_kw,
            load_factor,
            voll,
        }
    }
}

/// A branch with its pole inventory per lifetime class.
#[derive(Debug, Clone, PartialEq)]
pub struct Line<T> {
    pub id: LineId,
    pub from_bus: BusId,
    pub to_bus: BusId,
    pub feeder: FeederId,
    /// Crew travel time to the line, hours in [0, 1].
    pub travel_time_h: T,
    pub poles: BTreeMap<ClassId, u32>,
}

impl<T: Scalar> Line<T> {
    pub fn new(
        id: u32,
        from_bus: u32,
        to_bus: u32,
        feeder: impl Into<String>,
        travel_time_h: T,
        poles: impl IntoIterator<Item = (u32, u32)>,
    ) -> Self {
        Line {
            id: LineId(id),
            from_bus: BusId(from_bus),
            to_bus: BusId(to_bus),
            feeder: FeederId(feeder.into()),
            travel_time_h,
            poles: poles.into_iter().map(|(c, n)| (ClassId(c), n)).collect(),
        }
    }

    pub fn total_poles(&self) -> u64 {
        self.poles.values().map(|&n| u64::from(n)).sum()
    }

    pub fn poles_in(&self, class: ClassId) -> u32 {
        self.poles.get(&class).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("duplicate bus id {0}")]
    DuplicateBus(BusId),
    #[error("duplicate line id {0}")]
    DuplicateLine(LineId),
    #[error("line {line} references unknown bus {bus}")]
    DanglingReference { line: LineId, bus: BusId },
    #[error("slack bus {0} is not among the buses")]
    UnknownSlack(BusId),
    #[error("line {0} closes a cycle; the network is not radial")]
    CycleDetected(LineId),
    #[error("bus {0} is not reachable from the slack bus")]
    DisconnectedBus(BusId),
    #[error("bus {bus}: {reason}")]
    InvalidBus { bus: BusId, reason: String },
    #[error("line {line}: {reason}")]
    InvalidLine { line: LineId, reason: String },
    #[error("line {line} is tagged feeder `{found}` but its upstream path belongs to feeder `{expected}`")]
    FeederMismatch {
        line: LineId,
        expected: FeederId,
        found: FeederId,
    },
    #[error("unknown line {0}")]
    UnknownLine(LineId),
    #[error("unknown feeder `{0}`")]
    UnknownFeeder(FeederId),
    #[error("no value supplied for line {0}")]
    MissingValue(LineId),
}

/// Validated, oriented radial network. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Network<T> {
    buses: Vec<Bus<T>>,
    lines: Vec<Line<T>>,
    slack: BusId,
    bus_index: BTreeMap<BusId, usize>,
    line_index: BTreeMap<LineId, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    // line indices in breadth-first order from the slack bus
    order: Vec<usize>,
    feeders: BTreeMap<FeederId, Vec<usize>>,
}

/// Validates and orients a radial network rooted at `slack`.
pub fn build_network<T: Scalar>(
    mut buses: Vec<Bus<T>>,
    mut lines: Vec<Line<T>>,
    slack: BusId,
) -> Result<Network<T>, GridError> {
    buses.sort_by_key(|b| b.id);
    lines.sort_by_key(|l| l.id);

    let mut bus_index = BTreeMap::new();
    for (i, bus) in buses.iter().enumerate() {
        check_bus(bus)?;
        if bus_index.insert(bus.id, i).is_some() {
            return Err(GridError::DuplicateBus(bus.id));
        }
    }
    if !bus_index.contains_key(&slack) {
        return Err(GridError::UnknownSlack(slack));
    }

    let mut line_index = BTreeMap::new();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); buses.len()];
    for (i, line) in lines.iter().enumerate() {
        if line_index.insert(line.id, i).is_some() {
            return Err(GridError::DuplicateLine(line.id));
        }
        check_line(line)?;
        for end in [line.from_bus, line.to_bus] {
            let &b = bus_index.get(&end).ok_or(GridError::DanglingReference {
                line: line.id,
                bus: end,
            })?;
            incident[b].push(i);
        }
        if line.from_bus == line.to_bus {
            return Err(GridError::CycleDetected(line.id));
        }
    }

    // Breadth-first orientation from the slack bus. Lines are visited in id
    // order at every bus so the result is independent of input ordering.
    let mut visited_bus = vec![false; buses.len()];
    let mut parent_of_bus: Vec<Option<usize>> = vec![None; buses.len()];
    let mut line_seen = vec![false; lines.len()];
    let mut order = Vec::with_capacity(lines.len());
    let mut queue = VecDeque::new();
    let root = bus_index[&slack];
    visited_bus[root] = true;
    queue.push_back(root);
    while let Some(b) = queue.pop_front() {
        for &l in &incident[b] {
            if line_seen[l] {
                continue;
            }
            line_seen[l] = true;
            let line = &mut lines[l];
            let here = buses[b].id;
            let there = if line.from_bus == here {
                line.to_bus
            } else {
                line.from_bus
            };
            let w = bus_index[&there];
            if visited_bus[w] {
                return Err(GridError::CycleDetected(line.id));
            }
            line.from_bus = here;
            line.to_bus = there;
            visited_bus[w] = true;
            parent_of_bus[w] = Some(l);
            order.push(l);
            queue.push_back(w);
        }
    }
    if let Some(b) = visited_bus.iter().position(|&v| !v) {
        return Err(GridError::DisconnectedBus(buses[b].id));
    }

    let mut parent = vec![None; lines.len()];
    let mut children = vec![Vec::new(); lines.len()];
    for &l in &order {
        let up = parent_of_bus[bus_index[&lines[l].from_bus]];
        parent[l] = up;
        if let Some(p) = up {
            children[p].push(l);
            if lines[p].feeder != lines[l].feeder {
                return Err(GridError::FeederMismatch {
                    line: lines[l].id,
                    expected: lines[p].feeder.clone(),
                    found: lines[l].feeder.clone(),
                });
            }
        }
    }

    let mut feeders: BTreeMap<FeederId, Vec<usize>> = BTreeMap::new();
    for (i, line) in lines.iter().enumerate() {
        feeders.entry(line.feeder.clone()).or_default().push(i);
    }

    Ok(Network {
        buses,
        lines,
        slack,
        bus_index,
        line_index,
        parent,
        children,
        order,
        feeders,
    })
}

fn check_bus<T: Scalar>(bus: &Bus<T>) -> Result<(), GridError> {
    let bad = |reason: &str| {
        Err(GridError::InvalidBus {
            bus: bus.id,
            reason: reason.to_owned(),
        })
    };
    if !bus.load_kw.is_finite() || bus.load_kw < T::zero() {
        return bad("load_kw must be a finite non-negative number");
    }
    if !(bus.load_factor > T::zero() && bus.load_factor <= T::one()) {
        return bad("load_factor must lie in (0, 1]");
    }
    if !bus.voll.is_finite() || bus.voll < T::zero() {
        return bad("voll must be a finite non-negative number");
    }
    Ok(())
}

fn check_line<T: Scalar>(line: &Line<T>) -> Result<(), GridError> {
    if !(line.travel_time_h >= T::zero() && line.travel_time_h <= T::one()) {
        return Err(GridError::InvalidLine {
            line: line.id,
            reason: "travel_time_h must lie in [0, 1]".into(),
        });
    }
    if line.total_poles() == 0 {
        return Err(GridError::InvalidLine {
            line: line.id,
            reason: "line carries no poles".into(),
        });
    }
    Ok(())
}

impl<T: Scalar> Network<T> {
    pub fn slack_bus(&self) -> BusId {
        self.slack
    }

    /// Buses sorted by id.
    pub fn buses(&self) -> &[Bus<T>] {
        &self.buses
    }

    /// Oriented lines sorted by id.
    pub fn lines(&self) -> &[Line<T>] {
        &self.lines
    }

    pub fn bus(&self, id: BusId) -> Option<&Bus<T>> {
        self.bus_index.get(&id).map(|&i| &self.buses[i])
    }

    pub fn line(&self, id: LineId) -> Result<&Line<T>, GridError> {
        self.index_of(id).map(|i| &self.lines[i])
    }

    /// Bus fed by the line (its downstream end).
    pub fn served_bus(&self, id: LineId) -> Result<&Bus<T>, GridError> {
        let line = self.line(id)?;
        Ok(&self.buses[self.bus_index[&line.to_bus]])
    }

    pub fn feeders(&self) -> impl Iterator<Item = &FeederId> {
        self.feeders.keys()
    }

    pub fn parent_line(&self, id: LineId) -> Result<Option<LineId>, GridError> {
        let i = self.index_of(id)?;
        Ok(self.parent[i].map(|p| self.lines[p].id))
    }

    pub fn child_lines(&self, id: LineId) -> Result<Vec<LineId>, GridError> {
        let i = self.index_of(id)?;
        Ok(self.children[i].iter().map(|&c| self.lines[c].id).collect())
    }

    /// Lines that lose supply when `id` is out: the subtree below its
    /// downstream bus, excluding the line itself.
    pub fn downstream_lines(&self, id: LineId) -> Result<BTreeSet<LineId>, GridError> {
        let start = self.index_of(id)?;
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = self.children[start].clone();
        while let Some(l) = stack.pop() {
            out.insert(self.lines[l].id);
            stack.extend_from_slice(&self.children[l]);
        }
        Ok(out)
    }

    pub fn lines_of_feeder(&self, feeder: &FeederId) -> Result<BTreeSet<LineId>, GridError> {
        self.feeders
            .get(feeder)
            .map(|ls| ls.iter().map(|&l| self.lines[l].id).collect())
            .ok_or_else(|| GridError::UnknownFeeder(feeder.clone()))
    }

    /// For every line, its own value plus the values of all downstream
    /// lines, in a single bottom-up pass.
    pub fn subtree_totals(
        &self,
        own: &BTreeMap<LineId, T>,
    ) -> Result<BTreeMap<LineId, T>, GridError> {
        let mut total = Vec::with_capacity(self.lines.len());
        for line in &self.lines {
            let v = own.get(&line.id).ok_or(GridError::MissingValue(line.id))?;
            total.push(*v);
        }
        for &l in self.order.iter().rev() {
            if let Some(p) = self.parent[l] {
                total[p] = total[p] + total[l];
            }
        }
        Ok(self.lines.iter().map(|l| l.id).zip(total).collect())
    }

    fn index_of(&self, id: LineId) -> Result<usize, GridError> {
        self.line_index
            .get(&id)
            .copied()
            .ok_or(GridError::UnknownLine(id))
    }
}
