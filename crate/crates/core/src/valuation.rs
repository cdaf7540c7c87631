//! Load values, topology-propagated line values, feeder values and ranking.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::damage::{ClassDamage, DamageSource, LineDamage, RepairParams};
use crate::grid::{Bus, FeederId, GridError, LineId, Network};
use crate::scalar::{Rounding, Scalar};

/// Annualization constant applied to load values.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Yearly value of the load at a bus: `L * 8760 * LF * voll`.
pub fn static_load_value<T: Scalar>(bus: &Bus<T>) -> T {
    bus.load_kw * T::lit(HOURS_PER_YEAR) * bus.load_factor * bus.voll
}

/// Value at stake while the bus waits `t_rep_h` hours for repair.
pub fn dynamic_load_value<T: Scalar>(bus: &Bus<T>, t_rep_h: T) -> T {
    static_load_value(bus) * t_rep_h
}

/// How downstream outages are folded into a line's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMode {
    /// Own dynamic value plus every downstream line's dynamic value, each
    /// weighted by that line's own repair time.
    #[default]
    Literal,
    /// The line's own repair time applied to all static load it cuts off.
    /// Does not guarantee that a parent outranks its children.
    LineTrep,
}

impl fmt::Display for AggregationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AggregationMode::Literal => "literal",
            AggregationMode::LineTrep => "line-trep",
        })
    }
}

impl std::str::FromStr for AggregationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(AggregationMode::Literal),
            "line-trep" => Ok(AggregationMode::LineTrep),
            other => Err(format!("unknown aggregation mode `{other}`")),
        }
    }
}

/// Value of one line: its own dynamic value plus those of every line it
/// disconnects.
pub fn line_dynamic_value<T: Scalar>(
    net: &Network<T>,
    v_dyn: &BTreeMap<LineId, T>,
    line: LineId,
) -> Result<T, GridError> {
    let down = net.downstream_lines(line)?;
    let own = *v_dyn.get(&line).ok_or(GridError::MissingValue(line))?;
    down.into_iter().try_fold(own, |acc, l| {
        v_dyn
            .get(&l)
            .map(|v| acc + *v)
            .ok_or(GridError::MissingValue(l))
    })
}

/// [`line_dynamic_value`] for every line in one bottom-up pass.
pub fn line_dynamic_values<T: Scalar>(
    net: &Network<T>,
    v_dyn: &BTreeMap<LineId, T>,
) -> Result<BTreeMap<LineId, T>, GridError> {
    net.subtree_totals(v_dyn)
}

/// Line values under [`AggregationMode::LineTrep`].
pub fn line_trep_values<T: Scalar>(
    net: &Network<T>,
    v_static: &BTreeMap<LineId, T>,
    t_rep: &BTreeMap<LineId, T>,
) -> Result<BTreeMap<LineId, T>, GridError> {
    let cut_off = net.subtree_totals(v_static)?;
    cut_off
        .into_iter()
        .map(|(l, v)| {
            let t = t_rep.get(&l).ok_or(GridError::MissingValue(l))?;
            Ok((l, v * *t))
        })
        .collect()
}

/// Sum of line values over the feeder.
pub fn feeder_value<T: Scalar>(
    net: &Network<T>,
    line_values: &BTreeMap<LineId, T>,
    feeder: &FeederId,
) -> Result<T, GridError> {
    net.lines_of_feeder(feeder)?
        .into_iter()
        .map(|l| {
            line_values
                .get(&l)
                .copied()
                .ok_or(GridError::MissingValue(l))
        })
        .sum()
}

/// Per-line quantities before ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineFigures<T> {
    pub line: LineId,
    pub feeder: FeederId,
    pub damaged_poles: u32,
    pub t_rep_h: T,
    pub v_static: T,
    pub v_dyn: T,
    pub v_line_dyn: T,
}

/// Computes static, dynamic and line values for every line of the network.
/// Lines absent from `damage` are treated as undamaged.
pub fn value_lines<T: Scalar>(
    net: &Network<T>,
    damage: &BTreeMap<LineId, LineDamage<T>>,
    params: &RepairParams<T>,
    mode: AggregationMode,
) -> Result<Vec<LineFigures<T>>, GridError> {
    let mut t_rep = BTreeMap::new();
    let mut v_static = BTreeMap::new();
    let mut v_dyn = BTreeMap::new();
    let mut bt = BTreeMap::new();
    for line in net.lines() {
        let d = damage
            .get(&line.id)
            .cloned()
            .unwrap_or_else(|| LineDamage::undamaged(line.id, DamageSource::Estimated));
        let t = crate::damage::repair_time(&d, line, params);
        let bus = net.served_bus(line.id)?;
        t_rep.insert(line.id, t);
        v_static.insert(line.id, static_load_value(bus));
        v_dyn.insert(line.id, dynamic_load_value(bus, t));
        bt.insert(line.id, d.damaged_poles);
    }
    let v_line = match mode {
        AggregationMode::Literal => line_dynamic_values(net, &v_dyn)?,
        AggregationMode::LineTrep => line_trep_values(net, &v_static, &t_rep)?,
    };
    Ok(net
        .lines()
        .iter()
        .map(|line| LineFigures {
            line: line.id,
            feeder: line.feeder.clone(),
            damaged_poles: bt[&line.id],
            t_rep_h: t_rep[&line.id],
            v_static: v_static[&line.id],
            v_dyn: v_dyn[&line.id],
            v_line_dyn: v_line[&line.id],
        })
        .collect())
}

/// Heat-map band of a ranked line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    High,
    Medium,
    Low,
}

impl Tier {
    pub fn color(self) -> &'static str {
        match self {
            Tier::High => "red",
            Tier::Medium => "orange",
            Tier::Low => "green",
        }
    }

    /// Tier for 0-based `position` among `n` ranked lines: the first
    /// `ceil(n/3)` are high, then `ceil(rest/2)` medium, the remainder low.
    pub fn for_position(position: usize, n: usize) -> Tier {
        let high = n.div_ceil(3);
        let medium = (n - high).div_ceil(2);
        if position < high {
            Tier::High
        } else if position < high + medium {
            Tier::Medium
        } else {
            Tier::Low
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::High => "high",
            Tier::Medium => "medium",
            Tier::Low => "low",
        })
    }
}

impl std::str::FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "high" => Ok(Tier::High),
            "medium" => Ok(Tier::Medium),
            "low" => Ok(Tier::Low),
            other => Err(format!("unknown tier `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineValuation<T> {
    pub line: LineId,
    pub feeder: FeederId,
    pub damaged_poles: u32,
    pub t_rep_h: T,
    pub v_static: T,
    pub v_dyn: T,
    pub v_line_dyn: T,
    /// 1-based rank within the feeder.
    pub rank: usize,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeederValuation<T> {
    pub feeder: FeederId,
    pub w_f: T,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioMeta<T> {
    /// Wind speed in m/s; `None` when damage was observed, not estimated.
    pub v_real: Option<T>,
    pub rounding: Rounding,
    pub mode: AggregationMode,
    pub t_rep_av_h: T,
    pub damage_source: DamageSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assessment<T> {
    /// Ordered by feeder rank, then line rank.
    pub lines: Vec<LineValuation<T>>,
    /// Ordered by rank.
    pub feeders: Vec<FeederValuation<T>>,
    /// Per-feeder class tallies, present when damage was estimated.
    pub class_damage: BTreeMap<FeederId, Vec<ClassDamage<T>>>,
    pub meta: ScenarioMeta<T>,
}

impl<T: Scalar> Assessment<T> {
    pub fn line(&self, id: LineId) -> Option<&LineValuation<T>> {
        self.lines.iter().find(|l| l.line == id)
    }

    pub fn feeder(&self, id: &FeederId) -> Option<&FeederValuation<T>> {
        self.feeders.iter().find(|f| &f.feeder == id)
    }

    pub fn lines_of(&self, feeder: &FeederId) -> impl Iterator<Item = &LineValuation<T>> {
        let feeder = feeder.clone();
        self.lines.iter().filter(move |l| l.feeder == feeder)
    }
}

fn by_value_desc<T: Scalar>(a: T, b: T) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Ranks lines within each feeder by value (ties: shorter repair first,
/// then smaller id) and feeders by their total value (ties: feeder id).
/// Zero-valued lines always land in the low tier.
pub fn rank_assessment<T: Scalar>(
    figures: Vec<LineFigures<T>>,
    feeder_values: &BTreeMap<FeederId, T>,
    meta: ScenarioMeta<T>,
) -> Assessment<T> {
    let mut feeders: Vec<(FeederId, T)> =
        feeder_values.iter().map(|(f, w)| (f.clone(), *w)).collect();
    feeders.sort_by(|a, b| by_value_desc(a.1, b.1).then_with(|| a.0.cmp(&b.0)));
    let feeders: Vec<FeederValuation<T>> = feeders
        .into_iter()
        .enumerate()
        .map(|(i, (feeder, w_f))| FeederValuation {
            feeder,
            w_f,
            rank: i + 1,
        })
        .collect();

    let mut grouped: BTreeMap<FeederId, Vec<LineFigures<T>>> = BTreeMap::new();
    for f in figures {
        grouped.entry(f.feeder.clone()).or_default().push(f);
    }

    let mut lines = Vec::new();
    let order = feeders
        .iter()
        .map(|f| f.feeder.clone())
        .chain(
            grouped
                .keys()
                .filter(|k| !feeder_values.contains_key(*k))
                .cloned(),
        )
        .collect::<Vec<_>>();
    for feeder in order {
        let Some(mut group) = grouped.remove(&feeder) else {
            continue;
        };
        group.sort_by(|a, b| {
            by_value_desc(a.v_line_dyn, b.v_line_dyn)
                .then_with(|| a.t_rep_h.partial_cmp(&b.t_rep_h).unwrap_or(Ordering::Equal))
                .then_with(|| a.line.cmp(&b.line))
        });
        let n = group.len();
        for (pos, f) in group.into_iter().enumerate() {
            let tier = if f.v_line_dyn > T::zero() {
                Tier::for_position(pos, n)
            } else {
                Tier::Low
            };
            lines.push(LineValuation {
                line: f.line,
                feeder: f.feeder,
                damaged_poles: f.damaged_poles,
                t_rep_h: f.t_rep_h,
                v_static: f.v_static,
                v_dyn: f.v_dyn,
                v_line_dyn: f.v_line_dyn,
                rank: pos + 1,
                tier,
            });
        }
    }

    Assessment {
        lines,
        feeders,
        class_damage: BTreeMap::new(),
        meta,
    }
}
