use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::dataset::{Dataset, ObservedDamage, ObservedRecord};
use super::ScenarioError;
use crate::damage::{
    class_damage, estimate_line_damage, ingest_observed_damage, ClassDamage, DamageSource,
    LineDamage, RepairParams,
};
use crate::fragility::ClassId;
use crate::grid::{FeederId, LineId};
use crate::scalar::{Rounding, Scalar};
use crate::valuation::{
    feeder_value, rank_assessment, value_lines, AggregationMode, Assessment, ScenarioMeta,
};

#[derive(Debug, Clone, PartialEq)]
pub enum DamageInput {
    /// Estimate damage from the fragility curves at the scenario wind speed.
    Estimate,
    /// Use field-reported damage; lines without a record are undamaged.
    Observed(ObservedDamage),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<T> {
    /// Wind speed in m/s.
    pub v_real: T,
    pub rounding: Rounding,
    pub mode: AggregationMode,
    /// Average per-pole repair time, hours.
    pub t_rep_av_h: T,
    pub damage: DamageInput,
    pub pole_durations: BTreeMap<LineId, Vec<T>>,
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn estimate(v_real: T) -> Self {
        ScenarioConfig {
            v_real,
            rounding: Rounding::Nearest,
            mode: AggregationMode::Literal,
            t_rep_av_h: T::lit(4.0),
            damage: DamageInput::Estimate,
            pole_durations: BTreeMap::new(),
        }
    }

    pub fn observed(damage: ObservedDamage) -> Self {
        ScenarioConfig {
            damage: DamageInput::Observed(damage),
            ..Self::estimate(T::zero())
        }
    }

    pub fn with_mode(mut self, mode: AggregationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_rounding(mut self, rounding: Rounding) -> Self {
        self.rounding = rounding;
        self
    }

    fn check(&self) -> Result<(), ScenarioError> {
        if !self.v_real.is_finite() || self.v_real < T::zero() {
            return Err(ScenarioError::Config(
                "wind speed must be finite and non-negative".into(),
            ));
        }
        if !self.t_rep_av_h.is_finite() || self.t_rep_av_h <= T::zero() {
            return Err(ScenarioError::Config(
                "average repair time must be positive".into(),
            ));
        }
        Ok(())
    }

    fn repair_params(&self) -> RepairParams<T> {
        RepairParams {
            t_rep_av_h: self.t_rep_av_h,
            pole_durations: self.pole_durations.clone(),
        }
    }
}

fn feeder_class_damage<T: Scalar>(
    dataset: &Dataset<T>,
    v_real: T,
    rounding: Rounding,
) -> BTreeMap<FeederId, Vec<ClassDamage<T>>> {
    dataset
        .class_sizes
        .iter()
        .map(|(f, sizes)| {
            (
                f.clone(),
                class_damage(&dataset.classes, v_real, sizes, rounding),
            )
        })
        .collect()
}

fn estimated_line_damage<T: Scalar>(
    dataset: &Dataset<T>,
    per_feeder: &BTreeMap<FeederId, Vec<ClassDamage<T>>>,
    rounding: Rounding,
) -> Result<BTreeMap<LineId, LineDamage<T>>, ScenarioError> {
    let mut out = BTreeMap::new();
    for line in dataset.network.lines() {
        let cd = &per_feeder[&line.feeder];
        out.insert(line.id, estimate_line_damage(line, cd, rounding)?);
    }
    Ok(out)
}

/// Runs the full pipeline: failure probabilities, class and line damage,
/// repair times, dynamic values, then line and feeder ranking.
pub fn run_assessment<T: Scalar>(
    dataset: &Dataset<T>,
    config: &ScenarioConfig<T>,
) -> Result<Assessment<T>, ScenarioError> {
    config.check()?;
    let net = &dataset.network;

    let (damage, class_tallies, source, v_real) = match &config.damage {
        DamageInput::Estimate => {
            let per_feeder = feeder_class_damage(dataset, config.v_real, config.rounding);
            let damage = estimated_line_damage(dataset, &per_feeder, config.rounding)?;
            (
                damage,
                per_feeder,
                DamageSource::Estimated,
                Some(config.v_real),
            )
        }
        DamageInput::Observed(observed) => {
            let mut damage = BTreeMap::new();
            for line in net.lines() {
                let d = match observed.get(&line.id) {
                    Some(by_class) => ingest_observed_damage(line, by_class)?,
                    None => LineDamage::undamaged(line.id, DamageSource::Observed),
                };
                damage.insert(line.id, d);
            }
            for id in observed.keys() {
                net.line(*id)?;
            }
            (damage, BTreeMap::new(), DamageSource::Observed, None)
        }
    };

    let figures = value_lines(net, &damage, &config.repair_params(), config.mode)?;
    let line_values: BTreeMap<LineId, T> = figures.iter().map(|f| (f.line, f.v_line_dyn)).collect();
    let mut feeder_values = BTreeMap::new();
    for f in net.feeders() {
        feeder_values.insert(f.clone(), feeder_value(net, &line_values, f)?);
    }

    let meta = ScenarioMeta {
        v_real,
        rounding: config.rounding,
        mode: config.mode,
        t_rep_av_h: config.t_rep_av_h,
        damage_source: source,
    };
    let mut assessment = rank_assessment(figures, &feeder_values, meta);
    assessment.class_damage = class_tallies;
    Ok(assessment)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeederSweep {
    pub feeder: FeederId,
    /// Damaged poles per class on the feeder.
    pub by_class: BTreeMap<ClassId, u32>,
    /// Sum of `by_class`.
    pub class_total: u32,
    /// Sum of the per-line estimates over the feeder's lines.
    pub line_total: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub v: T,
    pub feeders: Vec<FeederSweep>,
}

/// Damage stage of the pipeline evaluated at `v_min, v_min + step, ...`
/// up to and including `v_max`.
pub fn wind_sweep<T: Scalar>(
    dataset: &Dataset<T>,
    v_min: T,
    v_max: T,
    step: T,
    rounding: Rounding,
) -> Result<Vec<SweepRow<T>>, ScenarioError> {
    if !(v_min.is_finite() && v_max.is_finite() && step.is_finite()) {
        return Err(ScenarioError::InvalidRange(
            "bounds and step must be finite".into(),
        ));
    }
    if v_min < T::zero() {
        return Err(ScenarioError::InvalidRange(
            "wind speeds must be non-negative".into(),
        ));
    }
    if v_min > v_max {
        return Err(ScenarioError::InvalidRange(format!(
            "v_min {v_min} exceeds v_max {v_max}"
        )));
    }
    if step <= T::zero() {
        return Err(ScenarioError::InvalidRange("step must be positive".into()));
    }

    let span = (v_max - v_min) / step;
    let count = (span + T::snap_tolerance(span))
        .floor()
        .to_usize()
        .unwrap_or(0)
        + 1;
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let v = v_min + step * T::from_usize(k).unwrap();
        let per_feeder = feeder_class_damage(dataset, v, rounding);
        let damage = estimated_line_damage(dataset, &per_feeder, rounding)?;
        let mut line_totals: BTreeMap<&FeederId, u32> = BTreeMap::new();
        for line in dataset.network.lines() {
            *line_totals.entry(&line.feeder).or_default() += damage[&line.id].damaged_poles;
        }
        let feeders = per_feeder
            .iter()
            .map(|(f, cd)| {
                let by_class: BTreeMap<ClassId, u32> =
                    cd.iter().map(|d| (d.class, d.damaged)).collect();
                FeederSweep {
                    feeder: f.clone(),
                    class_total: by_class.values().sum(),
                    by_class,
                    line_total: line_totals.get(f).copied().unwrap_or(0),
                }
            })
            .collect();
        rows.push(SweepRow { v, feeders });
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct ObservedDoc {
    observed_damage: Vec<ObservedRecord>,
}

/// Reads field-reported damage: either a bare list of records or an object
/// with an `observed_damage` list. Records are validated when the scenario
/// runs against a network.
pub fn load_observed_damage(path: impl AsRef<Path>) -> Result<ObservedDamage, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: PathBuf::from(path),
        source,
    })?;
    let parsed = if text.trim_start().starts_with('[') {
        serde_json::from_str::<Vec<ObservedRecord>>(&text)
    } else {
        serde_json::from_str::<ObservedDoc>(&text).map(|d| d.observed_damage)
    };
    let records = parsed.map_err(|e| ScenarioError::from_json(path, e))?;
    let mut out = ObservedDamage::new();
    for rec in records {
        let by_class = rec
            .by_class
            .iter()
            .map(|(&c, &n)| (ClassId(c), n))
            .collect();
        if out.insert(LineId(rec.line), by_class).is_some() {
            return Err(ScenarioError::Validation {
                path: path.to_path_buf(),
                location: format!("line {}", rec.line),
                source: super::Invalid::Other("duplicate observation for line".into()),
            });
        }
    }
    Ok(out)
}
