//! Damaged-pole counts and repair durations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fragility::{ClassId, ClassTable};
use crate::grid::{Line, LineId};
use crate::scalar::{Rounding, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DamageError {
    #[error("line {line}: {claimed} damaged poles claimed in class {class}, but only {available} installed")]
    DamageExceedsInventory {
        line: LineId,
        class: ClassId,
        claimed: u32,
        available: u32,
    },
    #[error("class {class} holds no poles on the feeder but {damaged} are reported damaged")]
    EmptyClassOnFeeder { class: ClassId, damaged: u32 },
    #[error("line {line} has poles in class {class}, which has no damage estimate")]
    MissingClass { line: LineId, class: ClassId },
}

/// Damage tally for one lifetime class across one feeder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassDamage<T> {
    pub class: ClassId,
    /// Failure probability at the scenario wind speed.
    pub q: T,
    /// Poles of this class on the feeder.
    pub n: u32,
    /// Damaged poles, `round(q * n)` clamped to `[0, n]`.
    pub damaged: u32,
}

pub fn damaged_in_class<T: Scalar>(q: T, n: u32, rounding: Rounding) -> u32 {
    if n == 0 {
        return 0;
    }
    let x = q * T::from_u32(n).expect("u32 fits");
    rounding.apply(x).min(u64::from(n)) as u32
}

/// Evaluates every class of the table at `v_real` against the given class
/// sizes. Classes missing from `sizes` count as empty.
pub fn class_damage<T: Scalar>(
    table: &ClassTable<T>,
    v_real: T,
    sizes: &BTreeMap<ClassId, u32>,
    rounding: Rounding,
) -> Vec<ClassDamage<T>> {
    table
        .classes()
        .iter()
        .map(|c| {
            let q = c.failure_probability(v_real);
            let n = sizes.get(&c.id).copied().unwrap_or(0);
            ClassDamage {
                class: c.id,
                q,
                n,
                damaged: damaged_in_class(q, n, rounding),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DamageSource {
    Estimated,
    Observed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineDamage<T> {
    pub line: LineId,
    /// Per-class damaged poles. Exact counts when observed; the unrounded
    /// expected share `b / n * n_line` when estimated.
    pub by_class: BTreeMap<ClassId, T>,
    /// Total damaged poles on the line.
    pub damaged_poles: u32,
    pub source: DamageSource,
}

impl<T: Scalar> LineDamage<T> {
    pub fn undamaged(line: LineId, source: DamageSource) -> Self {
        LineDamage {
            line,
            by_class: BTreeMap::new(),
            damaged_poles: 0,
            source,
        }
    }
}

/// Spreads each class's feeder-wide damage over the line in proportion to
/// its share of that class's poles, then rounds the line total once.
pub fn estimate_line_damage<T: Scalar>(
    line: &Line<T>,
    per_class: &[ClassDamage<T>],
    rounding: Rounding,
) -> Result<LineDamage<T>, DamageError> {
    let mut by_class = BTreeMap::new();
    for (&class, &count) in &line.poles {
        if count == 0 {
            continue;
        }
        let cd = per_class
            .iter()
            .find(|d| d.class == class)
            .ok_or(DamageError::MissingClass {
                line: line.id,
                class,
            })?;
        let share = if cd.damaged == 0 {
            T::zero()
        } else if cd.n == 0 {
            return Err(DamageError::EmptyClassOnFeeder {
                class,
                damaged: cd.damaged,
            });
        } else {
            T::from_u32(cd.damaged).unwrap() / T::from_u32(cd.n).unwrap()
                * T::from_u32(count).unwrap()
        };
        by_class.insert(class, share);
    }
    let expected: T = by_class.values().copied().sum();
    let cap = line.total_poles();
    let damaged_poles = rounding.apply(expected).min(cap) as u32;
    Ok(LineDamage {
        line: line.id,
        by_class,
        damaged_poles,
        source: DamageSource::Estimated,
    })
}

/// Accepts field-reported damage for a line, checked against its inventory.
pub fn ingest_observed_damage<T: Scalar>(
    line: &Line<T>,
    damaged_by_class: &BTreeMap<ClassId, u32>,
) -> Result<LineDamage<T>, DamageError> {
    let mut by_class = BTreeMap::new();
    let mut total = 0u32;
    for (&class, &claimed) in damaged_by_class {
        let available = line.poles_in(class);
        if claimed > available {
            return Err(DamageError::DamageExceedsInventory {
                line: line.id,
                class,
                claimed,
                available,
            });
        }
        by_class.insert(class, T::from_u32(claimed).unwrap());
        total += claimed;
    }
    Ok(LineDamage {
        line: line.id,
        by_class,
        damaged_poles: total,
        source: DamageSource::Observed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairParams<T> {
    /// Average repair time per pole, hours.
    pub t_rep_av_h: T,
    /// Optional per-pole durations for specific lines. Poles beyond the end
    /// of a list take `t_rep_av_h`.
    pub pole_durations: BTreeMap<LineId, Vec<T>>,
}

impl<T: Scalar> RepairParams<T> {
    pub fn uniform(t_rep_av_h: T) -> Self {
        RepairParams {
            t_rep_av_h,
            pole_durations: BTreeMap::new(),
        }
    }
}

impl<T: Scalar> Default for RepairParams<T> {
    fn default() -> Self {
        Self::uniform(T::lit(4.0))
    }
}

/// Hours until the line is back: the sum of its damaged poles' repair
/// durations plus crew travel. Undamaged lines need no dispatch.
pub fn repair_time<T: Scalar>(
    damage: &LineDamage<T>,
    line: &Line<T>,
    params: &RepairParams<T>,
) -> T {
    let bt = damage.damaged_poles as usize;
    if bt == 0 {
        return T::zero();
    }
    let work = match params.pole_durations.get(&line.id) {
        Some(durations) => (0..bt)
            .map(|k| durations.get(k).copied().unwrap_or(params.t_rep_av_h))
            .sum(),
        None => T::from_usize(bt).unwrap() * params.t_rep_av_h,
    };
    work + line.travel_time_h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(inv: [u32; 4], travel: f64) -> Line<f64> {
        Line::new(10, 9, 10, "F1", travel, (1..=4).zip(inv))
    }

    fn feeder1_damage() -> Vec<ClassDamage<f64>> {
        [(1, 15, 6), (2, 106, 44), (3, 98, 46), (4, 21, 12)]
            .into_iter()
            .map(|(c, n, b)| ClassDamage {
                class: ClassId(c),
                q: 0.0,
                n,
                damaged: b,
            })
            .collect()
    }

    #[test]
    fn class_rounding() {
        assert_eq!(damaged_in_class(0.366_667, 15, Rounding::Nearest), 6);
        assert_eq!(damaged_in_class(0.576_190, 21, Rounding::Nearest), 12);
        assert_eq!(damaged_in_class(0.576_190, 21, Rounding::Ceil), 13);
        assert_eq!(damaged_in_class(0.7, 0, Rounding::Ceil), 0);
        assert_eq!(damaged_in_class(1.0, 9, Rounding::Ceil), 9);
    }

    #[test]
    fn estimate_on_feeder1_line10() {
        let d = estimate_line_damage(
            &line([1, 3, 4, 0], 0.0),
            &feeder1_damage(),
            Rounding::Nearest,
        )
        .unwrap();
        assert_eq!(d.damaged_poles, 4);
        assert_eq!(d.source, DamageSource::Estimated);
        let expected: f64 = d.by_class.values().sum();
        assert!((expected - (6.0 / 15.0 + 44.0 / 106.0 * 3.0 + 46.0 / 98.0 * 4.0)).abs() < 1e-12);
    }

    #[test]
    fn estimate_whole_class_on_one_line() {
        let pd = vec![ClassDamage {
            class: ClassId(2),
            q: 0.5,
            n: 6,
            damaged: 3,
        }];
        let l = Line::new(1, 0, 1, "F", 0.0, [(2, 6)]);
        assert_eq!(
            estimate_line_damage(&l, &pd, Rounding::Nearest)
                .unwrap()
                .damaged_poles,
            3
        );
    }

    #[test]
    fn estimate_undamaged_classes() {
        let pd = vec![
            ClassDamage {
                class: ClassId(1),
                q: 0.0,
                n: 5,
                damaged: 0,
            },
            ClassDamage {
                class: ClassId(2),
                q: 0.5,
                n: 6,
                damaged: 3,
            },
        ];
        let l = Line::new(1, 0, 1, "F", 0.0, [(1, 4)]);
        assert_eq!(
            estimate_line_damage(&l, &pd, Rounding::Nearest)
                .unwrap()
                .damaged_poles,
            0
        );
    }

    #[test]
    fn estimate_errors() {
        let pd = vec![ClassDamage {
            class: ClassId(1),
            q: 0.5,
            n: 0,
            damaged: 2,
        }];
        let l = Line::new(1, 0, 1, "F", 0.0, [(1, 4)]);
        assert!(matches!(
            estimate_line_damage(&l, &pd, Rounding::Nearest),
            Err(DamageError::EmptyClassOnFeeder { .. })
        ));
        let l = Line::new(1, 0, 1, "F", 0.0, [(7, 4)]);
        assert!(matches!(
            estimate_line_damage(&l, &pd, Rounding::Nearest),
            Err(DamageError::MissingClass { .. })
        ));
    }

    #[test]
    fn observed_ingestion() {
        let l = line([0, 1, 0, 3], 0.0);
        let obs: BTreeMap<_, _> = [(ClassId(2), 1), (ClassId(4), 1)].into();
        let d = ingest_observed_damage(&l, &obs).unwrap();
        assert_eq!(d.damaged_poles, 2);
        assert_eq!(d.source, DamageSource::Observed);

        let d = ingest_observed_damage(&l, &BTreeMap::new()).unwrap();
        assert_eq!(d.damaged_poles, 0);

        let over: BTreeMap<_, _> = [(ClassId(4), 5)].into();
        assert!(matches!(
            ingest_observed_damage(&l, &over),
            Err(DamageError::DamageExceedsInventory {
                claimed: 5,
                available: 3,
                ..
            })
        ));
    }

    #[test]
    fn repair_times_match_field_records() {
        let params = RepairParams::default();
        let l1 = line([0, 1, 0, 3], 0.0);
        let d1 = ingest_observed_damage(&l1, &[(ClassId(2), 1), (ClassId(4), 1)].into()).unwrap();
        assert_eq!(repair_time(&d1, &l1, &params), 8.0);

        let l3 = line([0, 2, 0, 4], 0.1);
        let d3 = ingest_observed_damage(&l3, &[(ClassId(2), 1), (ClassId(4), 2)].into()).unwrap();
        assert!((repair_time(&d3, &l3, &params) - 12.1).abs() < 1e-12);

        let none = LineDamage::undamaged(LineId(10), DamageSource::Observed);
        assert_eq!(repair_time(&none, &line([1, 1, 1, 1], 0.7), &params), 0.0);
    }

    #[test]
    fn per_pole_durations_reduce_to_average() {
        let l = line([0, 2, 0, 4], 0.25);
        let d = ingest_observed_damage(&l, &[(ClassId(4), 3)].into()).unwrap();
        let uniform = RepairParams::uniform(4.0);
        let mut explicit = RepairParams::uniform(4.0);
        explicit.pole_durations.insert(l.id, vec![4.0; 3]);
        assert_eq!(
            repair_time(&d, &l, &uniform),
            repair_time(&d, &l, &explicit)
        );

        explicit.pole_durations.insert(l.id, vec![1.0, 2.0]);
        assert_eq!(repair_time(&d, &l, &explicit), 1.0 + 2.0 + 4.0 + 0.25);
    }
}
