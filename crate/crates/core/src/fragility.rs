//! Lifetime classes and the piecewise-linear wind fragility curve.
//!
//! Each class fails with its baseline probability `p0` below `v_th`, with
//! certainty above `v_max`, and linearly in between. Older classes carry a
//! higher `p0` and lower wind thresholds, so at any wind speed an older pole
//! is never less likely to fail than a younger one.
//!
//! Note on threshold ordering: the field data this model is calibrated on
//! has `v_th` falling with age (60, 59.5, 59, 58 m/s). Tables are therefore
//! validated with `v_th` non-increasing and `v_max` strictly decreasing,
//! which is what makes failure probability monotone in age.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(pub u32);

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A pole age band and its fragility parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeClass<T> {
    pub id: ClassId,
    /// Age band in years, `(low, high)`.
    pub lifetime_years: (T, T),
    /// Baseline failure probability, in (0, 1).
    pub p0: T,
    /// Wind speed (m/s) where failure probability starts rising.
    pub v_th: T,
    /// Wind speed (m/s) at which failure is certain.
    pub v_max: T,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FragilityError {
    #[error("class table is empty")]
    Empty,
    #[error("class {class}: {reason}")]
    InvalidClass { class: ClassId, reason: String },
    #[error("duplicate class id {0}")]
    DuplicateClass(ClassId),
    #[error("p0 must increase with age: class {older} has p0 not above class {younger}")]
    NonMonotoneP0 { younger: ClassId, older: ClassId },
    #[error("wind thresholds must fall with age: class {older} violates ordering against class {younger}")]
    NonMonotoneThreshold { younger: ClassId, older: ClassId },
    #[error("lifetime ranges of classes {0} and {1} overlap")]
    OverlappingLifetimes(ClassId, ClassId),
    #[error("lifetime ranges of classes {0} and {1} leave a gap")]
    LifetimeGap(ClassId, ClassId),
}

impl<T: Scalar> LifetimeClass<T> {
    pub fn new(id: u32, lifetime_years: (T, T), p0: T, v_th: T, v_max: T) -> Self {
        LifetimeClass {
            id: ClassId(id),
            lifetime_years,
            p0,
            v_th,
            v_max,
        }
    }

    pub fn check(&self) -> Result<(), FragilityError> {
        let bad = |reason: &str| {
            Err(FragilityError::InvalidClass {
                class: self.id,
                reason: reason.to_owned(),
            })
        };
        let (lo, hi) = self.lifetime_years;
        if !(lo >= T::zero() && lo < hi) || !hi.is_finite() {
            return bad("lifetime range must satisfy 0 <= low < high");
        }
        if !(self.p0 > T::zero() && self.p0 < T::one()) {
            return bad("p0 must lie in (0, 1)");
        }
        if !(self.v_th > T::zero() && self.v_th < self.v_max) || !self.v_max.is_finite() {
            return bad("wind thresholds must satisfy 0 < v_th < v_max");
        }
        Ok(())
    }

    /// Rise of failure probability per m/s between `v_th` and `v_max`.
    pub fn slope(&self) -> T {
        (T::one() - self.p0) / (self.v_max - self.v_th)
    }

    /// Failure probability at wind speed `v_real` (m/s). Both breakpoints
    /// belong to the linear segment, which is continuous with its neighbours.
    pub fn failure_probability(&self, v_real: T) -> T {
        if v_real < self.v_th {
            self.p0
        } else if v_real <= self.v_max {
            (self.slope() * (v_real - self.v_th) + self.p0).min(T::one())
        } else {
            T::one()
        }
    }
}

/// Lifetime classes ordered from youngest to oldest.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassTable<T> {
    classes: Vec<LifetimeClass<T>>,
}

/// Accepts the list only if ages are contiguous and ascending, `p0` strictly
/// increases, `v_th` does not increase and `v_max` strictly decreases.
pub fn validate_class_table<T: Scalar>(
    classes: Vec<LifetimeClass<T>>,
) -> Result<ClassTable<T>, FragilityError> {
    if classes.is_empty() {
        return Err(FragilityError::Empty);
    }
    for (i, c) in classes.iter().enumerate() {
        c.check()?;
        if classes[..i].iter().any(|o| o.id == c.id) {
            return Err(FragilityError::DuplicateClass(c.id));
        }
    }
    for pair in classes.windows(2) {
        let (young, old) = (&pair[0], &pair[1]);
        let tol = T::snap_tolerance(young.lifetime_years.1);
        let gap = old.lifetime_years.0 - young.lifetime_years.1;
        if gap < -tol {
            return Err(FragilityError::OverlappingLifetimes(young.id, old.id));
        }
        if gap > tol {
            return Err(FragilityError::LifetimeGap(young.id, old.id));
        }
        if old.p0 <= young.p0 {
            return Err(FragilityError::NonMonotoneP0 {
                younger: young.id,
                older: old.id,
            });
        }
        if old.v_th > young.v_th || old.v_max >= young.v_max {
            return Err(FragilityError::NonMonotoneThreshold {
                younger: young.id,
                older: old.id,
            });
        }
    }
    Ok(ClassTable { classes })
}

impl<T: Scalar> ClassTable<T> {
    pub fn classes(&self) -> &[LifetimeClass<T>] {
        &self.classes
    }

    pub fn get(&self, id: ClassId) -> Option<&LifetimeClass<T>> {
        self.classes.iter().find(|c| c.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.classes.iter().map(|c| c.id)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Smallest `v_th` across classes: below it every class sits at `p0`.
    pub fn min_threshold(&self) -> T {
        self.classes
            .iter()
            .map(|c| c.v_th)
            .fold(T::infinity(), T::min)
    }

    /// Largest `v_max`: above it every class fails with certainty.
    pub fn max_saturation(&self) -> T {
        self.classes
            .iter()
            .map(|c| c.v_max)
            .fold(T::neg_infinity(), T::max)
    }
}
