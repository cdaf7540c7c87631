//! Scalar abstraction shared by every numeric stage of the pipeline.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real number type the pipeline is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts a literal. Panics only if the value is not representable,
    /// which cannot happen for the finite constants used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Absolute snapping tolerance used before integer rounding, so that
    /// values like `5.500000000000001` (an exact 11/2 in real arithmetic)
    /// round as the exact value would.
    fn snap_tolerance(magnitude: Self) -> Self {
        let rel = Self::lit(1e-9).max(Self::epsilon() * Self::lit(64.0));
        rel * magnitude.abs().max(Self::one())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Rounding applied when a fractional pole count becomes an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    /// Nearest integer, halves away from zero.
    #[default]
    Nearest,
    /// Smallest integer not below the value.
    Ceil,
}

impl Rounding {
    /// Rounds a non-negative value to a count. Values within the snapping
    /// tolerance of a half-integer (nearest) or an integer (ceil) are
    /// treated as exactly that value.
    pub fn apply<T: Scalar>(self, x: T) -> u64 {
        let x = x.max(T::zero());
        let tol = T::snap_tolerance(x);
        let r = match self {
            Rounding::Nearest => {
                let half = T::lit(0.5);
                let frac = x - x.floor();
                if (frac - half).abs() <= tol {
                    x.floor() + T::one()
                } else {
                    x.round()
                }
            }
            Rounding::Ceil => {
                let nearest = x.round();
                if (x - nearest).abs() <= tol {
                    nearest
                } else {
                    x.ceil()
                }
            }
        };
        r.to_u64().unwrap_or(u64::MAX)
    }
}

impl std::str::FromStr for Rounding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(Rounding::Nearest),
            "ceil" => Ok(Rounding::Ceil),
            other => Err(format!("unknown rounding policy `{other}`")),
        }
    }
}

impl Display for Rounding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rounding::Nearest => "nearest",
            Rounding::Ceil => "ceil",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rounds_halves_up() {
        assert_eq!(Rounding::Nearest.apply(5.5_f64), 6);
        assert_eq!(Rounding::Nearest.apply(5.499999999999999_f64), 6);
        assert_eq!(Rounding::Nearest.apply(12.1_f64), 12);
        assert_eq!(Rounding::Nearest.apply(0.49_f64), 0);
        assert_eq!(Rounding::Nearest.apply(5.5_f32), 6);
    }

    #[test]
    fn ceil_ignores_float_noise() {
        assert_eq!(Rounding::Ceil.apply(1.0000000000000002_f64), 1);
        assert_eq!(Rounding::Ceil.apply(12.1_f64), 13);
        assert_eq!(Rounding::Ceil.apply(0.0_f64), 0);
    }

    #[test]
    fn negative_clamps_to_zero() {
        assert_eq!(Rounding::Nearest.apply(-3.0_f64), 0);
    }
}
