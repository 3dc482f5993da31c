//! Arithmetic on the extended half-line [0, ∞].
//!
//! Addition treats ∞ as absorbing. Multiplication uses the convention
//! `0 · ∞ = ∞ · 0 = 0`, which is what makes zero scalar coefficients
//! annihilate infinite values in convex combinations.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// A value in [0, ∞].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    /// Wraps a finite nonnegative value. `f64::INFINITY` maps to `Infinity`.
    ///
    /// Panics on NaN or negative input; callers in this crate only produce
    /// nonnegative quantities, so a violation is a logic error.
    pub fn finite(value: f64) -> Self {
        assert!(!value.is_nan(), "NaN is not a value in [0, inf]");
        assert!(value >= 0.0, "negative value {value} is not in [0, inf]");
        if value.is_infinite() {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Finite(value)
        }
    }

    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinity => None,
        }
    }

    /// Collapses to `f64`, mapping ∞ to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinity => f64::INFINITY,
        }
    }

    /// Absolute difference that stays meaningful in the presence of ∞:
    /// two infinite values are at distance 0, an infinite and a finite
    /// value are at distance ∞.
    pub fn deviation(self, other: ExtendedReal) -> ExtendedReal {
        match (self, other) {
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => ExtendedReal::ZERO,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                ExtendedReal::Finite((a - b).abs())
            }
            _ => ExtendedReal::Infinity,
        }
    }

    /// `true` when the value is below `tol`; ∞ never is.
    pub fn within(self, tol: f64) -> bool {
        match self {
            ExtendedReal::Finite(v) => v <= tol,
            ExtendedReal::Infinity => false,
        }
    }

    pub fn max(self, other: ExtendedReal) -> ExtendedReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinity,
        }
    }
}

impl Mul for ExtendedReal {
    type Output = ExtendedReal;

    fn mul(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a * b),
            // 0 · ∞ = ∞ · 0 = 0
            (ExtendedReal::Finite(a), ExtendedReal::Infinity)
            | (ExtendedReal::Infinity, ExtendedReal::Finite(a)) => {
                if a == 0.0 {
                    ExtendedReal::ZERO
                } else {
                    ExtendedReal::Infinity
                }
            }
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => ExtendedReal::Infinity,
        }
    }
}

impl Sum for ExtendedReal {
    fn sum<I: Iterator<Item = ExtendedReal>>(iter: I) -> ExtendedReal {
        iter.fold(ExtendedReal::ZERO, |acc, v| acc + v)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => Some(Ordering::Equal),
            (ExtendedReal::Infinity, ExtendedReal::Finite(_)) => Some(Ordering::Greater),
            (ExtendedReal::Finite(_), ExtendedReal::Infinity) => Some(Ordering::Less),
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

// JSON has no infinity literal; ∞ serializes as the string "inf".
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => serializer.serialize_f64(*v),
            ExtendedReal::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;

        impl<'de> Visitor<'de> for ExtVisitor {
            type Value = ExtendedReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedReal, E> {
                if v.is_nan() || v < 0.0 {
                    Err(E::custom(format!("{v} is not in [0, inf]")))
                } else {
                    Ok(ExtendedReal::finite(v))
                }
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedReal, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedReal, E> {
                match v {
                    "inf" => Ok(ExtendedReal::Infinity),
                    other => Err(E::custom(format!("unexpected string `{other}`"))),
                }
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}
