//! Extended real values `f64 ∪ {+∞}` for proper convex functions.
//!
//! Proper convex functions here are finite somewhere and bounded below after
//! normalization, so `-∞` never occurs and is deliberately unrepresentable.
//! `+∞` is a tagged variant, not a sentinel float: sums and comparisons are
//! defined case by case and a stray `f64::INFINITY` inside `Finite` is a bug.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A real number or `+∞`. Ordering is total with `Inf` maximal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Inf,
}

impl ExtReal {
    pub fn finite(v: f64) -> Self {
        debug_assert!(v.is_finite(), "ExtReal::Finite must hold a finite value");
        ExtReal::Finite(v)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Inf => None,
        }
    }

    /// Finite value or panic; for contexts where infinity was already excluded.
    pub fn unwrap_finite(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Inf => panic!("unexpected +inf"),
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
            (ExtReal::Finite(_), ExtReal::Inf) => Ordering::Less,
            (ExtReal::Inf, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::Inf, ExtReal::Inf) => Ordering::Equal,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self.total_cmp(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// `e^{-f}`, with the convention `e^{-∞} = 0`.
    pub fn exp_neg(self) -> f64 {
        match self {
            ExtReal::Finite(v) => (-v).exp(),
            ExtReal::Inf => 0.0,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            ExtReal::Finite(v)
        } else {
            ExtReal::Inf
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Inf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: f64) -> ExtReal {
        match self {
            ExtReal::Finite(a) => ExtReal::Finite(a + rhs),
            ExtReal::Inf => ExtReal::Inf,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => serializer.serialize_f64(*v),
            ExtReal::Inf => serializer.serialize_str("inf"),
        }
    }
}

struct ExtRealVisitor;

impl Visitor<'_> for ExtRealVisitor {
    type Value = ExtReal;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a finite number or the string \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
        if v.is_finite() {
            Ok(ExtReal::Finite(v))
        } else if v > 0.0 {
            Ok(ExtReal::Inf)
        } else {
            Err(E::custom("negative infinity is not representable"))
        }
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
        Ok(ExtReal::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
        Ok(ExtReal::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, s: &str) -> Result<ExtReal, E> {
        match s {
            "inf" | "Inf" | "Infinity" | "+inf" => Ok(ExtReal::Inf),
            _ => Err(E::custom(format!(
                "unrecognized extended-real literal {s:?}"
            ))),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<ExtReal, D::Error> {
        deserializer.deserialize_any(ExtRealVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_order() {
        let a = ExtReal::finite(1.5);
        let b = ExtReal::finite(-2.0);
        assert_eq!(a + b, ExtReal::Finite(-0.5));
        assert_eq!(a + ExtReal::Inf, ExtReal::Inf);
        assert_eq!(ExtReal::Inf + ExtReal::Inf, ExtReal::Inf);
        assert_eq!(a.total_cmp(&ExtReal::Inf), Ordering::Less);
        assert_eq!(ExtReal::Inf.total_cmp(&ExtReal::Inf), Ordering::Equal);
        assert_eq!(a.max(ExtReal::Inf), ExtReal::Inf);
        assert_eq!(a.min(b), b);
    }

    #[test]
    fn exp_neg_of_inf_is_zero() {
        assert_eq!(ExtReal::Inf.exp_neg(), 0.0);
        assert!((ExtReal::finite(0.0).exp_neg() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip() {
        let vals = vec![ExtReal::finite(2.0), ExtReal::Inf, ExtReal::finite(-0.5)];
        let s = serde_json::to_string(&vals).unwrap();
        assert_eq!(s, "[2.0,\"inf\",-0.5]");
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vals);
        let from_int: Vec<ExtReal> = serde_json::from_str("[1, \"inf\"]").unwrap();
        assert_eq!(from_int, vec![ExtReal::finite(1.0), ExtReal::Inf]);
    }
}
