//! Extended non-negative reals and p-norm exponents.
//!
//! Distances take values in `[0, ∞]`. Infinity is a first-class value, not a
//! sentinel: it absorbs addition, dominates comparisons, and p-th powers of
//! infinity stay infinite.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A value in `[0, ∞]`. Never NaN, never negative.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps a non-negative value. NaN and negatives are rejected.
    pub fn new(value: f64) -> Result<ExtReal> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "extended real must be in [0, inf], got {value}"
            )));
        }
        // normalize -0.0 so equality and ordering are bitwise-stable
        Ok(ExtReal(value + 0.0))
    }

    /// `new` for values known non-negative by construction.
    pub(crate) fn from_nonneg(value: f64) -> ExtReal {
        debug_assert!(!value.is_nan() && value >= 0.0);
        ExtReal(value + 0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        ExtReal(self.0.min(other.0))
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        ExtReal(self.0.max(other.0))
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // no NaN by invariant, so partial_cmp always succeeds
        self.0.partial_cmp(&other.0).unwrap()
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }
}

impl Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The exponent of a Wasserstein distance or p-norm: a real in `[1, 64]` or ∞.
///
/// Finite exponents above 64 are rejected outright: `d^p` degenerates in
/// double precision long before that, and every result of interest concerns
/// small `p` or the bottleneck case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

pub const MAX_FINITE_EXPONENT: f64 = 64.0;

impl PNorm {
    pub const ONE: PNorm = PNorm::Finite(1.0);
    pub const TWO: PNorm = PNorm::Finite(2.0);

    pub fn new(p: f64) -> Result<PNorm> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(format!("p must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(PNorm::Infinity);
        }
        if p > MAX_FINITE_EXPONENT {
            return Err(Error::InvalidExponent(format!(
                "finite p is limited to {MAX_FINITE_EXPONENT} (use inf beyond), got {p}"
            )));
        }
        Ok(PNorm::Finite(p))
    }

    /// Parses `"inf"` or a decimal literal.
    pub fn parse(text: &str) -> Result<PNorm> {
        match text.trim() {
            "inf" | "infinity" | "∞" => Ok(PNorm::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidExponent(format!("cannot parse p `{other}`")))?;
                PNorm::new(p)
            }
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PNorm::Infinity)
    }

    /// `d^p`; identity for p = ∞ callers must not rely on.
    pub fn pow(self, d: ExtReal) -> ExtReal {
        match self {
            PNorm::Infinity => d,
            PNorm::Finite(p) => {
                if d.is_infinite() {
                    ExtReal::INFINITY
                } else if p == 1.0 {
                    d
                } else if p == 2.0 {
                    ExtReal::from_nonneg(d.0 * d.0)
                } else {
                    ExtReal::from_nonneg(d.0.powf(p))
                }
            }
        }
    }

    /// `s^(1/p)`; identity for p = ∞.
    pub fn root(self, s: ExtReal) -> ExtReal {
        match self {
            PNorm::Infinity => s,
            PNorm::Finite(p) => {
                if s.is_infinite() {
                    ExtReal::INFINITY
                } else if p == 1.0 {
                    s
                } else if p == 2.0 {
                    ExtReal::from_nonneg(s.0.sqrt())
                } else {
                    ExtReal::from_nonneg(s.0.powf(1.0 / p))
                }
            }
        }
    }

    /// p-norm of a weighted sequence of values; weights are multiplicities.
    pub fn weighted_norm<I: IntoIterator<Item = (ExtReal, u64)>>(self, items: I) -> ExtReal {
        match self {
            PNorm::Infinity => items
                .into_iter()
                .filter(|&(_, m)| m > 0)
                .map(|(d, _)| d)
                .fold(ExtReal::ZERO, ExtReal::max),
            PNorm::Finite(_) => {
                // summing in sorted order makes the result independent of
                // the presentation of the multiset (and more accurate)
                let mut terms: Vec<(ExtReal, u64)> =
                    items.into_iter().filter(|&(_, m)| m > 0).collect();
                if terms.iter().any(|(d, _)| d.is_infinite()) {
                    return ExtReal::INFINITY;
                }
                terms.sort_unstable();
                let mut acc = ExtReal::ZERO;
                for (d, m) in terms {
                    acc = acc + ExtReal::from_nonneg(self.pow(d).0 * m as f64);
                }
                self.root(acc)
            }
        }
    }

    /// p-norm of a plain sequence.
    pub fn norm<I: IntoIterator<Item = ExtReal>>(self, items: I) -> ExtReal {
        self.weighted_norm(items.into_iter().map(|d| (d, 1)))
    }

    /// p-norm of a pair (the two-argument case comes up constantly).
    pub fn norm2(self, a: ExtReal, b: ExtReal) -> ExtReal {
        self.norm([a, b])
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::Infinity => write!(f, "inf"),
            PNorm::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for PNorm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PNorm::Infinity => serializer.serialize_str("inf"),
            PNorm::Finite(p) => serializer.serialize_f64(*p),
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match &v {
            serde_json::Value::String(s) => PNorm::parse(s).map_err(D::Error::custom),
            serde_json::Value::Number(n) => {
                let p = n.as_f64().ok_or_else(|| D::Error::custom("bad number"))?;
                PNorm::new(p).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom("expected number or \"inf\"")),
        }
    }
}
