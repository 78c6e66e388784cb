//! Lebesgue exponents in `(0, ∞]`, scalar and mixed.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A single exponent. Infinity is its own variant so that `1/p` never has to
/// be derived from a huge float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else if p.is_finite() && p > 0.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!("exponent must lie in (0, inf], got {p}")))
        }
    }

    /// Shorthand for known-good literals; panics on invalid input.
    pub fn of(p: f64) -> Self {
        Self::new(p).expect("valid exponent")
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self.value() <= other.value() {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawExponent {
    Number(f64),
    Text(String),
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawExponent::deserialize(d)? {
            RawExponent::Number(p) => Exponent::new(p).map_err(serde::de::Error::custom),
            RawExponent::Text(t) => match t.trim() {
                "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
                other => other
                    .parse::<f64>()
                    .map_err(serde::de::Error::custom)
                    .and_then(|p| Exponent::new(p).map_err(serde::de::Error::custom)),
            },
        }
    }
}

/// A vector of exponents, one per axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MixedExponent(Vec<Exponent>);

impl MixedExponent {
    pub fn new(entries: Vec<Exponent>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("empty exponent vector".into()));
        }
        Ok(Self(entries))
    }

    /// `(p, …, p)` with `d` entries.
    pub fn scalar(p: Exponent, d: usize) -> Self {
        Self(vec![p; d.max(1)])
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&p| Exponent::new(p)).collect::<Result<_>>()?)
    }

    pub fn entries(&self) -> &[Exponent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> Exponent {
        self.0[k]
    }

    pub fn min(&self) -> Exponent {
        self.0.iter().copied().fold(Exponent::Infinite, Exponent::min)
    }

    /// `min(1, p_1, …, p_d)` as a number; the order of the quasi-triangle
    /// inequality.
    pub fn triangle_order(&self) -> f64 {
        self.min().value().min(1.0)
    }

    pub fn any_infinite(&self) -> bool {
        self.0.iter().any(|p| p.is_infinite())
    }

    /// Expands a one-entry vector to `d` entries; otherwise the length must match.
    pub fn broadcast(&self, d: usize) -> Result<Self> {
        match self.0.len() {
            n if n == d => Ok(self.clone()),
            1 => Ok(Self::scalar(self.0[0], d)),
            n => Err(Error::DimensionMismatch(format!(
                "exponent vector has {n} entries but {d} axes are reduced"
            ))),
        }
    }

    /// Concatenation `(p, q)`.
    pub fn concat(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(other.0.iter()).copied().collect())
    }
}

impl From<Exponent> for MixedExponent {
    fn from(p: Exponent) -> Self {
        Self(vec![p])
    }
}

impl<'de> Deserialize<'de> for MixedExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(Exponent),
            Many(Vec<Exponent>),
        }
        let entries = match Raw::deserialize(d)? {
            Raw::One(p) => vec![p],
            Raw::Many(v) => v,
        };
        MixedExponent::new(entries).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for MixedExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
