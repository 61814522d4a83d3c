//! Coefficient groups ℤ, ℤ/mℤ and ℚ with their norms.
//!
//! Chains store raw [`Q`] values and delegate the group law to a
//! [`CoefficientGroup`]; [`CoefficientValue`] pairs the two for the public
//! API and for JSON.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, parse_rational, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientGroup {
    Integers,
    IntegersMod(u64),
    Rationals,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("coefficient groups differ: {0} and {1}")]
    GroupMismatch(CoefficientGroup, CoefficientGroup),
    #[error("{value} is not an element of {group}")]
    NotInGroup { group: CoefficientGroup, value: String },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("unknown group tag {0:?}")]
    UnknownGroup(String),
    #[error(transparent)]
    Parse(#[from] crate::exact::ParseRationalError),
}

impl fmt::Display for CoefficientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientGroup::Integers => write!(f, "Z"),
            CoefficientGroup::IntegersMod(m) => write!(f, "Z/{}Z", m),
            CoefficientGroup::Rationals => write!(f, "Q"),
        }
    }
}

impl CoefficientGroup {
    pub fn modulo(m: u64) -> Result<Self, CoeffError> {
        if m < 2 {
            return Err(CoeffError::InvalidModulus(m));
        }
        Ok(CoefficientGroup::IntegersMod(m))
    }

    /// Brings a raw value into canonical form, rejecting non-members.
    pub fn reduce(&self, v: &Q) -> Result<Q, CoeffError> {
        match self {
            CoefficientGroup::Rationals => Ok(v.clone()),
            CoefficientGroup::Integers => {
                if v.is_integer() {
                    Ok(v.clone())
                } else {
                    Err(CoeffError::NotInGroup { group: *self, value: format_rational(v) })
                }
            }
            CoefficientGroup::IntegersMod(m) => {
                if !v.is_integer() {
                    return Err(CoeffError::NotInGroup { group: *self, value: format_rational(v) });
                }
                Ok(Q::from_integer(v.to_integer().mod_floor(&BigInt::from(*m))))
            }
        }
    }

    fn canonical(&self, v: Q) -> Q {
        match self {
            CoefficientGroup::IntegersMod(m) => Q::from_integer(v.to_integer().mod_floor(&BigInt::from(*m))),
            _ => v,
        }
    }

    pub fn add(&self, a: &Q, b: &Q) -> Q {
        self.canonical(a + b)
    }

    pub fn neg(&self, a: &Q) -> Q {
        self.canonical(-a)
    }

    pub fn sub(&self, a: &Q, b: &Q) -> Q {
        self.canonical(a - b)
    }

    /// The ℤ-module action `n·a`.
    pub fn mul_int(&self, n: &BigInt, a: &Q) -> Q {
        self.canonical(a * Q::from_integer(n.clone()))
    }

    /// `|a|` for ℤ and ℚ; cyclic distance `min(r, m−r)` on ℤ/mℤ.
    pub fn norm(&self, a: &Q) -> Q {
        match self {
            CoefficientGroup::IntegersMod(m) => {
                let r = a.to_integer().mod_floor(&BigInt::from(*m));
                let other = BigInt::from(*m) - &r;
                Q::from_integer(if other < r { other } else { r })
            }
            _ => a.abs(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            CoefficientGroup::Integers => "Z",
            CoefficientGroup::IntegersMod(_) => "ZmodM",
            CoefficientGroup::Rationals => "Q",
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            CoefficientGroup::IntegersMod(m) => Some(*m),
            _ => None,
        }
    }

    pub fn from_tag(tag: &str, m: Option<u64>) -> Result<Self, CoeffError> {
        match tag {
            "Z" => Ok(CoefficientGroup::Integers),
            "Q" => Ok(CoefficientGroup::Rationals),
            "ZmodM" => CoefficientGroup::modulo(m.unwrap_or(0)),
            other => Err(CoeffError::UnknownGroup(other.to_string())),
        }
    }

    pub fn check_same(&self, other: &CoefficientGroup) -> Result<(), CoeffError> {
        if self == other {
            Ok(())
        } else {
            Err(CoeffError::GroupMismatch(*self, *other))
        }
    }
}

/// An element of a coefficient group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoefficientValue {
    group: CoefficientGroup,
    value: Q,
}

impl CoefficientValue {
    pub fn new(group: CoefficientGroup, value: Q) -> Result<Self, CoeffError> {
        let value = group.reduce(&value)?;
        Ok(CoefficientValue { group, value })
    }

    pub fn zero(group: CoefficientGroup) -> Self {
        CoefficientValue { group, value: Q::zero() }
    }

    pub fn from_int(group: CoefficientGroup, n: i64) -> Self {
        CoefficientValue { group, value: group.canonical(Q::from_integer(BigInt::from(n))) }
    }

    pub fn group(&self) -> CoefficientGroup {
        self.group
    }

    pub fn value(&self) -> &Q {
        &self.value
    }

    pub fn add(&self, other: &CoefficientValue) -> Result<CoefficientValue, CoeffError> {
        self.group.check_same(&other.group)?;
        Ok(CoefficientValue { group: self.group, value: self.group.add(&self.value, &other.value) })
    }

    pub fn neg(&self) -> CoefficientValue {
        CoefficientValue { group: self.group, value: self.group.neg(&self.value) }
    }

    pub fn mul_int(&self, n: &BigInt) -> CoefficientValue {
        CoefficientValue { group: self.group, value: self.group.mul_int(n, &self.value) }
    }

    pub fn norm(&self) -> Q {
        self.group.norm(&self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl fmt::Display for CoefficientValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", format_rational(&self.value), self.group)
    }
}

#[derive(Serialize, Deserialize)]
struct CoefficientJson {
    group: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    m: Option<u64>,
    value: String,
}

impl Serialize for CoefficientValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CoefficientJson {
            group: self.group.tag().to_string(),
            m: self.group.modulus(),
            value: format_rational(&self.value),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoefficientValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CoefficientJson::deserialize(d)?;
        let group = CoefficientGroup::from_tag(&raw.group, raw.m).map_err(serde::de::Error::custom)?;
        let value = parse_rational(&raw.value).map_err(serde::de::Error::custom)?;
        CoefficientValue::new(group, value).map_err(serde::de::Error::custom)
    }
}
