use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact nonnegative count. Serializes as a decimal string.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactCount(BigUint);

impl ExactCount {
    pub fn new(value: BigUint) -> Self {
        ExactCount(value)
    }

    pub fn zero() -> Self {
        ExactCount(BigUint::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.0.clone())
    }

    /// Fails on negative input.
    pub fn try_from_bigint(v: BigInt) -> Result<Self> {
        v.to_biguint()
            .map(ExactCount)
            .ok_or_else(|| Error::NegativeCount(v.to_string()))
    }
}

impl From<u64> for ExactCount {
    fn from(v: u64) -> Self {
        ExactCount(v.into())
    }
}

impl From<u128> for ExactCount {
    fn from(v: u128) -> Self {
        ExactCount(v.into())
    }
}

impl From<BigUint> for ExactCount {
    fn from(v: BigUint) -> Self {
        ExactCount(v)
    }
}

impl Add for ExactCount {
    type Output = ExactCount;

    fn add(self, rhs: Self) -> Self {
        ExactCount(self.0 + rhs.0)
    }
}

impl std::iter::Sum for ExactCount {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExactCount::zero(), Add::add)
    }
}

impl PartialEq<u64> for ExactCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl fmt::Display for ExactCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for ExactCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for ExactCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<BigUint>()
            .map(ExactCount)
            .map_err(|_| Error::Parse(format!("bad count {s:?}")))
    }
}

impl Serialize for ExactCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ExactCount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_string_json() {
        let big: ExactCount = "123456789012345678901234567890".parse().unwrap();
        let json = serde_json::to_string(&big).unwrap();
        assert_eq!(json, "\"123456789012345678901234567890\"");
        assert_eq!(serde_json::from_str::<ExactCount>(&json).unwrap(), big);
        assert!(serde_json::from_str::<ExactCount>("\"-1\"").is_err());
    }

    #[test]
    fn negative_bigint_rejected() {
        assert!(ExactCount::try_from_bigint(BigInt::from(-3)).is_err());
        assert_eq!(ExactCount::try_from_bigint(BigInt::from(3)).unwrap(), 3u64);
    }
}
