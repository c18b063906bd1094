use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::set::MAX_POSITION;

/// Largest supported permutation length (positions of a descent set must fit
/// in a [`PositionSet`](crate::PositionSet)).
pub const MAX_LEN: usize = MAX_POSITION + 1;

/// A permutation of `[n]` in one-line notation, 1-based values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        check_values(values.iter().map(|&v| v as i64), values.len())?;
        Ok(Permutation(values))
    }

    pub fn from_slice(values: &[usize]) -> Result<Self> {
        check_values(values.iter().map(|&v| v as i64), values.len())?;
        Ok(Permutation(values.iter().map(|&v| v as u8).collect()))
    }

    /// Wraps values already known to form a permutation.
    pub(crate) fn from_raw(values: Vec<u8>) -> Self {
        debug_assert!(check_values(values.iter().map(|&v| v as i64), values.len()).is_ok());
        Permutation(values)
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_LEN {
            return Err(Error::InvalidPermutation {
                values: vec![],
                reason: "length must be in 1..=64",
            });
        }
        Ok(Permutation((1..=n as u8).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    /// The value at 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1] as usize
    }

    pub fn into_values(self) -> Vec<u8> {
        self.0
    }
}

/// A signed permutation: every value of `[n]` appears exactly once up to sign.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation(Vec<i8>);

impl SignedPermutation {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.contains(&0) {
            return Err(Error::InvalidPermutation {
                values: values.iter().map(|&v| v as i64).collect(),
                reason: "signed values must be nonzero",
            });
        }
        check_values(values.iter().map(|&v| (v as i64).abs()), values.len()).map_err(|_| {
            Error::InvalidPermutation {
                values: values.iter().map(|&v| v as i64).collect(),
                reason: "absolute values must be a permutation of 1..=n",
            }
        })?;
        Ok(SignedPermutation(values))
    }

    pub(crate) fn from_raw(values: Vec<i8>) -> Self {
        SignedPermutation(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    /// The permutation obtained by erasing all signs.
    pub fn unsigned(&self) -> Permutation {
        Permutation(self.0.iter().map(|v| v.unsigned_abs()).collect())
    }
}

fn check_values(values: impl Iterator<Item = i64>, n: usize) -> Result<()> {
    let collected: Vec<i64> = values.collect();
    let fail = |reason| Error::InvalidPermutation {
        values: collected.clone(),
        reason,
    };
    if n == 0 {
        return Err(fail("permutation must be nonempty"));
    }
    if n > MAX_LEN {
        return Err(fail("length exceeds 64"));
    }
    let mut seen = 0u128;
    for &v in &collected {
        if v < 1 || v as usize > n {
            return Err(fail("values must lie in 1..=n"));
        }
        if seen >> v & 1 == 1 {
            return Err(fail("repeated value"));
        }
        seen |= 1 << v;
    }
    Ok(())
}

impl fmt::Display for Permutation {
    /// Contiguous digits when `n ≤ 9`, comma-separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 9 {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Accepts `24315678` (digits, only for `n ≤ 9`) or `2,4,3,1,5,6,7,8`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad value {t:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            if s.len() > 9 {
                return Err(Error::Parse(format!(
                    "{s:?}: permutations longer than 9 must be comma-separated"
                )));
            }
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::from_slice(&values)
    }
}

impl FromStr for SignedPermutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i8>()
                    .map_err(|_| Error::Parse(format!("bad value {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SignedPermutation::new(values)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

impl Serialize for SignedPermutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for SignedPermutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i8>::deserialize(deserializer)?;
        SignedPermutation::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_permutations() {
        assert!(Permutation::from_slice(&[1, 1]).is_err());
        assert!(Permutation::from_slice(&[0, 1]).is_err());
        assert!(Permutation::from_slice(&[1, 3]).is_err());
        assert!(Permutation::from_slice(&[]).is_err());
        assert!(SignedPermutation::new(vec![1, -1]).is_err());
        assert!(SignedPermutation::new(vec![0, 1]).is_err());
        assert!(SignedPermutation::new(vec![2, -1]).is_ok());
    }

    #[test]
    fn both_input_styles() {
        let a: Permutation = "24315678".parse().unwrap();
        let b: Permutation = "2,4,3,1,5,6,7,8".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "24315678");
        assert!("1234567891".parse::<Permutation>().is_err());
        let long: Permutation = "10,9,8,7,6,5,4,3,2,1".parse().unwrap();
        assert_eq!(long.to_string(), "10,9,8,7,6,5,4,3,2,1");
        assert_eq!(long.to_string().parse::<Permutation>().unwrap(), long);
    }

    #[test]
    fn json_forms() {
        let p: Permutation = "312".parse().unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[3,1,2]");
        let s: SignedPermutation = "3,-1,2".parse().unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[3,-1,2]");
        assert_eq!(serde_json::from_str::<SignedPermutation>("[3,-1,2]").unwrap(), s);
        assert!(serde_json::from_str::<Permutation>("[3,3,2]").is_err());
    }
}
