use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest position a [`PositionSet`] can hold.
pub const MAX_POSITION: usize = 63;

/// A set of 1-based positions, stored as a bitmask (bit `i` is position `i`).
///
/// Externally it behaves like a sorted list: iteration, `Display` and the
/// JSON form all produce strictly increasing positions.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionSet(u64);

impl PositionSet {
    pub const EMPTY: PositionSet = PositionSet(0);

    pub fn new<I: IntoIterator<Item = usize>>(positions: I) -> Result<Self> {
        let mut bits = 0u64;
        for p in positions {
            if p == 0 || p > MAX_POSITION {
                return Err(Error::PositionOutOfRange { position: p });
            }
            bits |= 1 << p;
        }
        Ok(PositionSet(bits))
    }

    /// Builds a set from a raw mask. Bit 0 is ignored.
    pub const fn from_bits(bits: u64) -> Self {
        PositionSet(bits & !1)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The interval `[lo, hi]`, empty when `lo > hi`.
    pub fn interval(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Ok(Self::EMPTY);
        }
        Self::new(lo..=hi)
    }

    pub const fn contains(self, position: usize) -> bool {
        position <= MAX_POSITION && self.0 >> position & 1 == 1
    }

    pub fn insert(&mut self, position: usize) -> Result<()> {
        if position == 0 || position > MAX_POSITION {
            return Err(Error::PositionOutOfRange { position });
        }
        self.0 |= 1 << position;
        Ok(())
    }

    pub fn remove(&mut self, position: usize) {
        if position <= MAX_POSITION {
            self.0 &= !(1 << position);
        }
    }

    pub fn with(self, position: usize) -> Result<Self> {
        let mut s = self;
        s.insert(position)?;
        Ok(s)
    }

    pub fn without(self, position: usize) -> Self {
        let mut s = self;
        s.remove(position);
        s
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Largest member, with `max(∅) = 0`.
    pub const fn max(self) -> usize {
        if self.0 == 0 {
            0
        } else {
            63 - self.0.leading_zeros() as usize
        }
    }

    pub const fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub const fn union(self, other: Self) -> Self {
        PositionSet(self.0 | other.0)
    }

    pub const fn intersection(self, other: Self) -> Self {
        PositionSet(self.0 & other.0)
    }

    pub const fn difference(self, other: Self) -> Self {
        PositionSet(self.0 & !other.0)
    }

    pub const fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> Positions {
        Positions(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets, starting from the set itself and ending with `∅`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(self.0),
        }
    }

    /// All subsets of `{1, …, n-1}`, i.e. every candidate descent set of an
    /// `n`-permutation.
    pub fn all_below(n: usize) -> Subsets {
        let top = if n <= 1 {
            0
        } else {
            ((1u64 << (n - 1)) - 1) << 1
        };
        PositionSet(top).subsets()
    }

    /// Fails unless every member is a valid position of an `n`-permutation.
    pub fn check_bound(self, n: usize) -> Result<()> {
        if self.max() >= n {
            return Err(Error::SizeTooSmall { n, max: self.max() });
        }
        Ok(())
    }
}

pub struct Positions(u64);

impl Iterator for Positions {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl DoubleEndedIterator for Positions {
    fn next_back(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = 63 - self.0.leading_zeros() as usize;
        self.0 &= !(1 << p);
        Some(p)
    }
}

impl ExactSizeIterator for Positions {}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = PositionSet;

    fn next(&mut self) -> Option<PositionSet> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & self.mask)
        };
        Some(PositionSet(cur))
    }
}

impl IntoIterator for PositionSet {
    type Item = usize;
    type IntoIter = Positions;

    fn into_iter(self) -> Positions {
        self.iter()
    }
}

impl fmt::Display for PositionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for PositionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses comma-separated positions, optionally wrapped in braces. The empty
/// string, `{}` and `∅` all denote the empty set.
impl FromStr for PositionSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        if body.is_empty() || body == "∅" {
            return Ok(Self::EMPTY);
        }
        let positions = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad position {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(positions)
    }
}

impl Serialize for PositionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PositionSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(serde::de::Error::custom("positions must be strictly increasing"));
        }
        PositionSet::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: PositionSet = "2,4".parse().unwrap();
        assert_eq!(s.to_vec(), vec![2, 4]);
        assert_eq!(s.to_string(), "{2,4}");
        assert_eq!("{}".parse::<PositionSet>().unwrap(), PositionSet::EMPTY);
        assert_eq!("".parse::<PositionSet>().unwrap(), PositionSet::EMPTY);
        assert!("0".parse::<PositionSet>().is_err());
        assert!("64".parse::<PositionSet>().is_err());
        assert!("2,x".parse::<PositionSet>().is_err());
    }

    #[test]
    fn max_and_bounds() {
        assert_eq!(PositionSet::EMPTY.max(), 0);
        let s = PositionSet::new([3, 63]).unwrap();
        assert_eq!(s.max(), 63);
        assert_eq!(s.min(), Some(3));
        assert!(s.check_bound(63).is_err());
        assert!(s.check_bound(64).is_ok());
    }

    #[test]
    fn subsets_enumerate_power_set() {
        let s = PositionSet::new([2, 4, 7]).unwrap();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0], s);
        assert_eq!(*subs.last().unwrap(), PositionSet::EMPTY);
        assert!(subs.iter().all(|t| t.is_subset(s)));
        assert_eq!(PositionSet::EMPTY.subsets().count(), 1);
        assert_eq!(PositionSet::all_below(5).count(), 16);
        assert_eq!(PositionSet::all_below(1).count(), 1);
    }

    #[test]
    fn json_is_sorted_array() {
        let s = PositionSet::new([4, 2]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[2,4]");
        let back: PositionSet = serde_json::from_str("[2,4]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<PositionSet>("[4,2]").is_err());
    }
}
