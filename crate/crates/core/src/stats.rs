//! Descent, peak, valley and spike statistics.
//!
//! Positions are 1-based: position `i` compares the values at `i` and `i+1`.
//! Peaks and valleys are interior extrema, so positions `1` and `n` are never
//! spikes. The set-level functions ([`peaks_of`], [`valleys_of`],
//! [`spikes_of`]) read the same information off a descent set alone.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::perm::{Permutation, SignedPermutation};
use crate::set::PositionSet;

/// Sequences with a descent set. Signed values compare as plain integers.
pub trait Descents {
    fn descent_set(&self) -> PositionSet;
}

impl Descents for Permutation {
    fn descent_set(&self) -> PositionSet {
        descents_of_slice(self.values())
    }
}

impl Descents for SignedPermutation {
    fn descent_set(&self) -> PositionSet {
        descents_of_slice(self.values())
    }
}

pub fn descent_set<P: Descents + ?Sized>(p: &P) -> PositionSet {
    p.descent_set()
}

pub(crate) fn descents_of_slice<T: PartialOrd>(values: &[T]) -> PositionSet {
    let mut bits = 0u64;
    for (i, w) in values.windows(2).enumerate() {
        if w[0] > w[1] {
            bits |= 1 << (i + 1);
        }
    }
    PositionSet::from_bits(bits)
}

pub fn peak_set(p: &Permutation) -> PositionSet {
    extrema(p.values(), |a, b, c| a < b && b > c)
}

pub fn valley_set(p: &Permutation) -> PositionSet {
    extrema(p.values(), |a, b, c| a > b && b < c)
}

pub fn spike_set(p: &Permutation) -> PositionSet {
    spikes_of_slice(p.values())
}

pub(crate) fn spikes_of_slice(values: &[u8]) -> PositionSet {
    extrema(values, |a, b, c| (a < b) == (b > c))
}

fn extrema(values: &[u8], test: impl Fn(u8, u8, u8) -> bool) -> PositionSet {
    let mut bits = 0u64;
    for (i, w) in values.windows(3).enumerate() {
        if test(w[0], w[1], w[2]) {
            bits |= 1 << (i + 2);
        }
    }
    PositionSet::from_bits(bits)
}

/// Mask of the positions `2..=n-1`.
fn interior(n: usize) -> u64 {
    if n < 3 {
        0
    } else {
        (u64::MAX >> (64 - (n - 2))) << 2
    }
}

/// Peaks of a descent set `s` of an `n`-permutation: `i ∈ s`, `i-1 ∉ s`, `i > 1`.
pub fn peaks_of(s: PositionSet, n: usize) -> PositionSet {
    PositionSet::from_bits(s.bits() & !(s.bits() << 1) & interior(n))
}

/// Valleys of a descent set `s`: `i ∉ s`, `i-1 ∈ s`, `1 < i ≤ n-1`.
pub fn valleys_of(s: PositionSet, n: usize) -> PositionSet {
    PositionSet::from_bits(!s.bits() & (s.bits() << 1) & interior(n))
}

pub fn spikes_of(s: PositionSet, n: usize) -> PositionSet {
    PositionSet::from_bits((s.bits() ^ (s.bits() << 1)) & interior(n))
}

/// A candidate peak set: no position 1 and no two consecutive positions.
pub fn is_admissible(i: PositionSet) -> bool {
    !i.contains(1) && i.bits() & (i.bits() << 1) == 0
}

pub(crate) fn require_admissible(i: PositionSet) -> Result<()> {
    if is_admissible(i) {
        Ok(())
    } else {
        Err(Error::NotAdmissible { set: i.to_string() })
    }
}

/// The set of the first `i` values of `p`.
pub fn initial_set(p: &Permutation, i: usize) -> Result<BTreeSet<usize>> {
    if i == 0 || i > p.len() {
        return Err(Error::IndexOutOfRange { position: i, n: p.len() });
    }
    Ok(p.values()[..i].iter().map(|&v| v as usize).collect())
}


/// All `2^n` sign patterns applied to `p`, starting with `p` itself.
pub fn markings(p: &Permutation, limits: &Limits) -> Result<Markings> {
    if p.len() > limits.cap() {
        return Err(Error::CapExceeded {
            n: p.len(),
            cap: limits.cap(),
        });
    }
    Ok(Markings {
        base: p.values().iter().map(|&v| v as i8).collect(),
        next: 0,
        end: 1u64 << p.len(),
    })
}

pub struct Markings {
    base: Vec<i8>,
    next: u64,
    end: u64,
}

impl Iterator for Markings {
    type Item = SignedPermutation;

    fn next(&mut self) -> Option<SignedPermutation> {
        if self.next == self.end {
            return None;
        }
        let signs = self.next;
        self.next += 1;
        let values = self
            .base
            .iter()
            .enumerate()
            .map(|(j, &v)| if signs >> j & 1 == 1 { -v } else { v })
            .collect();
        Some(SignedPermutation::from_raw(values))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Markings {}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn set(s: &str) -> PositionSet {
        s.parse().unwrap()
    }

    #[test]
    fn descent_examples() {
        assert_eq!(perm("24315678").descent_set(), set("2,3"));
        assert_eq!(perm("123456").descent_set(), PositionSet::EMPTY);
        let signed: SignedPermutation = "3,-1,2".parse().unwrap();
        assert_eq!(signed.descent_set(), set("1"));
    }

    #[test]
    fn peak_valley_examples() {
        let p = perm("34215678");
        assert_eq!(peak_set(&p), set("2"));
        assert_eq!(valley_set(&p), set("4"));
        let q = perm("21435");
        assert_eq!(peak_set(&q), set("3"));
        assert_eq!(valley_set(&q), set("2,4"));
        let id = perm("12345");
        assert!(peak_set(&id).is_empty() && valley_set(&id).is_empty());
        let one = perm("1");
        assert!(descent_set(&one).is_empty() && spike_set(&one).is_empty());
    }

    #[test]
    fn set_level_examples() {
        let s = set("2,3");
        assert_eq!(peaks_of(s, 8), set("2"));
        assert_eq!(valleys_of(s, 8), set("4"));
        assert_eq!(spikes_of(s, 8), set("2,4"));
        let e = PositionSet::EMPTY;
        assert!(peaks_of(e, 8).is_empty() && valleys_of(e, 8).is_empty());
        let one = set("1");
        assert_eq!(peaks_of(one, 5), PositionSet::EMPTY);
        assert_eq!(valleys_of(one, 5), set("2"));
        assert_eq!(spikes_of(one, 5), set("2"));
        // a descent at n-1 cannot create a valley at n
        assert_eq!(valleys_of(set("7"), 8), PositionSet::EMPTY);
        assert_eq!(peaks_of(set("7"), 8), set("7"));
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(set("2,4")));
        assert!(!is_admissible(set("2,3")));
        assert!(!is_admissible(set("1,3")));
        assert!(is_admissible(PositionSet::EMPTY));
    }

    #[test]
    fn initial_sets() {
        let p = perm("24315678");
        assert_eq!(initial_set(&p, 4).unwrap(), (1..=4).collect());
        assert_eq!(initial_set(&p, 8).unwrap(), (1..=8).collect());
        let q = perm("57612348");
        assert_eq!(initial_set(&q, 4).unwrap(), [1, 5, 6, 7].into_iter().collect());
        assert!(initial_set(&q, 0).is_err());
        assert!(initial_set(&q, 9).is_err());
    }

    #[test]
    fn marking_examples() {
        let lim = Limits::default();
        let one: Vec<_> = markings(&perm("1"), &lim).unwrap().collect();
        assert_eq!(one.len(), 2);
        let two: Vec<String> = markings(&perm("12"), &lim)
            .unwrap()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(two, vec!["1,2", "-1,2", "1,-2", "-1,-2"]);
        for n in 1..=10 {
            let p = Permutation::identity(n).unwrap();
            let all: Vec<_> = markings(&p, &lim).unwrap().collect();
            assert_eq!(all.len(), 1 << n);
            let distinct: std::collections::HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            assert_eq!(all.iter().filter(|s| s.values().iter().all(|&v| v > 0)).count(), 1);
            assert!(all.iter().all(|s| s.unsigned() == p));
        }
        let big = Permutation::identity(30).unwrap();
        assert!(markings(&big, &lim).is_err());
    }
}
