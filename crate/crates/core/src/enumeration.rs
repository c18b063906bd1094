//! Descent classes `D(S,n)` and peak classes `P(I,n)`.
//!
//! Enumeration is a pruned backtracking search over one-line notation in
//! lexicographic order. A partial prefix is dropped as soon as the pattern it
//! has already fixed contradicts the target set. Counting descent classes
//! does not enumerate at all; see [`descent_count`].

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::count::ExactCount;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::perm::{Permutation, MAX_LEN};
use crate::scalar::{binomial, Scalar};
use crate::set::PositionSet;
use crate::stats::is_admissible;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentClassQuery {
    pub set: PositionSet,
    pub n: usize,
}

impl DescentClassQuery {
    pub fn new(set: PositionSet, n: usize) -> Result<Self> {
        check_size(set, n)?;
        Ok(DescentClassQuery { set, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeakClassQuery {
    pub set: PositionSet,
    pub n: usize,
}

impl PeakClassQuery {
    pub fn new(set: PositionSet, n: usize) -> Result<Self> {
        check_size(set, n)?;
        Ok(PeakClassQuery { set, n })
    }
}

fn check_size(set: PositionSet, n: usize) -> Result<()> {
    if n == 0 || n > MAX_LEN {
        return Err(Error::SizeTooSmall { n, max: set.max() });
    }
    set.check_bound(n)
}

/// Either kind of class, for the partitioned counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassQuery {
    Descent(DescentClassQuery),
    Peak(PeakClassQuery),
}

impl ClassQuery {
    pub fn n(&self) -> usize {
        match self {
            ClassQuery::Descent(q) => q.n,
            ClassQuery::Peak(q) => q.n,
        }
    }
}

/// Decides whether the newest entry of a prefix is still consistent.
pub(crate) trait PrefixRule {
    /// `prefix` has just grown by one entry; `remaining` holds the values not
    /// yet placed and `n` is the full length being built.
    fn admits(&self, prefix: &[u8], remaining: u128, n: usize) -> bool;
}

/// Pins the descent/ascent at every decided position to a descent set.
#[derive(Clone, Copy)]
pub(crate) struct DescentRule(pub PositionSet);

impl PrefixRule for DescentRule {
    #[inline]
    fn admits(&self, prefix: &[u8], remaining: u128, n: usize) -> bool {
        let len = prefix.len();
        let last = prefix[len - 1];
        if len >= 2 && (prefix[len - 2] > last) != self.0.contains(len - 1) {
            return false;
        }
        if len < n {
            let below = remaining & ((1u128 << last) - 1);
            if self.0.contains(len) {
                below != 0
            } else {
                remaining & !below != 0
            }
        } else {
            true
        }
    }
}

/// Pins the peak status of every decided interior position.
#[derive(Clone, Copy)]
pub(crate) struct PeakRule(pub PositionSet);

impl PrefixRule for PeakRule {
    #[inline]
    fn admits(&self, prefix: &[u8], _remaining: u128, _n: usize) -> bool {
        let len = prefix.len();
        if len < 3 {
            return true;
        }
        let (a, b, c) = (prefix[len - 3], prefix[len - 2], prefix[len - 1]);
        (a < b && b > c) == self.0.contains(len - 1)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum WalkState {
    Fresh,
    Running,
    FixedLeaf,
    Done,
}

/// Lexicographic backtracking over arrangements of a value set.
///
/// The search extends `prefix` with values from `universe`, stopping at
/// length `stop`; `rule` sees every extension together with the total length
/// `n` (which may exceed `stop` when only prefixes are wanted).
pub(crate) struct Walker<R> {
    rule: R,
    universe: u128,
    n: usize,
    stop: usize,
    prefix: Vec<u8>,
    used: u128,
    stack: Vec<u128>,
    at_leaf: bool,
    state: WalkState,
}

impl<R: PrefixRule> Walker<R> {
    pub(crate) fn new(rule: R, universe: u128, n: usize, stop: usize, prefix: &[u8]) -> Self {
        let mut used = 0u128;
        let mut state = WalkState::Fresh;
        for (k, &v) in prefix.iter().enumerate() {
            let bit = 1u128 << v;
            if universe & bit == 0 || used & bit != 0 {
                state = WalkState::Done;
                break;
            }
            used |= bit;
            if !rule.admits(&prefix[..=k], universe & !used, n) {
                state = WalkState::Done;
                break;
            }
        }
        Walker {
            rule,
            universe,
            n,
            stop,
            prefix: prefix.to_vec(),
            used,
            stack: Vec::with_capacity(stop),
            at_leaf: false,
            state,
        }
    }

    /// All arrangements of `1..=n`.
    pub(crate) fn full(rule: R, n: usize) -> Self {
        Self::new(rule, full_universe(n), n, n, &[])
    }

    pub(crate) fn next_leaf(&mut self) -> Option<&[u8]> {
        match self.state {
            WalkState::Done => return None,
            WalkState::FixedLeaf => {
                self.state = WalkState::Done;
                return None;
            }
            WalkState::Fresh => {
                if self.prefix.len() >= self.stop {
                    self.state = WalkState::FixedLeaf;
                    return Some(&self.prefix);
                }
                self.state = WalkState::Running;
                self.stack.push(self.universe & !self.used);
            }
            WalkState::Running => {
                if self.at_leaf {
                    self.at_leaf = false;
                    self.pop_value();
                }
            }
        }
        loop {
            let Some(top) = self.stack.last_mut() else {
                self.state = WalkState::Done;
                return None;
            };
            if *top == 0 {
                self.stack.pop();
                if self.stack.is_empty() {
                    self.state = WalkState::Done;
                    return None;
                }
                self.pop_value();
                continue;
            }
            let v = top.trailing_zeros() as u8;
            *top &= *top - 1;
            self.prefix.push(v);
            self.used |= 1u128 << v;
            if !self
                .rule
                .admits(&self.prefix, self.universe & !self.used, self.n)
            {
                self.pop_value();
                continue;
            }
            if self.prefix.len() == self.stop {
                self.at_leaf = true;
                return Some(&self.prefix);
            }
            self.stack.push(self.universe & !self.used);
        }
    }

    fn pop_value(&mut self) {
        if let Some(v) = self.prefix.pop() {
            self.used &= !(1u128 << v);
        }
    }

    pub(crate) fn count_leaves(mut self) -> u64 {
        let mut c = 0;
        while self.next_leaf().is_some() {
            c += 1;
        }
        c
    }

    pub(crate) fn for_each_leaf(mut self, mut f: impl FnMut(&[u8])) {
        while let Some(leaf) = self.next_leaf() {
            f(leaf);
        }
    }
}

pub(crate) fn full_universe(n: usize) -> u128 {
    ((1u128 << n) - 1) << 1
}

/// A stream of permutations produced by a pruned search.
pub struct ClassIter<R> {
    walker: Walker<R>,
}

impl<R: PrefixRule> Iterator for ClassIter<R> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        self.walker
            .next_leaf()
            .map(|leaf| Permutation::from_raw(leaf.to_vec()))
    }
}

pub struct DescentClass(ClassIter<DescentRule>);

impl Iterator for DescentClass {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        self.0.next()
    }
}

pub struct PeakClass(Option<ClassIter<PeakRule>>);

impl Iterator for PeakClass {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        self.0.as_mut()?.next()
    }
}

/// Every `σ ∈ 𝔖_n` with descent set exactly `S`, in lexicographic order.
pub fn enumerate_descent_class(q: DescentClassQuery, limits: &Limits) -> Result<DescentClass> {
    check_size(q.set, q.n)?;
    limits.check(q.n)?;
    Ok(DescentClass(ClassIter {
        walker: Walker::full(DescentRule(q.set), q.n),
    }))
}

/// Every `σ ∈ 𝔖_n` with peak set exactly `I`, in lexicographic order. Empty
/// when `I` is not admissible.
pub fn enumerate_peak_class(q: PeakClassQuery, limits: &Limits) -> Result<PeakClass> {
    check_size(q.set, q.n)?;
    limits.check(q.n)?;
    if !is_admissible(q.set) {
        return Ok(PeakClass(None));
    }
    Ok(PeakClass(Some(ClassIter {
        walker: Walker::full(PeakRule(q.set), q.n),
    })))
}

/// `d(S,n)` in any scalar type, without enumeration.
///
/// The signed subset sum `Σ_{T⊆S} (-1)^{|S∖T|} n!/(t₁!(t₂-t₁)!⋯(n-t_r)!)` is
/// evaluated as a sum over chains `0 = s₀ < … < s_{k+1} = n` through the
/// members of `S`: each multinomial factors into binomials `C(s_j, s_i)` along
/// the chain, and every skipped member contributes a factor `-1`.
pub fn descent_count<T: Scalar>(set: PositionSet, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::SizeTooSmall { n, max: set.max() });
    }
    set.check_bound(n)?;
    let points: Vec<i64> = std::iter::once(0)
        .chain(set.iter().map(|p| p as i64))
        .chain(std::iter::once(n as i64))
        .collect();
    let mut chain: Vec<T> = Vec::with_capacity(points.len());
    chain.push(T::one());
    for j in 1..points.len() {
        let mut acc = T::zero();
        for i in 0..j {
            let term = binomial::<T>(points[j], points[i] as usize) * chain[i].clone();
            if (j - i - 1) % 2 == 0 {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
        }
        chain.push(acc);
    }
    Ok(chain.pop().expect("chain always has an endpoint"))
}

/// `d(S,n) = |D(S,n)|`, exact, with no cap on `n`.
pub fn count_descent_class(set: PositionSet, n: usize) -> Result<ExactCount> {
    ExactCount::try_from_bigint(descent_count::<BigInt>(set, n)?)
}

/// `|D(S,n)|` or `|P(I,n)|` by walking the search tree on one thread.
pub fn serial_count(query: ClassQuery, limits: &Limits) -> Result<ExactCount> {
    parallel_count(query, 0, limits)
}

/// `|D(S,n)|` or `|P(I,n)|` by enumeration, split across the rayon pool.
///
/// Every admissible prefix of length `depth` becomes one independent job;
/// the job totals are summed. The result does not depend on `depth`.
pub fn parallel_count(query: ClassQuery, depth: usize, limits: &Limits) -> Result<ExactCount> {
    let n = query.n();
    if depth > n {
        return Err(Error::DepthTooLarge { depth, n });
    }
    let total = match query {
        ClassQuery::Descent(q) => {
            check_size(q.set, n)?;
            limits.check(n)?;
            partitioned(DescentRule(q.set), n, depth)
        }
        ClassQuery::Peak(q) => {
            check_size(q.set, n)?;
            limits.check(n)?;
            if !is_admissible(q.set) {
                0
            } else {
                partitioned(PeakRule(q.set), n, depth)
            }
        }
    };
    Ok(ExactCount::from(total))
}

fn partitioned<R: PrefixRule + Copy + Send + Sync>(rule: R, n: usize, depth: usize) -> u128 {
    if depth == 0 {
        return Walker::full(rule, n).count_leaves() as u128;
    }
    let mut prefixes = Vec::new();
    Walker::new(rule, full_universe(n), n, depth, &[]).for_each_leaf(|p| prefixes.push(p.to_vec()));
    prefixes
        .par_iter()
        .map(|p| Walker::new(rule, full_universe(n), n, n, p).count_leaves() as u128)
        .sum()
}

/// `p(I,n) = 2^{|I|+1-n} |P(I,n)|`, counted by enumeration.
///
/// Zero when `I` is not admissible. A nonzero remainder is reported as an
/// error rather than rounded.
pub fn peak_poly_value(set: PositionSet, n: usize, limits: &Limits) -> Result<ExactCount> {
    check_size(set, n)?;
    limits.check(n)?;
    if !is_admissible(set) {
        return Ok(ExactCount::zero());
    }
    let q = ClassQuery::Peak(PeakClassQuery { set, n });
    let raw = parallel_count(q, n.min(2), limits)?.into_inner();
    let exponent = n - set.len() - 1;
    let divisor = num_bigint::BigUint::from(1u8) << exponent;
    if &raw % &divisor != num_bigint::BigUint::from(0u8) {
        return Err(Error::NotDivisible {
            set: set.to_string(),
            n,
            count: raw.to_string(),
            exponent,
        });
    }
    Ok(ExactCount::new(raw / divisor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{peak_set, Descents};

    fn set(s: &str) -> PositionSet {
        s.parse().unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    fn descent_class(s: &str, n: usize) -> Vec<Permutation> {
        enumerate_descent_class(DescentClassQuery::new(set(s), n).unwrap(), &lim())
            .unwrap()
            .collect()
    }

    fn peak_class(s: &str, n: usize) -> Vec<String> {
        enumerate_peak_class(PeakClassQuery::new(set(s), n).unwrap(), &lim())
            .unwrap()
            .map(|p| p.to_string())
            .collect()
    }

    #[test]
    fn descent_class_examples() {
        let with_low_prefix: Vec<String> = descent_class("2,3", 8)
            .into_iter()
            .filter(|p| p.values()[..4].iter().all(|&v| v <= 4))
            .map(|p| p.to_string())
            .collect();
        assert_eq!(with_low_prefix, vec!["14325678", "24315678", "34215678"]);
        for n in 1..8 {
            let all = descent_class("", n);
            assert_eq!(all, vec![Permutation::identity(n).unwrap()]);
        }
        assert_eq!(descent_class("1", 4).len(), 3);
    }

    #[test]
    fn peak_class_examples() {
        assert_eq!(peak_class("2", 3), vec!["132", "231"]);
        assert_eq!(peak_class("", 3), vec!["123", "213", "312", "321"]);
        for n in 2..7 {
            assert!(peak_class("1", n).is_empty());
        }
        assert!(peak_class("2,3", 6).is_empty());
    }

    #[test]
    fn streams_are_exact_sorted_and_unique() {
        for n in 1..=6 {
            for s in PositionSet::all_below(n) {
                let class = enumerate_descent_class(DescentClassQuery { set: s, n }, &lim())
                    .unwrap()
                    .collect::<Vec<_>>();
                assert!(class.windows(2).all(|w| w[0] < w[1]));
                assert!(class.iter().all(|p| p.descent_set() == s));
                let peaks = enumerate_peak_class(PeakClassQuery { set: s, n }, &lim())
                    .unwrap()
                    .collect::<Vec<_>>();
                assert!(peaks.windows(2).all(|w| w[0] < w[1]));
                assert!(peaks.iter().all(|p| peak_set(p) == s));
            }
        }
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(count_descent_class(set("2,3"), 8).unwrap(), 85);
        assert_eq!(count_descent_class(PositionSet::EMPTY, 10).unwrap(), 1);
        assert_eq!(count_descent_class(set("1"), 9).unwrap(), 8);
        assert_eq!(count_descent_class(PositionSet::EMPTY, 1).unwrap(), 1);
        assert!(count_descent_class(set("3"), 3).is_err());
        // alternating permutations of 10 (Euler zigzag number)
        let zigzag = PositionSet::new([1, 3, 5, 7, 9]).unwrap();
        assert_eq!(count_descent_class(zigzag, 10).unwrap(), 50521);
    }

    #[test]
    fn generic_counts_agree() {
        for n in 1..=10 {
            for s in PositionSet::all_below(n) {
                let big: BigInt = descent_count(s, n).unwrap();
                let small: i64 = descent_count(s, n).unwrap();
                assert_eq!(big, BigInt::from(small));
            }
        }
    }

    #[test]
    fn counts_beyond_the_cap_stay_exact() {
        let d = count_descent_class(PositionSet::EMPTY.with(1).unwrap(), 200).unwrap();
        assert_eq!(d, 199);
        let s = PositionSet::new([2, 3]).unwrap();
        // 3 + 8(n-4) + 7C(n-4,2) + 2C(n-4,3) at n = 40
        let c = |a: u64, k: u64| -> u64 { (0..k).fold(1, |acc, j| acc * (a - j) / (j + 1)) };
        let expected = 3 + 8 * 36 + 7 * c(36, 2) + 2 * c(36, 3);
        assert_eq!(count_descent_class(s, 40).unwrap(), expected);
    }

    #[test]
    fn peak_values() {
        assert_eq!(peak_poly_value(set("2"), 3, &lim()).unwrap(), 1);
        assert_eq!(peak_poly_value(PositionSet::EMPTY, 4, &lim()).unwrap(), 1);
        assert_eq!(peak_poly_value(set("2,4"), 5, &lim()).unwrap(), 4);
        assert_eq!(peak_poly_value(set("2,4"), 6, &lim()).unwrap(), 12);
        assert_eq!(peak_poly_value(set("2,3"), 6, &lim()).unwrap(), 0);
        assert_eq!(peak_poly_value(set("1"), 6, &lim()).unwrap(), 0);
        assert_eq!(peak_poly_value(PositionSet::EMPTY, 1, &lim()).unwrap(), 1);
        assert!(peak_poly_value(PositionSet::EMPTY, 13, &lim()).is_err());
    }

    #[test]
    fn partition_depths() {
        let q = ClassQuery::Descent(DescentClassQuery::new(set("2,3"), 8).unwrap());
        for depth in 0..=8 {
            assert_eq!(parallel_count(q, depth, &lim()).unwrap(), 85);
        }
        let p = ClassQuery::Peak(PeakClassQuery::new(set("2,4"), 8).unwrap());
        let serial = serial_count(p, &lim()).unwrap();
        assert_eq!(serial, 1408);
        assert_eq!(parallel_count(p, 2, &lim()).unwrap(), serial);
        assert!(parallel_count(p, 9, &lim()).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let tight = Limits::new(5).unwrap();
        let q = DescentClassQuery::new(set("1"), 6).unwrap();
        assert!(matches!(
            enumerate_descent_class(q, &tight),
            Err(Error::CapExceeded { n: 6, cap: 5 })
        ));
        assert!(DescentClassQuery::new(set("6"), 6).is_err());
    }
}
