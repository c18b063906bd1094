//! Prefix flips and the spike-removing maps built from them.
//!
//! `fl(σ, i)` reverses the relative order of the first `i` values while
//! keeping their value set and leaving positions beyond `i` alone. It
//! complements the descents below `i`, so every peak below `i` becomes a
//! valley and vice versa. A permutation admits an `i⁺`-flip when `fl(σ, i)`
//! removes exactly the spike at `i`, and an `i⁻`-flip when `fl(σ, i-1)` does.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::set::PositionSet;
use crate::stats::{require_admissible, spike_set, spikes_of_slice};

/// Reverses the relative order of the first `i` entries in place.
pub(crate) fn flip_in_place(values: &mut [u8], i: usize) {
    if i < 2 {
        return;
    }
    let mut mask = 0u128;
    for &v in &values[..i] {
        mask |= 1 << v;
    }
    let mut sorted = [0u8; 64];
    let mut k = 0;
    while mask != 0 {
        sorted[k] = mask.trailing_zeros() as u8;
        mask &= mask - 1;
        k += 1;
    }
    for v in &mut values[..i] {
        let rank = sorted[..i].partition_point(|&s| s < *v);
        *v = sorted[i - 1 - rank];
    }
}

pub(crate) fn flipped(values: &[u8], i: usize) -> Vec<u8> {
    let mut out = values.to_vec();
    flip_in_place(&mut out, i);
    out
}

/// The involution `fl_i`.
pub fn fl(p: &Permutation, i: usize) -> Result<Permutation> {
    if i == 0 || i > p.len() {
        return Err(Error::IndexOutOfRange { position: i, n: p.len() });
    }
    Ok(Permutation::from_raw(flipped(p.values(), i)))
}

/// Which flips straighten out the spike at one position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipAdmission {
    pub position: usize,
    pub admits_plus: bool,
    pub admits_minus: bool,
}

impl FlipAdmission {
    pub fn admits(&self) -> bool {
        self.admits_plus || self.admits_minus
    }
}

/// One [`FlipAdmission`] per spike of a permutation, in increasing position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipProfile {
    pub permutation: Permutation,
    pub spikes: Vec<FlipAdmission>,
}

impl FlipProfile {
    pub fn of(p: &Permutation) -> Self {
        let spikes = spike_set(p)
            .iter()
            .map(|i| admission_unchecked(p.values(), i))
            .collect();
        FlipProfile {
            permutation: p.clone(),
            spikes,
        }
    }

    pub fn get(&self, position: usize) -> Option<&FlipAdmission> {
        self.spikes.iter().find(|a| a.position == position)
    }
}

pub(crate) fn admission_unchecked(values: &[u8], i: usize) -> FlipAdmission {
    let target = spikes_of_slice(values).without(i);
    let admits_plus = spikes_of_slice(&flipped(values, i)) == target;
    let admits_minus = spikes_of_slice(&flipped(values, i - 1)) == target;
    FlipAdmission {
        position: i,
        admits_plus,
        admits_minus,
    }
}

pub(crate) fn admits_any(values: &[u8], i: usize) -> bool {
    admission_unchecked(values, i).admits()
}

/// The `i⁺`/`i⁻` admission flags for a spike `i` of `p`.
///
/// At `i = 2` the minus branch applies `fl_1`, which is the identity, so only
/// a `2⁺`-flip can ever be admitted.
pub fn admits_flip(p: &Permutation, i: usize) -> Result<FlipAdmission> {
    if !spike_set(p).contains(i) {
        return Err(Error::NotASpike {
            position: i,
            perm: p.to_string(),
        });
    }
    Ok(admission_unchecked(p.values(), i))
}

pub(crate) fn psi_in_place(values: &mut [u8], i: usize) -> bool {
    let a = admission_unchecked(values, i);
    if a.admits_plus {
        flip_in_place(values, i);
    } else if a.admits_minus {
        flip_in_place(values, i - 1);
    } else {
        return false;
    }
    true
}

/// `Ψ_i`: `fl_i` when `p` admits an `i⁺`-flip, otherwise `fl_{i-1}`.
pub fn psi(p: &Permutation, i: usize) -> Result<Permutation> {
    let a = admits_flip(p, i)?;
    if !a.admits() {
        return Err(Error::FlipNotAdmitted {
            position: i,
            perm: p.to_string(),
        });
    }
    let mut values = p.values().to_vec();
    psi_in_place(&mut values, i);
    Ok(Permutation::from_raw(values))
}

/// `Ψ_J`: applies `Ψ_j` for every `j ∈ J`, in decreasing order of position.
///
/// The members of `J` must be spikes of `p`, pairwise at distance at least
/// two, and each admitted by `p`. Debug builds also apply the flips in
/// increasing order and assert that both orders agree.
pub fn psi_set(p: &Permutation, j: PositionSet) -> Result<Permutation> {
    if j.bits() & (j.bits() << 1) != 0 {
        return Err(Error::FlipsNotSeparated { set: j.to_string() });
    }
    for pos in j.iter() {
        if !admits_flip(p, pos)?.admits() {
            return Err(Error::FlipNotAdmitted {
                position: pos,
                perm: p.to_string(),
            });
        }
    }
    let order: Vec<usize> = j.iter().rev().collect();
    let values = psi_sequence(p, &order)?;
    if cfg!(debug_assertions) {
        let forward: Vec<usize> = j.iter().collect();
        debug_assert_eq!(
            psi_sequence(p, &forward).ok().as_ref(),
            Some(&values),
            "Ψ_J depends on application order for {p} and {j}"
        );
        debug_assert_eq!(spikes_of_slice(&values), spike_set(p).difference(j));
    }
    Ok(Permutation::from_raw(values))
}

fn psi_sequence(p: &Permutation, order: &[usize]) -> Result<Vec<u8>> {
    let mut values = p.values().to_vec();
    for &pos in order {
        if !spikes_of_slice(&values).contains(pos) || !psi_in_place(&mut values, pos) {
            return Err(Error::FlipNotAdmitted {
                position: pos,
                perm: Permutation::from_raw(values).to_string(),
            });
        }
    }
    Ok(values)
}

/// `S_I`: the descent set whose spikes are exactly `I`, alternating between
/// peaks and valleys with the rightmost spike a valley.
///
/// With `I = {i₁ < … < i_k}`, `i_j` is a peak iff `k - j` is odd. The set is
/// `[1, i₁-1]` when `i₁` is a valley, together with `[i_j, i_{j+1}-1]` for
/// every peak `i_j`.
pub fn canonical_descent_set(i: PositionSet) -> Result<PositionSet> {
    require_admissible(i)?;
    let members = i.to_vec();
    let k = members.len();
    let mut s = PositionSet::EMPTY;
    for (idx, &pos) in members.iter().enumerate() {
        let is_peak = (k - 1 - idx) % 2 == 1;
        if idx == 0 && !is_peak {
            s = s.union(PositionSet::interval(1, pos - 1)?);
        }
        if is_peak {
            // a peak is never last, so a following valley exists
            let next = members[idx + 1];
            s = s.union(PositionSet::interval(pos, next - 1)?);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{initial_set, peaks_of, spikes_of, valleys_of, Descents};

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn set(s: &str) -> PositionSet {
        s.parse().unwrap()
    }

    #[test]
    fn flip_examples() {
        let p = perm("24315678");
        assert_eq!(fl(&p, 2).unwrap(), perm("42315678"));
        assert_eq!(fl(&p, 4).unwrap(), perm("31245678"));
        assert_eq!(fl(&p, 1).unwrap(), p);
        assert_eq!(fl(&fl(&p, 4).unwrap(), 2).unwrap(), perm("13245678"));
        assert_eq!(fl(&fl(&p, 2).unwrap(), 4).unwrap(), perm("13245678"));
        assert!(fl(&p, 0).is_err());
        assert!(fl(&p, 9).is_err());
    }

    #[test]
    fn admission_examples() {
        let p = perm("24315678");
        assert!(!admits_flip(&p, 2).unwrap().admits());
        assert!(admits_flip(&p, 4).unwrap().admits());
        let q = perm("14325678");
        assert!(!admits_flip(&q, 2).unwrap().admits());
        assert!(admits_flip(&q, 4).unwrap().admits());
        let r = perm("34215678");
        assert!(admits_flip(&r, 2).unwrap().admits());
        assert!(admits_flip(&r, 4).unwrap().admits());
        assert!(matches!(admits_flip(&p, 3), Err(Error::NotASpike { .. })));
    }

    #[test]
    fn two_minus_is_never_admitted() {
        for p in ["132", "231", "2413", "3412", "14325678", "34215678"] {
            let p = perm(p);
            if let Ok(a) = admits_flip(&p, 2) {
                assert!(!a.admits_minus);
            }
        }
    }

    #[test]
    fn psi_examples() {
        let p = perm("24315678");
        // fl_4 removes the valley at 4, fl_3 does not
        assert_eq!(spike_set(&fl(&p, 4).unwrap()), set("2"));
        assert_eq!(spike_set(&fl(&p, 3).unwrap()), set("2,3,4"));
        assert_eq!(psi(&p, 4).unwrap(), perm("31245678"));
        assert!(matches!(psi(&p, 2), Err(Error::FlipNotAdmitted { .. })));

        let r = perm("34215678");
        let a = psi(&psi(&r, 2).unwrap(), 4).unwrap();
        let b = psi(&psi(&r, 4).unwrap(), 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(spike_set(&a), PositionSet::EMPTY);
        assert_eq!(psi_set(&r, set("2,4")).unwrap(), a);
        assert_eq!(psi_set(&r, PositionSet::EMPTY).unwrap(), r);
        assert_eq!(spike_set(&psi(&r, 2).unwrap()), set("4"));
    }

    #[test]
    fn psi_set_preconditions() {
        let r = perm("34215678");
        assert!(matches!(psi_set(&r, set("2,3")), Err(Error::FlipsNotSeparated { .. })));
        assert!(matches!(psi_set(&r, set("5")), Err(Error::NotASpike { .. })));
        let p = perm("24315678");
        assert!(matches!(psi_set(&p, set("2,4")), Err(Error::FlipNotAdmitted { .. })));
    }

    #[test]
    fn canonical_sets() {
        assert_eq!(canonical_descent_set(set("2,4")).unwrap(), set("2,3"));
        assert_eq!(canonical_descent_set(PositionSet::EMPTY).unwrap(), PositionSet::EMPTY);
        assert_eq!(canonical_descent_set(set("2")).unwrap(), set("1"));
        assert_eq!(canonical_descent_set(set("4")).unwrap(), set("1,2,3"));
        assert!(canonical_descent_set(set("2,3")).is_err());
        assert!(canonical_descent_set(set("1")).is_err());
    }

    #[test]
    fn canonical_sets_have_the_defining_property() {
        let candidates = PositionSet::from_bits(((1u64 << 12) - 1) << 1);
        for i in candidates.subsets().filter(|i| crate::is_admissible(*i)) {
            let s = canonical_descent_set(i).unwrap();
            let n = i.max() + 2;
            assert_eq!(spikes_of(s, n), i, "{i}");
            if !i.is_empty() {
                assert!(s.max() < i.max());
                assert!(valleys_of(s, n).contains(i.max()));
                let peaks = peaks_of(s, n);
                let kinds: Vec<bool> = i.iter().map(|x| peaks.contains(x)).collect();
                assert!(kinds.windows(2).all(|w| w[0] != w[1]), "{i}");
            }
        }
    }

    #[test]
    fn remark_properties_on_an_example() {
        let p = perm("57612348");
        for i in 1..=8 {
            let f = fl(&p, i).unwrap();
            assert_eq!(initial_set(&f, i).unwrap(), initial_set(&p, i).unwrap());
            assert_eq!(&f.values()[i..], &p.values()[i..]);
            let (d, e) = (p.descent_set(), f.descent_set());
            for k in 1..8 {
                if k < i {
                    assert_ne!(d.contains(k), e.contains(k));
                } else if k > i {
                    assert_eq!(d.contains(k), e.contains(k));
                }
            }
        }
    }
}
