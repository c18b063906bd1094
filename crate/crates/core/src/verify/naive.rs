//! Brute-force oracles. Nothing here calls into the code being verified:
//! permutations come from a plain next-permutation loop and every statistic
//! is a direct scan.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Lexicographic successor; false once `v` is the last permutation.
pub(crate) fn next_permutation(v: &mut [u8]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Calls `f` on every permutation of `1..=n` in lexicographic order.
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[u8])) {
    let mut v: Vec<u8> = (1..=n as u8).collect();
    loop {
        f(&v);
        if !next_permutation(&mut v) {
            break;
        }
    }
}

pub(crate) fn descent_mask<T: PartialOrd>(v: &[T]) -> u64 {
    let mut m = 0;
    for i in 1..v.len() {
        if v[i - 1] > v[i] {
            m |= 1 << i;
        }
    }
    m
}

pub(crate) fn peak_mask(v: &[u8]) -> u64 {
    let mut m = 0;
    for i in 2..v.len() {
        if v[i - 2] < v[i - 1] && v[i - 1] > v[i] {
            m |= 1 << i;
        }
    }
    m
}

pub(crate) fn valley_mask(v: &[u8]) -> u64 {
    let mut m = 0;
    for i in 2..v.len() {
        if v[i - 2] > v[i - 1] && v[i - 1] < v[i] {
            m |= 1 << i;
        }
    }
    m
}

pub(crate) fn spike_mask(v: &[u8]) -> u64 {
    peak_mask(v) | valley_mask(v)
}

/// Spikes of a descent set, straight from the definition.
pub(crate) fn spikes_of_mask(s: u64, n: usize) -> u64 {
    let mut m = 0;
    for i in 2..n {
        let here = s >> i & 1 == 1;
        let before = s >> (i - 1) & 1 == 1;
        if here != before {
            m |= 1 << i;
        }
    }
    m
}

/// `fl_i` by sorting the prefix and looking up ranks.
pub(crate) fn flip(v: &[u8], i: usize) -> Vec<u8> {
    let mut sorted = v[..i].to_vec();
    sorted.sort_unstable();
    let mut out = v.to_vec();
    for slot in out.iter_mut().take(i) {
        let rank = sorted.iter().position(|x| x == slot).unwrap();
        *slot = sorted[i - 1 - rank];
    }
    out
}

pub(crate) fn admits_flip(v: &[u8], i: usize) -> (bool, bool) {
    let target = spike_mask(v) & !(1 << i);
    let plus = spike_mask(&flip(v, i)) == target;
    let minus = spike_mask(&flip(v, i - 1)) == target;
    (plus, minus)
}

/// Sorted prefix values.
pub(crate) fn prefix_values(v: &[u8], i: usize) -> Vec<u8> {
    let mut p = v[..i].to_vec();
    p.sort_unstable();
    p
}

/// `|D(S,n)|` for every `S`, indexed by descent mask.
pub(crate) fn descent_histogram(n: usize) -> HashMap<u64, u64> {
    let mut h = HashMap::new();
    for_each_permutation(n, |v| *h.entry(descent_mask(v)).or_insert(0) += 1);
    h
}

/// `|P(I,n)|` for every `I`, indexed by peak mask.
pub(crate) fn peak_histogram(n: usize) -> HashMap<u64, u64> {
    let mut h = HashMap::new();
    for_each_permutation(n, |v| *h.entry(peak_mask(v)).or_insert(0) += 1);
    h
}

/// Number of signed permutations of `n` with each descent set.
pub(crate) fn signed_descent_histogram(n: usize) -> HashMap<u64, u64> {
    let mut h = HashMap::new();
    let mut signed = vec![0i8; n];
    for_each_permutation(n, |v| {
        for signs in 0u32..1 << n {
            for (k, &x) in v.iter().enumerate() {
                signed[k] = if signs >> k & 1 == 1 { -(x as i8) } else { x as i8 };
            }
            *h.entry(descent_mask(&signed)).or_insert(0) += 1;
        }
    });
    h
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Histogram {
    Descent,
    Peak,
    SignedDescent,
}

/// Memoized histograms, shared by every check in the process.
pub(crate) fn histogram(kind: Histogram, n: usize) -> Arc<HashMap<u64, u64>> {
    type Memo = Mutex<HashMap<(Histogram, usize), Arc<HashMap<u64, u64>>>>;
    static MEMO: OnceLock<Memo> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(h) = memo.lock().unwrap().get(&(kind, n)) {
        return Arc::clone(h);
    }
    let h = Arc::new(match kind {
        Histogram::Descent => descent_histogram(n),
        Histogram::Peak => peak_histogram(n),
        Histogram::SignedDescent => signed_descent_histogram(n),
    });
    memo.lock().unwrap().insert((kind, n), Arc::clone(&h));
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_loop_counts() {
        for n in 1..=7 {
            let mut c = 0;
            for_each_permutation(n, |_| c += 1);
            assert_eq!(c, (1..=n).product::<usize>());
        }
    }

    #[test]
    fn known_histogram_values() {
        let h = descent_histogram(8);
        assert_eq!(h[&0b1100], 85);
        let p = peak_histogram(3);
        assert_eq!(p[&0b100], 2);
        assert_eq!(p[&0], 4);
    }
}
