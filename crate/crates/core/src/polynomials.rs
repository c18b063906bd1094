//! Descent and peak polynomials in the binomial basis `C(n-m, k)`.
//!
//! Both `d(S,n)` and `p(I,n)` are integer-valued polynomials in `n`. Centered
//! at `m`, their coefficients are cardinalities of explicit sets of
//! permutations in `𝔖_{2m}`: the `k`-th coefficient counts the `σ` with the
//! right descent set whose first `m` values meet `[m+1, 2m]` in exactly
//! `[m+1, m+k]`. For peak polynomials, `σ` must additionally admit no flip at
//! any member of `I`.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::count::ExactCount;
use crate::enumeration::{count_descent_class, peak_poly_value, DescentRule, Walker};
use crate::error::{Error, Result};
use crate::flips::{admits_any, canonical_descent_set};
use crate::limits::Limits;
use crate::perm::Permutation;
use crate::scalar::{binomial, from_i64, Scalar};
use crate::set::PositionSet;
use crate::stats::{is_admissible, require_admissible, spikes_of};

/// `Σ_k coeffs[k] · C(n - center, k)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinomialPolynomial<T> {
    center: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> BinomialPolynomial<T> {
    pub fn new(center: usize, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != center + 1 {
            return Err(Error::CoefficientCount {
                center,
                expected: center + 1,
                got: coeffs.len(),
            });
        }
        Ok(BinomialPolynomial { center, coeffs })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Index of the last nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// True when `n` lies below the center, where the combinatorial reading
    /// of the coefficients no longer applies.
    pub fn is_extrapolation(&self, n: i64) -> bool {
        n < self.center as i64
    }

    pub fn evaluate(&self, n: i64) -> T {
        let x = n - self.center as i64;
        let mut acc = T::zero();
        let mut basis = T::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                basis = basis * from_i64::<T>(x - k as i64 + 1) / from_i64::<T>(k as i64);
            }
            acc = acc + c.clone() * basis.clone();
        }
        acc
    }

    /// The same polynomial expressed around `center`.
    ///
    /// Uses `C(x + s, k) = Σ_r C(s, k-r) C(x, r)` with `s` the shift between
    /// the old and new centers, which holds for shifts of either sign.
    pub fn recenter(&self, center: usize) -> Result<Self> {
        if let Some(d) = self.degree() {
            if d > center {
                return Err(Error::RecenterBelowDegree { center, index: d });
            }
        }
        let shift = center as i64 - self.center as i64;
        let mut out = vec![T::zero(); center + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                *slot = slot.clone() + c.clone() * binomial::<T>(shift, k - j);
            }
        }
        Ok(BinomialPolynomial {
            center,
            coeffs: out,
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BinomialPolynomial<U> {
        BinomialPolynomial {
            center: self.center,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl<T: Scalar + fmt::Display> BinomialPolynomial<T> {
    /// Renders `3{n-4 \choose 0} + 8{n-4 \choose 1} + …`, zero terms included.
    pub fn to_binomial_string(&self, var: &str) -> String {
        let arg = if self.center == 0 {
            var.to_string()
        } else {
            format!("{var}-{}", self.center)
        };
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&format!("{mag}{{{arg} \\choose {k}}}"));
        }
        out
    }
}

impl<T: Scalar> Add for BinomialPolynomial<T> {
    type Output = Result<BinomialPolynomial<T>>;

    /// Coefficientwise sum; the right operand is recentered if needed.
    fn add(self, rhs: Self) -> Result<Self> {
        let rhs = if rhs.center == self.center {
            rhs
        } else {
            rhs.recenter(self.center)?
        };
        let coeffs = self
            .coeffs
            .into_iter()
            .zip(rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(BinomialPolynomial {
            center: self.center,
            coeffs,
        })
    }
}

impl<T: fmt::Debug> fmt::Debug for BinomialPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "center {} {:?}", self.center, self.coeffs)
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    basis: String,
    center: usize,
    coeffs: Vec<String>,
}

impl<T: fmt::Display> Serialize for BinomialPolynomial<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson {
            basis: "binomial".into(),
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar + FromStr> Deserialize<'de> for BinomialPolynomial<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PolynomialJson::deserialize(deserializer)?;
        if raw.basis != "binomial" {
            return Err(D::Error::custom(format!("unsupported basis {:?}", raw.basis)));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| s.parse::<T>().map_err(|_| D::Error::custom(format!("bad coefficient {s:?}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        BinomialPolynomial::new(raw.center, coeffs).map_err(D::Error::custom)
    }
}

/// Calls `visit(k, σ)` for every `σ ∈ D(S, 2m)` whose first `m` values meet
/// `[m+1, 2m]` in exactly `[m+1, m+k]`, and collects the per-`k` results.
///
/// Candidates are generated directly: the prefix value set is a
/// `(m-k)`-subset of `[m]` plus `[m+1, m+k]`; the suffix must ascend (no
/// descents beyond `m`), so only the prefix arrangement is searched.
fn scan_coefficient_classes<A, F>(s: PositionSet, m: usize, visit: F) -> Vec<Vec<A>>
where
    A: Send,
    F: Fn(usize, &[u8]) -> Option<A> + Sync,
{
    if m == 0 {
        let mut row = Vec::new();
        if let Some(a) = visit(0, &[]) {
            row.push(a);
        }
        return vec![row];
    }
    let n = 2 * m;
    let low = ((1u128 << m) - 1) << 1;
    let jobs: Vec<(usize, u128)> = (0..=m)
        .flat_map(|k| {
            let high = if k == 0 { 0 } else { ((1u128 << k) - 1) << (m + 1) };
            submasks_of_size(low, m - k).map(move |a| (k, a | high))
        })
        .collect();
    let results: Vec<(usize, Vec<A>)> = jobs
        .par_iter()
        .map(|&(k, prefix_values)| {
            let suffix = (((1u128 << n) - 1) << 1) & !prefix_values;
            let suffix_values: Vec<u8> = bits_of(suffix).collect();
            let mut found = Vec::new();
            let mut full = vec![0u8; n];
            full[m..].copy_from_slice(&suffix_values);
            Walker::new(DescentRule(s), prefix_values, m, m, &[]).for_each_leaf(|prefix| {
                if (prefix[m - 1] > suffix_values[0]) != s.contains(m) {
                    return;
                }
                full[..m].copy_from_slice(prefix);
                if let Some(a) = visit(k, &full) {
                    found.push(a);
                }
            });
            (k, found)
        })
        .collect();
    let mut rows: Vec<Vec<A>> = (0..=m).map(|_| Vec::new()).collect();
    for (k, found) in results {
        rows[k].extend(found);
    }
    rows
}

fn bits_of(mut mask: u128) -> impl Iterator<Item = u8> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as u8;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// Submasks of `mask` with exactly `size` bits set.
fn submasks_of_size(mask: u128, size: usize) -> impl Iterator<Item = u128> {
    let mut next = Some(mask);
    std::iter::from_fn(move || loop {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        if cur.count_ones() as usize == size {
            return Some(cur);
        }
    })
}

fn check_center(set: PositionSet, m: usize, limits: &Limits) -> Result<()> {
    if m < set.max() {
        return Err(Error::CenterTooSmall { center: m, max: set.max() });
    }
    limits.check(2 * m)
}

fn counts_to_poly(m: usize, rows: Vec<Vec<()>>) -> BinomialPolynomial<BigInt> {
    BinomialPolynomial {
        center: m,
        coeffs: rows.into_iter().map(|r| BigInt::from(r.len())).collect(),
    }
}

/// The coefficients `a_k(S)` of `d(S,n)` centered at `m ≥ max(S)`.
pub fn descent_coeffs(s: PositionSet, m: usize, limits: &Limits) -> Result<BinomialPolynomial<BigInt>> {
    check_center(s, m, limits)?;
    Ok(counts_to_poly(m, scan_coefficient_classes(s, m, |_, _| Some(()))))
}

/// The coefficients `b_k(I)` of `p(I,n)` centered at `m ≥ max(I)`: the same
/// classes as for `d(S_I, n)`, keeping only permutations that admit no
/// `i`-flip for any `i ∈ I`.
pub fn peak_coeffs(i: PositionSet, m: usize, limits: &Limits) -> Result<BinomialPolynomial<BigInt>> {
    require_admissible(i)?;
    check_center(i, m, limits)?;
    let s = canonical_descent_set(i)?;
    let rows = scan_coefficient_classes(s, m, |_, sigma| {
        if i.iter().any(|pos| admits_any(sigma, pos)) {
            None
        } else {
            Some(())
        }
    });
    Ok(counts_to_poly(m, rows))
}

/// The permutations behind every coefficient `a_k(S)`, sorted within each `k`.
pub fn coefficient_classes(s: PositionSet, m: usize, limits: &Limits) -> Result<Vec<Vec<Permutation>>> {
    check_center(s, m, limits)?;
    let mut rows = scan_coefficient_classes(s, m, |_, sigma| {
        Some(Permutation::from_raw(sigma.to_vec()))
    });
    for row in &mut rows {
        row.sort();
    }
    Ok(rows)
}

/// Free-function form of [`BinomialPolynomial::evaluate`].
pub fn evaluate<T: Scalar>(poly: &BinomialPolynomial<T>, n: i64) -> T {
    poly.evaluate(n)
}

/// Free-function form of [`BinomialPolynomial::recenter`].
pub fn recenter<T: Scalar>(poly: &BinomialPolynomial<T>, center: usize) -> Result<BinomialPolynomial<T>> {
    poly.recenter(center)
}

/// One term `p(I, n)` of the spike-subset expansion of `d(S, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeakTerm {
    pub peaks: PositionSet,
    pub admissible: bool,
    pub value: ExactCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeExpansion {
    pub descents: PositionSet,
    pub n: usize,
    pub spikes: PositionSet,
    pub terms: Vec<PeakTerm>,
    pub total: ExactCount,
}

/// `d(S,n)` as `Σ p(I,n)` over all `I ⊆ Spike(S)`, each term counted by
/// enumerating its peak class.
pub fn spike_expansion(s: PositionSet, n: usize, limits: &Limits) -> Result<SpikeExpansion> {
    s.check_bound(n)?;
    let spikes = spikes_of(s, n);
    let mut subsets: Vec<PositionSet> = spikes.subsets().collect();
    subsets.sort_by_key(|t| (std::cmp::Reverse(t.len()), t.to_vec()));
    let terms = subsets
        .into_iter()
        .map(|peaks| {
            Ok(PeakTerm {
                peaks,
                admissible: is_admissible(peaks),
                value: peak_poly_value(peaks, n, limits)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = terms.iter().map(|t| t.value.clone()).sum();
    Ok(SpikeExpansion {
        descents: s,
        n,
        spikes,
        terms,
        total,
    })
}

pub fn descent_poly_via_peaks(s: PositionSet, n: usize, limits: &Limits) -> Result<ExactCount> {
    Ok(spike_expansion(s, n, limits)?.total)
}

/// One signed term `±d(S_J, n)` of the inversion formula for `p(I, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentTerm {
    pub subset: PositionSet,
    pub descents: PositionSet,
    pub sign: i8,
    pub value: ExactCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoebiusExpansion {
    pub peaks: PositionSet,
    pub n: usize,
    pub terms: Vec<DescentTerm>,
    pub total: ExactCount,
}

/// `p(I,n) = Σ_{J⊆I} (-1)^{|I∖J|} d(S_J, n)` with closed-form descent
/// counts, so `n` is unbounded.
pub fn moebius_expansion(i: PositionSet, n: usize) -> Result<MoebiusExpansion> {
    require_admissible(i)?;
    i.check_bound(n)?;
    let mut total = BigInt::zero();
    let mut subsets: Vec<PositionSet> = i.subsets().collect();
    subsets.sort_by_key(|t| (std::cmp::Reverse(t.len()), t.to_vec()));
    let terms = subsets
        .into_iter()
        .map(|j| {
            let descents = canonical_descent_set(j)?;
            let value = count_descent_class(descents, n)?;
            let sign: i8 = if (i.len() - j.len()).is_multiple_of(2) { 1 } else { -1 };
            if sign > 0 {
                total += value.to_bigint();
            } else {
                total -= value.to_bigint();
            }
            Ok(DescentTerm {
                subset: j,
                descents,
                sign,
                value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if total.is_negative() {
        return Err(Error::NegativeCount(format!("p({i}, {n}) = {total}")));
    }
    Ok(MoebiusExpansion {
        peaks: i,
        n,
        terms,
        total: ExactCount::try_from_bigint(total)?,
    })
}

pub fn peak_poly_via_moebius(i: PositionSet, n: usize) -> Result<ExactCount> {
    Ok(moebius_expansion(i, n)?.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn set(s: &str) -> PositionSet {
        s.parse().unwrap()
    }

    fn ints(p: &BinomialPolynomial<BigInt>) -> Vec<i64> {
        p.coeffs().iter().map(|c| c.try_into().unwrap()).collect()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn descent_coefficient_examples() {
        assert_eq!(ints(&descent_coeffs(set("2,3"), 4, &lim()).unwrap()), [3, 8, 7, 2, 0]);
        assert_eq!(ints(&descent_coeffs(PositionSet::EMPTY, 0, &lim()).unwrap()), [1]);
        // d({1},n) = n-1: only 21 lies in D({1},2), and it has k = 1
        assert_eq!(ints(&descent_coeffs(set("1"), 1, &lim()).unwrap()), [0, 1]);
        assert!(matches!(
            descent_coeffs(set("2,3"), 2, &lim()),
            Err(Error::CenterTooSmall { .. })
        ));
        assert!(matches!(
            descent_coeffs(set("1"), 7, &lim()),
            Err(Error::CapExceeded { n: 14, .. })
        ));
    }

    #[test]
    fn peak_coefficient_examples() {
        let at4 = |s: &str| ints(&peak_coeffs(set(s), 4, &lim()).unwrap());
        assert_eq!(at4("2,4"), [0, 4, 4, 1, 0]);
        assert_eq!(at4("2"), [2, 1, 0, 0, 0]);
        assert_eq!(at4("4"), [0, 3, 3, 1, 0]);
        assert_eq!(at4(""), [1, 0, 0, 0, 0]);
        assert!(matches!(peak_coeffs(set("2,3"), 4, &lim()), Err(Error::NotAdmissible { .. })));
        assert_eq!(ints(&peak_coeffs(PositionSet::EMPTY, 0, &lim()).unwrap()), [1]);
    }

    #[test]
    fn evaluation_examples() {
        let d = BinomialPolynomial::<i64>::new(4, vec![3, 8, 7, 2, 0]).unwrap();
        assert_eq!(d.evaluate(8), 85);
        assert_eq!(d.evaluate(4), 3);
        let p = BinomialPolynomial::<i64>::new(4, vec![0, 4, 4, 1, 0]).unwrap();
        assert_eq!(p.evaluate(6), 12);
        assert!(p.is_extrapolation(3));
        assert!(!p.is_extrapolation(4));
        // extrapolation below the center still agrees with the polynomial:
        // p({2,4}, 5) computed two ways
        assert_eq!(p.evaluate(5), 4);
    }

    #[test]
    fn recentering() {
        let a = descent_coeffs(set("1"), 1, &lim()).unwrap();
        let b = descent_coeffs(set("1"), 4, &lim()).unwrap();
        assert_eq!(a.recenter(4).unwrap(), b);
        assert_eq!(b.recenter(1).unwrap(), a);
        assert_eq!(a.recenter(1).unwrap(), a);
        let p = BinomialPolynomial::<i64>::new(4, vec![0, 4, 4, 1, 0]).unwrap();
        assert!(matches!(p.recenter(2), Err(Error::RecenterBelowDegree { .. })));
        let q = p.recenter(3).unwrap();
        for n in -5..30 {
            assert_eq!(q.evaluate(n), p.evaluate(n));
        }
    }

    #[test]
    fn scalar_types_agree() {
        let exact = peak_coeffs(set("2,4"), 4, &lim()).unwrap();
        let q: BinomialPolynomial<BigRational> = exact.map(|c| BigRational::from_integer(c.clone()));
        let f: BinomialPolynomial<f64> = exact.map(|c| c.to_f64().unwrap());
        for n in 4..40 {
            let e = exact.evaluate(n);
            assert_eq!(q.evaluate(n), BigRational::from_integer(e.clone()));
            assert!((f.evaluate(n) - e.to_f64().unwrap()).abs() < 1e-6 * (1.0 + f.evaluate(n)));
        }
    }

    #[test]
    fn display_matches_binomial_notation() {
        let d = descent_coeffs(set("2,3"), 4, &lim()).unwrap();
        assert_eq!(
            d.to_binomial_string("n"),
            "3{n-4 \\choose 0} + 8{n-4 \\choose 1} + 7{n-4 \\choose 2} + 2{n-4 \\choose 3} + 0{n-4 \\choose 4}"
        );
        let neg = BinomialPolynomial::<i64>::new(0, vec![-2]).unwrap();
        assert_eq!(neg.to_binomial_string("n"), "-2{n \\choose 0}");
    }

    #[test]
    fn json_schema() {
        let d = descent_coeffs(set("2,3"), 4, &lim()).unwrap();
        let json = serde_json::to_value(&d).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"basis": "binomial", "center": 4, "coeffs": ["3", "8", "7", "2", "0"]})
        );
        let back: BinomialPolynomial<BigInt> = serde_json::from_value(json).unwrap();
        assert_eq!(back, d);
        let bad = serde_json::json!({"basis": "monomial", "center": 0, "coeffs": ["1"]});
        assert!(serde_json::from_value::<BinomialPolynomial<BigInt>>(bad).is_err());
        let short = serde_json::json!({"basis": "binomial", "center": 2, "coeffs": ["1"]});
        assert!(serde_json::from_value::<BinomialPolynomial<BigInt>>(short).is_err());
    }

    #[test]
    fn expansions() {
        let e = spike_expansion(set("2,3"), 8, &lim()).unwrap();
        assert_eq!(e.spikes, set("2,4"));
        assert_eq!(e.total, 85);
        let values: Vec<u64> = e.terms.iter().map(|t| t.value.to_string().parse().unwrap()).collect();
        assert_eq!(values, [44, 6, 34, 1]);
        assert_eq!(descent_poly_via_peaks(PositionSet::EMPTY, 6, &lim()).unwrap(), 1);
        for k in 2..7 {
            let lhs = count_descent_class(set(&k.to_string()), 8).unwrap();
            let rhs = peak_poly_value(set(&k.to_string()), 8, &lim()).unwrap()
                + peak_poly_value(set(&(k + 1).to_string()), 8, &lim()).unwrap()
                + ExactCount::from(1u64);
            assert_eq!(lhs, rhs, "k = {k}");
        }

        let m = moebius_expansion(set("2,4"), 8).unwrap();
        let shown: Vec<(String, i8)> = m.terms.iter().map(|t| (t.descents.to_string(), t.sign)).collect();
        assert_eq!(
            shown,
            [("{2,3}".into(), 1), ("{1}".into(), -1), ("{1,2,3}".into(), -1), ("{}".into(), 1)]
        );
        assert_eq!(m.total, 44);
        assert_eq!(peak_poly_via_moebius(PositionSet::EMPTY, 50).unwrap(), 1);
        assert_eq!(peak_poly_via_moebius(set("2"), 5).unwrap(), 3);
        assert!(peak_poly_via_moebius(set("1"), 5).is_err());
    }
}
