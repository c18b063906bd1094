use std::collections::HashSet;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::naive::{self, histogram, Histogram};
use super::{admissible_up_to, table, Tally, VerificationReport};
use crate::enumeration::{
    count_descent_class, enumerate_descent_class, parallel_count, peak_poly_value, serial_count,
    ClassQuery, DescentClassQuery, PeakClassQuery,
};
use crate::error::{Error, Result};
use crate::flips::{admits_flip, canonical_descent_set, fl, psi, psi_set};
use crate::limits::Limits;
use crate::perm::Permutation;
use crate::polynomials::{
    descent_coeffs, descent_poly_via_peaks, peak_coeffs, peak_poly_via_moebius, BinomialPolynomial,
};
use crate::set::PositionSet;
use crate::stats::{
    descent_set, initial_set, is_admissible, markings, peak_set, peaks_of, require_admissible,
    spike_set, spikes_of, valley_set, valleys_of,
};

fn line(v: &[u8]) -> String {
    Permutation::from_raw(v.to_vec()).to_string()
}

fn strings(p: &BinomialPolynomial<BigInt>) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

/// Every subset of `{1, …, max}`.
fn sets_up_to(max: usize) -> Vec<PositionSet> {
    let mut v: Vec<_> = PositionSet::all_below(max + 1).collect();
    v.sort_by_key(|s| s.to_vec());
    v
}

fn naive_count(kind: Histogram, mask: u64, n: usize) -> u64 {
    histogram(kind, n).get(&mask).copied().unwrap_or(0)
}

fn expect_coeffs(t: &mut Tally, what: Value, got: Result<BinomialPolynomial<BigInt>>, want: &[i64]) {
    match got {
        Ok(p) => {
            let want: Vec<String> = want.iter().map(|c| c.to_string()).collect();
            let got = strings(&p);
            t.check(got == want, || json!({ "input": what, "expected": want, "got": got }));
        }
        Err(e) => t.error(&e, what),
    }
}

/// The coefficients of `d({2,3}, n)` at center 4.
pub fn check_golden_descent(limits: &Limits) -> VerificationReport {
    let mut t = Tally::new("golden-descent", "S = {2,3}, m = 4");
    let s = PositionSet::from_bits(0b1100);
    expect_coeffs(&mut t, json!({ "descents": s, "center": 4 }), descent_coeffs(s, 4, limits), &[3, 8, 7, 2, 0]);
    t.finish()
}

/// The peak coefficients splitting `d({2,3}, n)` at center 4.
pub fn check_golden_peak(limits: &Limits) -> VerificationReport {
    let mut t = Tally::new("golden-peak", "I ⊆ {2,4}, m = 4");
    let cases: [(u64, [i64; 5]); 4] = [
        (0b10100, [0, 4, 4, 1, 0]),
        (0b100, [2, 1, 0, 0, 0]),
        (0b10000, [0, 3, 3, 1, 0]),
        (0, [1, 0, 0, 0, 0]),
    ];
    let mut sum = vec![BigInt::zero(); 5];
    for (bits, want) in cases {
        let i = PositionSet::from_bits(bits);
        let got = peak_coeffs(i, 4, limits);
        if let Ok(p) = &got {
            for (acc, c) in sum.iter_mut().zip(p.coeffs()) {
                *acc += c;
            }
        }
        expect_coeffs(&mut t, json!({ "peaks": i, "center": 4 }), got, &want);
    }
    let s = PositionSet::from_bits(0b1100);
    match descent_coeffs(s, 4, limits) {
        Ok(d) => {
            let sum: Vec<String> = sum.iter().map(|c| c.to_string()).collect();
            let d = strings(&d);
            t.check(sum == d, || json!({ "sum_of_peak_coeffs": sum, "descent_coeffs": d }));
        }
        Err(e) => t.error(&e, json!({ "descents": s, "center": 4 })),
    }
    t.finish()
}

/// For every `S ⊆ {1..max_pos}` and `max(S) < n ≤ max_n`: the polynomial at
/// center `max(S)`, the closed form, the enumerator and a naive scan agree.
pub fn check_descent_oracle(max_pos: usize, max_n: usize, limits: &Limits) -> VerificationReport {
    let mut t = Tally::new("descent-oracle", format!("S ⊆ {{1..{max_pos}}}, n ≤ {max_n}"));
    for s in sets_up_to(max_pos) {
        let m = s.max();
        let poly = match descent_coeffs(s, m, limits) {
            Ok(p) => p,
            Err(e) => {
                t.error(&e, json!({ "descents": s, "center": m }));
                continue;
            }
        };
        for n in m + 1..=max_n {
            let input = json!({ "descents": s, "n": n });
            let naive = naive_count(Histogram::Descent, s.bits(), n);
            let value = poly.evaluate(n as i64);
            let closed = match count_descent_class(s, n) {
                Ok(c) => c,
                Err(e) => {
                    t.error(&e, input);
                    continue;
                }
            };
            let listed = match DescentClassQuery::new(s, n).and_then(|q| enumerate_descent_class(q, limits)) {
                Ok(it) => it.collect::<Vec<_>>(),
                Err(e) => {
                    t.error(&e, input);
                    continue;
                }
            };
            let sorted = listed.windows(2).all(|w| w[0] < w[1]);
            let classified = listed.iter().all(|p| naive::descent_mask(p.values()) == s.bits());
            t.check(
                value == BigInt::from(naive)
                    && closed == naive
                    && listed.len() as u64 == naive
                    && sorted
                    && classified,
                || {
                    json!({
                        "input": input,
                        "naive": naive,
                        "polynomial": value.to_string(),
                        "closed_form": closed,
                        "enumerated": listed.len(),
                        "strictly_sorted": sorted,
                        "all_in_class": classified,
                    })
                },
            );
        }
    }
    t.finish()
}

/// For every admissible `I` with `max(I) ≤ max_pos` and `max(I) < n ≤ max_n`:
/// the inversion formula, the enumerated peak count and a naive scan agree.
pub fn check_peak_oracle(max_pos: usize, max_n: usize, limits: &Limits) -> VerificationReport {
    let mut t = Tally::new("peak-oracle", format!("admissible I, max(I) ≤ {max_pos}, n ≤ {max_n}"));
    for i in admissible_up_to(max_pos) {
        for n in (i.max() + 1).max(1)..=max_n {
            let input = json!({ "peaks": i, "n": n });
            let raw = naive_count(Histogram::Peak, i.bits(), n);
            let exponent = n - i.len() - 1;
            let divisible = raw.is_multiple_of(1u64 << exponent);
            let scaled = raw >> exponent;
            let moebius = peak_poly_via_moebius(i, n);
            let counted = peak_poly_value(i, n, limits);
            match (moebius, counted) {
                (Ok(a), Ok(b)) => {
                    t.check(divisible && a == scaled && b == scaled, || {
                        json!({
                            "input": input,
                            "naive_peak_class": raw,
                            "divisible": divisible,
                            "moebius": a,
                            "enumerated": b,
                        })
                    });
                }
                (Err(e), _) | (_, Err(e)) => t.error(&e, input),
            }
        }
    }
    t.finish()
}

/// Each `d(S,n)` for `n` in `ns` against the sum of peak terms over the
/// spikes of `S`, and, for `n ≤ marked_max_n`, the number of signed
/// permutations with descent set `S` against `2^n d(S,n)`.
pub fn check_spike_sum(
    s: PositionSet,
    ns: RangeInclusive<usize>,
    marked_max_n: usize,
    limits: &Limits,
) -> Result<VerificationReport> {
    for n in ns.clone() {
        s.check_bound(n)?;
        limits.check(n)?;
    }
    limits.check(marked_max_n.min(*ns.end()))?;
    let mut t = Tally::new("spike-sum", format!("S = {s}, n = {}..{}", ns.start(), ns.end()));
    for n in ns {
        let input = json!({ "descents": s, "n": n, "spikes": PositionSet::from_bits(naive::spikes_of_mask(s.bits(), n)) });
        let naive = naive_count(Histogram::Descent, s.bits(), n);
        let (via, closed) = match (descent_poly_via_peaks(s, n, limits), count_descent_class(s, n)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                t.error(&e, input);
                continue;
            }
        };
        t.check(via == naive && closed == naive, || {
            json!({ "input": input, "naive": naive, "spike_sum": via, "closed_form": closed })
        });
        if n <= marked_max_n {
            let signed = naive_count(Histogram::SignedDescent, s.bits(), n);
            t.check(signed == naive << n, || {
                json!({ "input": input, "signed_with_descent_set": signed, "d": naive, "expected": naive << n })
            });
        }
    }
    Ok(t.finish())
}

/// For every `σ ∈ 𝔖_n` with peak set `I`: every marking has spikes
/// containing `I`, and each descent set `S` with `Spike(S) ⊇ I` is reached by
/// exactly `2^{|I|+1}` markings.
pub fn check_marked_lemma(n: usize, limits: &Limits) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::SizeTooSmall { n, max: 0 });
    }
    let cap = limits.cap().min(7);
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut t = Tally::new("marked-lemma", format!("n = {n}"));
    let mut total: u64 = 0;
    let candidates: Vec<u64> = PositionSet::all_below(n).map(|s| s.bits()).collect();
    naive::for_each_permutation(n, |v| {
        if t.failed() {
            return;
        }
        let sigma = Permutation::from_raw(v.to_vec());
        let peaks = naive::peak_mask(v);
        let mut counts = std::collections::HashMap::<u64, u64>::new();
        let Ok(marks) = markings(&sigma, limits) else {
            t.check(false, || json!({ "sigma": line(v), "error": "markings refused" }));
            return;
        };
        for rho in marks {
            total += 1;
            let d = descent_set(&rho);
            let spikes = spikes_of(d, n).bits();
            *counts.entry(d.bits()).or_insert(0) += 1;
            t.check(spikes & peaks == peaks, || {
                json!({ "sigma": line(v), "peaks": PositionSet::from_bits(peaks), "rho": rho.to_string(), "descents": d, "spikes": PositionSet::from_bits(spikes) })
            });
        }
        let want = 1u64 << (peaks.count_ones() + 1);
        for &s in &candidates {
            let covers = naive::spikes_of_mask(s, n) & peaks == peaks;
            let got = counts.get(&s).copied().unwrap_or(0);
            let expected = if covers { want } else { 0 };
            t.check(got == expected, || {
                json!({ "sigma": line(v), "peaks": PositionSet::from_bits(peaks), "descents": PositionSet::from_bits(s), "markings_with_descents": got, "expected": expected })
            });
        }
    });
    let factorial: u64 = (1..=n as u64).product();
    t.check(total == factorial << n, || json!({ "signed_total": total, "expected": factorial << n }));
    Ok(t.finish())
}

/// Ranges and seed for [`check_flip_algebra`].
#[derive(Debug, Clone, Copy)]
pub struct FlipAlgebraConfig {
    pub exhaustive_max_n: usize,
    pub stability_max_n: usize,
    pub random_cases: usize,
    pub random_max_n: usize,
    pub seed: u64,
}

/// The elementary properties of `fl_i` for one permutation and one pair of
/// indices, checked against the naive sort-based flip.
fn flip_case(t: &mut Tally, v: &[u8], i: usize, j: usize) {
    let p = Permutation::from_raw(v.to_vec());
    let (Ok(fi), Ok(fj)) = (fl(&p, i), fl(&p, j)) else {
        t.check(false, || json!({ "sigma": line(v), "i": i, "j": j, "error": "fl refused" }));
        return;
    };
    let naive_fi = naive::flip(v, i);
    let back = fl(&fi, i).ok();
    let ij = fl(&fi, j).ok();
    let ji = fl(&fj, i).ok();
    let prefix_kept = initial_set(&fi, i).ok() == initial_set(&p, i).ok() && fi.values()[i..] == v[i..];
    let d = naive::descent_mask(v);
    let df = naive::descent_mask(fi.values());
    let below = if i > 1 { ((1u64 << i) - 1) & !1 } else { 0 };
    let above = !((1u64 << (i + 1)) - 1);
    let complemented = (d ^ df) & below == below && (d ^ df) & above == 0;
    let peaks_below = naive::peak_mask(v) & below;
    let valleys_below = naive::valley_mask(v) & below;
    let exchanged = naive::valley_mask(fi.values()) & below == peaks_below
        && naive::peak_mask(fi.values()) & below == valleys_below;
    t.check(
        fi.values() == naive_fi.as_slice()
            && back.as_ref() == Some(&p)
            && ij.is_some()
            && ij == ji
            && prefix_kept
            && complemented
            && exchanged,
        || {
            json!({
                "sigma": line(v),
                "i": i,
                "j": j,
                "fl_i": fi.to_string(),
                "naive_fl_i": line(&naive_fi),
                "involution": back.map(|b| b.to_string()),
                "fl_j_fl_i": ij.map(|b| b.to_string()),
                "fl_i_fl_j": ji.map(|b| b.to_string()),
                "prefix_kept": prefix_kept,
                "descents": PositionSet::from_bits(d),
                "descents_after": PositionSet::from_bits(df),
                "spikes_exchanged": exchanged,
            })
        },
    );
}

/// Library flip admission against the naive one, and the `Ψ_i` result.
fn admission_case(t: &mut Tally, v: &[u8]) {
    let p = Permutation::from_raw(v.to_vec());
    let spikes = naive::spike_mask(v);
    for i in PositionSet::from_bits(spikes) {
        let (plus, minus) = naive::admits_flip(v, i);
        let got = admits_flip(&p, i);
        let ok = matches!(got, Ok(a) if a.admits_plus == plus && a.admits_minus == minus);
        t.check(ok, || json!({ "sigma": line(v), "i": i, "naive": [plus, minus], "library": format!("{got:?}") }));
        if plus || minus {
            let want = if plus { naive::flip(v, i) } else { naive::flip(v, i - 1) };
            let got = psi(&p, i).ok();
            let ok = got.as_ref().map(|q| q.values()) == Some(want.as_slice())
                && naive::spike_mask(&want) == spikes & !(1 << i);
            t.check(ok, || json!({ "sigma": line(v), "i": i, "expected_psi": line(&want), "psi": got.map(|q| q.to_string()) }));
        }
    }
}

/// For spikes `i`, `j` with `|i-j| > 1` and `σ` admitting a `j`-flip:
/// `σ` and `Ψ_j(σ)` admit the same `i⁺` and `i⁻` flips.
fn stability_case(t: &mut Tally, v: &[u8]) {
    let p = Permutation::from_raw(v.to_vec());
    let spikes = PositionSet::from_bits(naive::spike_mask(v));
    for j in spikes {
        let (jp, jm) = naive::admits_flip(v, j);
        if !(jp || jm) {
            continue;
        }
        let Ok(q) = psi(&p, j) else {
            t.check(false, || json!({ "sigma": line(v), "j": j, "error": "psi refused" }));
            continue;
        };
        for i in spikes.iter().filter(|&i| i.abs_diff(j) > 1) {
            let before = naive::admits_flip(v, i);
            let after = naive::admits_flip(q.values(), i);
            t.check(before == after, || {
                json!({ "sigma": line(v), "j": j, "psi_j": q.to_string(), "i": i, "before": [before.0, before.1], "after": [after.0, after.1] })
            });
        }
    }
}

/// `Ψ_J` for a separated set of admitted spikes removes exactly `J`.
fn psi_set_case(t: &mut Tally, v: &[u8], j: PositionSet) {
    let p = Permutation::from_raw(v.to_vec());
    let spikes = naive::spike_mask(v);
    let got = psi_set(&p, j);
    let ok = matches!(&got, Ok(q) if naive::spike_mask(q.values()) == spikes & !j.bits());
    t.check(ok, || json!({ "sigma": line(v), "J": j, "result": format!("{got:?}") }));
}

/// Admitted spikes of `v`, greedily thinned to pairwise distance ≥ 2.
fn separated_admitted(v: &[u8], rng: &mut ChaCha8Rng) -> PositionSet {
    let mut out = PositionSet::EMPTY;
    for i in PositionSet::from_bits(naive::spike_mask(v)) {
        let (a, b) = naive::admits_flip(v, i);
        if (a || b) && !out.contains(i - 1) && rng.gen_bool(0.7) {
            out = out.with(i).expect("position in range");
        }
    }
    out
}

/// Involution, commutation, prefix preservation, descent complementation,
/// spike exchange, admission agreement and admission stability, exhaustively
/// for small `n` and on seeded random permutations.
pub fn check_flip_algebra(cfg: &FlipAlgebraConfig) -> VerificationReport {
    let mut t = Tally::new(
        "flip-algebra",
        format!(
            "exhaustive n ≤ {}, stability n ≤ {}, {} random cases n ≤ {}, seed {:#x}",
            cfg.exhaustive_max_n, cfg.stability_max_n, cfg.random_cases, cfg.random_max_n, cfg.seed
        ),
    );
    for n in 1..=cfg.exhaustive_max_n {
        naive::for_each_permutation(n, |v| {
            for i in 1..=n {
                for j in 1..=n {
                    flip_case(&mut t, v, i, j);
                }
            }
            admission_case(&mut t, v);
        });
    }
    for n in 1..=cfg.stability_max_n {
        naive::for_each_permutation(n, |v| stability_case(&mut t, v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let top = cfg.random_max_n.max(1);
    for _ in 0..cfg.random_cases {
        let n = rng.gen_range(1..=top);
        let mut v: Vec<u8> = (1..=n as u8).collect();
        v.shuffle(&mut rng);
        let i = rng.gen_range(1..=n);
        let j = rng.gen_range(1..=n);
        flip_case(&mut t, &v, i, j);
        admission_case(&mut t, &v);
        stability_case(&mut t, &v);
        let set = separated_admitted(&v, &mut rng);
        psi_set_case(&mut t, &v, set);
    }
    t.finish()
}

/// The `m`-prefix condition: `Some(k)` when the large values among the first
/// `m` entries are exactly `m+1, …, m+k`.
fn initial_condition(v: &[u8], m: usize) -> Option<usize> {
    let high: Vec<u8> = naive::prefix_values(v, m).into_iter().filter(|&x| x as usize > m).collect();
    let k = high.len();
    let want: Vec<u8> = (m + 1..=m + k).map(|x| x as u8).collect();
    (high == want).then_some(k)
}

/// `Ψ_J` maps the members of `D(S_I, n)` admitting every `j`-flip, `j ∈ J`,
/// bijectively onto `D(S_{I∖J}, n)` and keeps the prefix condition at every
/// center `m` with `max(I) ≤ m ≤ n/2`.
pub fn check_flip_bijection(i: PositionSet, j: PositionSet, n: usize, limits: &Limits) -> Result<VerificationReport> {
    require_admissible(i)?;
    if !j.is_subset(i) {
        return Err(Error::NotASubset {
            subset: j.to_string(),
            set: i.to_string(),
        });
    }
    i.check_bound(n)?;
    let cap = limits.cap().min(9);
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let source = canonical_descent_set(i)?;
    let target = canonical_descent_set(i.difference(j))?;
    let mut t = Tally::new(
        "flip-bijection",
        format!("I = {i}, J = {j}, n = {n}"),
    );
    let centers: Vec<usize> = (i.max().max(1)..=n / 2).collect();
    let mut image = HashSet::new();
    naive::for_each_permutation(n, |v| {
        if naive::descent_mask(v) != source.bits() {
            return;
        }
        let admitted = j.iter().all(|pos| {
            let (a, b) = naive::admits_flip(v, pos);
            a || b
        });
        if !admitted {
            return;
        }
        let p = Permutation::from_raw(v.to_vec());
        let q = match psi_set(&p, j) {
            Ok(q) => q,
            Err(e) => {
                t.error(&e, json!({ "sigma": line(v), "I": i, "J": j }));
                return;
            }
        };
        let in_target = naive::descent_mask(q.values()) == target.bits();
        let conditions: Vec<(usize, Option<usize>, Option<usize>)> = centers
            .iter()
            .map(|&m| (m, initial_condition(v, m), initial_condition(q.values(), m)))
            .collect();
        let kept = conditions.iter().all(|(_, a, b)| a == b);
        let fresh = image.insert(q.values().to_vec());
        t.check(in_target && kept && fresh, || {
            json!({
                "sigma": line(v),
                "I": i,
                "J": j,
                "S_I": source,
                "image": q.to_string(),
                "image_descents": PositionSet::from_bits(naive::descent_mask(q.values())),
                "expected_descents": target,
                "prefix_conditions": conditions,
                "injective_so_far": fresh,
            })
        });
    });
    let target_size = naive_count(Histogram::Descent, target.bits(), n);
    t.check(image.len() as u64 == target_size, || {
        json!({ "I": i, "J": j, "n": n, "image_size": image.len(), "target": target, "target_size": target_size })
    });
    Ok(t.finish())
}

/// Every peak coefficient at center `max(I)` is nonnegative.
pub fn check_positivity(max_pos: usize, limits: &Limits) -> VerificationReport {
    let mut t = Tally::new("positivity", format!("admissible I, max(I) ≤ {max_pos}, m = max(I)"));
    for i in admissible_up_to(max_pos) {
        match peak_coeffs(i, i.max(), limits) {
            Ok(p) => {
                t.check(p.coeffs().iter().all(|c| !c.is_negative()), || {
                    json!({ "peaks": i, "center": i.max(), "coeffs": strings(&p) })
                });
            }
            Err(e) => t.error(&e, json!({ "peaks": i, "center": i.max() })),
        }
    }
    t.finish()
}

/// Coefficients computed at two centers agree after recentering in either
/// direction, and both evaluate to the closed-form count.
pub fn check_recentering(max_center: usize, max_n: usize, limits: &Limits) -> VerificationReport {
    let mut t = Tally::new(
        "recenter",
        format!("max(S) ≤ m < m' ≤ {max_center}, n = m'..{max_n}"),
    );
    for s in sets_up_to(max_center.saturating_sub(1)) {
        let polys: Vec<(usize, Result<BinomialPolynomial<BigInt>>)> = (s.max()..=max_center)
            .map(|m| (m, descent_coeffs(s, m, limits)))
            .collect();
        for (a, pa) in &polys {
            for (b, pb) in &polys {
                if a >= b {
                    continue;
                }
                let input = json!({ "descents": s, "m": a, "m_prime": b });
                let (pa, pb) = match (pa, pb) {
                    (Ok(x), Ok(y)) => (x, y),
                    (Err(e), _) | (_, Err(e)) => {
                        t.error(e, input);
                        continue;
                    }
                };
                let up = pa.recenter(*b);
                let down = pb.recenter(*a);
                t.check(up.as_ref() == Ok(pb) && down.as_ref() == Ok(pa), || {
                    json!({
                        "input": input,
                        "at_m": strings(pa),
                        "at_m_prime": strings(pb),
                        "recentered_up": up.as_ref().map(strings).ok(),
                        "recentered_down": down.as_ref().map(strings).ok(),
                    })
                });
                for n in *b..=max_n {
                    let x = pa.evaluate(n as i64);
                    let y = pb.evaluate(n as i64);
                    let closed = count_descent_class(s, n).map(|c| c.to_bigint()).ok();
                    t.check(x == y && Some(&x) == closed.as_ref(), || {
                        json!({ "input": input, "n": n, "at_m": x.to_string(), "at_m_prime": y.to_string(), "closed_form": closed.map(|c| c.to_string()) })
                    });
                }
            }
        }
    }
    t.finish()
}

/// Serial and prefix-partitioned parallel counts agree for every depth up to
/// `max_depth`, for descent classes of `S ⊆ {1..max_pos}` and peak classes of
/// admissible `I` in the same range.
pub fn check_partition_invariance(max_pos: usize, max_n: usize, max_depth: usize, limits: &Limits) -> VerificationReport {
    let mut t = Tally::new(
        "partition",
        format!("S ⊆ {{1..{max_pos}}}, n ≤ {max_n}, depth ≤ {max_depth}"),
    );
    let mut queries = Vec::new();
    for s in sets_up_to(max_pos) {
        for n in s.max() + 1..=max_n {
            queries.push(ClassQuery::Descent(DescentClassQuery { set: s, n }));
            if is_admissible(s) {
                queries.push(ClassQuery::Peak(PeakClassQuery { set: s, n }));
            }
        }
    }
    for q in queries {
        let input = format!("{q:?}");
        let serial = match serial_count(q, limits) {
            Ok(c) => c,
            Err(e) => {
                t.error(&e, json!(input));
                continue;
            }
        };
        let naive = match q {
            ClassQuery::Descent(d) => naive_count(Histogram::Descent, d.set.bits(), d.n),
            ClassQuery::Peak(p) => naive_count(Histogram::Peak, p.set.bits(), p.n),
        };
        t.check(serial == naive, || json!({ "query": input, "serial": serial, "naive": naive }));
        for depth in 0..=max_depth.min(q.n()) {
            let par = parallel_count(q, depth, limits);
            t.check(par.as_ref() == Ok(&serial), || {
                json!({ "query": input, "depth": depth, "serial": serial, "parallel": format!("{par:?}") })
            });
        }
    }
    t.finish()
}

/// The flip-filtered coefficients evaluate to `p(I, n)`: for admissible `I`
/// with `max(I) ≤ max_pos`, every center up to `max_center`, and `n` up to
/// `max_n`.
pub fn check_peak_coefficients(max_pos: usize, max_center: usize, max_n: usize, limits: &Limits) -> VerificationReport {
    let mut t = Tally::new(
        "peak-coefficients",
        format!("admissible I, max(I) ≤ {max_pos}, m ≤ {max_center}, n ≤ {max_n}"),
    );
    for i in admissible_up_to(max_pos) {
        for m in i.max()..=max_center {
            let poly = match peak_coeffs(i, m, limits) {
                Ok(p) => p,
                Err(e) => {
                    t.error(&e, json!({ "peaks": i, "center": m }));
                    continue;
                }
            };
            for n in (i.max() + 1).max(1)..=max_n {
                let value = poly.evaluate(n as i64);
                let want = peak_poly_via_moebius(i, n).map(|c| c.to_bigint());
                t.check(want.as_ref() == Ok(&value), || {
                    json!({ "peaks": i, "center": m, "coeffs": strings(&poly), "n": n, "evaluated": value.to_string(), "moebius": format!("{want:?}") })
                });
            }
        }
    }
    t.finish()
}

/// Two coefficient-level splittings. For `S ⊆ {1..max_pos}` at centers
/// `max(S)+1 ≤ m ≤ max_pos+1`: `a_k(S) = Σ_{I ⊆ Spike(S)} b_k(I)`. For
/// admissible `I` with `max(I) ≤ max_pos`: the members of the `a_k(S_I)`
/// class admitting exactly the flips in `A ⊆ I` number `b_k(I ∖ A)`.
pub fn check_inclusion_exclusion(max_pos: usize, limits: &Limits) -> VerificationReport {
    let top = max_pos + 1;
    let mut t = Tally::new("inclusion-exclusion", format!("sets within {{1..{max_pos}}}, m ≤ {top}"));
    for s in sets_up_to(max_pos) {
        for m in s.max() + 1..=top {
            let input = json!({ "descents": s, "center": m });
            let a = match descent_coeffs(s, m, limits) {
                Ok(a) => a,
                Err(e) => {
                    t.error(&e, input);
                    continue;
                }
            };
            let spikes = spikes_of(s, 2 * m);
            let mut sum = vec![BigInt::zero(); m + 1];
            let mut failed = None;
            for i in spikes.subsets().filter(|i| is_admissible(*i)) {
                match peak_coeffs(i, m, limits) {
                    Ok(b) => sum.iter_mut().zip(b.coeffs()).for_each(|(x, c)| *x += c),
                    Err(e) => failed = Some(e),
                }
            }
            if let Some(e) = failed {
                t.error(&e, input);
                continue;
            }
            let sum: Vec<String> = sum.iter().map(|c| c.to_string()).collect();
            let a = strings(&a);
            t.check(a == sum, || json!({ "input": input, "spikes": spikes, "descent_coeffs": a, "sum_of_peak_coeffs": sum }));
        }
    }
    for i in admissible_up_to(max_pos) {
        for m in i.max().max(1)..=top {
            let input = json!({ "peaks": i, "center": m });
            let table = match table::table1(i, m, limits) {
                Ok(tb) => tb,
                Err(e) => {
                    t.error(&e, input);
                    continue;
                }
            };
            for admitted in i.subsets() {
                let counts: Vec<String> = table
                    .blocks
                    .iter()
                    .map(|b| b.rows.iter().filter(|r| r.admitted() == admitted).count().to_string())
                    .collect();
                match peak_coeffs(i.difference(admitted), m, limits) {
                    Ok(b) => {
                        let b = strings(&b);
                        t.check(b == counts, || {
                            json!({ "input": input, "admitted": admitted, "row_counts": counts, "peak_coeffs": b })
                        });
                    }
                    Err(e) => t.error(&e, input.clone()),
                }
            }
        }
    }
    t.finish()
}

/// `S_I` is the only descent set inside `[1, max(I)-1]` whose spikes are
/// exactly `I` with the rightmost spike a valley.
pub fn check_canonical_sets(max_pos: usize) -> VerificationReport {
    let mut t = Tally::new("canonical-set", format!("admissible I, max(I) ≤ {max_pos}"));
    for i in admissible_up_to(max_pos) {
        let n = i.max() + 2;
        let got = canonical_descent_set(i);
        let matching: Vec<PositionSet> = PositionSet::all_below(i.max())
            .filter(|s| {
                let spikes = naive::spikes_of_mask(s.bits(), n);
                let last_is_valley = i.is_empty() || (s.contains(i.max() - 1) && !s.contains(i.max()));
                spikes == i.bits() && last_is_valley
            })
            .collect();
        t.check(matches!(got, Ok(s) if matching == [s]), || {
            json!({ "peaks": i, "canonical": format!("{got:?}"), "naive_candidates": matching })
        });
    }
    t.finish()
}

fn stats_case(t: &mut Tally, v: &[u8]) {
    let n = v.len();
    let p = Permutation::from_raw(v.to_vec());
    let d = descent_set(&p);
    let ok = d.bits() == naive::descent_mask(v)
        && peak_set(&p).bits() == naive::peak_mask(v)
        && valley_set(&p).bits() == naive::valley_mask(v)
        && spike_set(&p).bits() == naive::spike_mask(v)
        && peaks_of(d, n) == peak_set(&p)
        && valleys_of(d, n) == valley_set(&p)
        && spikes_of(d, n).bits() == naive::spikes_of_mask(d.bits(), n)
        && is_admissible(peak_set(&p));
    t.check(ok, || {
        json!({
            "sigma": line(v),
            "descents": d,
            "naive_descents": PositionSet::from_bits(naive::descent_mask(v)),
            "peaks": peak_set(&p),
            "naive_peaks": PositionSet::from_bits(naive::peak_mask(v)),
            "set_level_peaks": peaks_of(d, n),
            "valleys": valley_set(&p),
            "naive_valleys": PositionSet::from_bits(naive::valley_mask(v)),
            "set_level_valleys": valleys_of(d, n),
        })
    });
}

/// Permutation-level statistics against naive scans and against their
/// set-level counterparts applied to the descent set.
pub fn check_stats_consistency(exhaustive_max_n: usize, random_cases: usize, random_max_n: usize, seed: u64) -> VerificationReport {
    let mut t = Tally::new(
        "stats-consistency",
        format!("exhaustive n ≤ {exhaustive_max_n}, {random_cases} random cases n ≤ {random_max_n}, seed {seed:#x}"),
    );
    for n in 1..=exhaustive_max_n {
        naive::for_each_permutation(n, |v| stats_case(&mut t, v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_cases {
        let n = rng.gen_range(1..=random_max_n.max(1));
        let mut v: Vec<u8> = (1..=n as u8).collect();
        v.shuffle(&mut rng);
        stats_case(&mut t, &v);
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn set(s: &str) -> PositionSet {
        s.parse().unwrap()
    }

    #[test]
    fn goldens_pass() {
        assert!(check_golden_descent(&lim()).passed);
        assert!(check_golden_peak(&lim()).passed);
    }

    #[test]
    fn marked_lemma_small() {
        for n in 1..=4 {
            let r = check_marked_lemma(n, &lim()).unwrap();
            assert!(r.passed, "{r}");
        }
        assert!(check_marked_lemma(0, &lim()).is_err());
        assert!(check_marked_lemma(8, &lim()).is_err());
    }

    #[test]
    fn spike_sum_example() {
        let r = check_spike_sum(set("2,3"), 8..=8, 8, &lim()).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.checked, 2);
        assert!(check_spike_sum(set("5"), 3..=6, 6, &lim()).is_err());
    }

    #[test]
    fn flip_bijection_examples() {
        for j in ["", "4", "2", "2,4"] {
            let r = check_flip_bijection(set("2,4"), set(j), 8, &lim()).unwrap();
            assert!(r.passed, "{r}");
        }
        assert!(check_flip_bijection(set("2,3"), set(""), 8, &lim()).is_err());
        assert!(check_flip_bijection(set("2,4"), set("3"), 8, &lim()).is_err());
    }

    #[test]
    fn prefix_condition() {
        assert_eq!(initial_condition(&[1, 5, 3, 2, 4, 6, 7, 8], 4), Some(1));
        assert_eq!(initial_condition(&[1, 6, 3, 2, 4, 5, 7, 8], 4), None);
        assert_eq!(initial_condition(&[1, 4, 3, 2, 5, 6, 7, 8], 4), Some(0));
    }

    #[test]
    fn single_flip_case_passes() {
        let mut t = Tally::new("x", "y");
        flip_case(&mut t, &[2, 1, 3], 2, 3);
        assert!(t.finish().passed);
    }
}
