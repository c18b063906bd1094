//! Reproduction of the coefficient table for `I = {2,4}` at center 4.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::naive::{admits_flip as naive_admits, descent_mask, prefix_values};
use super::{Tally, VerificationReport};
use crate::error::Result;
use crate::flips::{admits_flip, canonical_descent_set};
use crate::limits::Limits;
use crate::perm::Permutation;
use crate::polynomials::{coefficient_classes, descent_coeffs, peak_coeffs};
use crate::set::PositionSet;
use crate::stats::require_admissible;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub permutation: Permutation,
    /// `(i, admits an i-flip)` for each `i ∈ I`, in increasing `i`.
    pub flips: Vec<(usize, bool)>,
}

impl Table1Row {
    pub fn admits_none(&self) -> bool {
        self.flips.iter().all(|&(_, a)| !a)
    }

    /// The positions whose flip is admitted.
    pub fn admitted(&self) -> PositionSet {
        PositionSet::from_bits(
            self.flips
                .iter()
                .filter(|&&(_, a)| a)
                .fold(0, |m, &(i, _)| m | 1 << i),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Block {
    pub k: usize,
    pub rows: Vec<Table1Row>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1 {
    pub peaks: PositionSet,
    pub descents: PositionSet,
    pub center: usize,
    pub blocks: Vec<Table1Block>,
}

/// Every `σ ∈ D(S_I, 2m)` behind the coefficients at center `m`, grouped by
/// `k` and flagged with its flip admissions.
pub fn table1(i: PositionSet, m: usize, limits: &Limits) -> Result<Table1> {
    require_admissible(i)?;
    let s = canonical_descent_set(i)?;
    let classes = coefficient_classes(s, m, limits)?;
    let blocks = classes
        .into_iter()
        .enumerate()
        .map(|(k, perms)| {
            let rows = perms
                .into_iter()
                .map(|p| {
                    let flips = i
                        .iter()
                        .map(|pos| Ok((pos, admits_flip(&p, pos)?.admits())))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Table1Row { permutation: p, flips })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Table1Block { k, rows })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1 {
        peaks: i,
        descents: s,
        center: m,
        blocks,
    })
}

/// Reference rows as `(k, permutation, admits 2-flip, admits 4-flip)`.
const GOLDEN: [(usize, &str, bool, bool); 20] = [
    (0, "14325678", false, true),
    (0, "24315678", false, true),
    (0, "34215678", true, true),
    (1, "15324678", false, true),
    (1, "15423678", false, false),
    (1, "25314678", false, false),
    (1, "25413678", false, false),
    (1, "35214678", true, false),
    (1, "35412678", false, false),
    (1, "45213678", true, false),
    (1, "45312678", true, false),
    (2, "16523478", false, false),
    (2, "26513478", false, false),
    (2, "36512478", false, false),
    (2, "46512378", false, false),
    (2, "56213478", true, false),
    (2, "56312478", true, false),
    (2, "56412378", true, false),
    (3, "57612348", false, false),
    (3, "67512348", true, false),
];

/// The reference table for `I = {2,4}`, `m = 4`.
pub fn golden_table1() -> Table1 {
    let mut blocks: Vec<Table1Block> = (0..=4).map(|k| Table1Block { k, rows: Vec::new() }).collect();
    for (k, p, two, four) in GOLDEN {
        blocks[k].rows.push(Table1Row {
            permutation: p.parse().expect("golden permutation"),
            flips: vec![(2, two), (4, four)],
        });
    }
    Table1 {
        peaks: PositionSet::from_bits(0b10100),
        descents: PositionSet::from_bits(0b1100),
        center: 4,
        blocks,
    }
}

/// Compares `table1({2,4}, 4)` with the reference table, re-derives every
/// row with the naive oracles, and checks that the row counts reproduce the
/// descent and peak coefficients.
pub fn check_table1(limits: &Limits) -> VerificationReport {
    let mut t = Tally::new("table1", "I = {2,4}, m = 4");
    let golden = golden_table1();
    let i = golden.peaks;
    let m = golden.center;
    let computed = match table1(i, m, limits) {
        Ok(c) => c,
        Err(e) => {
            t.error(&e, json!({ "peaks": i, "center": m }));
            return t.finish();
        }
    };
    t.check(computed == golden, || {
        json!({ "expected": golden, "computed": computed })
    });

    // each row independently: descent set, initial-set condition, flags
    for block in &computed.blocks {
        let k = block.k;
        for row in &block.rows {
            let v = row.permutation.values();
            let prefix = prefix_values(v, m);
            let high: Vec<u8> = prefix.iter().copied().filter(|&x| x as usize > m).collect();
            let want: Vec<u8> = (m + 1..=m + k).map(|x| x as u8).collect();
            let naive_flags: Vec<(usize, bool)> = i
                .iter()
                .map(|pos| {
                    let (plus, minus) = naive_admits(v, pos);
                    (pos, plus || minus)
                })
                .collect();
            t.check(
                descent_mask(v) == computed.descents.bits() && high == want && naive_flags == row.flips,
                || json!({ "k": k, "row": row, "naive_flags": naive_flags, "prefix": prefix }),
            );
        }
    }

    let a = descent_coeffs(computed.descents, m, limits);
    let rows: Vec<usize> = computed.blocks.iter().map(|b| b.rows.len()).collect();
    match a {
        Ok(a) => {
            let got: Vec<String> = a.coeffs().iter().map(|c| c.to_string()).collect();
            let want: Vec<String> = rows.iter().map(|r| r.to_string()).collect();
            t.check(got == want, || json!({ "descent_coeffs": got, "row_counts": want }));
        }
        Err(e) => t.error(&e, json!({ "descents": computed.descents, "center": m })),
    }

    // rows whose admitted flips are exactly A count b_k(I ∖ A)
    for admitted in i.subsets() {
        let rest = i.difference(admitted);
        let counts: Vec<String> = computed
            .blocks
            .iter()
            .map(|b| b.rows.iter().filter(|r| r.admitted() == admitted).count().to_string())
            .collect();
        match peak_coeffs(rest, m, limits) {
            Ok(b) => {
                let got: Vec<String> = b.coeffs().iter().map(|c| c.to_string()).collect();
                t.check(got == counts, || {
                    json!({ "admitted": admitted, "peak_coeffs_of": rest, "peak_coeffs": got, "row_counts": counts })
                });
            }
            Err(e) => t.error(&e, json!({ "peaks": rest, "center": m })),
        }
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_shape() {
        let g = golden_table1();
        let sizes: Vec<usize> = g.blocks.iter().map(|b| b.rows.len()).collect();
        assert_eq!(sizes, [3, 8, 7, 2, 0]);
        let none: Vec<usize> = g
            .blocks
            .iter()
            .map(|b| b.rows.iter().filter(|r| r.admits_none()).count())
            .collect();
        assert_eq!(none, [0, 4, 4, 1, 0]);
        assert_eq!(g.peaks.to_string(), "{2,4}");
        assert_eq!(g.descents.to_string(), "{2,3}");
    }

    #[test]
    fn table_matches_reference() {
        let r = check_table1(&Limits::default());
        assert!(r.passed, "{r}");
    }
}
