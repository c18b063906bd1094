//! Computational checks of every identity the engine relies on.
//!
//! Each check compares library output against brute-force oracles from
//! [`naive`] over a finite parameter range and produces a
//! [`VerificationReport`]. A failed report always carries the first
//! counterexample with its full input.

mod checks;
mod naive;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::limits::Limits;

pub use checks::{
    check_canonical_sets, check_descent_oracle, check_flip_algebra, check_flip_bijection,
    check_golden_descent, check_golden_peak, check_inclusion_exclusion, check_marked_lemma,
    check_partition_invariance, check_peak_coefficients, check_peak_oracle, check_positivity,
    check_recentering, check_spike_sum, check_stats_consistency, FlipAlgebraConfig,
};
pub use table::{check_table1, golden_table1, table1, Table1, Table1Block, Table1Row};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub range: String,
    pub passed: bool,
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} [{}] {} cases", self.claim, self.range, self.checked)?;
        if let Some(ce) = &self.counterexample {
            write!(f, "; counterexample: {ce}")?;
        }
        Ok(())
    }
}

/// Accumulates cases for one report, keeping the first failure.
pub(crate) struct Tally {
    claim: String,
    range: String,
    checked: u64,
    counterexample: Option<Value>,
}

impl Tally {
    pub(crate) fn new(claim: impl Into<String>, range: impl Into<String>) -> Self {
        Tally {
            claim: claim.into(),
            range: range.into(),
            checked: 0,
            counterexample: None,
        }
    }

    /// Records one case. `witness` is only evaluated on failure.
    pub(crate) fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) -> bool {
        self.checked += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
        ok
    }

    /// Records a library error as a failed case.
    pub(crate) fn error(&mut self, err: &Error, input: Value) {
        self.check(false, || serde_json::json!({ "input": input, "error": err.to_string() }));
    }

    pub(crate) fn failed(&self) -> bool {
        self.counterexample.is_some()
    }

    pub(crate) fn finish(self) -> VerificationReport {
        VerificationReport {
            passed: self.counterexample.is_none(),
            claim: self.claim,
            range: self.range,
            checked: self.checked,
            counterexample: self.counterexample,
        }
    }
}

/// The named claims the suite can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Claim {
    GoldenDescent,
    GoldenPeak,
    Table1,
    DescentOracle,
    PeakOracle,
    SpikeSum,
    MarkedLemma,
    FlipAlgebra,
    FlipBijection,
    Positivity,
    Recenter,
    Partition,
    PeakCoefficients,
    InclusionExclusion,
    CanonicalSet,
    StatsConsistency,
}

impl Claim {
    pub const ALL: [Claim; 16] = [
        Claim::GoldenDescent,
        Claim::GoldenPeak,
        Claim::Table1,
        Claim::DescentOracle,
        Claim::PeakOracle,
        Claim::SpikeSum,
        Claim::MarkedLemma,
        Claim::FlipAlgebra,
        Claim::FlipBijection,
        Claim::Positivity,
        Claim::Recenter,
        Claim::Partition,
        Claim::PeakCoefficients,
        Claim::InclusionExclusion,
        Claim::CanonicalSet,
        Claim::StatsConsistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::GoldenDescent => "golden-descent",
            Claim::GoldenPeak => "golden-peak",
            Claim::Table1 => "table1",
            Claim::DescentOracle => "descent-oracle",
            Claim::PeakOracle => "peak-oracle",
            Claim::SpikeSum => "spike-sum",
            Claim::MarkedLemma => "marked-lemma",
            Claim::FlipAlgebra => "flip-algebra",
            Claim::FlipBijection => "flip-bijection",
            Claim::Positivity => "positivity",
            Claim::Recenter => "recenter",
            Claim::Partition => "partition",
            Claim::PeakCoefficients => "peak-coefficients",
            Claim::InclusionExclusion => "inclusion-exclusion",
            Claim::CanonicalSet => "canonical-set",
            Claim::StatsConsistency => "stats-consistency",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Claim::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown claim {s:?}")))
    }
}

pub const DEFAULT_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Parameters shared by the suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub limits: Limits,
    /// Overrides the largest `n` of the enumerative sweeps.
    pub max_n: Option<usize>,
    pub seed: u64,
    pub random_cases: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            limits: Limits::default(),
            max_n: None,
            seed: DEFAULT_SEED,
            random_cases: 10_000,
        }
    }
}

impl SuiteConfig {
    /// `max_n` if given, else `default`, never above `hard` or the cap.
    pub(crate) fn bound(&self, default: usize, hard: usize) -> usize {
        self.max_n
            .unwrap_or(default)
            .min(hard)
            .min(self.limits.cap())
    }
}

/// Runs one claim over its documented range.
pub fn run_claim(claim: Claim, cfg: &SuiteConfig) -> Vec<VerificationReport> {
    let lim = &cfg.limits;
    match claim {
        Claim::GoldenDescent => vec![check_golden_descent(lim)],
        Claim::GoldenPeak => vec![check_golden_peak(lim)],
        Claim::Table1 => vec![check_table1(lim)],
        Claim::DescentOracle => vec![check_descent_oracle(5, cfg.bound(9, 10), lim)],
        Claim::PeakOracle => vec![check_peak_oracle(6, cfg.bound(9, 10), lim)],
        Claim::SpikeSum => {
            let top = cfg.bound(9, 10);
            let mut reports = Vec::new();
            for s in crate::set::PositionSet::all_below(6) {
                let lo = s.max() + 1;
                if lo <= top {
                    reports.push(settle("spike-sum", check_spike_sum(s, lo..=top, cfg.bound(8, 9), lim)));
                }
            }
            vec![merge("spike-sum", format!("S ⊆ {{1..5}}, n ≤ {top}"), reports)]
        }
        Claim::MarkedLemma => {
            let top = cfg.bound(6, 7);
            let reports = (1..=top)
                .map(|n| settle("marked-lemma", check_marked_lemma(n, lim)))
                .collect();
            vec![merge("marked-lemma", format!("n ≤ {top}"), reports)]
        }
        Claim::FlipAlgebra => vec![check_flip_algebra(&FlipAlgebraConfig {
            exhaustive_max_n: cfg.bound(6, 8),
            stability_max_n: cfg.bound(7, 8),
            random_cases: cfg.random_cases,
            random_max_n: 12.min(lim.cap()),
            seed: cfg.seed,
        })],
        Claim::FlipBijection => {
            let n = cfg.bound(8, 9);
            let mut reports = Vec::new();
            for i in admissible_up_to(4) {
                if i.max() < n {
                    for j in i.subsets() {
                        reports.push(settle("flip-bijection", check_flip_bijection(i, j, n, lim)));
                    }
                }
            }
            vec![merge("flip-bijection", format!("max(I) ≤ 4, J ⊆ I, n = {n}"), reports)]
        }
        Claim::Positivity => vec![check_positivity(5, lim)],
        Claim::Recenter => vec![check_recentering(5, 12, lim)],
        Claim::Partition => vec![check_partition_invariance(5, cfg.bound(9, 10), 3, lim)],
        Claim::PeakCoefficients => vec![check_peak_coefficients(5, 6, cfg.bound(9, 10), lim)],
        Claim::InclusionExclusion => vec![check_inclusion_exclusion(4, lim)],
        Claim::CanonicalSet => vec![check_canonical_sets(12)],
        Claim::StatsConsistency => vec![check_stats_consistency(
            cfg.bound(7, 9),
            cfg.random_cases,
            12,
            cfg.seed,
        )],
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<VerificationReport> {
    Claim::ALL
        .iter()
        .flat_map(|&c| run_claim(c, cfg))
        .collect()
}

/// A precondition error becomes a failed report carrying the message.
fn settle(claim: &str, r: crate::error::Result<VerificationReport>) -> VerificationReport {
    r.unwrap_or_else(|e| VerificationReport {
        claim: claim.to_string(),
        range: "precondition".to_string(),
        passed: false,
        checked: 0,
        counterexample: Some(serde_json::json!({ "error": e.to_string() })),
    })
}

/// Folds several reports into one, keeping the first counterexample.
pub(crate) fn merge(claim: &str, range: String, reports: Vec<VerificationReport>) -> VerificationReport {
    let checked = reports.iter().map(|r| r.checked).sum();
    let counterexample = reports.iter().find_map(|r| {
        r.counterexample.as_ref().map(|ce| serde_json::json!({ "from": r.range, "detail": ce }))
    });
    VerificationReport {
        claim: claim.to_string(),
        range,
        passed: counterexample.is_none(),
        checked,
        counterexample,
    }
}

/// Admissible sets with every member at most `max`.
pub(crate) fn admissible_up_to(max: usize) -> Vec<crate::set::PositionSet> {
    let mut v: Vec<_> = crate::set::PositionSet::all_below(max + 1)
        .filter(|i| crate::stats::is_admissible(*i))
        .collect();
    v.sort_by_key(|i| i.to_vec());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_names_round_trip() {
        for c in Claim::ALL {
            assert_eq!(c.name().parse::<Claim>().unwrap(), c);
        }
        assert!("nope".parse::<Claim>().is_err());
    }

    #[test]
    fn failing_tally_keeps_first_witness() {
        let mut t = Tally::new("demo", "tiny");
        t.check(true, || unreachable!());
        t.check(false, || serde_json::json!("first"));
        t.check(false, || serde_json::json!("second"));
        let r = t.finish();
        assert!(!r.passed);
        assert_eq!(r.checked, 3);
        assert_eq!(r.counterexample, Some(serde_json::json!("first")));
    }

    #[test]
    fn admissible_sets_listed() {
        let sets: Vec<String> = admissible_up_to(4).iter().map(|s| s.to_string()).collect();
        assert_eq!(sets, ["{}", "{2}", "{2,4}", "{3}", "{4}"]);
    }
}
