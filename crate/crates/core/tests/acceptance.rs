//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use peakpoly::verify::{
    check_descent_oracle, check_flip_algebra, check_flip_bijection, check_golden_descent,
    check_golden_peak, check_marked_lemma, check_partition_invariance, check_peak_oracle,
    check_positivity, check_recentering, check_spike_sum, check_table1, FlipAlgebraConfig,
    VerificationReport, DEFAULT_SEED,
};
use peakpoly::{is_admissible, Limits, PositionSet};

struct Outcome {
    passed: bool,
    checked: u64,
    detail: Option<String>,
}

fn from_reports(reports: Vec<VerificationReport>) -> Outcome {
    let checked = reports.iter().map(|r| r.checked).sum();
    let detail = reports.iter().find(|r| !r.passed).map(|r| r.to_string());
    Outcome {
        passed: detail.is_none() && !reports.is_empty(),
        checked,
        detail,
    }
}

fn settle(r: peakpoly::Result<VerificationReport>) -> VerificationReport {
    r.unwrap_or_else(|e| VerificationReport {
        claim: "precondition".into(),
        range: String::new(),
        passed: false,
        checked: 0,
        counterexample: Some(serde_json::json!(e.to_string())),
    })
}

fn admissible(max: usize) -> Vec<PositionSet> {
    PositionSet::all_below(max + 1).filter(|i| is_admissible(*i)).collect()
}

fn main() -> ExitCode {
    let lim = Limits::default();
    type Criterion = (&'static str, Option<Duration>, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        (
            "golden descent coefficients d({2,3}) at m=4",
            Some(Duration::from_secs(5)),
            Box::new(move || from_reports(vec![check_golden_descent(&lim)])),
        ),
        (
            "golden peak coefficients at m=4 and their sum",
            None,
            Box::new(move || from_reports(vec![check_golden_peak(&lim)])),
        ),
        (
            "table of D({2,3},8) with flip flags",
            None,
            Box::new(move || from_reports(vec![check_table1(&lim)])),
        ),
        (
            "descent oracles, S ⊆ {1..5}, n ≤ 9",
            Some(Duration::from_secs(120)),
            Box::new(move || from_reports(vec![check_descent_oracle(5, 9, &lim)])),
        ),
        (
            "peak oracles, admissible max(I) ≤ 6, n ≤ 9",
            None,
            Box::new(move || from_reports(vec![check_peak_oracle(6, 9, &lim)])),
        ),
        (
            "spike-sum identity, S ⊆ {1..5}, n ≤ 9",
            None,
            Box::new(move || {
                let reports = PositionSet::all_below(6)
                    .map(|s| settle(check_spike_sum(s, s.max() + 1..=9, 8, &lim)))
                    .collect();
                from_reports(reports)
            }),
        ),
        (
            "marked-permutation counts, n ≤ 6",
            Some(Duration::from_secs(60)),
            Box::new(move || from_reports((1..=6).map(|n| settle(check_marked_lemma(n, &lim))).collect())),
        ),
        (
            "flip algebra, exhaustive n ≤ 6, 10^4 random n ≤ 12",
            None,
            Box::new(|| {
                from_reports(vec![check_flip_algebra(&FlipAlgebraConfig {
                    exhaustive_max_n: 6,
                    stability_max_n: 7,
                    random_cases: 10_000,
                    random_max_n: 12,
                    seed: DEFAULT_SEED,
                })])
            }),
        ),
        (
            "flip bijection, admissible max(I) ≤ 4, all J ⊆ I, n = 8",
            None,
            Box::new(move || {
                let reports = admissible(4)
                    .into_iter()
                    .flat_map(|i| i.subsets().map(move |j| (i, j)))
                    .map(|(i, j)| settle(check_flip_bijection(i, j, 8, &lim)))
                    .collect();
                from_reports(reports)
            }),
        ),
        (
            "peak coefficients nonnegative, max(I) ≤ 5",
            None,
            Box::new(move || from_reports(vec![check_positivity(5, &lim)])),
        ),
        (
            "recentering, max(S) ≤ m < m' ≤ 5, n ≤ 12",
            None,
            Box::new(move || from_reports(vec![check_recentering(5, 12, &lim)])),
        ),
        (
            "partition invariance, depth 0..=3",
            None,
            Box::new(move || from_reports(vec![check_partition_invariance(5, 9, 3, &lim)])),
        ),
    ];

    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let ok = out.passed && in_time;
        if !ok {
            failures += 1;
        }
        let limit = budget.map(|b| format!(" (limit {}s)", b.as_secs())).unwrap_or_default();
        println!(
            "criterion {:>2}: {} {name}: {} cases in {:.2?}{limit}",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            out.checked,
            elapsed,
        );
        if let Some(d) = out.detail {
            println!("    {d}");
        }
        if !in_time {
            println!("    over the time limit");
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
