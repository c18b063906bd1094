use peakpoly::verify::{run_claim, run_suite, Claim, SuiteConfig};

#[test]
fn supporting_claims_pass() {
    let cfg = SuiteConfig::default();
    for name in ["peak-coefficients", "inclusion-exclusion", "canonical-set", "stats-consistency", "table1"] {
        let claim: Claim = name.parse().unwrap();
        for r in run_claim(claim, &cfg) {
            assert!(r.passed, "{r}");
            assert!(r.checked > 0, "{r}");
        }
    }
}

#[test]
fn reduced_suite_passes() {
    let cfg = SuiteConfig {
        max_n: Some(6),
        random_cases: 500,
        ..SuiteConfig::default()
    };
    let reports = run_suite(&cfg);
    assert_eq!(reports.len(), Claim::ALL.len());
    for r in &reports {
        assert!(r.passed, "{r}");
    }
}

#[test]
fn reports_serialize_without_empty_counterexample() {
    let r = &run_claim(Claim::GoldenDescent, &SuiteConfig::default())[0];
    let v = serde_json::to_value(r).unwrap();
    assert_eq!(v["claim"], "golden-descent");
    assert_eq!(v["passed"], true);
    assert!(v.get("counterexample").is_none());
}
