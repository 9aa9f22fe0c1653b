use planted::{verify_all, Level};

#[test]
fn fast_suite_passes() {
    let report = verify_all(Level::Fast, false);
    for c in &report.checks {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
    assert!(report.passed);
}

#[test]
fn injected_fault_is_caught() {
    let report = verify_all(Level::Fast, true);
    assert!(!report.passed);
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert_eq!(failed, vec!["certificate pds n=4 r=2 D=2"]);
}
