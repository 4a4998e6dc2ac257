mod common;

#[test]
fn cli_golden_cases() {
    let failures: Vec<String> = common::cli_cases()
        .into_iter()
        .filter_map(|(name, r)| r.err().map(|why| format!("{name}: {why}")))
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}
