use proptest::prelude::*;
use qp_henon_harness::campaign::{Campaign, Overrides};

#[test]
fn negative_control_fails_and_replays() {
    let report = Campaign::bundled("negative-control").unwrap().run().unwrap();
    assert!(!report.ok());
    for entry in &report.entries {
        let sampled = entry.sampled.as_ref().unwrap();
        assert!(sampled.failures > 0, "{} produced no counterexample", entry.id);
        assert_eq!(sampled.failures + sampled.skipped, sampled.samples);
        for cx in &sampled.counterexamples {
            assert_eq!(cx.replay().unwrap(), cx.trace);
        }
    }
}

#[test]
fn empty_source_is_skipped_not_failed() {
    // J0 has no integer profiles when d = 1.
    let text = r#"{"name": "j0", "entries": [{"id": "large/j0-invariant", "d": 1, "samples": 50}]}"#;
    let report = Campaign::from_json(text).unwrap().run().unwrap();
    assert!(report.ok());
    let sampled = report.entries[0].sampled.as_ref().unwrap();
    assert_eq!(sampled.skipped, 50);
    assert!(!sampled.notes.is_empty());
}

#[test]
fn runs_are_deterministic() {
    let c = Campaign::from_json(
        r#"{"name": "t", "entries": [
            {"id": "large/j-descent", "d": 2, "samples": 100, "seed": 5, "exhaustive": false},
            {"id": "escape/G", "d": 1, "samples": 20, "seed": 6}
        ]}"#,
    )
    .unwrap();
    let a = c.run().unwrap();
    let b = c.run().unwrap();
    assert!(a.same_outcome(&b));
    let other = c.run_with(&Overrides { seed: Some(99), ..Overrides::default() }).unwrap();
    assert_eq!(other.entries[0].sampled.as_ref().unwrap().seed, 99);
}

#[test]
fn all_lemmas_fails_only_on_known_claims() {
    let report = Campaign::bundled("all-lemmas").unwrap().run().unwrap();
    let failing: Vec<(String, Option<i64>)> =
        report.entries.iter().filter(|e| e.failures() > 0).map(|e| (e.id.clone(), e.d)).collect();
    assert_eq!(
        failing,
        vec![
            ("small/a5-two-step".to_string(), Some(-3)),
            ("large/tn-descent".to_string(), Some(2)),
            ("remarks".to_string(), None),
        ]
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sample_accounting(seed in any::<u64>(), samples in 1usize..40, d in prop::sample::select(vec![-2i64, 0, 1, 3])) {
        let id = match d {
            -2 => "small/p-regions",
            0 => "unit/m-descent",
            1 => "large/j-descent",
            _ => "large/fgh-escape",
        };
        let text = format!(
            r#"{{"name": "p", "entries": [{{"id": "{id}", "d": {d}, "samples": {samples}, "seed": {seed}, "exhaustive": false}}]}}"#
        );
        let report = Campaign::from_json(&text).unwrap().run().unwrap();
        let r = report.entries[0].sampled.as_ref().unwrap();
        prop_assert_eq!(r.passes + r.failures + r.skipped, samples);
        prop_assert!(r.undefined_inverse <= r.skipped);
    }
}
