use proptest::prelude::*;
use qp_henon::regions::{classify, contains, matching_labels, window_index, Partition};
use qp_henon::{NormProfile, Regime};

#[test]
fn one_label_per_profile_in_a_small_window() {
    for d in [-5i64, -2, -1, 0, 1, 2, 4, 7] {
        let part = Partition::new(d);
        for a in -40..=40 {
            for b in -40..=40 {
                let q = NormProfile::new(a, b);
                let labels = part.matching_labels(q);
                assert_eq!(labels.len(), 1, "d = {d}, ({a}, {b}): {labels:?}");
                assert_eq!(labels[0], part.classify(q));
                assert_eq!(labels, matching_labels(q, d));
                assert_eq!(labels[0].regime, Regime::of(d));
            }
        }
    }
}

#[test]
fn window_index_is_the_classification() {
    for d in [-3i64, 0, 2] {
        let w = 25;
        let index = window_index(d, w);
        // Decomposition pieces and T_n overlay partition labels; count only
        // the profiles filed under their own partition label.
        let mut own = 0;
        for (label, profiles) in &index {
            for &(a, b) in profiles {
                let q = NormProfile::new(a, b);
                assert!(contains(*label, q, d), "d = {d}, ({a}, {b}) filed under {label:?}");
                own += usize::from(classify(q, d) == *label);
            }
        }
        assert_eq!(own as i64, (2 * w + 1) * (2 * w + 1));
    }
}

proptest! {
    #[test]
    fn compiled_and_generic_agree(d in -20i64..20, a in -5000i64..5000, b in -5000i64..5000) {
        let q = NormProfile::new(a, b);
        prop_assert_eq!(Partition::new(d).classify(q), classify(q, d));
    }
}
