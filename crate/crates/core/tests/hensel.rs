use proptest::prelude::*;
use qp_henon::{OddPrime, PadicRational, TruncatedPadic};

fn primes() -> impl Strategy<Value = OddPrime> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13, 101]).prop_map(|p| OddPrime::new(p).unwrap())
}

proptest! {
    #[test]
    fn sqrt_of_a_square_is_a_root(p in primes(), n in -100_000i64..100_000, d in 1i64..10_000, prec in 1u32..30) {
        prop_assume!(n != 0);
        let r = PadicRational::new(n, d, p).unwrap();
        let sq = r.mul(&r).unwrap();
        let h = TruncatedPadic::sqrt(&sq, prec).unwrap();
        let plus = TruncatedPadic::from_rational(&r, prec);
        let minus = TruncatedPadic::from_rational(&r.neg(), prec);
        prop_assert!(h.agrees_with(&plus) || h.agrees_with(&minus));
        prop_assert!(h.mul(&h).unwrap().agrees_with(&TruncatedPadic::from_rational(&sq, prec)));
        // The chosen root has first digit in 1..=(p-1)/2.
        let first = h.digits()[0];
        prop_assert!(first >= 1 && first <= (p.get() - 1) / 2);
    }

    #[test]
    fn exact_root_round_trips(p in primes(), n in -1000i64..1000, d in 1i64..1000) {
        prop_assume!(n != 0);
        let r = PadicRational::new(n, d, p).unwrap();
        let root = r.mul(&r).unwrap().rational_sqrt().unwrap();
        prop_assert!(root == r || root == r.neg());
    }
}

#[test]
fn non_residue_has_no_root() {
    let p = OddPrime::new(7).unwrap();
    // 3 is not a square mod 7.
    let x = PadicRational::new(3, 1, p).unwrap();
    assert!(TruncatedPadic::sqrt(&x, 10).is_err());
    assert!(x.rational_sqrt().is_none());
    // Odd valuation.
    let x = PadicRational::new(7, 1, p).unwrap();
    assert!(TruncatedPadic::sqrt(&x, 10).is_err());
}
