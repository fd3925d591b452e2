//! Fibonacci numbers with the shifted convention `F_0 = F_1 = 1`, extended by
//! `F_{-1} = 0` and `F_{-2} = 1`, together with the golden-ratio comparisons
//! and growth exponents used by the region definitions.

use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

/// Largest index whose value fits in an `i128`.
pub const MAX_I128_INDEX: i64 = 183;

const TABLE_LEN: usize = (MAX_I128_INDEX + 3) as usize;

const TABLE: [i128; TABLE_LEN] = {
    let mut t = [0i128; TABLE_LEN];
    t[0] = 1; // F_{-2}
    t[1] = 0; // F_{-1}
    let mut i = 2;
    while i < TABLE_LEN {
        t[i] = t[i - 1] + t[i - 2];
        i += 1;
    }
    t
};

/// `F_n` if it fits in an `i128`.
#[inline]
pub fn fib_i128(n: i64) -> Option<i128> {
    if (-2..=MAX_I128_INDEX).contains(&n) {
        Some(TABLE[(n + 2) as usize])
    } else {
        None
    }
}

/// `F_n` for `n >= -2`.
pub fn fib(n: i64) -> Result<BigInt> {
    if n < -2 {
        return Err(Error::FibonacciIndex(n));
    }
    if let Some(v) = fib_i128(n) {
        return Ok(BigInt::from(v));
    }
    let mut a = BigInt::from(TABLE[TABLE_LEN - 2]);
    let mut b = BigInt::from(TABLE[TABLE_LEN - 1]);
    for _ in MAX_I128_INDEX..n {
        let c = &a + &b;
        a = core::mem::replace(&mut b, c);
    }
    Ok(b)
}

/// `F_n F_{n-2} - F_{n-1}^2`, which equals `(-1)^n`.
pub fn cassini(n: i64) -> Result<BigInt> {
    Ok(fib(n)? * fib(n - 2)? - fib(n - 1)?.pow(2))
}

/// `F_{n+1} F_{n-2} - F_n F_{n-1}`, which equals `(-1)^n`.
pub fn cassini2(n: i64) -> Result<BigInt> {
    Ok(fib(n + 1)? * fib(n - 2)? - fib(n)? * fib(n - 1)?)
}

/// Sign of `b * beta - a` for the golden ratio `beta = (1 + sqrt 5) / 2`.
///
/// Equal only at `a = b = 0`. In particular `b < a / beta` exactly when this
/// returns `Less`.
pub fn cmp_beta_multiple(b: &BigInt, a: &BigInt) -> Ordering {
    // b * beta vs a  <=>  b * sqrt5 vs 2a - b
    let l = BigInt::from(2) * a - b;
    let sq = |x: &BigInt| x * x;
    if !b.is_negative() {
        if l.is_negative() {
            return Ordering::Greater;
        }
        (BigInt::from(5) * sq(b)).cmp(&sq(&l))
    } else {
        if !l.is_negative() {
            return Ordering::Less;
        }
        sq(&l).cmp(&(BigInt::from(5) * sq(b)))
    }
}

/// [`cmp_beta_multiple`] on machine integers.
pub fn cmp_beta_multiple_i64(b: i64, a: i64) -> Ordering {
    let (b, a) = (i128::from(b), i128::from(a));
    let l = 2 * a - b;
    let (b2, l2) = match (b.checked_mul(b).and_then(|x| x.checked_mul(5)), l.checked_mul(l)) {
        (Some(b2), Some(l2)) => (b2, l2),
        _ => return cmp_beta_multiple(&BigInt::from(b), &BigInt::from(a)),
    };
    if b >= 0 {
        if l < 0 {
            return Ordering::Greater;
        }
        b2.cmp(&l2)
    } else {
        if l >= 0 {
            return Ordering::Less;
        }
        l2.cmp(&b2)
    }
}

/// The growth exponents `K_0 = K_1 = 1`, `K_{2i} = K_{2i-1} + 1`,
/// `K_{2i+1} = K_{2i} + K_{2i-1}`.
pub fn growth_exponent(n: i64) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::GrowthIndex(n));
    }
    let (mut prev, mut cur) = (BigInt::one(), BigInt::one());
    for j in 2..=n {
        let next = if j % 2 == 0 { &cur + 1 } else { &cur + &prev };
        prev = core::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// Whether `F_{2n+1}/F_{2n} < F_{2n+3}/F_{2n+2} < beta < F_{2n+4}/F_{2n+3}`,
/// checked by cross-multiplication.
pub fn golden_bracket_holds(n: i64) -> Result<bool> {
    let f = |k: i64| fib(k);
    let (f0, f1, f2, f3, f4) = (f(2 * n)?, f(2 * n + 1)?, f(2 * n + 2)?, f(2 * n + 3)?, f(2 * n + 4)?);
    let first = &f1 * &f2 < &f3 * &f0;
    let below = cmp_beta_multiple(&f2, &f3) == Ordering::Greater;
    let above = cmp_beta_multiple(&f3, &f4) == Ordering::Less;
    Ok(first && below && above)
}

/// `(-1)^n` as a big integer.
pub fn sign_power(n: i64) -> BigInt {
    if n.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn base_values() {
        assert_eq!(fib(-2).unwrap(), BigInt::from(1));
        assert_eq!(fib(-1).unwrap(), BigInt::from(0));
        assert_eq!(fib(0).unwrap(), BigInt::from(1));
        assert_eq!(fib(1).unwrap(), BigInt::from(1));
        assert_eq!(fib(10).unwrap(), BigInt::from(89));
        assert_eq!(fib(12).unwrap(), BigInt::from(233));
        assert_eq!(fib(-3), Err(Error::FibonacciIndex(-3)));
    }

    #[test]
    fn big_indices_continue_the_table() {
        for n in MAX_I128_INDEX - 2..MAX_I128_INDEX + 40 {
            assert_eq!(fib(n).unwrap(), fib(n - 1).unwrap() + fib(n - 2).unwrap());
        }
        assert_eq!(fib_i128(MAX_I128_INDEX + 1), None);
    }

    #[test]
    fn cassini_examples() {
        assert_eq!(cassini(3).unwrap(), BigInt::from(-1));
        assert_eq!(cassini(2).unwrap(), BigInt::from(1));
        assert_eq!(cassini(90).unwrap(), BigInt::from(1));
        assert_eq!(cassini2(1).unwrap(), BigInt::from(-1));
        assert_eq!(cassini2(4).unwrap(), BigInt::from(1));
        assert_eq!(cassini2(51).unwrap(), BigInt::from(-1));
        for n in 1..=250 {
            assert_eq!(cassini(n).unwrap(), sign_power(n));
            assert_eq!(cassini2(n).unwrap(), sign_power(n));
        }
    }

    #[test]
    fn growth_exponents() {
        let k: alloc::vec::Vec<i64> = (0..10).map(|n| growth_exponent(n).unwrap().try_into().unwrap()).collect();
        assert_eq!(k, [1, 1, 2, 3, 4, 7, 8, 15, 16, 31]);
        assert!(growth_exponent(-1).is_err());
    }

    #[test]
    fn brackets_hold() {
        for n in 0..=40 {
            assert!(golden_bracket_holds(n).unwrap(), "n = {n}");
        }
    }

    /// Floating-point reference, used only far from the irrational boundary.
    fn float_side(b: i64, a: i64) -> Option<Ordering> {
        let beta = (1.0 + 5f64.sqrt()) / 2.0;
        let diff = b as f64 * beta - a as f64;
        if diff.abs() < 1e-6 * (1.0 + a.abs() as f64 + b.abs() as f64) {
            None
        } else {
            Some(if diff < 0.0 { Ordering::Less } else { Ordering::Greater })
        }
    }

    proptest! {
        #[test]
        fn golden_comparison_matches_floats(b in -1_000_000i64..1_000_000, a in -1_000_000i64..1_000_000) {
            let exact = cmp_beta_multiple_i64(b, a);
            prop_assert_eq!(exact, cmp_beta_multiple(&BigInt::from(b), &BigInt::from(a)));
            if let Some(f) = float_side(b, a) {
                prop_assert_eq!(exact, f);
            }
            prop_assert_eq!(exact == Ordering::Equal, a == 0 && b == 0);
        }
    }
}
