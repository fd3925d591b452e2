//! Haar measure on `Q_p` and `Q_p^2`, normalised so `mu(Z_p) = 1`.
//!
//! All values are exact rationals. A closed ball of radius `p^a` has measure
//! `p^a`; the sphere `|x| = p^a` has measure `p^a (1 - 1/p)`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fib::fib;
use crate::norm::NormProfile;
use crate::prime::OddPrime;
use crate::regions::{Partition, RegionLabel};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MeasureValue {
    Finite(BigRational),
    Infinite,
}

impl MeasureValue {
    pub fn zero() -> Self {
        MeasureValue::Finite(BigRational::zero())
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            MeasureValue::Finite(q) => Some(q),
            MeasureValue::Infinite => None,
        }
    }

    /// Approximate decimal value, for display only.
    pub fn to_f64(&self) -> f64 {
        match self {
            MeasureValue::Finite(q) => ratio_to_f64(q),
            MeasureValue::Infinite => f64::INFINITY,
        }
    }
}

fn ratio_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Shift both sides down so the quotient fits.
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl core::str::FromStr for MeasureValue {
    type Err = Error;

    /// The `Display` form: `num/den` or `inf`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(MeasureValue::Infinite);
        }
        s.parse::<BigRational>()
            .map(MeasureValue::Finite)
            .map_err(|_| Error::Parse(alloc::format!("bad measure {s:?}")))
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Finite(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            MeasureValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Add for MeasureValue {
    type Output = MeasureValue;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (MeasureValue::Finite(a), MeasureValue::Finite(b)) => MeasureValue::Finite(a + b),
            _ => MeasureValue::Infinite,
        }
    }
}

impl Mul for MeasureValue {
    type Output = MeasureValue;

    /// `0 * inf = 0`, the usual convention for product measures.
    fn mul(self, rhs: Self) -> Self {
        match (self, rhs) {
            (MeasureValue::Finite(a), MeasureValue::Finite(b)) => MeasureValue::Finite(a * b),
            (MeasureValue::Finite(a), MeasureValue::Infinite) | (MeasureValue::Infinite, MeasureValue::Finite(a))
                if a.is_zero() =>
            {
                MeasureValue::zero()
            }
            _ => MeasureValue::Infinite,
        }
    }
}

/// `p^e` for any integer `e`.
pub fn p_power(p: OddPrime, e: i64) -> BigRational {
    let m = BigInt::from(p.pow(e.unsigned_abs()));
    if e >= 0 {
        BigRational::from_integer(m)
    } else {
        BigRational::new(BigInt::one(), m)
    }
}

fn sphere_factor(p: OddPrime) -> BigRational {
    let pp = BigInt::from(p.get());
    BigRational::new(&pp - 1u32, pp)
}

/// Closed ball of radius `p^a`.
pub fn ball_measure(a: i64, p: OddPrime) -> MeasureValue {
    MeasureValue::Finite(p_power(p, a))
}

/// The sphere `|x| = p^a`.
pub fn sphere_measure(a: i64, p: OddPrime) -> MeasureValue {
    MeasureValue::Finite(p_power(p, a) * sphere_factor(p))
}

/// Measure of the profile rectangle `|x| = p^a, |y| = p^b`.
pub fn profile_measure(a: i64, b: i64, p: OddPrime) -> MeasureValue {
    MeasureValue::Finite(p_power(p, a + b) * sphere_factor(p) * sphere_factor(p))
}

fn tn_exponent(n: i64, k: i64, shift: i64) -> Result<i64> {
    if k < 2 {
        return Err(Error::TnExponent(k));
    }
    if n < 0 {
        return Err(Error::FibonacciIndex(n));
    }
    let f = fib(n + shift)?;
    let e = f * BigInt::from(k - 1);
    e.to_i64().ok_or(Error::TnExponent(k))
}

/// `mu(T_n)` for `|c| = p^k`: the product of the spheres of radii
/// `p^{(k-1)F_{n+1}}` and `p^{(k-1)F_n}`, i.e. `p^{(k-1)F_{n+2}} (1-1/p)^2`.
pub fn tn_measure(n: i64, k: i64, p: OddPrime) -> Result<MeasureValue> {
    let a = tn_exponent(n, k, 1)?;
    let b = tn_exponent(n, k, 0)?;
    Ok(sphere_measure(a, p) * sphere_measure(b, p))
}

/// The same product taken over closed balls instead of spheres:
/// `p^{(k-1)F_{n+2}}`. It exceeds [`tn_measure`] by the factor `(1-1/p)^-2`.
pub fn tn_ball_product(n: i64, k: i64, p: OddPrime) -> Result<MeasureValue> {
    let a = tn_exponent(n, k, 1)?;
    let b = tn_exponent(n, k, 0)?;
    Ok(ball_measure(a, p) * ball_measure(b, p))
}

/// `(1 - 1/p)^2`, the exact ratio `tn_measure / tn_ball_product`.
pub fn tn_ratio(p: OddPrime) -> BigRational {
    sphere_factor(p) * sphere_factor(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TnRow {
    pub n: i64,
    pub measure: MeasureValue,
    pub ball_product: MeasureValue,
    pub partial_sum: MeasureValue,
}

/// `mu(T_0), ..., mu(T_{n_max})` with running sums.
pub fn tn_partial_sums(n_max: i64, k: i64, p: OddPrime) -> Result<Vec<TnRow>> {
    let mut rows = Vec::new();
    let mut sum = MeasureValue::zero();
    for n in 0..=n_max {
        let measure = tn_measure(n, k, p)?;
        sum = sum + measure.clone();
        rows.push(TnRow { n, ball_product: tn_ball_product(n, k, p)?, measure, partial_sum: sum.clone() });
    }
    Ok(rows)
}

/// Sum of profile measures over the profiles of `label` with `|a|, |b| <= window`.
///
/// Profiles are grouped by `a + b`, since the measure only depends on the sum.
pub fn region_window_measure(label: RegionLabel, d: i64, p: OddPrime, window: i64) -> MeasureValue {
    let mut counts: Vec<u64> = alloc::vec![0; (4 * window.max(0) + 1) as usize];
    let part = Partition::new(d);
    for a in -window..=window {
        for b in -window..=window {
            if part.contains(label, NormProfile::new(a, b)) {
                counts[(a + b + 2 * window) as usize] += 1;
            }
        }
    }
    let mut total = BigRational::zero();
    for (i, &cnt) in counts.iter().enumerate() {
        if cnt > 0 {
            let s = i as i64 - 2 * window;
            total += p_power(p, s) * BigRational::from_integer(BigInt::from(cnt));
        }
    }
    MeasureValue::Finite(total * tn_ratio(p))
}

/// `sum_{lo <= e <= a} mu(|x| = p^e)`, which telescopes to `p^a - p^{lo-1}`.
pub fn truncated_ball_sum(a: i64, lo: i64, p: OddPrime) -> MeasureValue {
    let mut total = MeasureValue::zero();
    for e in lo..=a {
        total = total + sphere_measure(e, p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::regions::{Regime, RegionName};
    use proptest::prelude::*;

    fn pr(n: u64) -> OddPrime {
        OddPrime::new(n).unwrap()
    }

    fn rat(n: i64, d: i64) -> MeasureValue {
        MeasureValue::Finite(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn balls_and_spheres() {
        let p = pr(5);
        assert_eq!(ball_measure(0, p), rat(1, 1));
        assert_eq!(ball_measure(3, p), rat(125, 1));
        assert_eq!(ball_measure(-2, p), rat(1, 25));
        assert_eq!(sphere_measure(0, p), rat(4, 5));
        assert_eq!(sphere_measure(1, pr(3)), rat(2, 1));
    }

    #[test]
    fn tn_values() {
        let p = pr(3);
        assert_eq!(tn_measure(0, 2, p).unwrap(), rat(4, 1));
        assert_eq!(tn_measure(1, 2, p).unwrap(), rat(12, 1));
        assert_eq!(tn_measure(0, 1, p), Err(Error::TnExponent(1)));
        // F_2..F_10 = 2, 3, 5, 8, 13, 21, 34, 55, 89.
        let expect = [2u32, 3, 5, 8, 13, 21, 34, 55, 89];
        let mut sum = BigRational::zero();
        let rows = tn_partial_sums(8, 2, p).unwrap();
        for (row, e) in rows.iter().zip(expect) {
            let v = BigRational::from_integer(BigInt::from(3u32).pow(e)) * BigRational::new(4.into(), 9.into());
            sum += &v;
            assert_eq!(row.measure, MeasureValue::Finite(v));
            assert_eq!(row.partial_sum, MeasureValue::Finite(sum.clone()));
            assert_eq!(row.ball_product, MeasureValue::Finite(BigRational::from_integer(BigInt::from(3u32).pow(e))));
        }
        assert!(rows.windows(2).all(|w| w[0].partial_sum < w[1].partial_sum));
    }

    #[test]
    fn window_measures() {
        let p = pr(3);
        let z = RegionLabel::parse(Regime::Small, "Z").unwrap();
        for w in [0, 3, 7] {
            assert_eq!(region_window_measure(z, -1, p, w), rat(4, 9));
        }
        let j0 = RegionLabel::parse(Regime::Large, "J0").unwrap();
        assert_eq!(region_window_measure(j0, 1, p, 8), MeasureValue::zero());
        // LARGE F at d = 1 is a <= 0, b <= -1 inside the window.
        let f = RegionLabel::parse(Regime::Large, "F").unwrap();
        let w = 5;
        let mut direct = MeasureValue::zero();
        for a in -w..=0 {
            for b in -w..=-1 {
                direct = direct + sphere_measure(a, p) * sphere_measure(b, p);
            }
        }
        assert_eq!(region_window_measure(f, 1, p, w), direct);
        // Closed form: (1 - p^{-6}) * (p^{-1} - p^{-6}).
        let q = |e| p_power(p, e);
        let closed = (BigRational::one() - q(-6)) * (q(-1) - q(-6));
        assert_eq!(region_window_measure(f, 1, p, w), MeasureValue::Finite(closed));
    }

    #[test]
    fn infinity_rules() {
        assert_eq!(MeasureValue::zero() * MeasureValue::Infinite, MeasureValue::zero());
        assert_eq!(rat(1, 2) + MeasureValue::Infinite, MeasureValue::Infinite);
        assert_eq!(rat(3, 4).to_string(), "3/4");
        assert_eq!(RegionName::F.as_str(), "F");
    }

    proptest! {
        #[test]
        fn ball_is_union_of_spheres(a in -20i64..20, depth in 0i64..30) {
            let p = pr(7);
            let lo = a - depth;
            let tail = ball_measure(lo - 1, p);
            prop_assert_eq!(truncated_ball_sum(a, lo, p) + tail, ball_measure(a, p));
        }

        #[test]
        fn window_measure_monotone(d in -3i64..4, w in 0i64..7) {
            let p = pr(3);
            for label in crate::regions::window_index(d, w + 1).into_keys() {
                let small = region_window_measure(label, d, p, w);
                let big = region_window_measure(label, d, p, w + 1);
                prop_assert!(small <= big);
            }
        }
    }
}
