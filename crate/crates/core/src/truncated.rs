//! Finite-precision p-adic expansions.
//!
//! A [`TruncatedPadic`] is either exactly zero, a value `p^v * (u + O(p^N))`
//! with a unit `u` known to `N` digits, or a value only known to be
//! `O(p^k)` (every computed digit cancelled). Arithmetic tracks precision
//! so every reported valuation is certified: a result whose leading digit is
//! not determined comes back as [`TruncatedPadic::Indeterminate`], never as a
//! guess.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result, SquareObstruction};
use crate::norm::NormExp;
use crate::prime::OddPrime;
use crate::rational::{PadicRational, SquareClass};

#[derive(Clone, Debug)]
pub enum TruncatedPadic {
    /// The exact zero element.
    Zero { prime: OddPrime },
    /// `p^valuation * (unit + O(p^precision))` with `p ∤ unit < p^precision`.
    Unit { prime: OddPrime, valuation: i64, unit: BigUint, precision: u32 },
    /// Known only modulo `p^abs_precision`.
    Indeterminate { prime: OddPrime, abs_precision: i64 },
}

fn modulus(p: OddPrime, n: u32) -> BigUint {
    p.pow(u64::from(n))
}

pub(crate) fn inv_mod_u64(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "{a} is not invertible mod {m}");
    t0.rem_euclid(m as i128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Euler's criterion for `r` not divisible by the odd prime `p`.
pub(crate) fn is_quadratic_residue(r: u64, p: u64) -> bool {
    pow_mod(r, (p - 1) / 2, p) == 1
}

/// Tonelli-Shanks square root of a quadratic residue `r` modulo `p`.
fn sqrt_mod_p(r: u64, p: u64) -> u64 {
    let r = r % p;
    if p % 4 == 3 {
        return pow_mod(r, (p + 1) / 4, p);
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p).find(|&z| !is_quadratic_residue(z, p)).expect("non-residue exists");
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(r, q, p);
    let mut x = pow_mod(r, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        x = mul_mod(x, b, p);
    }
    x
}

impl TruncatedPadic {
    pub fn zero(prime: OddPrime) -> Self {
        TruncatedPadic::Zero { prime }
    }

    /// The image of an exact rational, with `precision` relative digits.
    pub fn from_rational(x: &PadicRational, precision: u32) -> Self {
        let p = x.prime();
        let Some(v) = x.valuation() else {
            return TruncatedPadic::Zero { prime: p };
        };
        let m = modulus(p, precision);
        let (num, den) = x.unit_parts();
        let n = num.mod_floor(&BigInt::from(m.clone())).to_biguint().expect("non-negative");
        let dinv = den.modinv(&m).expect("unit denominator");
        TruncatedPadic::Unit { prime: p, valuation: v, unit: (n * dinv) % m, precision }
    }

    /// Build from little-endian base-`p` digits of the unit part.
    pub fn from_digits(prime: OddPrime, valuation: i64, digits: &[u64]) -> Result<Self> {
        let p = prime.get();
        if digits.is_empty() || digits.iter().all(|&d| d == 0) {
            return Ok(TruncatedPadic::Zero { prime });
        }
        if digits[0] == 0 {
            return Err(Error::Parse("leading digit must be non-zero".into()));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::Parse(alloc::format!("digit {d} out of range for p = {p}")));
        }
        let pb = prime.to_biguint();
        let unit = digits.iter().rev().fold(BigUint::zero(), |acc, &d| acc * &pb + BigUint::from(d));
        Ok(TruncatedPadic::Unit { prime, valuation, unit, precision: digits.len() as u32 })
    }

    /// Square root by Hensel lifting. The returned root has first digit in
    /// `1..=(p-1)/2`; the other root is its negation.
    pub fn sqrt(x: &PadicRational, precision: u32) -> Result<Self> {
        let p = x.prime();
        match x.square_class() {
            SquareClass::Zero => return Ok(TruncatedPadic::Zero { prime: p }),
            SquareClass::NonSquare(o) => return Err(Error::NotASquare(o)),
            SquareClass::Square => {}
        }
        let v = x.valuation().expect("non-zero");
        let pu = p.get();
        let mut t0 = sqrt_mod_p(x.unit_residue().expect("non-zero"), pu);
        if t0 > (pu - 1) / 2 {
            t0 = pu - t0;
        }
        let target = match TruncatedPadic::from_rational(x, precision.max(1)) {
            TruncatedPadic::Unit { unit, .. } => unit,
            _ => unreachable!("non-zero rational"),
        };
        // Newton step t <- t - (t^2 - U) / (2t), doubling the known digits.
        let mut t = BigUint::from(t0);
        let mut known = 1u32;
        while known < precision {
            known = (2 * known).min(precision);
            let m = modulus(p, known);
            let u = &target % &m;
            let t2 = (&t * &t) % &m;
            let diff = (t2 + &m - u) % &m;
            let inv = ((&t * 2u32) % &m).modinv(&m).expect("2t is a unit");
            t = (&t + &m - (diff * inv) % &m) % &m;
        }
        Ok(TruncatedPadic::Unit { prime: p, valuation: v / 2, unit: t, precision: precision.max(1) })
    }

    pub fn prime(&self) -> OddPrime {
        match self {
            TruncatedPadic::Zero { prime }
            | TruncatedPadic::Unit { prime, .. }
            | TruncatedPadic::Indeterminate { prime, .. } => *prime,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, TruncatedPadic::Zero { .. })
    }

    /// Valuation if it is certified, `None` for zero.
    pub fn valuation(&self) -> Result<Option<i64>> {
        match self {
            TruncatedPadic::Zero { .. } => Ok(None),
            TruncatedPadic::Unit { valuation, .. } => Ok(Some(*valuation)),
            TruncatedPadic::Indeterminate { .. } => Err(Error::PrecisionExhausted),
        }
    }

    pub fn norm_exponent(&self) -> Result<NormExp> {
        Ok(match self.valuation()? {
            None => NormExp::Zero,
            Some(v) => NormExp::Finite(-v),
        })
    }

    /// Number of known unit digits (0 for exact zero or indeterminate values).
    pub fn precision(&self) -> u32 {
        match self {
            TruncatedPadic::Unit { precision, .. } => *precision,
            _ => 0,
        }
    }

    /// Absolute precision: the value is known modulo `p^k`. `None` means exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match self {
            TruncatedPadic::Zero { .. } => None,
            TruncatedPadic::Unit { valuation, precision, .. } => Some(valuation + i64::from(*precision)),
            TruncatedPadic::Indeterminate { abs_precision, .. } => Some(*abs_precision),
        }
    }

    /// Little-endian base-`p` digits of the unit part, leading digit first.
    pub fn digits(&self) -> Vec<u64> {
        let TruncatedPadic::Unit { prime, unit, precision, .. } = self else {
            return Vec::new();
        };
        let pb = prime.to_biguint();
        let mut u = unit.clone();
        (0..*precision)
            .map(|_| {
                let (q, r) = u.div_rem(&pb);
                u = q;
                r.to_u64().expect("digit below p")
            })
            .collect()
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        let (p, q) = (self.prime(), other.prime());
        if p != q {
            return Err(Error::PrimeMismatch(p.get(), q.get()));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match self {
            TruncatedPadic::Unit { prime, valuation, unit, precision } => {
                let m = modulus(*prime, *precision);
                TruncatedPadic::Unit { prime: *prime, valuation: *valuation, unit: &m - unit, precision: *precision }
            }
            other => other.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        use TruncatedPadic::*;
        self.check_prime(other)?;
        let prime = self.prime();
        match (self, other) {
            (Zero { .. }, x) | (x, Zero { .. }) => Ok(x.clone()),
            (Indeterminate { abs_precision: a, .. }, Indeterminate { abs_precision: b, .. }) => {
                Ok(Indeterminate { prime, abs_precision: *a.min(b) })
            }
            (Indeterminate { abs_precision: k, .. }, u @ Unit { valuation, .. })
            | (u @ Unit { valuation, .. }, Indeterminate { abs_precision: k, .. }) => {
                let abs = (*k).min(u.abs_precision().expect("inexact"));
                if *valuation < abs {
                    u.truncate_abs(abs)
                } else {
                    Ok(Indeterminate { prime, abs_precision: abs })
                }
            }
            (
                Unit { valuation: v1, unit: u1, precision: n1, .. },
                Unit { valuation: v2, unit: u2, precision: n2, .. },
            ) => {
                let abs = (v1 + i64::from(*n1)).min(v2 + i64::from(*n2));
                let v = (*v1).min(*v2);
                let width = (abs - v) as u32;
                let m = modulus(prime, width);
                let shift = |u: &BigUint, w: i64| -> BigUint {
                    if w > v {
                        u * modulus(prime, (w - v) as u32)
                    } else {
                        u.clone()
                    }
                };
                let mut s = (shift(u1, *v1) + shift(u2, *v2)) % &m;
                if s.is_zero() {
                    return Ok(Indeterminate { prime, abs_precision: abs });
                }
                let k = crate::rational::strip_p(&mut s, &prime.to_biguint());
                Ok(Unit { prime, valuation: v + k, unit: s, precision: width - k as u32 })
            }
        }
    }

    /// Drop digits at or beyond absolute position `abs`.
    fn truncate_abs(&self, abs: i64) -> Result<Self> {
        match self {
            TruncatedPadic::Unit { prime, valuation, unit, precision } => {
                let n = ((abs - valuation) as u32).min(*precision);
                Ok(TruncatedPadic::Unit {
                    prime: *prime,
                    valuation: *valuation,
                    unit: unit % modulus(*prime, n),
                    precision: n,
                })
            }
            other => Ok(other.clone()),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        use TruncatedPadic::*;
        self.check_prime(other)?;
        let prime = self.prime();
        match (self, other) {
            (Zero { .. }, _) | (_, Zero { .. }) => Ok(Zero { prime }),
            (Indeterminate { abs_precision: a, .. }, Indeterminate { abs_precision: b, .. }) => {
                Ok(Indeterminate { prime, abs_precision: a + b })
            }
            (Indeterminate { abs_precision: k, .. }, Unit { valuation, .. })
            | (Unit { valuation, .. }, Indeterminate { abs_precision: k, .. }) => {
                Ok(Indeterminate { prime, abs_precision: k + valuation })
            }
            (
                Unit { valuation: v1, unit: u1, precision: n1, .. },
                Unit { valuation: v2, unit: u2, precision: n2, .. },
            ) => {
                let n = (*n1).min(*n2);
                Ok(Unit { prime, valuation: v1 + v2, unit: (u1 * u2) % modulus(prime, n), precision: n })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        use TruncatedPadic::*;
        self.check_prime(other)?;
        let prime = self.prime();
        match (self, other) {
            (_, Zero { .. }) => Err(Error::DivisionByZero),
            (_, Indeterminate { .. }) => Err(Error::PrecisionExhausted),
            (Zero { .. }, _) => Ok(Zero { prime }),
            (Indeterminate { abs_precision: k, .. }, Unit { valuation, .. }) => {
                Ok(Indeterminate { prime, abs_precision: k - valuation })
            }
            (
                Unit { valuation: v1, unit: u1, precision: n1, .. },
                Unit { valuation: v2, unit: u2, precision: n2, .. },
            ) => {
                let n = (*n1).min(*n2);
                let m = modulus(prime, n);
                let inv = (u2 % &m).modinv(&m).expect("unit");
                Ok(Unit { prime, valuation: v1 - v2, unit: (u1 * inv) % m, precision: n })
            }
        }
    }

    /// Whether `x` and `y` agree on every digit both of them know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.prime() != other.prime() {
            return false;
        }
        match self.sub(other) {
            Ok(TruncatedPadic::Zero { .. }) | Ok(TruncatedPadic::Indeterminate { .. }) => true,
            Ok(TruncatedPadic::Unit { .. }) => false,
            Err(_) => false,
        }
    }

    /// Exact rational with the same known digits (the unit part read as an
    /// integer).
    pub fn to_rational_truncation(&self) -> PadicRational {
        match self {
            TruncatedPadic::Unit { prime, valuation, unit, .. } => {
                PadicRational::from_scaled(BigInt::from(unit.clone()), *valuation, *prime)
            }
            other => PadicRational::zero(other.prime()),
        }
    }

    /// Why `x` is not a square, if it is not.
    pub fn square_obstruction(x: &PadicRational) -> Option<SquareObstruction> {
        match x.square_class() {
            SquareClass::NonSquare(o) => Some(o),
            _ => None,
        }
    }
}

/// Two values are equal when valuations match and digits agree on the overlap
/// of their precisions.
impl PartialEq for TruncatedPadic {
    fn eq(&self, other: &Self) -> bool {
        use TruncatedPadic::*;
        if self.prime() != other.prime() {
            return false;
        }
        match (self, other) {
            (Zero { .. }, Zero { .. }) => true,
            (
                Unit { valuation: v1, unit: u1, precision: n1, prime },
                Unit { valuation: v2, unit: u2, precision: n2, .. },
            ) => {
                let m = modulus(*prime, (*n1).min(*n2));
                v1 == v2 && (u1 % &m) == (u2 % &m)
            }
            (Indeterminate { abs_precision: a, .. }, Indeterminate { abs_precision: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for TruncatedPadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruncatedPadic::Zero { .. } => f.write_str("0"),
            TruncatedPadic::Indeterminate { abs_precision, prime } => write!(f, "O({prime}^{abs_precision})"),
            TruncatedPadic::Unit { prime, valuation, precision, .. } => {
                let digits = self.digits();
                write!(f, "{prime}^{valuation} * (")?;
                for (i, d) in digits.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{d}")?;
                }
                write!(f, " + O({prime}^{precision}))")
            }
        }
    }
}

impl From<&PadicRational> for TruncatedPadic {
    fn from(x: &PadicRational) -> Self {
        TruncatedPadic::from_rational(x, 64)
    }
}

impl TruncatedPadic {
    /// `1` with the given number of digits.
    pub fn one(prime: OddPrime, precision: u32) -> Self {
        TruncatedPadic::Unit { prime, valuation: 0, unit: BigUint::one(), precision }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn p(n: u64) -> OddPrime {
        OddPrime::new(n).unwrap()
    }

    fn q(n: i64, d: i64, pr: OddPrime) -> PadicRational {
        PadicRational::new(n, d, pr).unwrap()
    }

    #[test]
    fn tonelli_shanks_all_residues() {
        for pr in [3u64, 5, 7, 13, 17, 41, 97, 257] {
            for r in 1..pr {
                if is_quadratic_residue(r, pr) {
                    let s = sqrt_mod_p(r, pr);
                    assert_eq!(mul_mod(s, s, pr), r, "p = {pr}, r = {r}");
                }
            }
        }
    }

    #[test]
    fn digits_of_rationals() {
        let pr = p(5);
        // -1 = 4 4 4 4 ... in Z_5.
        let x = TruncatedPadic::from_rational(&q(-1, 1, pr), 6);
        assert_eq!(x.digits(), [4, 4, 4, 4, 4, 4]);
        // (p-1)/p^3 has valuation -3 and first digit p-1.
        let y = TruncatedPadic::from_rational(&q(4, 125, pr), 3);
        assert_eq!(y.valuation().unwrap(), Some(-3));
        assert_eq!(y.digits(), [4, 0, 0]);
        // 1/3 in Z_5 is 2 3 1 3 1 3 ... since 3 * (2 + 3*5 + 5^2 + ...) = 1.
        let z = TruncatedPadic::from_rational(&q(1, 3, pr), 5);
        assert_eq!(z.digits(), [2, 3, 1, 3, 1]);
    }

    #[test]
    fn sqrt_examples() {
        let pr = p(5);
        let one = TruncatedPadic::sqrt(&q(1, 1, pr), 8).unwrap();
        assert_eq!(one, TruncatedPadic::one(pr, 8));
        let two = TruncatedPadic::sqrt(&q(4, 1, pr), 8).unwrap();
        assert_eq!(two, TruncatedPadic::from_rational(&q(2, 1, pr), 8));
        // (1 - 2p)^2: one of the two roots is the rational 1 - 2p itself.
        let x = q(81, 1, pr);
        let r = TruncatedPadic::sqrt(&x, 10).unwrap();
        let exact = TruncatedPadic::from_rational(&q(-9, 1, pr), 10);
        assert!(r == exact || r.neg() == exact);
        assert!(r.mul(&r).unwrap().agrees_with(&TruncatedPadic::from_rational(&x, 10)));
        assert_eq!(TruncatedPadic::sqrt(&q(5, 1, pr), 4), Err(Error::NotASquare(SquareObstruction::OddValuation)));
        assert_eq!(TruncatedPadic::sqrt(&q(2, 1, pr), 4), Err(Error::NotASquare(SquareObstruction::NonResidueUnit)));
        let s = TruncatedPadic::sqrt(&q(6, 25, pr), 12).unwrap();
        assert_eq!(s.valuation().unwrap(), Some(-1));
        assert!(s.digits()[0] <= 2);
    }

    #[test]
    fn cancellation_loses_precision() {
        let pr = p(3);
        let x = TruncatedPadic::from_rational(&q(1, 1, pr), 4);
        let y = TruncatedPadic::from_rational(&q(1 + 81, 1, pr), 10);
        let d = x.sub(&y).unwrap();
        assert_eq!(d, TruncatedPadic::Indeterminate { prime: pr, abs_precision: 4 });
        assert_eq!(d.norm_exponent(), Err(Error::PrecisionExhausted));
        let y = TruncatedPadic::from_rational(&q(1 + 9, 1, pr), 10);
        let d = y.sub(&x).unwrap();
        assert_eq!(d.valuation().unwrap(), Some(2));
        assert_eq!(d.precision(), 2);
        assert_eq!(x.div(&d.sub(&d).unwrap()), Err(Error::PrecisionExhausted));
    }

    #[test]
    fn from_digits_round_trip() {
        let pr = p(7);
        let x = TruncatedPadic::from_rational(&q(-22, 49, pr), 9);
        let y = TruncatedPadic::from_digits(pr, -2, &x.digits()).unwrap();
        assert_eq!(x, y);
        assert!(TruncatedPadic::from_digits(pr, 0, &[0, 1]).is_err());
        assert!(TruncatedPadic::from_digits(pr, 0, &[7]).is_err());
    }

    fn small_rat() -> impl Strategy<Value = (i64, i64)> {
        (-10_000i64..10_000, 1i64..10_000)
    }

    proptest! {
        #[test]
        fn sqrt_then_square((n, d) in small_rat(), prime in prop::sample::select(vec![3u64, 5, 7, 11, 13, 101])) {
            let pr = p(prime);
            let x = q(n, d, pr);
            let sq = x.mul(&x).unwrap();
            let r = TruncatedPadic::sqrt(&sq, 20).unwrap();
            let exact = TruncatedPadic::from_rational(&x, 20);
            prop_assert!(r.mul(&r).unwrap().agrees_with(&TruncatedPadic::from_rational(&sq, 20)));
            prop_assert!(r == exact || r.neg() == exact);
        }

        #[test]
        fn certified_ops_agree_with_exact((n1, d1) in small_rat(), (n2, d2) in small_rat()) {
            let pr = p(3);
            let (x, y) = (q(n1, d1, pr), q(n2, d2, pr));
            let (tx, ty) = (TruncatedPadic::from_rational(&x, 30), TruncatedPadic::from_rational(&y, 30));
            let pairs = [
                (tx.add(&ty).unwrap(), x.add(&y).unwrap()),
                (tx.sub(&ty).unwrap(), x.sub(&y).unwrap()),
                (tx.mul(&ty).unwrap(), x.mul(&y).unwrap()),
            ];
            for (t, e) in pairs {
                prop_assert!(t.agrees_with(&TruncatedPadic::from_rational(&e, 40)));
                if let Ok(ne) = t.norm_exponent() {
                    prop_assert_eq!(ne, e.norm_exponent());
                }
            }
        }
    }
}
