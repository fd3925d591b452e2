//! Rationals viewed as elements of `Q_p`.
//!
//! A value is stored as `p^v * u / w` with `p ∤ u`, `p ∤ w`, `w > 0`. The
//! valuation is therefore exact and free to read, and sums only have to strip
//! powers of `p` when the operands share a valuation. Unit parts are reduced
//! by gcd only while they are small: along long backward orbits the gcd
//! removes almost nothing and dominates the running time.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result, SquareObstruction};
use crate::norm::NormExp;
use crate::prime::OddPrime;

/// Unit parts below this many bits are kept in lowest terms.
const REDUCE_BELOW_BITS: u64 = 4096;

#[derive(Clone, Debug)]
pub struct PadicRational {
    prime: OddPrime,
    /// Valuation; 0 for the zero element.
    val: i64,
    /// Unit numerator, zero only for the zero element.
    num: BigInt,
    /// Unit denominator, positive.
    den: BigUint,
}

/// Square classes relevant to `sqrt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareClass {
    Zero,
    Square,
    NonSquare(SquareObstruction),
}

/// Remove every factor `p` from `n`, returning the count.
pub(crate) fn strip_p(n: &mut BigUint, p: &BigUint) -> i64 {
    let mut k = 0;
    if n.is_zero() {
        return 0;
    }
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        *n = q;
        k += 1;
    }
}

fn strip_p_signed(n: &mut BigInt, p: &BigUint) -> i64 {
    let (sign, mut mag) = core::mem::take(n).into_parts();
    let k = strip_p(&mut mag, p);
    *n = BigInt::from_biguint(sign, mag);
    k
}

impl PadicRational {
    /// `num / den` inside `Q_p`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>, p: OddPrime) -> Result<Self> {
        let mut num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if den.is_negative() {
            num = -num;
        }
        let mut den = den.into_parts().1;
        if num.is_zero() {
            return Ok(Self::zero(p));
        }
        let pb = p.to_biguint();
        let v = strip_p_signed(&mut num, &pb) - strip_p(&mut den, &pb);
        let g = num.magnitude().gcd(&den);
        if !g.is_one() {
            num /= BigInt::from(g.clone());
            den /= g;
        }
        Ok(PadicRational { prime: p, val: v, num, den })
    }

    /// Validating constructor over a raw prime.
    pub fn make_rational(num: impl Into<BigInt>, den: impl Into<BigInt>, p: u64) -> Result<Self> {
        let p = OddPrime::new(p)?;
        Self::new(num, den, p)
    }

    pub fn zero(p: OddPrime) -> Self {
        PadicRational { prime: p, val: 0, num: BigInt::zero(), den: BigUint::one() }
    }

    pub fn one(p: OddPrime) -> Self {
        Self::from_integer(1, p)
    }

    pub fn from_integer(n: impl Into<BigInt>, p: OddPrime) -> Self {
        Self::new(n, 1, p).expect("denominator is 1")
    }

    /// `u * p^v` for an integer `u`.
    pub fn from_scaled(u: impl Into<BigInt>, v: i64, p: OddPrime) -> Self {
        let mut x = Self::from_integer(u, p);
        if !x.is_zero() {
            x.val += v;
        }
        x
    }

    /// Parse `"num/den"` or `"num"`.
    pub fn parse(s: &str, p: OddPrime) -> Result<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n = BigInt::from_str(n).map_err(|_| Error::Parse(alloc::format!("bad numerator in {s:?}")))?;
        let d = BigInt::from_str(d).map_err(|_| Error::Parse(alloc::format!("bad denominator in {s:?}")))?;
        Self::new(n, d, p)
    }

    pub fn prime(&self) -> OddPrime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `v_p(x)`, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// `a` with `|x|_p = p^a`.
    pub fn norm_exponent(&self) -> NormExp {
        match self.valuation() {
            None => NormExp::Zero,
            Some(v) => NormExp::Finite(-v),
        }
    }

    /// Unit part `u / w` (so `x = p^v * u / w`).
    pub fn unit_parts(&self) -> (&BigInt, &BigUint) {
        (&self.num, &self.den)
    }

    /// Numerator in lowest terms, carrying the sign.
    pub fn numerator(&self) -> BigInt {
        self.lowest_terms().0
    }

    /// Denominator in lowest terms, positive.
    pub fn denominator(&self) -> BigUint {
        self.lowest_terms().1
    }

    pub fn lowest_terms(&self) -> (BigInt, BigUint) {
        if self.is_zero() {
            return (BigInt::zero(), BigUint::one());
        }
        let g = self.num.magnitude().gcd(&self.den);
        let mut n = &self.num / BigInt::from(g.clone());
        let mut d = &self.den / &g;
        let pk = self.prime.pow(self.val.unsigned_abs());
        if self.val >= 0 {
            n *= BigInt::from(pk);
        } else {
            d *= pk;
        }
        (n, d)
    }

    /// Approximate size in bits of the numerator and denominator together.
    pub fn bits(&self) -> u64 {
        let pbits = 64 - u64::from(self.prime.get().leading_zeros());
        self.num.bits() + self.den.bits() + self.val.unsigned_abs() * pbits
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), other.prime.get()));
        }
        Ok(())
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            return Self::zero(self.prime);
        }
        if self.den.is_one() {
            return self;
        }
        if self.num.bits() + self.den.bits() < REDUCE_BELOW_BITS {
            let g = self.num.magnitude().gcd(&self.den);
            if !g.is_one() {
                self.num /= BigInt::from(g.clone());
                self.den /= g;
            }
        }
        self
    }

    pub fn neg(&self) -> Self {
        PadicRational { num: -&self.num, ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let p = self.prime;
        let v = self.val.min(other.val);
        let lift = |x: &Self, w: &BigUint| -> BigInt {
            let mut t = &x.num * BigInt::from(w.clone());
            if x.val > v {
                t *= BigInt::from(p.pow((x.val - v) as u64));
            }
            t
        };
        let (mut num, den) = if self.den == other.den {
            let one = BigUint::one();
            (lift(self, &one) + lift(other, &one), self.den.clone())
        } else {
            (lift(self, &other.den) + lift(other, &self.den), &self.den * &other.den)
        };
        if num.is_zero() {
            return Ok(Self::zero(p));
        }
        let mut val = v;
        if self.val == other.val {
            val += strip_p_signed(&mut num, &p.to_biguint());
        }
        Ok(PadicRational { prime: p, val, num, den }.normalized())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.prime));
        }
        Ok(PadicRational {
            prime: self.prime,
            val: self.val + other.val,
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
        .normalized())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.prime));
        }
        let mut num = &self.num * BigInt::from(other.den.clone());
        if other.num.is_negative() {
            num = -num;
        }
        Ok(PadicRational {
            prime: self.prime,
            val: self.val - other.val,
            num,
            den: &self.den * other.num.magnitude(),
        }
        .normalized())
    }

    /// Unit part reduced mod `p`, in `1..p`. `None` for zero.
    pub fn unit_residue(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let p = self.prime.get();
        let pb = BigInt::from(p);
        let u = self.num.mod_floor(&pb).to_u64().expect("residue below p");
        let w = (BigInt::from(self.den.clone()) % &pb).to_u64().expect("residue below p");
        let winv = crate::truncated::inv_mod_u64(w, p);
        Some(((u as u128 * winv as u128) % p as u128) as u64)
    }

    pub fn square_class(&self) -> SquareClass {
        let Some(v) = self.valuation() else {
            return SquareClass::Zero;
        };
        if v.rem_euclid(2) == 1 {
            return SquareClass::NonSquare(SquareObstruction::OddValuation);
        }
        let r = self.unit_residue().expect("non-zero");
        if crate::truncated::is_quadratic_residue(r, self.prime.get()) {
            SquareClass::Square
        } else {
            SquareClass::NonSquare(SquareObstruction::NonResidueUnit)
        }
    }

    /// Whether `x` is a square in `Q_p` (zero counts as a square).
    pub fn is_square(&self) -> bool {
        !matches!(self.square_class(), SquareClass::NonSquare(_))
    }

    /// A square root inside `Q`, when one exists.
    pub fn rational_sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (n, d) = self.lowest_terms();
        if n.is_negative() {
            return None;
        }
        let n = n.into_parts().1;
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &rn * &rn != n || &rd * &rd != d {
            return None;
        }
        Some(Self::new(BigInt::from(rn), BigInt::from(rd), self.prime).expect("positive denominator"))
    }

    /// Finite-precision p-adic square root with `precision` digits.
    pub fn sqrt(&self, precision: u32) -> Result<crate::truncated::TruncatedPadic> {
        crate::truncated::TruncatedPadic::sqrt(self, precision)
    }

    /// Exact conversion to a pair of big integers `(num, den)` in lowest terms,
    /// formatted as `num/den`.
    pub fn to_fraction_string(&self) -> String {
        let (n, d) = self.lowest_terms();
        alloc::format!("{n}/{d}")
    }
}

impl PartialEq for PadicRational {
    fn eq(&self, other: &Self) -> bool {
        if self.prime != other.prime {
            return false;
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            (false, false) => {
                self.val == other.val
                    && &self.num * BigInt::from(other.den.clone())
                        == &other.num * BigInt::from(self.den.clone())
            }
            _ => false,
        }
    }
}

impl Eq for PadicRational {}

impl fmt::Display for PadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.lowest_terms();
        if d.is_one() {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

/// Compare the archimedean values of two rationals (used by tests and
/// reports, never by region logic).
pub fn cmp_real(x: &PadicRational, y: &PadicRational) -> Ordering {
    let (xn, xd) = x.lowest_terms();
    let (yn, yd) = y.lowest_terms();
    (xn * BigInt::from(yd)).cmp(&(yn * BigInt::from(xd)))
}

impl From<&PadicRational> for num_rational::BigRational {
    fn from(x: &PadicRational) -> Self {
        let (n, d) = x.lowest_terms();
        num_rational::BigRational::new(n, BigInt::from_biguint(Sign::Plus, d))
    }
}

impl PadicRational {
    pub fn from_big_rational(q: &num_rational::BigRational, p: OddPrime) -> Self {
        Self::new(q.numer().clone(), q.denom().clone(), p).expect("non-zero denominator")
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquareClass::Zero => f.write_str("zero"),
            SquareClass::Square => f.write_str("square"),
            SquareClass::NonSquare(o) => write!(f, "non-square ({o})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn p5() -> OddPrime {
        OddPrime::new(5).unwrap()
    }

    fn q(n: i64, d: i64, p: OddPrime) -> PadicRational {
        PadicRational::new(n, d, p).unwrap()
    }

    #[test]
    fn construction_examples() {
        let p = p5();
        assert_eq!(q(1, 1, p).valuation(), Some(0));
        assert_eq!(q(5, 1, p).norm_exponent(), NormExp::Finite(-1));
        assert_eq!(q(1, 5, p).norm_exponent(), NormExp::Finite(1));
        assert_eq!(q(0, 7, p).norm_exponent(), NormExp::Zero);
        assert_eq!(PadicRational::make_rational(1, 0, 5), Err(Error::ZeroDenominator));
        assert_eq!(PadicRational::make_rational(1, 1, 2), Err(Error::NotOddPrime(2)));
        assert_eq!(PadicRational::make_rational(1, 1, 15), Err(Error::NotOddPrime(15)));
    }

    #[test]
    fn norm_examples() {
        let p = p5();
        assert_eq!(q(5 + 2 * 125, 1, p).norm_exponent(), NormExp::Finite(-1));
        assert_eq!(q(4, 125, p).norm_exponent(), NormExp::Finite(3));
        let diff = q(5 + 250, 1, p).sub(&q(5, 1, p)).unwrap();
        assert_eq!(diff, q(250, 1, p));
        assert_eq!(diff.norm_exponent(), NormExp::Finite(-3));
        let r = q(1, 1, p).sub(&q(1, 5, p)).unwrap().div(&q(25, 1, p)).unwrap();
        assert_eq!(r.norm_exponent(), NormExp::Finite(3));
    }

    #[test]
    fn lowest_terms_and_display() {
        let p = OddPrime::new(3).unwrap();
        let x = q(-12, 18, p);
        assert_eq!(x.numerator(), BigInt::from(-2));
        assert_eq!(x.denominator(), BigUint::from(3u8));
        assert_eq!(x.to_string(), "-2/3");
        assert_eq!(PadicRational::parse(" 28/3 ", p).unwrap(), q(28, 3, p));
        assert_eq!(PadicRational::parse("-7", p).unwrap(), q(-7, 1, p));
        assert!(PadicRational::parse("1/x", p).is_err());
    }

    #[test]
    fn prime_mismatch_is_an_error() {
        let x = q(1, 1, p5());
        let y = q(1, 1, OddPrime::new(3).unwrap());
        assert_eq!(x.add(&y), Err(Error::PrimeMismatch(5, 3)));
        assert_eq!(x.div(&PadicRational::zero(p5())), Err(Error::DivisionByZero));
    }

    #[test]
    fn squares() {
        let p = p5();
        let c = q(5 - 25, 1, p);
        let disc = q(1, 1, p).sub(&q(4, 1, p).mul(&c).unwrap()).unwrap();
        assert_eq!(disc, q(81, 1, p));
        assert!(disc.is_square());
        assert_eq!(disc.rational_sqrt(), Some(q(9, 1, p)));
        assert_eq!(q(5, 1, p).square_class(), SquareClass::NonSquare(SquareObstruction::OddValuation));
        assert_eq!(q(2, 1, p).square_class(), SquareClass::NonSquare(SquareObstruction::NonResidueUnit));
        assert_eq!(q(0, 1, p).square_class(), SquareClass::Zero);
        assert!(q(6, 1, p).is_square());
        assert_eq!(q(6, 1, p).rational_sqrt(), None);
    }

    /// Reference valuation by repeated division on the lowest-terms fraction.
    fn oracle_norm(n: i64, d: i64, p: i64) -> Option<i64> {
        if n == 0 {
            return None;
        }
        let (mut n, mut d, mut v) = (n.abs(), d.abs(), 0);
        while n % p == 0 {
            n /= p;
            v += 1;
        }
        while d % p == 0 {
            d /= p;
            v -= 1;
        }
        Some(-v)
    }

    fn rat() -> impl Strategy<Value = (i64, i64)> {
        (-100_000i64..100_000, 1i64..100_000)
    }

    proptest! {
        #[test]
        fn norm_matches_oracle((n, d) in rat()) {
            let p = OddPrime::new(3).unwrap();
            let x = q(n, d, p);
            prop_assert_eq!(x.norm_exponent().finite(), oracle_norm(n, d, 3));
        }

        #[test]
        fn product_rule((n1, d1) in rat(), (n2, d2) in rat()) {
            let p = OddPrime::new(3).unwrap();
            let (x, y) = (q(n1, d1, p), q(n2, d2, p));
            prop_assert_eq!(x.mul(&y).unwrap().norm_exponent(), x.norm_exponent() + y.norm_exponent());
        }

        #[test]
        fn ultrametric((n1, d1) in rat(), (n2, d2) in rat(), s in 0i64..4) {
            let p = OddPrime::new(3).unwrap();
            let x = q(n1 * 3i64.pow(s as u32), d1, p);
            let y = q(n2, d2, p);
            let (a, b) = (x.norm_exponent(), y.norm_exponent());
            let sum = x.add(&y).unwrap().norm_exponent();
            prop_assert!(sum <= a.max(b));
            if a != b {
                prop_assert_eq!(sum, a.max(b));
            }
        }

        #[test]
        fn field_ops_agree_with_big_rational((n1, d1) in rat(), (n2, d2) in rat()) {
            use num_rational::BigRational;
            let p = OddPrime::new(7).unwrap();
            let (x, y) = (q(n1, d1, p), q(n2, d2, p));
            let (rx, ry) = (BigRational::from(&x), BigRational::from(&y));
            prop_assert_eq!(BigRational::from(&x.add(&y).unwrap()), &rx + &ry);
            prop_assert_eq!(BigRational::from(&x.sub(&y).unwrap()), &rx - &ry);
            prop_assert_eq!(BigRational::from(&x.mul(&y).unwrap()), &rx * &ry);
            if n2 != 0 {
                prop_assert_eq!(BigRational::from(&x.div(&y).unwrap()), &rx / &ry);
            }
        }
    }
}
