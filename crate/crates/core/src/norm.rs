//! Norm exponents: `|x|_p = p^a` is recorded as the integer `a = -v_p(x)`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

/// `log_p |x|`, or the zero marker for `x = 0`.
///
/// The zero marker orders below every finite exponent, matching `|0| = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormExp {
    Zero,
    Finite(i64),
}

impl NormExp {
    pub fn finite(self) -> Option<i64> {
        match self {
            NormExp::Zero => None,
            NormExp::Finite(a) => Some(a),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, NormExp::Zero)
    }
}

impl From<i64> for NormExp {
    fn from(a: i64) -> Self {
        NormExp::Finite(a)
    }
}

impl PartialOrd for NormExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormExp {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormExp::Zero, NormExp::Zero) => Ordering::Equal,
            (NormExp::Zero, _) => Ordering::Less,
            (_, NormExp::Zero) => Ordering::Greater,
            (NormExp::Finite(a), NormExp::Finite(b)) => a.cmp(b),
        }
    }
}

/// Norm exponent of a product; the zero marker absorbs.
impl Add for NormExp {
    type Output = NormExp;

    fn add(self, rhs: NormExp) -> NormExp {
        match (self, rhs) {
            (NormExp::Finite(a), NormExp::Finite(b)) => NormExp::Finite(a + b),
            _ => NormExp::Zero,
        }
    }
}

impl fmt::Display for NormExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormExp::Zero => f.write_str("zero"),
            NormExp::Finite(a) => write!(f, "{a}"),
        }
    }
}

/// The pair `(log_p|x|, log_p|y|)` that all region definitions are written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormProfile {
    pub a: NormExp,
    pub b: NormExp,
}

impl NormProfile {
    pub fn new(a: i64, b: i64) -> Self {
        NormProfile { a: NormExp::Finite(a), b: NormExp::Finite(b) }
    }

    pub fn from_exps(a: NormExp, b: NormExp) -> Self {
        NormProfile { a, b }
    }

    /// Both coordinates finite.
    pub fn finite(&self) -> Option<(i64, i64)> {
        Some((self.a.finite()?, self.b.finite()?))
    }

    /// `log_p ||(x, y)|| = max(a, b)`.
    pub fn max_exp(&self) -> NormExp {
        self.a.max(self.b)
    }

    /// A profile with `y = 0` has no preimage, so it lies outside `Q`.
    pub fn outside_q(&self) -> bool {
        self.b.is_zero()
    }
}

impl fmt::Display for NormProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_marker_is_smallest_and_absorbing() {
        assert!(NormExp::Zero < NormExp::Finite(i64::MIN));
        assert_eq!(NormExp::Zero + NormExp::Finite(3), NormExp::Zero);
        assert_eq!(NormExp::Finite(-2) + NormExp::Finite(3), NormExp::Finite(1));
        assert_eq!(NormProfile::new(-1, 4).max_exp(), NormExp::Finite(4));
    }
}
