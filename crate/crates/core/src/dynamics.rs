//! The map `f(x, y) = (xy + c, x)`, its inverse `(x, y) -> (y, (x - c)/y)`,
//! orbit traces, fixed points and the 3-cycle through `(-1, -1)`.

use alloc::vec::Vec;
use core::fmt::Debug;

use crate::error::{Error, Result};
use crate::norm::{NormExp, NormProfile};
use crate::prime::OddPrime;
use crate::rational::{PadicRational, SquareClass};
use crate::regions::{classify, RegionLabel, RegionName};
use crate::truncated::TruncatedPadic;

pub use crate::regions::Regime;

/// Arithmetic the orbit engine runs on: exact rationals, or certified
/// truncated expansions.
pub trait Scalar: Clone + Debug + PartialEq {
    fn prime(&self) -> OddPrime;
    /// Embed an exact rational, keeping `precision` digits where that
    /// matters.
    fn lift(x: &PadicRational, precision: u32) -> Self;
    fn add(&self, other: &Self) -> Result<Self>;
    fn sub(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn div(&self, other: &Self) -> Result<Self>;
    /// Certified norm exponent; truncated values whose leading digit is
    /// unknown report `PrecisionExhausted`.
    fn norm(&self) -> Result<NormExp>;
    /// Size used against the bit budget.
    fn size_bits(&self) -> u64;
}

impl Scalar for PadicRational {
    fn prime(&self) -> OddPrime {
        PadicRational::prime(self)
    }
    fn lift(x: &PadicRational, _precision: u32) -> Self {
        x.clone()
    }
    fn add(&self, other: &Self) -> Result<Self> {
        PadicRational::add(self, other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        PadicRational::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        PadicRational::mul(self, other)
    }
    fn div(&self, other: &Self) -> Result<Self> {
        PadicRational::div(self, other)
    }
    fn norm(&self) -> Result<NormExp> {
        Ok(self.norm_exponent())
    }
    fn size_bits(&self) -> u64 {
        self.bits()
    }
}

impl Scalar for TruncatedPadic {
    fn prime(&self) -> OddPrime {
        TruncatedPadic::prime(self)
    }
    fn lift(x: &PadicRational, precision: u32) -> Self {
        TruncatedPadic::from_rational(x, precision)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        TruncatedPadic::add(self, other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        TruncatedPadic::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        TruncatedPadic::mul(self, other)
    }
    fn div(&self, other: &Self) -> Result<Self> {
        TruncatedPadic::div(self, other)
    }
    fn norm(&self) -> Result<NormExp> {
        self.norm_exponent()
    }
    fn size_bits(&self) -> u64 {
        let p = 64 - u64::from(self.prime().get().leading_zeros());
        u64::from(self.precision()) * p
    }
}

/// A point of `Q_p^2`; both coordinates live over the same prime.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T = PadicRational> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if x.prime() != y.prime() {
            return Err(Error::PrimeMismatch(x.prime().get(), y.prime().get()));
        }
        Ok(Point { x, y })
    }

    pub fn try_profile(&self) -> Result<NormProfile> {
        Ok(NormProfile::from_exps(self.x.norm()?, self.y.norm()?))
    }

    pub fn size_bits(&self) -> u64 {
        self.x.size_bits() + self.y.size_bits()
    }
}

impl Point<PadicRational> {
    pub fn profile(&self) -> NormProfile {
        NormProfile::from_exps(self.x.norm_exponent(), self.y.norm_exponent())
    }

    pub fn to_truncated(&self, precision: u32) -> Point<TruncatedPadic> {
        Point {
            x: TruncatedPadic::from_rational(&self.x, precision),
            y: TruncatedPadic::from_rational(&self.y, precision),
        }
    }
}

/// The parameter `c` and everything derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct MapParams {
    pub c: PadicRational,
    d: Option<i64>,
    regime: Regime,
}

impl MapParams {
    /// `c = 0` is accepted: it is placed in the `|c| < 1` regime and flagged
    /// degenerate, and has no finite `d`, so orbits carry no region labels.
    pub fn new(c: PadicRational) -> Self {
        let d = c.norm_exponent().finite();
        let regime = d.map_or(Regime::Small, Regime::of);
        MapParams { c, d, regime }
    }

    pub fn prime(&self) -> OddPrime {
        self.c.prime()
    }

    /// `log_p|c|`, `None` for `c = 0`.
    pub fn d(&self) -> Option<i64> {
        self.d
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_degenerate(&self) -> bool {
        self.d.is_none()
    }

    /// `8` for `|c| <= 1`, `8 d F_12` for `|c| > 1`.
    pub fn default_escape_exponent(&self) -> i64 {
        match (self.regime, self.d) {
            (Regime::Large, Some(d)) => 8 * d * 233,
            _ => 8,
        }
    }

    pub fn forward(&self, pt: &Point) -> Result<Point> {
        forward_step(pt, &self.c)
    }

    /// `forward`, failing when the image is larger than `bit_budget` bits.
    pub fn forward_with_budget(&self, pt: &Point, bit_budget: u64) -> Result<Point> {
        let q = forward_step(pt, &self.c)?;
        check_budget(&q, Some(bit_budget))?;
        Ok(q)
    }

    pub fn inverse(&self, pt: &Point) -> Result<Point> {
        inverse_step(pt, &self.c)
    }

    pub fn classify(&self, profile: NormProfile) -> Option<RegionLabel> {
        self.d.map(|d| classify(profile, d))
    }
}

fn check_budget<T: Scalar>(pt: &Point<T>, budget: Option<u64>) -> Result<()> {
    match budget {
        Some(budget) if pt.size_bits() > budget => Err(Error::BudgetExceeded { bits: pt.size_bits(), budget }),
        _ => Ok(()),
    }
}

/// `f(x, y) = (xy + c, x)`.
pub fn forward_step<T: Scalar>(pt: &Point<T>, c: &T) -> Result<Point<T>> {
    Ok(Point { x: pt.x.mul(&pt.y)?.add(c)?, y: pt.x.clone() })
}

/// `f^{-1}(x, y) = (y, (x - c) / y)`.
pub fn inverse_step<T: Scalar>(pt: &Point<T>, c: &T) -> Result<Point<T>> {
    if pt.y.norm()? == NormExp::Zero {
        return Err(Error::UndefinedInverse);
    }
    Ok(Point { x: pt.y.clone(), y: pt.x.sub(c)?.div(&pt.y)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The step limit was reached; `max_exponent` is the largest
    /// `max(a, b)` seen (zero marker if every coordinate was 0).
    Completed { steps: usize, max_exponent: NormExp },
    /// `max(a, b)` exceeded the escape exponent at `step`.
    EscapedThreshold { step: usize, exponent: i64 },
    /// The point reached at `step - 1` has `y = 0`.
    UndefinedInverse { step: usize },
    BudgetExceeded { step: usize, bits: u64 },
    /// Certified arithmetic could not decide a leading digit at `step`.
    PrecisionExhausted { step: usize },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Completed { .. } => "Completed",
            Verdict::EscapedThreshold { .. } => "EscapedThreshold",
            Verdict::UndefinedInverse { .. } => "UndefinedInverse",
            Verdict::BudgetExceeded { .. } => "BudgetExceeded",
            Verdict::PrecisionExhausted { .. } => "PrecisionExhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitStep<T = PadicRational> {
    /// Number of applications of the map (or its inverse) from the start.
    pub n: usize,
    pub point: Point<T>,
    pub profile: NormProfile,
    pub region: Option<RegionLabel>,
}

/// First step at which the orbit sat in a region that `f^{-1}` maps into
/// itself (`Z` for `|c| < 1`, `J_0` for `|c| > 1`). Informational: the
/// verdict itself is never upgraded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvariantEntry {
    pub step: usize,
    pub region: RegionLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord<T = PadicRational> {
    pub direction: Direction,
    pub steps: Vec<OrbitStep<T>>,
    pub verdict: Verdict,
    pub entered_invariant_region: Option<InvariantEntry>,
}

impl<T> OrbitRecord<T> {
    pub fn profiles(&self) -> Vec<NormProfile> {
        self.steps.iter().map(|s| s.profile).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitOptions {
    pub max_steps: usize,
    pub escape_exponent: i64,
    pub bit_budget: Option<u64>,
    pub label_regions: bool,
}

impl OrbitOptions {
    pub fn new(max_steps: usize, escape_exponent: i64) -> Self {
        OrbitOptions { max_steps, escape_exponent, bit_budget: None, label_regions: true }
    }

    pub fn with_budget(mut self, bits: u64) -> Self {
        self.bit_budget = Some(bits);
        self
    }
}

fn is_invariant(label: RegionLabel) -> bool {
    matches!(
        (label.regime, label.name, label.index),
        (Regime::Small, RegionName::Z, None) | (Regime::Large, RegionName::J, Some(0))
    )
}

/// Iterate `f` or `f^{-1}` from `start` until a verdict triggers.
pub fn run_orbit<T: Scalar>(
    start: Point<T>,
    c: &T,
    d: Option<i64>,
    direction: Direction,
    opts: &OrbitOptions,
) -> OrbitRecord<T> {
    let label = |p: NormProfile| if opts.label_regions { d.map(|d| classify(p, d)) } else { None };
    let mut steps = Vec::new();
    let mut max_exp = NormExp::Zero;
    let mut verdict = None;
    match start.try_profile() {
        Ok(profile) => {
            max_exp = profile.max_exp();
            steps.push(OrbitStep { n: 0, region: label(profile), profile, point: start });
        }
        Err(_) => verdict = Some(Verdict::PrecisionExhausted { step: 0 }),
    }
    let mut n = 1;
    while verdict.is_none() && n <= opts.max_steps {
        let cur = &steps.last().expect("start recorded").point;
        let next = match direction {
            Direction::Forward => forward_step(cur, c),
            Direction::Backward => inverse_step(cur, c),
        };
        let next = match next {
            Ok(q) => q,
            Err(Error::UndefinedInverse) => {
                verdict = Some(Verdict::UndefinedInverse { step: n });
                break;
            }
            Err(_) => {
                verdict = Some(Verdict::PrecisionExhausted { step: n });
                break;
            }
        };
        if let Err(Error::BudgetExceeded { bits, .. }) = check_budget(&next, opts.bit_budget) {
            verdict = Some(Verdict::BudgetExceeded { step: n, bits });
            break;
        }
        let profile = match next.try_profile() {
            Ok(p) => p,
            Err(_) => {
                verdict = Some(Verdict::PrecisionExhausted { step: n });
                break;
            }
        };
        let m = profile.max_exp();
        max_exp = max_exp.max(m);
        steps.push(OrbitStep { n, region: label(profile), profile, point: next });
        if let NormExp::Finite(e) = m {
            if e > opts.escape_exponent {
                verdict = Some(Verdict::EscapedThreshold { step: n, exponent: e });
            }
        }
        n += 1;
    }
    let verdict = verdict.unwrap_or(Verdict::Completed { steps: opts.max_steps, max_exponent: max_exp });
    let entered_invariant_region = steps
        .iter()
        .find_map(|s| s.region.filter(|&l| is_invariant(l)).map(|region| InvariantEntry { step: s.n, region }));
    OrbitRecord { direction, steps, verdict, entered_invariant_region }
}

/// Exact backward orbit with escape exponent `escape_exponent`.
pub fn backward_orbit(pt: &Point, params: &MapParams, max_steps: usize, escape_exponent: i64) -> OrbitRecord {
    backward_orbit_with(pt, params, &OrbitOptions::new(max_steps, escape_exponent))
}

pub fn backward_orbit_with(pt: &Point, params: &MapParams, opts: &OrbitOptions) -> OrbitRecord {
    run_orbit(pt.clone(), &params.c, params.d(), Direction::Backward, opts)
}

/// Backward orbit in certified truncated arithmetic with `precision` digits.
pub fn backward_orbit_certified(
    pt: &Point,
    params: &MapParams,
    opts: &OrbitOptions,
    precision: u32,
) -> OrbitRecord<TruncatedPadic> {
    let c = TruncatedPadic::from_rational(&params.c, precision);
    run_orbit(pt.to_truncated(precision), &c, params.d(), Direction::Backward, opts)
}

pub fn forward_orbit(pt: &Point, params: &MapParams, opts: &OrbitOptions) -> OrbitRecord {
    run_orbit(pt.clone(), &params.c, params.d(), Direction::Forward, opts)
}

/// A fixed point `(alpha, alpha)` with `alpha^2 - alpha + c = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub alpha: TruncatedPadic,
    /// `alpha` as an exact rational when `1 - 4c` is a rational square.
    pub exact: Option<PadicRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    /// `1 - 4c`.
    pub discriminant: PadicRational,
    pub square_class: SquareClass,
    /// Empty, one point (`1 - 4c = 0`), or `alpha_1 = (1-q)/2`,
    /// `alpha_2 = (1+q)/2` with `q` the square root whose first digit is in
    /// `1..=(p-1)/2`.
    pub points: Vec<FixedPoint>,
}

pub fn fixed_points(params: &MapParams, precision: u32) -> Result<FixedPointReport> {
    let p = params.prime();
    let r = |n: i64| PadicRational::from_integer(n, p);
    let disc = r(1).sub(&r(4).mul(&params.c)?)?;
    let square_class = disc.square_class();
    let half = PadicRational::new(1, 2, p)?;
    let points = match square_class {
        SquareClass::NonSquare(_) => Vec::new(),
        SquareClass::Zero => {
            alloc::vec![FixedPoint { alpha: TruncatedPadic::from_rational(&half, precision), exact: Some(half) }]
        }
        SquareClass::Square => {
            let q = disc.sqrt(precision)?;
            let one = TruncatedPadic::from_rational(&r(1), precision);
            let two = TruncatedPadic::from_rational(&r(2), precision);
            let exact_q = disc.rational_sqrt().map(|s| {
                if TruncatedPadic::from_rational(&s, precision) == q {
                    s
                } else {
                    s.neg()
                }
            });
            let mut pts = Vec::new();
            for sign in [-1i64, 1] {
                let signed = if sign < 0 { q.neg() } else { q.clone() };
                let alpha = one.add(&signed)?.div(&two)?;
                let exact = match &exact_q {
                    Some(s) => Some(r(1).add(&s.mul(&r(sign))?)?.mul(&half)?),
                    None => None,
                };
                pts.push(FixedPoint { alpha, exact });
            }
            pts
        }
    };
    Ok(FixedPointReport { discriminant: disc, square_class, points })
}

/// `rho = (-1, -1)`, `f(rho) = (1 + c, -1)`, `f^2(rho) = (-1, 1 + c)`.
pub fn three_cycle(params: &MapParams) -> [Point; 3] {
    let p = params.prime();
    let m1 = PadicRational::from_integer(-1, p);
    let one_c = PadicRational::one(p).add(&params.c).expect("same prime");
    [
        Point { x: m1.clone(), y: m1.clone() },
        Point { x: one_c.clone(), y: m1.clone() },
        Point { x: m1, y: one_c },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;
    use proptest::prelude::*;

    fn pr(n: u64) -> OddPrime {
        OddPrime::new(n).unwrap()
    }

    fn q(n: i64, d: i64, p: OddPrime) -> PadicRational {
        PadicRational::new(n, d, p).unwrap()
    }

    fn pt(x: (i64, i64), y: (i64, i64), p: OddPrime) -> Point {
        Point { x: q(x.0, x.1, p), y: q(y.0, y.1, p) }
    }

    #[test]
    fn forward_examples() {
        let p = pr(5);
        let c = q(7, 3, p);
        let m = MapParams::new(c.clone());
        let img = m.forward(&pt((-1, 1), (-1, 1), p)).unwrap();
        assert_eq!(img.x, PadicRational::one(p).add(&c).unwrap());
        let m = MapParams::new(q(5 - 25, 1, p));
        assert_eq!(m.forward(&pt((5, 1), (5, 1), p)).unwrap(), pt((5, 1), (5, 1), p));
        let img = m.forward(&pt((0, 1), (0, 1), p)).unwrap();
        assert_eq!(img, Point { x: m.c.clone(), y: PadicRational::zero(p) });
    }

    #[test]
    fn inverse_examples() {
        let p = pr(5);
        let m = MapParams::new(q(5, 1, p));
        let a = m.inverse(&pt((5 + 250, 1), (10, 1), p)).unwrap();
        assert_eq!(a, pt((10, 1), (25, 1), p));
        assert_eq!(m.inverse(&a).unwrap(), pt((25, 1), (1, 5), p));
        let m = MapParams::new(q(1, 1, p));
        assert_eq!(m.inverse(&pt((-1, 1), (-5, 1), p)).unwrap(), pt((-5, 1), (2, 5), p));
        assert_eq!(m.inverse(&pt((3, 1), (0, 1), p)), Err(Error::UndefinedInverse));
    }

    #[test]
    fn undefined_inverse_verdict() {
        let p = pr(3);
        let m = MapParams::new(q(1, 1, p));
        let r = backward_orbit(&pt((2, 1), (0, 1), p), &m, 5, 8);
        assert_eq!(r.verdict, Verdict::UndefinedInverse { step: 1 });
        assert_eq!(r.steps.len(), 1);
    }

    #[test]
    fn budget_verdict() {
        let p = pr(5);
        let m = MapParams::new(q(5, 1, p));
        let opts = OrbitOptions::new(40, 1 << 40).with_budget(2000);
        let r = backward_orbit_with(&pt((255, 1), (10, 1), p), &m, &opts);
        assert!(matches!(r.verdict, Verdict::BudgetExceeded { .. }));
    }

    #[test]
    fn invariant_annotation() {
        let p = pr(3);
        let m = MapParams::new(q(3, 1, p));
        let r = backward_orbit(&pt((1, 1), (2, 1), p), &m, 5, 8);
        assert_eq!(r.entered_invariant_region.map(|e| e.step), Some(0));
        assert!(matches!(r.verdict, Verdict::Completed { .. }));
    }

    #[test]
    fn degenerate_parameter() {
        let p = pr(3);
        let m = MapParams::new(PadicRational::zero(p));
        assert!(m.is_degenerate());
        assert_eq!(m.regime(), Regime::Small);
        let r = backward_orbit(&pt((2, 1), (3, 1), p), &m, 4, 8);
        assert!(r.steps.iter().all(|s| s.region.is_none()));
    }

    #[test]
    fn fixed_point_cases() {
        let p = pr(5);
        let m = MapParams::new(q(5 - 25, 1, p));
        let rep = fixed_points(&m, 20).unwrap();
        let exact: Vec<_> = rep.points.iter().map(|f| f.exact.clone().unwrap()).collect();
        assert!(exact.contains(&q(5, 1, p)) && exact.contains(&q(-4, 1, p)));
        for f in &rep.points {
            let e = f.exact.clone().unwrap();
            assert!(f.alpha == TruncatedPadic::from_rational(&e, 20));
            let a = Point { x: e.clone(), y: e };
            assert_eq!(m.forward(&a).unwrap(), a);
        }
        let rep = fixed_points(&MapParams::new(q(1, 4, p)), 10).unwrap();
        assert_eq!(rep.points.len(), 1);
        assert_eq!(rep.points[0].exact, Some(q(1, 2, p)));
        // 1 - 4c = 2, a non-residue mod 5.
        let rep = fixed_points(&MapParams::new(q(-1, 4, p)), 10).unwrap();
        assert!(rep.points.is_empty());
    }

    #[test]
    fn irrational_fixed_points_are_fixed_to_precision() {
        let p = pr(5);
        // 1 - 4c = 6 is a square mod 5 but not in Q.
        let m = MapParams::new(q(-5, 4, p));
        let rep = fixed_points(&m, 24).unwrap();
        assert_eq!(rep.points.len(), 2);
        let c = TruncatedPadic::from_rational(&m.c, 24);
        for f in &rep.points {
            assert!(f.exact.is_none());
            let a = Point { x: f.alpha.clone(), y: f.alpha.clone() };
            let img = forward_step(&a, &c).unwrap();
            let gap = img.x.sub(&a.x).unwrap();
            assert!(gap.abs_precision().unwrap() >= 20);
            assert!(!matches!(gap, TruncatedPadic::Unit { .. }));
        }
    }

    proptest! {
        #[test]
        fn three_cycle_is_exact(seed in any::<u64>(), a in -6i64..6) {
            let p = pr(7);
            let c = Sampler::new(p, seed, 5).with_norm(a);
            let m = MapParams::new(c);
            let [r0, r1, r2] = three_cycle(&m);
            prop_assert_eq!(m.forward(&r0).unwrap(), r1.clone());
            prop_assert_eq!(m.forward(&r1).unwrap(), r2.clone());
            prop_assert_eq!(m.forward(&r2).unwrap(), r0);
        }

        #[test]
        fn round_trips(seed in any::<u64>(), a in -5i64..5, b in -5i64..5, dc in -3i64..3) {
            let p = pr(3);
            let mut s = Sampler::new(p, seed, 6);
            let m = MapParams::new(s.with_norm(dc));
            let point = Point { x: s.with_norm(a), y: s.with_norm(b) };
            prop_assert_eq!(m.forward(&m.inverse(&point).unwrap()).unwrap(), point.clone());
            prop_assert_eq!(m.inverse(&m.forward(&point).unwrap()).unwrap(), point);
        }

        #[test]
        fn norm_recurrence(seed in any::<u64>(), a in -5i64..5, b in -5i64..5, dc in -3i64..3) {
            let p = pr(5);
            let mut s = Sampler::new(p, seed, 6);
            let m = MapParams::new(s.with_norm(dc));
            let point = Point { x: s.with_norm(a), y: s.with_norm(b) };
            let r = backward_orbit(&point, &m, 6, 1000);
            for w in r.steps.windows(2) {
                prop_assert_eq!(w[1].point.x.clone(), w[0].point.y.clone());
                let (a0, b0) = w[0].profile.finite().unwrap();
                if a0 != dc {
                    prop_assert_eq!(w[1].profile.b, NormExp::Finite(a0.max(dc) - b0));
                }
            }
        }
    }
}
