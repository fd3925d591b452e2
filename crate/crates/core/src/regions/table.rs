//! The declarative region table.
//!
//! Each entry is a union of conjunctions of atoms. An atom is either a
//! linear comparison `lhs REL rhs` between sums of terms `coef * var`, where
//! `var` is `a`, `b`, `d` or the constant 1 and `coef` is an integer or a
//! Fibonacci number `F_{2n+k}` of the family parameter `n`, or a comparison of
//! `b` with the irrational `a / beta`.
//!
//! Everything is exact integer arithmetic: `i128` with overflow checks and a
//! big-integer fallback.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{Regime, RegionLabel, RegionName};
use crate::fib::{cmp_beta_multiple_i64, fib, fib_i128};
use crate::norm::{NormExp, NormProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    A,
    B,
    D,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coef {
    Int(i64),
    /// `F_{2n+k}`.
    Fib(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub coef: Coef,
    pub var: Var,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub(super) fn holds(self, o: Ordering) -> bool {
        match self {
            Rel::Lt => o == Ordering::Less,
            Rel::Le => o != Ordering::Greater,
            Rel::Eq => o == Ordering::Equal,
            Rel::Ge => o != Ordering::Less,
            Rel::Gt => o == Ordering::Greater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    Cmp { lhs: &'static [Term], rel: Rel, rhs: &'static [Term] },
    /// `b REL a / beta` (only `Lt` and `Gt` are meaningful).
    Golden(Rel),
}

/// How the entry's index relates to the family parameter `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexRule {
    Fixed(Option<u64>),
    /// `index = 2n + offset` for `n >= min_n`.
    Family { offset: u64, min_n: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionDef {
    pub name: RegionName,
    pub index: IndexRule,
    /// The region is the union of these conjunctions.
    pub alternatives: &'static [&'static [Atom]],
}

const fn t(coef: Coef, var: Var) -> Term {
    Term { coef, var }
}

const A: Term = t(Coef::Int(1), Var::A);
const B: Term = t(Coef::Int(1), Var::B);
const D: Term = t(Coef::Int(1), Var::D);

/// `F_{2n+k} a`, `F_{2n+k} b`, `F_{2n+k} d`.
const fn fa(k: i64) -> Term {
    t(Coef::Fib(k), Var::A)
}
const fn fb(k: i64) -> Term {
    t(Coef::Fib(k), Var::B)
}
const fn fd(k: i64) -> Term {
    t(Coef::Fib(k), Var::D)
}

macro_rules! cmp {
    ([$($l:expr),*] $rel:ident [$($r:expr),*]) => {
        Atom::Cmp { lhs: &[$($l),*], rel: Rel::$rel, rhs: &[$($r),*] }
    };
}

const fn fixed(name: RegionName, index: Option<u64>, alternatives: &'static [&'static [Atom]]) -> RegionDef {
    RegionDef { name, index: IndexRule::Fixed(index), alternatives }
}

const fn family(name: RegionName, offset: u64, min_n: u64, alternatives: &'static [&'static [Atom]]) -> RegionDef {
    RegionDef { name, index: IndexRule::Family { offset, min_n }, alternatives }
}

use RegionName as N;

/// `|c| < 1`.
pub const SMALL: &[RegionDef] = &[
    fixed(N::Z, None, &[&[cmp!([A] Eq []), cmp!([B] Eq [])]]),
    fixed(N::R, None, &[&[cmp!([A] Eq [D]), cmp!([B] Eq [D])]]),
    fixed(N::B, Some(1), &[&[cmp!([A] Gt []), cmp!([B] Gt []), Atom::Golden(Rel::Lt)]]),
    fixed(N::B, Some(2), &[&[cmp!([A] Gt []), cmp!([B] Gt []), Atom::Golden(Rel::Gt)]]),
    fixed(N::A, Some(1), &[&[cmp!([A] Le [D]), cmp!([B] Ge [])]]),
    fixed(N::A, Some(2), &[&[cmp!([A] Ge []), cmp!([B] Le [D])]]),
    fixed(N::A, Some(3), &[&[cmp!([A] Gt []), cmp!([B] Eq [])]]),
    fixed(N::A, Some(4), &[&[cmp!([A] Eq []), cmp!([B] Gt [])]]),
    fixed(N::A, Some(5), &[&[cmp!([A] Ge []), cmp!([D] Lt [B]), cmp!([B] Lt [])]]),
    fixed(N::A, Some(6), &[&[cmp!([D] Lt [A]), cmp!([A] Lt []), cmp!([B] Ge [])]]),
    fixed(N::P, Some(1), &[&[cmp!([A] Lt [D]), cmp!([B] Le [D])]]),
    fixed(N::P, Some(2), &[&[cmp!([D] Lt [A]), cmp!([A] Lt []), cmp!([B] Le [D])]]),
    fixed(N::P, Some(3), &[&[cmp!([A] Lt [D]), cmp!([D] Lt [B]), cmp!([B] Lt [])]]),
    fixed(N::P, Some(4), &[&[cmp!([D] Lt [A]), cmp!([A] Lt []), cmp!([D] Lt [B]), Atom::Golden(Rel::Lt)]]),
    fixed(N::P, Some(5), &[&[cmp!([D] Lt [A]), cmp!([A] Lt []), Atom::Golden(Rel::Gt), cmp!([B] Lt [])]]),
    // |x| = |c| and (|y| < |c| or |c| < |y| < 1)
    fixed(
        N::P,
        Some(6),
        &[&[cmp!([A] Eq [D]), cmp!([B] Lt [D])], &[cmp!([A] Eq [D]), cmp!([D] Lt [B]), cmp!([B] Lt [])]],
    ),
];

/// `|c| = 1`.
pub const UNIT: &[RegionDef] = &[
    fixed(N::C, Some(0), &[&[cmp!([A] Eq []), cmp!([B] Le [])], &[cmp!([A] Lt []), cmp!([B] Eq [])]]),
    fixed(N::F, None, &[&[cmp!([A] Lt []), cmp!([B] Lt [])]]),
    fixed(N::G, None, &[&[cmp!([A] Le []), cmp!([B] Gt [])]]),
    fixed(N::H, None, &[&[cmp!([A] Gt []), cmp!([B] Le [])]]),
    // M_{2n+1}
    family(
        N::M,
        1,
        0,
        &[&[
            cmp!([A] Gt []),
            cmp!([B] Gt []),
            cmp!([fa(-2)] Gt [fb(-1)]),
            cmp!([fb(0)] Gt [fa(-1)]),
            cmp!([fa(0)] Le [fb(1)]),
        ]],
    ),
    // M_{2n+2}
    family(
        N::M,
        2,
        0,
        &[&[
            cmp!([A] Gt []),
            cmp!([B] Gt []),
            cmp!([fb(0)] Gt [fa(-1)]),
            cmp!([fa(0)] Gt [fb(1)]),
            cmp!([fb(2)] Le [fa(1)]),
        ]],
    ),
];

/// `|c| > 1`.
pub const LARGE: &[RegionDef] = &[
    fixed(N::F, None, &[&[cmp!([A] Lt [D]), cmp!([B] Lt [])]]),
    fixed(N::G, None, &[&[cmp!([A] Le [D]), cmp!([B] Gt [D])]]),
    fixed(N::H, None, &[&[cmp!([A] Gt [D]), cmp!([B] Le [])]]),
    fixed(N::J, Some(0), &[&[cmp!([A] Lt [D]), cmp!([B] Gt []), cmp!([B] Lt [D])]]),
    fixed(
        N::C,
        Some(0),
        &[
            &[cmp!([A] Lt [D]), cmp!([B] Eq [])],
            &[cmp!([A] Lt [D]), cmp!([B] Eq [D])],
            &[cmp!([A] Eq [D]), cmp!([B] Le [D])],
        ],
    ),
    // J_{2n+1}
    family(
        N::J,
        1,
        0,
        &[&[
            cmp!([fa(-2)] Gt [D, fb(-1)]),
            cmp!([fb(0)] Lt [D, fa(-1)]),
            cmp!([fb(1)] Lt [fa(0)]),
            cmp!([fa(0)] Lt [D, fb(1)]),
        ]],
    ),
    // J_{2n+2}
    family(
        N::J,
        2,
        0,
        &[&[
            cmp!([fb(0)] Gt [D, fa(-1)]),
            cmp!([fa(0)] Lt [D, fb(1)]),
            cmp!([fa(1)] Lt [fb(2)]),
            cmp!([fb(2)] Lt [D, fa(1)]),
        ]],
    ),
    // M_{2n+1}
    family(
        N::M,
        1,
        0,
        &[&[
            cmp!([A] Gt [fd(0)]),
            cmp!([fd(-1)] Lt [B]),
            cmp!([B] Le [fd(1)]),
            cmp!([fb(1), D] Lt [fa(0)]),
        ]],
    ),
    // M_{2n+2}
    family(N::M, 2, 0, &[&[cmp!([fd(1)] Lt [A]), cmp!([A] Le [fd(3)]), cmp!([fb(2)] Gt [D, fa(1)])]]),
    // C_{2n+1}
    family(N::C, 1, 0, &[&[cmp!([fd(0)] Lt [A]), cmp!([A] Le [fd(2)]), cmp!([fb(1), D] Eq [fa(0)])]]),
    // C_{2n+2}
    family(N::C, 2, 0, &[&[cmp!([fd(1)] Lt [A]), cmp!([A] Le [fd(3)]), cmp!([fb(2)] Eq [D, fa(1)])]]),
    // D_{2n+1}, n >= 1
    family(N::D, 1, 1, &[&[cmp!([fd(0)] Lt [A]), cmp!([A] Lt [fd(1)]), cmp!([fb(-1), D] Eq [fa(-2)])]]),
    // D_{2n+2}
    family(N::D, 2, 0, &[&[cmp!([fd(1)] Lt [A]), cmp!([A] Lt [fd(2)]), cmp!([fb(0)] Eq [D, fa(-1)])]]),
];

/// Pieces of the `J` family: `J_1 = B_1`, `J_{2n+1} = B_{2n} ∪ B_{2n+1}`,
/// `J_{2n+2} = A_{2n+1} ∪ A_{2n+2}`.
pub const LARGE_DECOMPOSITION: &[RegionDef] = &[
    // B_{2n+1}
    family(
        N::B,
        1,
        0,
        &[&[cmp!([fd(1)] Lt [A]), cmp!([A] Lt [fd(2)]), cmp!([fb(1), D] Gt [fa(0)]), cmp!([fb(0)] Lt [D, fa(-1)])]],
    ),
    // B_{2n}, n >= 1
    family(
        N::B,
        0,
        1,
        &[&[cmp!([fd(0)] Lt [A]), cmp!([A] Le [fd(1)]), cmp!([fb(1), D] Gt [fa(0)]), cmp!([fb(-1), D] Lt [fa(-2)])]],
    ),
    // A_{2n+1}
    family(
        N::A,
        1,
        0,
        &[&[cmp!([fd(1)] Lt [A]), cmp!([A] Le [fd(2)]), cmp!([fb(0)] Gt [D, fa(-1)]), cmp!([fb(2)] Lt [D, fa(1)])]],
    ),
    // A_{2n+2}
    family(
        N::A,
        2,
        0,
        &[&[cmp!([fd(2)] Lt [A]), cmp!([A] Lt [fd(3)]), cmp!([fb(1), D] Gt [fa(0)]), cmp!([fb(2)] Lt [D, fa(1)])]],
    ),
];

pub fn table(regime: Regime) -> &'static [RegionDef] {
    match regime {
        Regime::Small => SMALL,
        Regime::Unit => UNIT,
        Regime::Large => LARGE,
    }
}

/// Profile values with `a = None` standing for `-inf` (a zero `x`).
#[derive(Clone, Copy)]
pub(super) struct Vals {
    pub(super) a: Option<i64>,
    pub(super) b: i64,
    pub(super) d: i64,
}

/// Bound on `|a|, |b|, |d|` under which the `i64` fast path is exact for
/// coefficients up to `F_{FAST_INDEX}`: four terms of size `2^24 * 2^36`.
const FAST_VAL: i64 = 1 << 24;
const FAST_INDEX: i64 = 52;

impl Vals {
    fn is_small(&self) -> bool {
        self.a.map_or(true, |a| a.abs() < FAST_VAL) && self.b.abs() < FAST_VAL && self.d.abs() < FAST_VAL
    }
}

fn coef_i128(c: Coef, n: i64) -> Option<i128> {
    match c {
        Coef::Int(i) => Some(i128::from(i)),
        Coef::Fib(k) => fib_i128(2 * n + k),
    }
}

fn coef_big(c: Coef, n: i64) -> BigInt {
    match c {
        Coef::Int(i) => BigInt::from(i),
        Coef::Fib(k) => fib(2 * n + k).expect("table indices start at -2"),
    }
}

fn var_value(v: Var, x: Vals) -> Option<i64> {
    match v {
        Var::A => x.a,
        Var::B => Some(x.b),
        Var::D => Some(x.d),
        Var::One => Some(1),
    }
}

/// Sign of `lhs - rhs` with `a = -inf` allowed.
#[cfg(test)]
fn compare(lhs: &[Term], rhs: &[Term], n: i64, x: Vals) -> Ordering {
    compare_i128(lhs, rhs, n, x).unwrap_or_else(|| compare_big(lhs, rhs, n, x))
}

/// `lhs - rhs` split into the part with Fibonacci coefficients and the rest.
/// The Fibonacci part `L_n` obeys `L_{n+1} = 3 L_n - L_{n-1}`.
#[derive(Clone, Copy)]
struct Split {
    fib: i128,
    rest: i128,
    /// Total coefficient of `a`, needed when `a = -inf`.
    coef_a: i128,
}

fn split_i128(lhs: &[Term], rhs: &[Term], n: i64, x: Vals) -> Option<Split> {
    if x.is_small() && 2 * n + 3 <= FAST_INDEX {
        return split_i64(lhs, rhs, n, x);
    }
    let mut out = Split { fib: 0, rest: 0, coef_a: 0 };
    for (side, sign) in [(lhs, 1i128), (rhs, -1i128)] {
        for term in side {
            let c = coef_i128(term.coef, n)?.checked_mul(sign)?;
            if term.var == Var::A {
                out.coef_a = out.coef_a.checked_add(c)?;
                if x.a.is_none() {
                    continue;
                }
            }
            let v = c.checked_mul(i128::from(var_value(term.var, x).expect("finite")))?;
            match term.coef {
                Coef::Fib(_) => out.fib = out.fib.checked_add(v)?,
                Coef::Int(_) => out.rest = out.rest.checked_add(v)?,
            }
        }
    }
    Some(out)
}

/// Unchecked version of [`split_i128`] for small values and indices.
fn split_i64(lhs: &[Term], rhs: &[Term], n: i64, x: Vals) -> Option<Split> {
    let (mut fib_part, mut rest, mut coef_a) = (0i64, 0i64, 0i64);
    for (side, sign) in [(lhs, 1i64), (rhs, -1i64)] {
        for term in side {
            let c = match term.coef {
                Coef::Int(i) => i,
                Coef::Fib(k) => fib_i128(2 * n + k)? as i64,
            } * sign;
            let v = match term.var {
                Var::A => {
                    coef_a += c;
                    match x.a {
                        Some(a) => a,
                        None => continue,
                    }
                }
                Var::B => x.b,
                Var::D => x.d,
                Var::One => 1,
            };
            match term.coef {
                Coef::Fib(_) => fib_part += c * v,
                Coef::Int(_) => rest += c * v,
            }
        }
    }
    Some(Split { fib: fib_part.into(), rest: rest.into(), coef_a: coef_a.into() })
}

#[cfg(test)]
fn compare_i128(lhs: &[Term], rhs: &[Term], n: i64, x: Vals) -> Option<Ordering> {
    let s = split_i128(lhs, rhs, n, x)?;
    if x.a.is_none() && s.coef_a != 0 {
        // coef_a * (-inf)
        return Some(if s.coef_a > 0 { Ordering::Less } else { Ordering::Greater });
    }
    Some(s.fib.checked_add(s.rest)?.cmp(&0))
}

/// Whether a failing atom is false at `n` and at every larger family
/// parameter, given its split at `n` and `n - 1`.
///
/// If `L_n != 0`, `L_{n-1} L_n >= 0` and `|L_n| >= |L_{n-1}|`, the recurrence
/// makes `L_m` strictly monotone for `m >= n`, moving in the direction of the
/// sign of `L_n`. The atom is then dead if it fails at every value further in
/// that direction.
fn false_from_here(atom: &Atom, x: Vals, now: Option<Split>, prev_fib: Option<i128>) -> bool {
    let Atom::Cmp { lhs, rel, rhs } = atom else {
        // The golden-ratio test does not depend on n.
        return true;
    };
    let has_fib = lhs.iter().chain(rhs.iter()).any(|t| matches!(t.coef, Coef::Fib(_)));
    if !has_fib {
        return true;
    }
    let (Some(now), Some(prev), Some(_)) = (now, prev_fib, x.a) else {
        return false;
    };
    let monotone = now.fib != 0 && now.fib.signum() * prev.signum() >= 0 && now.fib.abs() >= prev.abs();
    let Some(v) = now.fib.checked_add(now.rest) else {
        return false;
    };
    monotone
        && if now.fib > 0 {
            // Values from v upward.
            match rel {
                Rel::Lt => v >= 0,
                Rel::Le | Rel::Eq => v > 0,
                Rel::Gt | Rel::Ge => false,
            }
        } else {
            match rel {
                Rel::Gt => v <= 0,
                Rel::Ge | Rel::Eq => v < 0,
                Rel::Lt | Rel::Le => false,
            }
        }
}

fn compare_big(lhs: &[Term], rhs: &[Term], n: i64, x: Vals) -> Ordering {
    let mut coef_a = BigInt::zero();
    let mut total = BigInt::zero();
    for (side, neg) in [(lhs, false), (rhs, true)] {
        for term in side {
            let mut c = coef_big(term.coef, n);
            if neg {
                c = -c;
            }
            if term.var == Var::A {
                coef_a += &c;
                if x.a.is_none() {
                    continue;
                }
            }
            total += c * BigInt::from(var_value(term.var, x).expect("finite"));
        }
    }
    if x.a.is_none() && !coef_a.is_zero() {
        return if coef_a.is_positive() { Ordering::Less } else { Ordering::Greater };
    }
    total.cmp(&BigInt::zero())
}

fn atom_holds(atom: &Atom, n: i64, x: Vals) -> bool {
    eval_atom(atom, n, x).0
}

/// Truth value of `atom`, with its split when the `i128` path applies.
fn eval_atom(atom: &Atom, n: i64, x: Vals) -> (bool, Option<Split>) {
    match atom {
        Atom::Cmp { lhs, rel, rhs } => match split_i128(lhs, rhs, n, x) {
            Some(s) => {
                let o = if x.a.is_none() && s.coef_a != 0 {
                    if s.coef_a > 0 {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    }
                } else {
                    match s.fib.checked_add(s.rest) {
                        Some(v) => v.cmp(&0),
                        None => return (rel.holds(compare_big(lhs, rhs, n, x)), None),
                    }
                };
                (rel.holds(o), Some(s))
            }
            None => (rel.holds(compare_big(lhs, rhs, n, x)), None),
        },
        Atom::Golden(rel) => {
            let o = match x.a {
                // b * beta vs -inf
                None => Ordering::Greater,
                Some(a) => cmp_beta_multiple_i64(x.b, a),
            };
            (rel.holds(o), None)
        }
    }
}

fn def_holds(def: &RegionDef, n: i64, x: Vals) -> bool {
    def.alternatives.iter().any(|conj| conj.iter().all(|atom| atom_holds(atom, n, x)))
}

/// Largest family parameter worth testing for this profile.
///
/// Every family either pins `F_{2n}` below `max(|a|, |b|) / d`, or squeezes
/// `b / a` between consecutive Fibonacci ratios so that
/// `|F_{2n} a - F_{2n+1} b|` stays below `|d|`. Since the golden ratio is badly
/// approximable, `|a - b beta| > 1 / (3|b|)`, so the squeeze is impossible
/// once `F_{2n-2} > 16 (M + 1)^2` with `M = max(|a|, |b|, |d|, 1)`.
pub(super) fn max_family_n(x: Vals) -> i64 {
    let m = [x.a.unwrap_or(0), x.b, x.d].iter().map(|v| v.unsigned_abs()).max().unwrap_or(0).max(1);
    let bound = (i128::from(m) + 1).saturating_mul(i128::from(m) + 1).saturating_mul(16);
    let mut n = 0;
    while let Some(f) = fib_i128(2 * n - 2) {
        if f > bound {
            return n;
        }
        n += 1;
    }
    n
}

pub(super) fn label_for(regime: Regime, def: &RegionDef, n: i64) -> RegionLabel {
    let index = match def.index {
        IndexRule::Fixed(i) => i,
        IndexRule::Family { offset, .. } => Some(2 * n as u64 + offset),
    };
    RegionLabel::raw(regime, def.name, index)
}

fn vals(profile: NormProfile, d: i64) -> Option<Vals> {
    let b = profile.b.finite()?;
    Some(Vals { a: profile.a.finite(), b, d })
}

/// Calls `hit` for each family parameter at which `def` holds, stopping early
/// when `hit` returns `true` or some atom is false for good.
fn scan(def: &RegionDef, x: Vals, n_max: i64, mut hit: impl FnMut(i64) -> bool) {
    let IndexRule::Family { min_n, .. } = def.index else {
        if def_holds(def, 0, x) {
            hit(0);
        }
        return;
    };
    // Fibonacci parts of the atoms evaluated at the previous parameter,
    // double-buffered, with a validity bit per atom.
    const ATOMS: usize = 6;
    debug_assert!(def.alternatives.len() * ATOMS <= 32 && def.alternatives.iter().all(|c| c.len() <= ATOMS));
    let mut fibs = [[0i128; 4 * ATOMS]; 2];
    let mut valid = [0u32; 2];
    let mut cur = 0;
    for n in min_n as i64..=n_max {
        valid[cur] = 0;
        let mut holds = false;
        let mut dead = true;
        for (ci, conj) in def.alternatives.iter().enumerate() {
            let mut failed = None;
            for (ai, atom) in conj.iter().enumerate() {
                let (ok, split) = eval_atom(atom, n, x);
                let slot = ci * ATOMS + ai;
                if let Some(sp) = split {
                    fibs[cur][slot] = sp.fib;
                    valid[cur] |= 1 << slot;
                }
                if !ok {
                    failed = Some((slot, atom, split));
                    break;
                }
            }
            match failed {
                None => {
                    holds = true;
                    break;
                }
                Some((slot, atom, split)) if dead => {
                    let old = 1 - cur;
                    let before = if valid[old] & (1 << slot) != 0 {
                        Some(fibs[old][slot])
                    } else if let Atom::Cmp { lhs, rhs, .. } = atom {
                        split_i128(lhs, rhs, n - 1, x).map(|s| s.fib)
                    } else {
                        None
                    };
                    dead = false_from_here(atom, x, split, before);
                }
                Some(_) => {}
            }
        }
        if holds {
            if hit(n) {
                return;
            }
        } else if dead {
            return;
        }
        cur = 1 - cur;
    }
}

fn first_match(defs: &[RegionDef], regime: Regime, x: Vals) -> Option<RegionLabel> {
    let n_max = max_family_n(x);
    let mut found = None;
    for def in defs {
        scan(def, x, n_max, |n| {
            found = Some(label_for(regime, def, n));
            true
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

fn all_matches(defs: &[RegionDef], regime: Regime, x: Vals, out: &mut Vec<RegionLabel>) {
    let n_max = max_family_n(x);
    for def in defs {
        scan(def, x, n_max, |n| {
            out.push(label_for(regime, def, n));
            false
        });
    }
}

pub fn classify(profile: NormProfile, d: i64) -> RegionLabel {
    let regime = Regime::of(d);
    let Some(x) = vals(profile, d) else {
        return RegionLabel::outside_q(regime);
    };
    first_match(table(regime), regime, x).unwrap_or_else(|| {
        panic!("profile {profile} is not covered by the {regime} partition at d = {d}")
    })
}

pub fn matching_labels(profile: NormProfile, d: i64) -> Vec<RegionLabel> {
    let regime = Regime::of(d);
    let mut out = Vec::new();
    match vals(profile, d) {
        None => out.push(RegionLabel::outside_q(regime)),
        Some(x) => all_matches(table(regime), regime, x, &mut out),
    }
    out
}

pub fn large_decomposition(profile: NormProfile, d: i64) -> Option<RegionLabel> {
    if d <= 0 {
        return None;
    }
    let x = vals(profile, d)?;
    first_match(LARGE_DECOMPOSITION, Regime::Large, x)
}

/// All decomposition pieces containing the profile (for disjointness checks).
pub fn decomposition_matches(profile: NormProfile, d: i64) -> Vec<RegionLabel> {
    let mut out = Vec::new();
    if let (true, Some(x)) = (d > 0, vals(profile, d)) {
        all_matches(LARGE_DECOMPOSITION, Regime::Large, x, &mut out);
    }
    out
}

pub fn t_overlay(profile: NormProfile, d: i64) -> Option<RegionLabel> {
    if d < 2 {
        return None;
    }
    let (a, b) = profile.finite()?;
    let k1 = i128::from(d - 1);
    let mut n = 0i64;
    while let (Some(f1), Some(f0)) = (fib_i128(n + 1), fib_i128(n)) {
        let (ta, tb) = (k1.checked_mul(f1)?, k1.checked_mul(f0)?);
        if ta > i128::from(a) {
            return None;
        }
        if ta == i128::from(a) && tb == i128::from(b) {
            return Some(RegionLabel::raw(Regime::Large, RegionName::T, Some(n as u64)));
        }
        n += 1;
    }
    None
}

pub fn contains(label: RegionLabel, profile: NormProfile, d: i64) -> bool {
    let regime = Regime::of(d);
    if label.regime != regime {
        return false;
    }
    match label.name {
        RegionName::OutsideQ => profile.b == NormExp::Zero,
        RegionName::T => t_overlay(profile, d) == Some(label),
        RegionName::A | RegionName::B if regime == Regime::Large => {
            decomposition_matches(profile, d).contains(&label)
        }
        _ => classify(profile, d) == label,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_bound_is_generous_for_small_profiles() {
        let x = Vals { a: Some(3), b: 2, d: 0 };
        assert!(max_family_n(x) >= 4);
        let x = Vals { a: Some(i64::MAX), b: i64::MIN, d: 1 };
        assert!(max_family_n(x) > 60);
    }

    #[test]
    fn big_integer_fallback_agrees() {
        let lhs = [fa(0)];
        let rhs = [D, fb(1)];
        for n in [0i64, 5, 40] {
            let x = Vals { a: Some(1_000_000_007), b: -999_999_937, d: 3 };
            assert_eq!(compare_i128(&lhs, &rhs, n, x), Some(compare_big(&lhs, &rhs, n, x)));
        }
        let x = Vals { a: Some(i64::MAX), b: i64::MAX, d: 3 };
        assert_eq!(compare(&lhs, &rhs, 120, x), compare_big(&lhs, &rhs, 120, x));
    }

    #[test]
    fn minus_infinity_terms() {
        let x = Vals { a: None, b: 5, d: 1 };
        // a < d holds, d < a fails, and a coefficient that cancels leaves b alone.
        assert_eq!(compare(&[A], &[D], 0, x), Ordering::Less);
        assert_eq!(compare(&[D], &[A], 0, x), Ordering::Greater);
        assert_eq!(compare(&[A, B], &[A], 0, x), Ordering::Greater);
    }

    #[test]
    fn t_overlay_profiles() {
        // d = 3, k - 1 = 2: T_n = (2F_{n+1}, 2F_n).
        let cases = [((2, 2), 0), ((4, 2), 1), ((6, 4), 2), ((10, 6), 3)];
        for ((a, b), n) in cases {
            let l = t_overlay(NormProfile::new(a, b), 3).unwrap();
            assert_eq!(l.index, Some(n));
        }
        assert_eq!(t_overlay(NormProfile::new(4, 3), 3), None);
        assert_eq!(t_overlay(NormProfile::new(1, 1), 1), None);
    }
}
