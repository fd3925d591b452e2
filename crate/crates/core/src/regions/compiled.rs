//! The region table specialised to one value of `d`.
//!
//! For fixed `d` and family parameter `n`, every atom is a linear form
//! `u a + v b + w` with integer coefficients. [`Partition`] precomputes those
//! coefficients for all `n` a window scan can reach, so classifying a profile
//! costs a few `i64` multiplications per atom. Profiles too large for the
//! fast path, or with `x = 0`, go through the generic evaluator in `table`.

use alloc::vec::Vec;

use super::table::{self, label_for, max_family_n, Atom, Coef, IndexRule, Rel, RegionDef, Var, Vals};
use super::{Regime, RegionLabel, RegionName};
use crate::fib::{cmp_beta_multiple_i64, fib_i128};
use crate::norm::{NormExp, NormProfile};

/// Coefficient bound for compiled forms, and the bound on `|a|, |b|` for
/// using them: three products of size `2^42 * 2^19` stay below `2^63`.
const COEF_BOUND: i128 = 1 << 42;
const VAL_BOUND: i64 = 1 << 19;
/// Family parameters compiled per entry.
const MAX_LEVELS: i64 = 40;

/// `fib_a a + fib_b b + fib_k` is the Fibonacci-coefficient part, the `int_*`
/// fields the rest.
#[derive(Debug, Clone, Copy)]
struct Lin {
    fib_a: i64,
    fib_b: i64,
    fib_k: i64,
    int_a: i64,
    int_b: i64,
    int_k: i64,
    rel: Rel,
    golden: bool,
    has_fib: bool,
    /// False when some Fibonacci index falls below `-2` at this level.
    valid: bool,
}

impl Lin {
    fn parts(&self, a: i64, b: i64) -> (i64, i64) {
        (self.fib_a * a + self.fib_b * b + self.fib_k, self.int_a * a + self.int_b * b + self.int_k)
    }

    fn holds(&self, a: i64, b: i64) -> bool {
        if self.golden {
            return self.rel.holds(cmp_beta_multiple_i64(b, a));
        }
        let (f, r) = self.parts(a, b);
        self.rel.holds((f + r).cmp(&0))
    }
}

fn compile_atom(atom: &Atom, n: i64, d: i64) -> Option<Lin> {
    let (lhs, rel, rhs) = match atom {
        Atom::Golden(rel) => {
            return Some(Lin {
                fib_a: 0,
                fib_b: 0,
                fib_k: 0,
                int_a: 0,
                int_b: 0,
                int_k: 0,
                rel: *rel,
                golden: true,
                has_fib: false,
                valid: true,
            })
        }
        Atom::Cmp { lhs, rel, rhs } => (lhs, *rel, rhs),
    };
    let mut fib = [0i128; 3];
    let mut int = [0i128; 3];
    let mut valid = true;
    let mut has_fib = false;
    for (side, sign) in [(lhs, 1i128), (rhs, -1i128)] {
        for term in side.iter() {
            let (c, slot) = match term.coef {
                Coef::Int(i) => (i128::from(i), &mut int),
                Coef::Fib(k) => {
                    has_fib = true;
                    match fib_i128(2 * n + k) {
                        Some(f) => (f, &mut fib),
                        None => {
                            valid = false;
                            (0, &mut fib)
                        }
                    }
                }
            };
            let c = c * sign;
            match term.var {
                Var::A => slot[0] += c,
                Var::B => slot[1] += c,
                Var::D => slot[2] += c.checked_mul(i128::from(d))?,
                Var::One => slot[2] += c,
            }
        }
    }
    let fits = |v: &i128| v.abs() <= COEF_BOUND;
    if !(fib.iter().all(fits) && int.iter().all(fits)) {
        return None;
    }
    let n64 = |v: i128| v as i64;
    Some(Lin {
        fib_a: n64(fib[0]),
        fib_b: n64(fib[1]),
        fib_k: n64(fib[2]),
        int_a: n64(int[0]),
        int_b: n64(int[1]),
        int_k: n64(int[2]),
        rel,
        golden: false,
        has_fib,
        valid,
    })
}

#[derive(Debug, Clone)]
struct CompiledDef {
    def: &'static RegionDef,
    /// First compiled parameter; level `i` is `n = base + i`.
    base: i64,
    /// First parameter at which the entry is defined.
    min_n: i64,
    alt_lens: Vec<usize>,
    stride: usize,
    lins: Vec<Lin>,
}

impl CompiledDef {
    fn new(def: &'static RegionDef, d: i64) -> Self {
        let (base, min_n, top) = match def.index {
            IndexRule::Fixed(_) => (0, 0, 0),
            IndexRule::Family { min_n, .. } => (min_n as i64 - 1, min_n as i64, min_n as i64 + MAX_LEVELS),
        };
        let alt_lens: Vec<usize> = def.alternatives.iter().map(|c| c.len()).collect();
        let stride = alt_lens.iter().sum();
        let mut lins = Vec::new();
        'levels: for n in base..=top {
            let mut level = Vec::with_capacity(stride);
            for conj in def.alternatives {
                for atom in conj.iter() {
                    match compile_atom(atom, n, d) {
                        Some(l) => level.push(l),
                        None => break 'levels,
                    }
                }
            }
            lins.extend(level);
        }
        CompiledDef { def, base, min_n, alt_lens, stride, lins }
    }

    /// Largest compiled parameter.
    fn top(&self) -> i64 {
        self.base + (self.lins.len() / self.stride.max(1)) as i64 - 1
    }

    fn level(&self, n: i64) -> &[Lin] {
        let i = (n - self.base) as usize * self.stride;
        &self.lins[i..i + self.stride]
    }

    /// Same contract as the generic scan: `hit` for every matching `n`,
    /// stopping when it returns `true` or an atom is false for good.
    fn scan(&self, a: i64, b: i64, n_max: i64, mut hit: impl FnMut(i64) -> bool) {
        if let IndexRule::Fixed(_) = self.def.index {
            let level = self.level(0);
            let mut start = 0;
            for &len in &self.alt_lens {
                if level[start..start + len].iter().all(|l| l.holds(a, b)) {
                    hit(0);
                    return;
                }
                start += len;
            }
            return;
        }
        for n in self.min_n..=n_max {
            let level = self.level(n);
            let mut holds = false;
            let mut dead = true;
            let mut start = 0;
            for &len in &self.alt_lens {
                match level[start..start + len].iter().position(|l| !l.holds(a, b)) {
                    None => {
                        holds = true;
                        break;
                    }
                    Some(i) if dead => dead = self.dead(n, start + i, a, b),
                    Some(_) => {}
                }
                start += len;
            }
            if holds {
                if hit(n) {
                    return;
                }
            } else if dead {
                return;
            }
        }
    }

    /// The failing atom at `slot` stays false for all larger parameters; see
    /// the generic version in `table` for the argument.
    fn dead(&self, n: i64, slot: usize, a: i64, b: i64) -> bool {
        let now = self.level(n)[slot];
        if now.golden || !now.has_fib {
            return true;
        }
        let prev = self.level(n - 1)[slot];
        if !prev.valid || !now.valid {
            return false;
        }
        let (f, r) = now.parts(a, b);
        let (pf, _) = prev.parts(a, b);
        let v = f + r;
        let monotone = f != 0 && f.signum() * pf.signum() >= 0 && f.abs() >= pf.abs();
        monotone
            && if f > 0 {
                match now.rel {
                    Rel::Lt => v >= 0,
                    Rel::Le | Rel::Eq => v > 0,
                    Rel::Gt | Rel::Ge => false,
                }
            } else {
                match now.rel {
                    Rel::Gt => v <= 0,
                    Rel::Ge | Rel::Eq => v < 0,
                    Rel::Lt | Rel::Le => false,
                }
            }
    }
}

/// The partition of profile space for one `d`, ready for bulk queries.
///
/// Answers agree with the free functions [`super::classify`],
/// [`super::matching_labels`], [`super::large_decomposition`] and
/// [`super::contains`].
#[derive(Debug, Clone)]
pub struct Partition {
    d: i64,
    regime: Regime,
    defs: Vec<CompiledDef>,
    decomposition: Vec<CompiledDef>,
    /// Smallest compiled top level over all family entries.
    top: i64,
}

impl Partition {
    pub fn new(d: i64) -> Self {
        let regime = Regime::of(d);
        let defs: Vec<_> = table::table(regime).iter().map(|def| CompiledDef::new(def, d)).collect();
        let decomposition: Vec<_> = if regime == Regime::Large {
            table::LARGE_DECOMPOSITION.iter().map(|def| CompiledDef::new(def, d)).collect()
        } else {
            Vec::new()
        };
        let top = defs
            .iter()
            .chain(decomposition.iter())
            .filter(|c| matches!(c.def.index, IndexRule::Family { .. }))
            .map(CompiledDef::top)
            .min()
            .unwrap_or(i64::MAX);
        Partition { d, regime, defs, decomposition, top }
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `(a, b, n_max)` when the compiled path applies.
    fn fast(&self, profile: NormProfile) -> Option<(i64, i64, i64)> {
        let (a, b) = profile.finite()?;
        if a.abs() >= VAL_BOUND || b.abs() >= VAL_BOUND {
            return None;
        }
        let n_max = max_family_n(Vals { a: Some(a), b, d: self.d });
        (n_max <= self.top).then_some((a, b, n_max))
    }

    fn first(&self, defs: &[CompiledDef], a: i64, b: i64, n_max: i64) -> Option<RegionLabel> {
        let mut found = None;
        for c in defs {
            c.scan(a, b, n_max, |n| {
                found = Some(label_for(self.regime, c.def, n));
                true
            });
            if found.is_some() {
                break;
            }
        }
        found
    }

    pub fn classify(&self, profile: NormProfile) -> RegionLabel {
        match self.fast(profile) {
            Some((a, b, n_max)) => self.first(&self.defs, a, b, n_max).unwrap_or_else(|| {
                panic!("profile {profile} is not covered by the {} partition at d = {}", self.regime, self.d)
            }),
            None => table::classify(profile, self.d),
        }
    }

    pub fn matching_labels(&self, profile: NormProfile) -> Vec<RegionLabel> {
        let Some((a, b, n_max)) = self.fast(profile) else {
            return table::matching_labels(profile, self.d);
        };
        let mut out = Vec::new();
        for c in &self.defs {
            c.scan(a, b, n_max, |n| {
                out.push(label_for(self.regime, c.def, n));
                false
            });
        }
        out
    }

    pub fn large_decomposition(&self, profile: NormProfile) -> Option<RegionLabel> {
        if self.regime != Regime::Large {
            return None;
        }
        match self.fast(profile) {
            Some((a, b, n_max)) => self.first(&self.decomposition, a, b, n_max),
            None => table::large_decomposition(profile, self.d),
        }
    }

    /// Every decomposition piece containing the profile.
    pub fn decomposition_matches(&self, profile: NormProfile) -> Vec<RegionLabel> {
        let Some((a, b, n_max)) = self.fast(profile) else {
            return table::decomposition_matches(profile, self.d);
        };
        let mut out = Vec::new();
        for c in &self.decomposition {
            c.scan(a, b, n_max, |n| {
                out.push(label_for(self.regime, c.def, n));
                false
            });
        }
        out
    }

    pub fn t_overlay(&self, profile: NormProfile) -> Option<RegionLabel> {
        table::t_overlay(profile, self.d)
    }

    pub fn contains(&self, label: RegionLabel, profile: NormProfile) -> bool {
        if label.regime != self.regime {
            return false;
        }
        match label.name {
            RegionName::OutsideQ => profile.b == NormExp::Zero,
            RegionName::T => self.t_overlay(profile) == Some(label),
            RegionName::A | RegionName::B if self.regime == Regime::Large => {
                self.decomposition_matches(profile).contains(&label)
            }
            _ => self.classify(profile) == label,
        }
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{classify, contains, large_decomposition, matching_labels};
    use proptest::prelude::*;

    #[test]
    fn agrees_with_generic_on_a_grid() {
        for d in [-4i64, -1, 0, 1, 2, 5] {
            let part = Partition::new(d);
            for a in -60i64..=60 {
                for b in -60i64..=60 {
                    let p = NormProfile::new(a, b);
                    assert_eq!(part.matching_labels(p), matching_labels(p, d), "{p} d={d}");
                    assert_eq!(part.large_decomposition(p), large_decomposition(p, d), "{p} d={d}");
                    assert_eq!(part.decomposition_matches(p), table::decomposition_matches(p, d), "{p} d={d}");
                }
            }
        }
    }

    #[test]
    fn falls_back_for_zero_and_huge() {
        let part = Partition::new(2);
        let z = NormProfile::from_exps(NormExp::Zero, NormExp::Finite(1));
        assert_eq!(part.classify(z), classify(z, 2));
        let big = NormProfile::new(1 << 40, (1 << 40) - 3);
        assert_eq!(part.classify(big), classify(big, 2));
    }

    proptest! {
        #[test]
        fn agrees_with_generic(a in -5000i64..5000, b in -5000i64..5000, d in -20i64..20) {
            let part = Partition::new(d);
            let p = NormProfile::new(a, b);
            prop_assert_eq!(part.classify(p), classify(p, d));
            let l = classify(p, d);
            prop_assert!(part.contains(l, p) && contains(l, p, d));
        }
    }
}
