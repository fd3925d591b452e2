//! Preimages at the level of norm profiles, and the table of claimed region
//! transitions under `f^{-1}`.

use alloc::vec::Vec;

use super::{Regime, RegionLabel, RegionName};
use crate::error::{Error, Result};
use crate::norm::{NormExp, NormProfile};

/// The possible profiles of `f^{-1}(x, y) = (y, (x - c) / y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreimageSet {
    /// `y = 0`: no preimage.
    OutsideQ,
    /// `|x| != |c|`: the norm of `x - c` is `max(|x|, |c|)`.
    Single(NormProfile),
    /// `|x| = |c|`: `|x - c| = p^e` for an undetermined `e <= d`, giving
    /// `(b, e - b)`, or `x = c` exactly (the preimage then has `y = 0`).
    Cancellation { b: i64, d: i64 },
}

impl PreimageSet {
    /// Finite preimage profiles, enumerating the cancellation case for
    /// `e` from `d - depth` up to `d`. The exact-cancellation outcome `x = c`
    /// is left out: its preimage has no further preimage, so the source point
    /// was not in `Q`.
    pub fn enumerate(&self, depth: i64) -> Vec<NormProfile> {
        match *self {
            PreimageSet::OutsideQ => Vec::new(),
            PreimageSet::Single(p) => alloc::vec![p],
            PreimageSet::Cancellation { b, d } => (d - depth..=d).map(|e| NormProfile::new(b, e - b)).collect(),
        }
    }
}

/// Profile-level inverse for `d = log_p|c|`.
pub fn abstract_inverse(profile: NormProfile, d: i64) -> PreimageSet {
    let NormExp::Finite(b) = profile.b else {
        return PreimageSet::OutsideQ;
    };
    match profile.a {
        NormExp::Finite(a) if a == d => PreimageSet::Cancellation { b, d },
        NormExp::Finite(a) => PreimageSet::Single(NormProfile::new(b, a.max(d) - b)),
        NormExp::Zero => PreimageSet::Single(NormProfile::new(b, d - b)),
    }
}

const fn lab(regime: Regime, name: RegionName, index: Option<u64>) -> RegionLabel {
    RegionLabel::raw(regime, name, index)
}

fn small(name: RegionName, i: Option<u64>) -> RegionLabel {
    lab(Regime::Small, name, i)
}

/// Regions that `f^{-1}` maps `label` into, as claimed for each region of the
/// three partitions (and the `T_n` overlay).
pub fn expected_preimage_regions(label: RegionLabel) -> Result<Vec<RegionLabel>> {
    use RegionName::*;
    let none = Err(Error::NoTransitionClaim(label));
    let s = |n, i| small(n, Some(i));
    Ok(match label.regime {
        Regime::Small => match (label.name, label.index) {
            (Z, None) => alloc::vec![small(Z, None)],
            (A, Some(1)) => alloc::vec![s(A, 2)],
            (A, Some(2)) => alloc::vec![s(A, 1)],
            (A, Some(3)) => alloc::vec![s(A, 4)],
            (A, Some(4)) => alloc::vec![s(A, 2), s(A, 5)],
            (A, Some(5)) => alloc::vec![s(A, 6)],
            (A, Some(6)) => alloc::vec![s(A, 2), s(A, 5)],
            (B, Some(1)) => alloc::vec![s(B, 2)],
            (B, Some(2)) => alloc::vec![s(B, 1), s(A, 2), s(A, 3), s(A, 5)],
            (P, Some(1) | Some(2)) => alloc::vec![s(A, 1)],
            (P, Some(3)) => alloc::vec![s(P, 4), s(P, 5)],
            (P, Some(4)) => alloc::vec![s(P, 5), s(A, 6)],
            (P, Some(5)) => alloc::vec![s(P, 4)],
            // Union of the targets of both sub-cases.
            (P, Some(6)) => alloc::vec![s(P, 1), s(P, 3), s(A, 1), s(P, 2), s(P, 4), s(P, 5)],
            _ => return none,
        },
        Regime::Unit => {
            let u = |n, i| lab(Regime::Unit, n, i);
            match (label.name, label.index) {
                (F, None) => alloc::vec![u(G, None)],
                (G, None) => alloc::vec![u(H, None)],
                (H, None) => alloc::vec![u(G, None)],
                (M, Some(1)) => alloc::vec![u(H, None)],
                (M, Some(i)) if i >= 2 => alloc::vec![u(M, Some(i - 1))],
                _ => return none,
            }
        }
        Regime::Large => {
            let l = |n, i| lab(Regime::Large, n, i);
            match (label.name, label.index) {
                (J, Some(0)) => alloc::vec![l(J, Some(0))],
                (J, Some(i)) => alloc::vec![l(J, Some(i - 1))],
                (F, None) => alloc::vec![l(G, None)],
                (G, None) => alloc::vec![l(H, None)],
                (H, None) => alloc::vec![l(G, None)],
                (M, Some(1)) => alloc::vec![l(G, None)],
                (M, Some(i)) if i % 2 == 0 => {
                    let mut v = alloc::vec![l(H, None)];
                    v.extend((1..i).step_by(2).map(|j| l(M, Some(j))));
                    v
                }
                (M, Some(i)) => alloc::vec![l(M, Some(i - 1))],
                (T, Some(n)) if n >= 1 => alloc::vec![l(T, Some(n - 1))],
                _ => return none,
            }
        }
    })
}

/// Two-step claims `f^{-2}(label) ⊂ ...`; only `A_5` of the `|c| < 1`
/// partition has one.
pub fn expected_preimage_regions_depth2(label: RegionLabel) -> Result<Vec<RegionLabel>> {
    if label == small(RegionName::A, Some(5)) {
        Ok(alloc::vec![small(RegionName::A, Some(2))])
    } else {
        Err(Error::NoTransitionClaim(label))
    }
}

/// Which source regions a claim speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFamily {
    Labels(&'static [(RegionName, Option<u64>)]),
    /// Every index `>= min_index` of an indexed family.
    Indexed { name: RegionName, min_index: u64 },
}

/// A named group of transition statements checked together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitionClaim {
    pub id: &'static str,
    pub regime: Regime,
    pub depth: u8,
    pub sources: SourceFamily,
    pub summary: &'static str,
}

impl TransitionClaim {
    pub fn covers(&self, label: RegionLabel) -> bool {
        if label.regime != self.regime {
            return false;
        }
        match self.sources {
            SourceFamily::Labels(ls) => ls.iter().any(|&(n, i)| n == label.name && i == label.index),
            SourceFamily::Indexed { name, min_index } => {
                label.name == name && label.index.is_some_and(|i| i >= min_index)
            }
        }
    }

    pub fn expected(&self, label: RegionLabel) -> Result<Vec<RegionLabel>> {
        match self.depth {
            2 => expected_preimage_regions_depth2(label),
            _ => expected_preimage_regions(label),
        }
    }

    /// The `T_n` overlay is not part of the partition, so its sources are
    /// found by overlay lookup rather than by `classify`.
    pub fn uses_overlay(&self) -> bool {
        matches!(self.sources, SourceFamily::Indexed { name: RegionName::T, .. })
    }

    pub fn by_id(id: &str) -> Option<TransitionClaim> {
        claims().iter().copied().find(|c| c.id == id)
    }
}

/// One row of the exportable transition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionEntry {
    pub source: RegionLabel,
    pub depth: u8,
    pub targets: Vec<RegionLabel>,
}

/// Claimed transitions for every region met in the window at this `d`.
pub fn transition_table(d: i64, window: i64) -> Vec<TransitionEntry> {
    let mut rows = Vec::new();
    for source in super::window_index(d, window).into_keys() {
        if let Ok(targets) = expected_preimage_regions(source) {
            rows.push(TransitionEntry { source, depth: 1, targets });
        }
        if let Ok(targets) = expected_preimage_regions_depth2(source) {
            rows.push(TransitionEntry { source, depth: 2, targets });
        }
    }
    rows
}

use RegionName as N;

const CLAIMS: &[TransitionClaim] = &[
    TransitionClaim {
        id: "small/z-invariant",
        regime: Regime::Small,
        depth: 1,
        sources: SourceFamily::Labels(&[(N::Z, None)]),
        summary: "f^-1(Z) ⊂ Z",
    },
    TransitionClaim {
        id: "small/a-cycle",
        regime: Regime::Small,
        depth: 1,
        sources: SourceFamily::Labels(&[
            (N::A, Some(1)),
            (N::A, Some(2)),
            (N::A, Some(3)),
            (N::A, Some(4)),
            (N::A, Some(5)),
            (N::A, Some(6)),
        ]),
        summary: "A1→A2, A2→A1, A3→A4, A4→A2∪A5, A5→A6, A6→A2∪A5",
    },
    TransitionClaim {
        id: "small/a5-two-step",
        regime: Regime::Small,
        depth: 2,
        sources: SourceFamily::Labels(&[(N::A, Some(5))]),
        summary: "f^-2(A5) ⊂ A2",
    },
    TransitionClaim {
        id: "small/b-regions",
        regime: Regime::Small,
        depth: 1,
        sources: SourceFamily::Labels(&[(N::B, Some(1)), (N::B, Some(2))]),
        summary: "B1→B2, B2→B1∪A2∪A3∪A5",
    },
    TransitionClaim {
        id: "small/p-regions",
        regime: Regime::Small,
        depth: 1,
        sources: SourceFamily::Labels(&[
            (N::P, Some(1)),
            (N::P, Some(2)),
            (N::P, Some(3)),
            (N::P, Some(4)),
            (N::P, Some(5)),
            (N::P, Some(6)),
        ]),
        summary: "P1∪P2→A1, P3→P4∪P5, P4→P5∪A6, P5→P4, P6→P1∪P2∪P3∪P4∪P5∪A1",
    },
    TransitionClaim {
        id: "large/j0-invariant",
        regime: Regime::Large,
        depth: 1,
        sources: SourceFamily::Labels(&[(N::J, Some(0))]),
        summary: "f^-1(J0) ⊂ J0",
    },
    TransitionClaim {
        id: "large/j-descent",
        regime: Regime::Large,
        depth: 1,
        sources: SourceFamily::Indexed { name: N::J, min_index: 1 },
        summary: "f^-1(Ji) ⊂ J(i-1) for i >= 1",
    },
    TransitionClaim {
        id: "large/fgh-escape",
        regime: Regime::Large,
        depth: 1,
        sources: SourceFamily::Labels(&[(N::F, None), (N::G, None), (N::H, None)]),
        summary: "F→G, G→H, H→G",
    },
    TransitionClaim {
        id: "large/m-escape",
        regime: Regime::Large,
        depth: 1,
        sources: SourceFamily::Indexed { name: N::M, min_index: 1 },
        summary: "M1→G, M(2n+2)→H∪M1∪M3∪...∪M(2n+1), M(2n+1)→M(2n)",
    },
    TransitionClaim {
        id: "large/tn-descent",
        regime: Regime::Large,
        depth: 1,
        sources: SourceFamily::Indexed { name: N::T, min_index: 1 },
        summary: "f^-1(Tn) ⊂ T(n-1) for n >= 1",
    },
    TransitionClaim {
        id: "unit/fgh-escape",
        regime: Regime::Unit,
        depth: 1,
        sources: SourceFamily::Labels(&[(N::F, None), (N::G, None), (N::H, None)]),
        summary: "F→G, G→H, H→G",
    },
    TransitionClaim {
        id: "unit/m-descent",
        regime: Regime::Unit,
        depth: 1,
        sources: SourceFamily::Indexed { name: N::M, min_index: 1 },
        summary: "M1→H, M(i)→M(i-1) for i >= 2",
    },
];

/// Every transition claim, grouped as the verifier checks them.
pub fn claims() -> &'static [TransitionClaim] {
    CLAIMS
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::classify;

    #[test]
    fn abstract_inverse_examples() {
        assert_eq!(abstract_inverse(NormProfile::new(2, 0), 1), PreimageSet::Single(NormProfile::new(0, 2)));
        assert_eq!(abstract_inverse(NormProfile::new(1, 0), 1), PreimageSet::Cancellation { b: 0, d: 1 });
        assert_eq!(abstract_inverse(NormProfile::new(0, 0), -1), PreimageSet::Single(NormProfile::new(0, 0)));
        let zero_y = NormProfile::from_exps(NormExp::Finite(3), NormExp::Zero);
        assert_eq!(abstract_inverse(zero_y, 1), PreimageSet::OutsideQ);
        let zero_x = NormProfile::from_exps(NormExp::Zero, NormExp::Finite(3));
        assert_eq!(abstract_inverse(zero_x, 1), PreimageSet::Single(NormProfile::new(3, -2)));
        let c = PreimageSet::Cancellation { b: 0, d: 1 }.enumerate(3);
        assert_eq!(c, [(0, -2), (0, -1), (0, 0), (0, 1)].map(|(a, b)| NormProfile::new(a, b)));
    }

    #[test]
    fn expected_examples() {
        let j3 = RegionLabel::parse(Regime::Large, "J3").unwrap();
        assert_eq!(expected_preimage_regions(j3).unwrap(), [RegionLabel::parse(Regime::Large, "J2").unwrap()]);
        let m1 = RegionLabel::parse(Regime::Unit, "M1").unwrap();
        assert_eq!(expected_preimage_regions(m1).unwrap()[0].short_name(), "H");
        let m6 = RegionLabel::parse(Regime::Large, "M6").unwrap();
        let names: Vec<_> = expected_preimage_regions(m6).unwrap().iter().map(|l| l.short_name()).collect();
        assert_eq!(names, ["H", "M1", "M3", "M5"]);
        let r = RegionLabel::parse(Regime::Small, "R").unwrap();
        assert_eq!(expected_preimage_regions(r), Err(Error::NoTransitionClaim(r)));
        assert!(expected_preimage_regions_depth2(RegionLabel::parse(Regime::Small, "A5").unwrap()).is_ok());
    }

    #[test]
    fn m2_can_reach_h() {
        // The narrower reading f^-1(M2) ⊂ M1 has counterexamples at d = 1:
        // (2, 2) lies in M2 and maps to (2, 0), which lies in H.
        assert_eq!(classify(NormProfile::new(2, 2), 1).short_name(), "M2");
        let PreimageSet::Single(q) = abstract_inverse(NormProfile::new(2, 2), 1) else { panic!() };
        assert_eq!(classify(q, 1).short_name(), "H");
    }

    #[test]
    fn claim_ids_are_unique() {
        for (i, c) in claims().iter().enumerate() {
            assert!(claims()[i + 1..].iter().all(|o| o.id != c.id));
            assert_eq!(TransitionClaim::by_id(c.id), Some(*c));
        }
    }
}
