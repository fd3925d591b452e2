//! Named regions of norm-profile space and the preimage transitions between
//! them.
//!
//! Every region is a set of integer profiles `(a, b) = (log_p|x|, log_p|y|)`
//! cut out by linear inequalities in `a`, `b` and `d = log_p|c|` whose
//! coefficients are Fibonacci numbers, plus two golden-ratio half-planes in
//! the `|c| < 1` regime. The inequalities live in one declarative table
//! ([`table`]); [`classify`] returns the first matching entry.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::norm::NormProfile;

mod compiled;
mod sampling;
pub mod table;
mod transitions;

pub use compiled::Partition;
pub use sampling::{region_known_empty, sample_in_region, window_index, ProfileSet};
pub use transitions::{
    abstract_inverse, claims, expected_preimage_regions, expected_preimage_regions_depth2, PreimageSet,
    SourceFamily, TransitionClaim, TransitionEntry, transition_table,
};

/// The three parameter regimes, by the sign of `d = log_p|c|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// `|c| < 1`.
    Small,
    /// `|c| = 1`.
    Unit,
    /// `|c| > 1`.
    Large,
}

impl Regime {
    pub fn of(d: i64) -> Regime {
        match d.signum() {
            -1 => Regime::Small,
            0 => Regime::Unit,
            _ => Regime::Large,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Small => "SMALL",
            Regime::Unit => "UNIT",
            Regime::Large => "LARGE",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SMALL" => Ok(Regime::Small),
            "UNIT" => Ok(Regime::Unit),
            "LARGE" => Ok(Regime::Large),
            _ => Err(Error::Parse(alloc::format!("unknown regime {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionName {
    Z,
    R,
    A,
    B,
    P,
    C,
    D,
    F,
    G,
    H,
    J,
    M,
    T,
    /// `y = 0`: the inverse is undefined, so the point is not in `Q`.
    OutsideQ,
}

impl RegionName {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionName::Z => "Z",
            RegionName::R => "R",
            RegionName::A => "A",
            RegionName::B => "B",
            RegionName::P => "P",
            RegionName::C => "C",
            RegionName::D => "D",
            RegionName::F => "F",
            RegionName::G => "G",
            RegionName::H => "H",
            RegionName::J => "J",
            RegionName::M => "M",
            RegionName::T => "T",
            RegionName::OutsideQ => "OutsideQ",
        }
    }
}

impl fmt::Display for RegionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Z" => RegionName::Z,
            "R" => RegionName::R,
            "A" => RegionName::A,
            "B" => RegionName::B,
            "P" => RegionName::P,
            "C" => RegionName::C,
            "D" => RegionName::D,
            "F" => RegionName::F,
            "G" => RegionName::G,
            "H" => RegionName::H,
            "J" => RegionName::J,
            "M" => RegionName::M,
            "T" => RegionName::T,
            "OutsideQ" => RegionName::OutsideQ,
            _ => return Err(Error::Parse(alloc::format!("unknown region name {s:?}"))),
        })
    }
}

/// A region: regime, name and, for indexed families, the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionLabel {
    pub regime: Regime,
    pub name: RegionName,
    pub index: Option<u64>,
}

impl RegionLabel {
    /// Validated constructor: the name must belong to the regime, and an
    /// index is present exactly for indexed families.
    pub fn new(regime: Regime, name: RegionName, index: Option<u64>) -> Result<Self> {
        let label = RegionLabel { regime, name, index };
        use RegionName::*;
        let ok = match (regime, name, index) {
            (_, OutsideQ, None) => true,
            (Regime::Small, Z | R, None) => true,
            (Regime::Small, A | P, Some(1..=6)) => true,
            (Regime::Small, B, Some(1..=2)) => true,
            (Regime::Unit, C, Some(0)) => true,
            (Regime::Unit, F | G | H, None) => true,
            (Regime::Unit, M, Some(1..)) => true,
            (Regime::Large, F | G | H, None) => true,
            (Regime::Large, J | C | T, Some(_)) => true,
            (Regime::Large, A | B | M, Some(1..)) => true,
            (Regime::Large, D, Some(2..)) => true,
            _ => false,
        };
        if ok {
            Ok(label)
        } else {
            Err(Error::InvalidLabel(label))
        }
    }

    pub(crate) const fn raw(regime: Regime, name: RegionName, index: Option<u64>) -> Self {
        RegionLabel { regime, name, index }
    }

    pub fn outside_q(regime: Regime) -> Self {
        RegionLabel { regime, name: RegionName::OutsideQ, index: None }
    }

    /// Parse a short name such as `"J3"`, `"C0"`, `"G"` within a regime.
    pub fn parse(regime: Regime, s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "OutsideQ" {
            return Ok(Self::outside_q(regime));
        }
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (name, idx) = s.split_at(split);
        let name: RegionName = name.parse()?;
        let index = if idx.is_empty() {
            None
        } else {
            Some(idx.parse::<u64>().map_err(|_| Error::Parse(alloc::format!("bad region index in {s:?}")))?)
        };
        Self::new(regime, name, index)
    }

    /// `"J3"`, `"G"`, ...
    pub fn short_name(&self) -> String {
        match self.index {
            Some(i) => alloc::format!("{}{}", self.name, i),
            None => String::from(self.name.as_str()),
        }
    }

    pub fn is_indexed(&self) -> bool {
        self.index.is_some()
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.regime, self.short_name())
    }
}

/// The unique region of the partition containing `profile`, for
/// `d = log_p|c|`.
///
/// A zero `y` coordinate gives [`RegionName::OutsideQ`]. A zero `x`
/// coordinate is treated as `a = -inf`.
pub fn classify(profile: NormProfile, d: i64) -> RegionLabel {
    table::classify(profile, d)
}

/// Every partition entry whose inequalities hold at `profile`. A correct
/// partition returns exactly one label; the totality tests rely on this.
pub fn matching_labels(profile: NormProfile, d: i64) -> Vec<RegionLabel> {
    table::matching_labels(profile, d)
}

/// Membership of `profile` in `label`, including the decomposition pieces
/// `A_i`/`B_i` of the `J` family and the overlay family `T_n`.
pub fn contains(label: RegionLabel, profile: NormProfile, d: i64) -> bool {
    table::contains(label, profile, d)
}

/// The `A_i`/`B_i` piece of a `J_i` profile (`|c| > 1`).
pub fn large_decomposition(profile: NormProfile, d: i64) -> Option<RegionLabel> {
    table::large_decomposition(profile, d)
}

/// `T_n` containing the profile, for `d = k >= 2`: `a = (k-1)F_{n+1}`,
/// `b = (k-1)F_n`.
pub fn t_overlay(profile: NormProfile, d: i64) -> Option<RegionLabel> {
    table::t_overlay(profile, d)
}
