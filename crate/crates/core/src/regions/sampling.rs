//! Enumerating a region's profiles inside a window and sampling points in it.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use super::{t_overlay, Partition, Regime, RegionLabel, RegionName};
use crate::dynamics::Point;
use crate::error::{Error, Result};
use crate::norm::NormProfile;
use crate::prime::OddPrime;
use crate::sample::sample_with_norm;

/// The integer profiles of one region with `|a|, |b| <= window`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSet {
    pub label: RegionLabel,
    pub d: i64,
    pub window: i64,
    pub profiles: Vec<(i64, i64)>,
}

/// Every label met in the window (partition labels, `J` decomposition pieces
/// and `T_n`), with its profiles in row-major order.
pub fn window_index(d: i64, window: i64) -> BTreeMap<RegionLabel, Vec<(i64, i64)>> {
    let mut map: BTreeMap<RegionLabel, Vec<(i64, i64)>> = BTreeMap::new();
    let part = Partition::new(d);
    for a in -window..=window {
        for b in -window..=window {
            let p = NormProfile::new(a, b);
            map.entry(part.classify(p)).or_default().push((a, b));
            if let Some(l) = part.large_decomposition(p) {
                map.entry(l).or_default().push((a, b));
            }
            if let Some(l) = t_overlay(p, d) {
                map.entry(l).or_default().push((a, b));
            }
        }
    }
    map
}

impl ProfileSet {
    pub fn build(label: RegionLabel, d: i64, window: i64) -> Self {
        let mut profiles = Vec::new();
        let part = Partition::new(d);
        for a in -window..=window {
            for b in -window..=window {
                if part.contains(label, NormProfile::new(a, b)) {
                    profiles.push((a, b));
                }
            }
        }
        ProfileSet { label, d, window, profiles }
    }

    /// Union of several regions, built from one scan of the window.
    pub fn union(labels: &[RegionLabel], d: i64, window: i64) -> Vec<(RegionLabel, (i64, i64))> {
        let index = window_index(d, window);
        let mut out = Vec::new();
        for l in labels {
            if let Some(ps) = index.get(l) {
                out.extend(ps.iter().map(|&p| (*l, p)));
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// A point whose profile is drawn uniformly from the set.
    pub fn sample<R: Rng + ?Sized>(&self, p: OddPrime, digit_count: u32, rng: &mut R) -> Result<Point> {
        if self.profiles.is_empty() {
            return Err(empty_error(self.label, self.d, self.window));
        }
        let (a, b) = self.profiles[rng.gen_range(0..self.profiles.len())];
        Ok(point_with_profile(a, b, p, digit_count, rng))
    }
}

pub(crate) fn point_with_profile<R: Rng + ?Sized>(a: i64, b: i64, p: OddPrime, digits: u32, rng: &mut R) -> Point {
    Point { x: sample_with_norm(a, digits, p, rng), y: sample_with_norm(b, digits, p, rng) }
}

/// Regions that contain no integer profile at all for this `d`.
///
/// These are the regions that need an integer strictly inside an open
/// interval of length `|d| = 1`, and `T_n` for `d < 2`.
pub fn region_known_empty(label: RegionLabel, d: i64) -> bool {
    use RegionName::*;
    if label.regime != Regime::of(d) {
        return true;
    }
    match (label.regime, label.name, label.index) {
        (_, OutsideQ, _) => true,
        (Regime::Small, A, Some(5 | 6)) | (Regime::Small, P, Some(2..=5)) => d == -1,
        (Regime::Large, J | A | B, _) => d == 1,
        (Regime::Large, D, Some(2)) => d == 1,
        (Regime::Large, T, _) => d < 2,
        _ => false,
    }
}

fn empty_error(label: RegionLabel, d: i64, window: i64) -> Error {
    if region_known_empty(label, d) {
        Error::EmptyRegion { label, d }
    } else {
        Error::EmptyWindow { label, d, window }
    }
}

/// Draw a point of `label` whose profile is uniform among the region's
/// profiles in the window. The coordinates carry `digit_count` random digits.
pub fn sample_in_region<R: Rng + ?Sized>(
    label: RegionLabel,
    d: i64,
    p: OddPrime,
    window: i64,
    digit_count: u32,
    rng: &mut R,
) -> Result<Point> {
    if region_known_empty(label, d) {
        return Err(Error::EmptyRegion { label, d });
    }
    ProfileSet::build(label, d, window).sample(p, digit_count, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::contains;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn j0_profiles_at_d2() {
        let j0 = RegionLabel::parse(Regime::Large, "J0").unwrap();
        let set = ProfileSet::build(j0, 2, 2);
        assert!(set.profiles.contains(&(1, 1)) && set.profiles.contains(&(0, 1)));
        assert!(set.profiles.iter().all(|&(a, b)| a < 2 && b == 1));
    }

    #[test]
    fn empty_regions() {
        let p = OddPrime::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let j0 = RegionLabel::parse(Regime::Large, "J0").unwrap();
        assert_eq!(sample_in_region(j0, 1, p, 10, 4, &mut rng), Err(Error::EmptyRegion { label: j0, d: 1 }));
        let z = RegionLabel::parse(Regime::Small, "Z").unwrap();
        let pt = sample_in_region(z, -1, p, 3, 4, &mut rng).unwrap();
        assert_eq!(pt.profile(), NormProfile::new(0, 0));
        let j9 = RegionLabel::parse(Regime::Large, "J9").unwrap();
        assert!(matches!(sample_in_region(j9, 2, p, 3, 4, &mut rng), Err(Error::EmptyWindow { .. })));
    }

    #[test]
    fn known_empty_regions_have_no_profiles() {
        for d in [-1i64, 1] {
            for (label, ps) in window_index(d, 40) {
                assert!(!region_known_empty(label, d) || ps.is_empty(), "{label} at d = {d}");
            }
        }
    }

    #[test]
    fn samples_land_in_their_region() {
        let p = OddPrime::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [-2i64, 0, 2, 3] {
            for (label, _) in window_index(d, 12) {
                if label.name == RegionName::OutsideQ {
                    continue;
                }
                let set = ProfileSet::build(label, d, 12);
                for _ in 0..5 {
                    let pt = set.sample(p, 6, &mut rng).unwrap();
                    assert!(contains(label, pt.profile(), d));
                }
            }
        }
    }
}
