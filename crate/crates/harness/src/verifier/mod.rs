//! Sampled and exhaustive checks of the region transition claims, escape
//! behaviour, worked orbits and the sandwich bounds on `K^-`.
//!
//! Every check returns a serializable report. Reports are deterministic for a
//! fixed seed apart from `wall_time_ms`; see [`VerificationReport::same_outcome`].

use std::collections::BTreeMap;
use std::time::Instant;

use qp_henon::regions::{window_index, Partition, TransitionClaim};
use qp_henon::{Error as CoreError, NormProfile, PadicRational, Point, Regime, RegionLabel, RegionName};
use serde::{Deserialize, Serialize};

mod escape;
mod remarks;
mod sandwich;
mod transition;

pub use escape::{verify_escape, EscapeSpec};
pub use remarks::verify_remark_orbits;
pub use sandwich::{verify_theorem_sandwich, SandwichSpec, Theorem};
pub use transition::{verify_transition, verify_transition_exhaustive, ExhaustiveReport, LemmaSpec, ProfileCounterexample};

/// Counterexamples kept per report; `failures` still counts all of them.
pub const MAX_STORED_COUNTEREXAMPLES: usize = 25;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown lemma identifier {0:?}")]
    UnknownLemma(String),
    #[error("{id} is a claim about the {claim} regime, but d = {d} is {actual}")]
    RegimeMismatch { id: String, claim: Regime, d: i64, actual: Regime },
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// A sampled point that broke a claim. `c`, `x` and `y` are enough to replay
/// it; `trace` holds the profiles that were observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub p: u64,
    pub c: PadicRational,
    pub x: PadicRational,
    pub y: PadicRational,
    pub source: Option<RegionLabel>,
    pub trace: Vec<NormProfile>,
    pub landed: Option<RegionLabel>,
    pub reason: String,
}

impl Counterexample {
    pub fn point(&self) -> Point {
        Point { x: self.x.clone(), y: self.y.clone() }
    }

    /// Recompute the backward trace from the stored point, with as many
    /// steps as the stored trace has.
    pub fn replay(&self) -> Result<Vec<NormProfile>, CoreError> {
        let mut pt = self.point();
        let mut out = vec![pt.profile()];
        while out.len() < self.trace.len() {
            pt = qp_henon::dynamics::inverse_step(&pt, &self.c)?;
            out.push(pt.profile());
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// What was checked, e.g. `transition large/j-descent`.
    pub check: String,
    /// `None` for checks spanning several parameters.
    pub regime: Option<Regime>,
    pub d: Option<i64>,
    pub p: u64,
    pub seed: u64,
    pub samples: usize,
    pub passes: usize,
    pub failures: usize,
    /// Samples that could not be evaluated: empty source regions and points
    /// whose inverse orbit hit `y = 0`.
    pub skipped: usize,
    /// The part of `skipped` caused by `y = 0` along the orbit.
    pub undefined_inverse: usize,
    pub counterexamples: Vec<Counterexample>,
    pub wall_time_ms: u64,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(check: String, d: Option<i64>, p: u64, seed: u64, samples: usize) -> Self {
        VerificationReport {
            check,
            regime: d.map(Regime::of),
            d,
            p,
            seed,
            samples,
            passes: 0,
            failures: 0,
            skipped: 0,
            undefined_inverse: 0,
            counterexamples: Vec::new(),
            wall_time_ms: 0,
            notes: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    /// Equal in everything except the timing.
    pub fn same_outcome(&self, other: &Self) -> bool {
        VerificationReport { wall_time_ms: 0, ..self.clone() } == VerificationReport { wall_time_ms: 0, ..other.clone() }
    }

    fn fail(&mut self, cx: Counterexample) {
        self.failures += 1;
        if self.counterexamples.len() < MAX_STORED_COUNTEREXAMPLES {
            self.counterexamples.push(cx);
        }
    }

    fn skip_undefined(&mut self) {
        self.skipped += 1;
        self.undefined_inverse += 1;
    }

    fn finish(mut self, started: Instant) -> Self {
        debug_assert_eq!(self.passes + self.failures + self.skipped, self.samples);
        self.wall_time_ms = started.elapsed().as_millis() as u64;
        if self.undefined_inverse > 0 {
            self.notes.push(format!("{} sample(s) hit y = 0 along the inverse orbit", self.undefined_inverse));
        }
        self
    }
}

/// The partition at one `d` together with every labelled profile of the
/// window, shared between the checks of a campaign.
pub struct WindowContext {
    pub d: i64,
    pub window: i64,
    pub partition: Partition,
    pub index: BTreeMap<RegionLabel, Vec<(i64, i64)>>,
}

impl WindowContext {
    pub fn new(d: i64, window: i64) -> Self {
        WindowContext { d, window, partition: Partition::new(d), index: window_index(d, window) }
    }

    /// Labels of the window covered by `claim`, optionally restricted.
    fn sources(&self, claim: &TransitionClaim, only: Option<&[RegionLabel]>) -> Vec<(RegionLabel, &[(i64, i64)])> {
        self.index
            .iter()
            .filter(|(l, ps)| claim.covers(**l) && !ps.is_empty() && only.map_or(true, |o| o.contains(l)))
            .map(|(l, ps)| (*l, ps.as_slice()))
            .collect()
    }

    /// Whether `q` lies in one of `targets`.
    pub fn lands_in(&self, q: NormProfile, targets: &[RegionLabel]) -> bool {
        let part = &self.partition;
        let mut class = None;
        targets.iter().any(|&t| match t.name {
            RegionName::T | RegionName::OutsideQ => part.contains(t, q),
            RegionName::A | RegionName::B if part.regime() == Regime::Large => part.contains(t, q),
            _ => *class.get_or_insert_with(|| part.classify(q)) == t,
        })
    }
}

fn label_list(labels: &[RegionLabel]) -> String {
    labels.iter().map(|l| l.short_name()).collect::<Vec<_>>().join(", ")
}
