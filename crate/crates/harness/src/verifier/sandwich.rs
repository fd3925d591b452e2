use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use qp_henon::dynamics::{backward_orbit_certified, backward_orbit_with, OrbitOptions, Verdict};
use qp_henon::sample::Sampler;
use qp_henon::{MapParams, OddPrime, Point, Regime, RegionLabel, RegionName};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::escape::{verify_escape, EscapeSpec};
use super::{Counterexample, VerificationReport, VerifyError, WindowContext};

/// The three two-sided bounds on `K^-`, one per regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// `|c| < 1`: `Z ⊂ K^- ⊂ R ∪ Z`.
    Small,
    /// `|c| > 1`: `⋃ f^n(J_0) ⊂ K^- ⊂ C ∪ ⋃ f^n(J_0)`.
    Large,
    /// `|c| = 1`: `K^- ⊂ {max(|x|, |y|) = 1}`.
    Unit,
}

impl Theorem {
    pub fn regime(self) -> Regime {
        match self {
            Theorem::Small => Regime::Small,
            Theorem::Large => Regime::Large,
            Theorem::Unit => Regime::Unit,
        }
    }

    /// The region `f^{-1}` maps into itself, if the lower bound has one.
    fn invariant(self) -> Option<RegionLabel> {
        let (regime, name, index) = match self {
            Theorem::Small => (Regime::Small, RegionName::Z, None),
            Theorem::Large => (Regime::Large, RegionName::J, Some(0)),
            Theorem::Unit => return None,
        };
        Some(RegionLabel::new(regime, name, index).expect("valid label"))
    }

    /// Regions whose points are claimed to leave every bounded set.
    fn escaping(self, label: RegionLabel) -> bool {
        use RegionName::*;
        match self {
            Theorem::Small => matches!(label.name, A | B | P),
            Theorem::Large | Theorem::Unit => matches!(label.name, F | G | H | M),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Small => "small",
            Theorem::Large => "large",
            Theorem::Unit => "unit",
        })
    }
}

impl FromStr for Theorem {
    type Err = String;

    /// `small`/`large`/`unit`, or `1`/`2`/`3` in that order.
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "small" => Ok(Theorem::Small),
            "2" | "large" => Ok(Theorem::Large),
            "3" | "unit" => Ok(Theorem::Unit),
            _ => Err(format!("unknown theorem {s:?}; expected small, large, unit or 1, 2, 3")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichSpec {
    pub theorem: Theorem,
    pub d: i64,
    pub p: u64,
    /// Samples for each side.
    pub samples: usize,
    pub seed: u64,
    pub window: i64,
    pub steps: usize,
    pub precision: u32,
}

impl SandwichSpec {
    pub fn new(theorem: Theorem, d: i64, p: u64, samples: usize, seed: u64) -> Self {
        SandwichSpec { theorem, d, p, samples, seed, window: 60, steps: 60, precision: 64 }
    }
}

impl VerificationReport {
    fn absorb(&mut self, other: VerificationReport) {
        self.samples += other.samples;
        self.passes += other.passes;
        self.skipped += other.skipped;
        self.undefined_inverse += other.undefined_inverse;
        self.failures += other.failures;
        let room = super::MAX_STORED_COUNTEREXAMPLES.saturating_sub(self.counterexamples.len());
        self.counterexamples.extend(other.counterexamples.into_iter().take(room));
    }
}

/// Lower side: points of the invariant region stay there for `steps`
/// inverse steps. Upper side: points of every escaping region of the window
/// escape (see [`verify_escape`]).
pub fn verify_theorem_sandwich(spec: &SandwichSpec) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let p = OddPrime::new(spec.p)?;
    let regime = Regime::of(spec.d);
    if regime != spec.theorem.regime() {
        return Err(VerifyError::RegimeMismatch {
            id: format!("sandwich/{}", spec.theorem),
            claim: spec.theorem.regime(),
            d: spec.d,
            actual: regime,
        });
    }
    let ctx = WindowContext::new(spec.d, spec.window);
    let mut report = VerificationReport::new(format!("sandwich {}", spec.theorem), Some(spec.d), spec.p, spec.seed, 0);
    report.notes.push(
        "staying in a region for finitely many steps is evidence, not proof, that a point is in K^-; \
         the assertable lower-bound claim is the invariance of the region under f^-1, checked exhaustively \
         by the transition campaigns"
            .into(),
    );

    match spec.theorem.invariant() {
        Some(inv) => {
            let profiles = ctx.index.get(&inv).map(Vec::as_slice).unwrap_or(&[]);
            let mut lower = VerificationReport::new(String::new(), Some(spec.d), spec.p, spec.seed, spec.samples);
            if profiles.is_empty() {
                lower.skipped = spec.samples;
                report.notes.push(format!("lower side: {inv} is empty at d = {}; skipped", spec.d));
            } else {
                stay_in(&mut lower, inv, profiles, &ctx, spec, p);
                report.notes.push(format!(
                    "lower side: {} of {} samples of {inv} stayed in {inv} for {} steps",
                    lower.passes, spec.samples, spec.steps
                ));
            }
            report.absorb(lower);
        }
        None => report.notes.push("lower side: no invariant region; only the upper side is checked".into()),
    }

    let escaping: Vec<RegionLabel> = ctx.index.keys().copied().filter(|l| spec.theorem.escaping(*l)).collect();
    let mut es = EscapeSpec::new(escaping.clone(), spec.d, spec.p, spec.samples, spec.seed.wrapping_add(1));
    es.window = spec.window;
    es.steps = spec.steps;
    es.precision = spec.precision;
    let upper = verify_escape(&es, Some(&ctx))?;
    report.notes.push(format!(
        "upper side: {} of {} samples escaped",
        upper.passes, spec.samples
    ));
    report.absorb(upper);
    report.notes.push(format!(
        "upper side: {} escaping region(s) sampled: {}",
        escaping.len(),
        super::label_list(&escaping)
    ));
    Ok(report.finish(started))
}

fn stay_in(
    report: &mut VerificationReport,
    inv: RegionLabel,
    profiles: &[(i64, i64)],
    ctx: &WindowContext,
    spec: &SandwichSpec,
    p: OddPrime,
) {
    let opts = OrbitOptions { label_regions: false, ..OrbitOptions::new(spec.steps, i64::MAX) };
    let mut sampler = Sampler::new(p, spec.seed, 8);
    for _ in 0..spec.samples {
        let (a, b) = profiles[sampler.rng().gen_range(0..profiles.len())];
        let c = sampler.with_norm(spec.d);
        let start = Point { x: sampler.with_norm(a), y: sampler.with_norm(b) };
        let params = MapParams::new(c.clone());
        let rec = backward_orbit_certified(&start, &params, &opts, spec.precision);
        let (verdict, trace) = match rec.verdict {
            Verdict::PrecisionExhausted { .. } => {
                let exact = backward_orbit_with(&start, &params, &opts.with_budget(1 << 26));
                (exact.verdict, exact.profiles())
            }
            v => (v, rec.profiles()),
        };
        let stayed = trace.iter().all(|q| ctx.partition.contains(inv, *q));
        match verdict {
            Verdict::UndefinedInverse { .. } => report.skip_undefined(),
            Verdict::Completed { .. } if stayed => report.passes += 1,
            v => {
                let reason = if stayed { format!("inconclusive: {}", v.name()) } else { format!("left {inv}") };
                report.fail(Counterexample {
                    p: spec.p,
                    c,
                    x: start.x,
                    y: start.y,
                    source: Some(inv),
                    landed: trace.iter().find(|q| !ctx.partition.contains(inv, **q)).map(|q| ctx.partition.classify(*q)),
                    trace,
                    reason,
                });
            }
        }
    }
}
