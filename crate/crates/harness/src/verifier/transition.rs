use std::time::Instant;

use qp_henon::dynamics::inverse_step;
use qp_henon::regions::{abstract_inverse, region_known_empty, TransitionClaim};
use qp_henon::sample::Sampler;
use qp_henon::{Error as CoreError, NormProfile, OddPrime, Point, Regime, RegionLabel};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{label_list, Counterexample, VerificationReport, VerifyError, WindowContext, MAX_STORED_COUNTEREXAMPLES};

/// One transition claim checked at one `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSpec {
    /// A claim identifier from [`qp_henon::regions::claims`].
    pub id: String,
    pub d: i64,
    pub p: u64,
    pub samples: usize,
    pub seed: u64,
    /// Profiles are drawn with `|a|, |b| <= window`.
    pub window: i64,
    /// Random p-adic digits per sampled coordinate.
    pub digits: u32,
    /// Check only these source regions.
    pub sources: Option<Vec<RegionLabel>>,
    /// Replace the claimed targets by these (negative controls).
    pub targets: Option<Vec<RegionLabel>>,
}

impl LemmaSpec {
    pub const DEFAULT_WINDOW: i64 = 60;
    pub const DEFAULT_DIGITS: u32 = 8;

    pub fn new(id: &str, d: i64, p: u64, samples: usize, seed: u64) -> Self {
        LemmaSpec {
            id: id.to_string(),
            d,
            p,
            samples,
            seed,
            window: Self::DEFAULT_WINDOW,
            digits: Self::DEFAULT_DIGITS,
            sources: None,
            targets: None,
        }
    }

    pub fn claim(&self) -> Result<TransitionClaim, VerifyError> {
        let claim = TransitionClaim::by_id(&self.id).ok_or_else(|| VerifyError::UnknownLemma(self.id.clone()))?;
        let actual = Regime::of(self.d);
        if claim.regime != actual {
            return Err(VerifyError::RegimeMismatch { id: self.id.clone(), claim: claim.regime, d: self.d, actual });
        }
        Ok(claim)
    }

    fn targets_for(&self, claim: &TransitionClaim, source: RegionLabel) -> Result<Vec<RegionLabel>, VerifyError> {
        match &self.targets {
            Some(t) => Ok(t.clone()),
            None => Ok(claim.expected(source)?),
        }
    }
}

fn empty_note(claim: &TransitionClaim, d: i64, window: i64, only: Option<&[RegionLabel]>) -> String {
    let known_empty = only.is_some_and(|o| o.iter().all(|&l| region_known_empty(l, d)));
    if known_empty {
        format!("{}: the source region is empty for d = {d}; every sample skipped", claim.id)
    } else {
        format!("{}: no source profile with |a|, |b| <= {window} at d = {d}; every sample skipped", claim.id)
    }
}

/// Sample exact points of the claim's source regions, apply `f^{-1}` (twice
/// for two-step claims) and check the region reached.
///
/// Each sample picks a source region uniformly, a profile of it uniformly,
/// a fresh `c` with `|c| = p^d`, and coordinates with `spec.digits` random
/// digits.
pub fn verify_transition(spec: &LemmaSpec, ctx: Option<&WindowContext>) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let claim = spec.claim()?;
    let p = OddPrime::new(spec.p)?;
    let owned;
    let ctx = match ctx {
        Some(c) if c.d == spec.d && c.window == spec.window => c,
        _ => {
            owned = WindowContext::new(spec.d, spec.window);
            &owned
        }
    };
    let mut report =
        VerificationReport::new(format!("transition {}", claim.id), Some(spec.d), spec.p, spec.seed, spec.samples);
    report.notes.push(format!("claim: {}", claim.summary));
    let sources = ctx.sources(&claim, spec.sources.as_deref());
    if sources.is_empty() {
        report.skipped = spec.samples;
        report.notes.push(empty_note(&claim, spec.d, spec.window, spec.sources.as_deref()));
        return Ok(report.finish(started));
    }
    let targets = sources
        .iter()
        .map(|(l, _)| spec.targets_for(&claim, *l))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sampler = Sampler::new(p, spec.seed, spec.digits);
    'samples: for _ in 0..spec.samples {
        let k = sampler.rng().gen_range(0..sources.len());
        let (source, profiles) = sources[k];
        let (a, b) = profiles[sampler.rng().gen_range(0..profiles.len())];
        let c = sampler.with_norm(spec.d);
        let start = Point { x: sampler.with_norm(a), y: sampler.with_norm(b) };
        let mut pt = start.clone();
        let mut trace = vec![pt.profile()];
        for _ in 0..claim.depth {
            pt = match inverse_step(&pt, &c) {
                Ok(q) => q,
                Err(CoreError::UndefinedInverse) => {
                    report.skip_undefined();
                    continue 'samples;
                }
                Err(e) => return Err(e.into()),
            };
            trace.push(pt.profile());
        }
        let end = pt.profile();
        if end.outside_q() {
            // The image has y = 0, so the sampled point has no further
            // preimage: it was not in Q to begin with.
            report.skip_undefined();
            continue;
        }
        if ctx.lands_in(end, &targets[k]) {
            report.passes += 1;
        } else {
            let landed = ctx.partition.classify(end);
            report.fail(Counterexample {
                p: spec.p,
                c,
                x: start.x,
                y: start.y,
                source: Some(source),
                trace,
                landed: Some(landed),
                reason: format!("{source} -> {landed}, expected one of {}", label_list(&targets[k])),
            });
        }
    }
    Ok(report.finish(started))
}

/// A profile path that leaves the claimed targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileCounterexample {
    pub source: RegionLabel,
    /// Source profile followed by the profile after each inverse step.
    pub path: Vec<NormProfile>,
    pub landed: RegionLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveReport {
    pub claim: String,
    pub regime: Regime,
    pub d: i64,
    pub window: i64,
    pub depth: u8,
    /// Source profiles examined.
    pub profiles: u64,
    /// Image profiles examined, counting every cancellation outcome.
    pub outcomes: u64,
    pub failures: u64,
    pub counterexamples: Vec<ProfileCounterexample>,
    pub wall_time_ms: u64,
    pub notes: Vec<String>,
}

impl ExhaustiveReport {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// Every source profile of the window, pushed through the profile-level
/// inverse. When `|x| = |c|` the norm of `x - c` is undetermined; all values
/// `|x - c| = p^e` with `d - window <= e <= d` are checked.
pub fn verify_transition_exhaustive(spec: &LemmaSpec, ctx: &WindowContext) -> Result<ExhaustiveReport, VerifyError> {
    let started = Instant::now();
    let claim = spec.claim()?;
    assert_eq!(ctx.d, spec.d, "window context built for another d");
    let mut report = ExhaustiveReport {
        claim: claim.id.to_string(),
        regime: claim.regime,
        d: spec.d,
        window: ctx.window,
        depth: claim.depth,
        profiles: 0,
        outcomes: 0,
        failures: 0,
        counterexamples: Vec::new(),
        wall_time_ms: 0,
        notes: vec![format!("claim: {}", claim.summary)],
    };
    let sources = ctx.sources(&claim, spec.sources.as_deref());
    if sources.is_empty() {
        report.notes.push(empty_note(&claim, spec.d, ctx.window, spec.sources.as_deref()));
    }
    let depth = i64::from(claim.depth);
    let mut path = Vec::with_capacity(3);
    for (source, profiles) in sources {
        let targets = spec.targets_for(&claim, source)?;
        for &(a, b) in profiles {
            report.profiles += 1;
            path.clear();
            path.push(NormProfile::new(a, b));
            walk(&mut path, depth, spec.d, ctx.window, &mut |path| {
                report.outcomes += 1;
                let end = *path.last().expect("paths are non-empty");
                if !ctx.lands_in(end, &targets) {
                    report.failures += 1;
                    if report.counterexamples.len() < MAX_STORED_COUNTEREXAMPLES {
                        let landed = ctx.partition.classify(end);
                        report.counterexamples.push(ProfileCounterexample { source, path: path.to_vec(), landed });
                    }
                }
            });
        }
    }
    report.notes.push(format!("when |x| = |c|, every |x - c| = p^e with d - {} <= e <= d is checked", ctx.window));
    report.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(report)
}

/// Visit every profile path of `steps` more inverse steps from `path`.
fn walk(path: &mut Vec<NormProfile>, steps: i64, d: i64, window: i64, visit: &mut impl FnMut(&[NormProfile])) {
    if steps == 0 {
        visit(path);
        return;
    }
    let last = *path.last().expect("paths are non-empty");
    for q in abstract_inverse(last, d).enumerate(window) {
        path.push(q);
        walk(path, steps - 1, d, window, visit);
        path.pop();
    }
}
