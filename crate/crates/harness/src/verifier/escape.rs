use std::time::Instant;

use qp_henon::dynamics::{backward_orbit_certified, backward_orbit_with, OrbitOptions, Verdict};
use qp_henon::fib::growth_exponent;
use qp_henon::regions::region_known_empty;
use qp_henon::sample::Sampler;
use qp_henon::{MapParams, NormExp, NormProfile, OddPrime, Point, Regime, RegionLabel, RegionName};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{label_list, Counterexample, VerificationReport, VerifyError, WindowContext};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeSpec {
    /// Sampled round-robin; regions without a profile in the window are
    /// dropped.
    pub regions: Vec<RegionLabel>,
    pub d: i64,
    pub p: u64,
    pub samples: usize,
    pub seed: u64,
    pub window: i64,
    pub digits: u32,
    pub steps: usize,
    /// An orbit escapes once `max(a, b)` exceeds this.
    pub escape_exponent: i64,
    /// Digits carried by the certified arithmetic before falling back to
    /// exact rationals.
    pub precision: u32,
    /// Size limit for the exact fallback.
    pub bit_budget: u64,
}

impl EscapeSpec {
    pub const DEFAULT_STEPS: usize = 60;
    pub const DEFAULT_PRECISION: u32 = 64;
    pub const DEFAULT_BIT_BUDGET: u64 = 1 << 26;

    /// `8 max(1, d) F_12`.
    pub fn default_escape_exponent(d: i64) -> i64 {
        8 * d.max(1) * 233
    }

    pub fn new(regions: Vec<RegionLabel>, d: i64, p: u64, samples: usize, seed: u64) -> Self {
        EscapeSpec {
            regions,
            d,
            p,
            samples,
            seed,
            window: 60,
            digits: 8,
            steps: Self::DEFAULT_STEPS,
            escape_exponent: Self::default_escape_exponent(d),
            precision: Self::DEFAULT_PRECISION,
            bit_budget: Self::DEFAULT_BIT_BUDGET,
        }
    }
}

/// Whether the recorded profiles respect the doubling lower bound
/// `max(a_n, b_n) >= 2^floor(n/2) (b_0 - d) + d` of `G` orbits (`|c| > 1`).
pub fn doubling_violation(profiles: &[NormProfile], d: i64) -> Option<String> {
    let b0 = i128::from(profiles.first()?.b.finite()?);
    for (n, q) in profiles.iter().enumerate() {
        let bound = 1i128
            .checked_shl((n / 2) as u32)
            .and_then(|s| s.checked_mul(b0 - i128::from(d)))
            .map_or(i128::MAX, |v| v + i128::from(d));
        let ok = matches!(q.max_exp(), NormExp::Finite(m) if i128::from(m) >= bound);
        if !ok {
            return Some(format!("step {n}: max exponent {} below the doubling bound {bound}", q.max_exp()));
        }
    }
    None
}

fn k(n: usize) -> i128 {
    growth_exponent(n as i64).ok().and_then(|v| i128::try_from(&v).ok()).unwrap_or(i128::MAX)
}

/// Whether an `A_1` orbit (`|c| < 1`) follows the growth schedule: for
/// `i >= 1`, `a_{2i} <= d K_{2i-2}`, `a_{2i+1} >= -d K_{2i-1}`,
/// `b_{2i+1} <= d K_{2i}` and `b_{2i+2} >= -d K_{2i-1}`.
pub fn growth_schedule_violation(profiles: &[NormProfile], d: i64) -> Option<String> {
    let d = i128::from(d);
    for (n, q) in profiles.iter().enumerate().skip(2) {
        let (Some(a), Some(b)) = (q.a.finite(), q.b.finite()) else {
            return Some(format!("step {n}: zero coordinate"));
        };
        let (a, b) = (i128::from(a), i128::from(b));
        let bad = if n % 2 == 0 {
            a > d * k(n - 2) || (n >= 4 && b < -d * k(n - 3))
        } else {
            a < -d * k(n - 2) || b > d * k(n - 1)
        };
        if bad {
            return Some(format!("step {n}: profile ({a}, {b}) breaks the growth schedule"));
        }
    }
    None
}

/// Sample points of `spec.region` and follow their backward orbits until
/// `max(a, b) > spec.escape_exponent` or `spec.steps` inverse steps.
///
/// Orbits run in certified truncated arithmetic; an orbit whose precision
/// runs out is redone with exact rationals. `G` orbits for `|c| > 1` are
/// checked against the doubling bound and `A_1` orbits for `|c| < 1`
/// against the growth schedule.
pub fn verify_escape(spec: &EscapeSpec, ctx: Option<&WindowContext>) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
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
        VerificationReport::new(format!("escape {}", label_list(&spec.regions)), Some(spec.d), spec.p, spec.seed, spec.samples);
    report.notes.push(format!("escape means max(a, b) > {} within {} steps", spec.escape_exponent, spec.steps));
    let mut regions: Vec<(RegionLabel, &[(i64, i64)])> = Vec::new();
    for &l in &spec.regions {
        match ctx.index.get(&l).filter(|ps| l.regime == Regime::of(spec.d) && !ps.is_empty()) {
            Some(ps) => regions.push((l, ps.as_slice())),
            None => {
                let why = if region_known_empty(l, spec.d) { "is empty" } else { "has no profile in the window" };
                report.notes.push(format!("{l} {why} at d = {}", spec.d));
            }
        }
    }
    if regions.is_empty() {
        report.skipped = spec.samples;
        report.notes.push("nothing to sample; every sample skipped".into());
        return Ok(report.finish(started));
    }
    let is = |l: RegionLabel, regime, name, index: Option<u64>| {
        l.regime == regime && l.name == name && (index.is_none() || l.index == index)
    };
    if regions.iter().any(|(l, _)| is(*l, Regime::Large, RegionName::G, None)) {
        report.notes.push("G orbits checked against max(a_n, b_n) >= 2^floor(n/2) (b - d) + d".into());
    }
    if regions.iter().any(|(l, _)| is(*l, Regime::Small, RegionName::A, Some(1))) {
        report.notes.push("A1 orbits checked against the growth schedule K_n".into());
    }
    let opts = OrbitOptions { label_regions: false, ..OrbitOptions::new(spec.steps, spec.escape_exponent) };
    let mut sampler = Sampler::new(p, spec.seed, spec.digits);
    let mut exact_reruns = 0usize;
    for i in 0..spec.samples {
        let (region, profiles) = regions[i % regions.len()];
        let doubling = is(region, Regime::Large, RegionName::G, None);
        let schedule = is(region, Regime::Small, RegionName::A, Some(1));
        let (a, b) = profiles[sampler.rng().gen_range(0..profiles.len())];
        let c = sampler.with_norm(spec.d);
        let start = Point { x: sampler.with_norm(a), y: sampler.with_norm(b) };
        let params = MapParams::new(c.clone());
        let certified = backward_orbit_certified(&start, &params, &opts, spec.precision);
        let (verdict, trace) = if let Verdict::PrecisionExhausted { .. } = certified.verdict {
            exact_reruns += 1;
            let exact = backward_orbit_with(&start, &params, &opts.with_budget(spec.bit_budget));
            (exact.verdict, exact.profiles())
        } else {
            (certified.verdict, certified.profiles())
        };
        let problem = match verdict {
            Verdict::UndefinedInverse { .. } => {
                report.skip_undefined();
                continue;
            }
            Verdict::EscapedThreshold { .. } => {
                let bound = if doubling {
                    doubling_violation(&trace, spec.d)
                } else if schedule {
                    growth_schedule_violation(&trace, spec.d)
                } else {
                    None
                };
                match bound {
                    None => {
                        report.passes += 1;
                        continue;
                    }
                    Some(msg) => msg,
                }
            }
            other => format!("no escape: {}", other.name()),
        };
        report.fail(Counterexample {
            p: spec.p,
            c,
            x: start.x,
            y: start.y,
            source: Some(region),
            trace,
            landed: None,
            reason: problem,
        });
    }
    if exact_reruns > 0 {
        report.notes.push(format!("{exact_reruns} orbit(s) ran out of p-adic precision and were redone exactly"));
    }
    Ok(report.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_bound_examples() {
        let ps = |v: &[(i64, i64)]| v.iter().map(|&(a, b)| NormProfile::new(a, b)).collect::<Vec<_>>();
        // d = 1, start b = 2: bounds 2, 2, 3, 3, 5, 5.
        assert_eq!(doubling_violation(&ps(&[(0, 2), (2, -1), (-1, 3), (3, -3), (-3, 5)]), 1), None);
        assert!(doubling_violation(&ps(&[(0, 2), (2, -1), (-1, 2)]), 1).is_some());
    }

    #[test]
    fn growth_schedule_examples() {
        // d = -1 with no cancellation: (a, b) -> (b, max(a, d) - b).
        let mut q = (-1i64, 0i64);
        let mut trace = vec![NormProfile::new(q.0, q.1)];
        for _ in 0..20 {
            q = (q.1, q.0.max(-1) - q.1);
            trace.push(NormProfile::new(q.0, q.1));
        }
        assert_eq!(growth_schedule_violation(&trace, -1), None);
        trace[5] = NormProfile::new(0, 0);
        assert!(growth_schedule_violation(&trace, -1).is_some());
    }
}
