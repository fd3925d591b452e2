use std::time::Instant;

use qp_henon::dynamics::{
    backward_orbit_certified, backward_orbit_with, forward_orbit, three_cycle, OrbitOptions, Verdict,
};
use qp_henon::{MapParams, NormExp, NormProfile, OddPrime, PadicRational, Point};

use super::{Counterexample, VerificationReport, VerifyError};

const BIT_BUDGET: u64 = 1 << 24;
/// Backward steps for the closed-form patterns: the pattern index reaches 10.
pub const PATTERN_STEPS: usize = 22;
pub const BOUNDED_STEPS: usize = 50;
pub const CYCLE_STEPS: usize = 300;
/// Digits for the bounded orbit, whose exact heights grow too fast.
pub const BOUNDED_PRECISION: u32 = 400;

struct Outcome {
    name: String,
    c: PadicRational,
    start: Point,
    result: Result<String, (String, Vec<NormProfile>)>,
}

fn pow2(n: usize) -> i64 {
    1i64 << n
}

/// Compare recorded profiles with `expected(n)` for every step `n >= 0`;
/// `Ok` carries the number of steps matched.
fn match_pattern(
    profiles: &[NormProfile],
    need: usize,
    expected: impl Fn(usize) -> (i64, i64),
) -> Result<usize, String> {
    for (n, q) in profiles.iter().enumerate() {
        let (a, b) = expected(n);
        if *q != NormProfile::new(a, b) {
            return Err(format!("step {n}: profile {q}, expected ({a}, {b})"));
        }
    }
    let got = profiles.len().saturating_sub(1);
    if got < need {
        return Err(format!("only {got} of {need} steps computed"));
    }
    Ok(got)
}

fn exact_orbit(start: &Point, c: &PadicRational, steps: usize) -> qp_henon::dynamics::OrbitRecord {
    let opts = OrbitOptions::new(steps, i64::MAX).with_budget(BIT_BUDGET);
    backward_orbit_with(start, &MapParams::new(c.clone()), &opts)
}

fn rat(n: i64, d: i64, p: OddPrime) -> PadicRational {
    PadicRational::new(n, d, p).expect("nonzero denominator")
}

/// `c = p`, start `(p + 2p^3, 2p)`: steps 1, 2 are `(2p, p^2)`, `(p^2, 1/p)`,
/// then `(2^n - 1, -2^n)` at step `2n + 1` and `(-2^n, 2^(n+1) - 1)` at step
/// `2n + 2`.
fn escape_with_large_parameter(p: OddPrime) -> Outcome {
    let pp = p.get() as i64;
    let c = rat(pp, 1, p);
    let start = Point { x: rat(pp + 2 * pp.pow(3), 1, p), y: rat(2 * pp, 1, p) };
    let rec = exact_orbit(&start, &c, PATTERN_STEPS);
    let profiles = rec.profiles();
    let mut result = match_pattern(&profiles, PATTERN_STEPS, |n| match n {
        0 => (-1, -1),
        1 => (-1, -2),
        2 => (-2, 1),
        n if n % 2 == 1 => (pow2(n / 2) - 1, -pow2(n / 2)),
        n => (-pow2(n / 2 - 1), pow2(n / 2) - 1),
    })
    .map(|k| format!("closed-form profiles matched for {k} steps"));
    let exact = [Point { x: rat(2 * pp, 1, p), y: rat(pp * pp, 1, p) }, Point { x: rat(pp * pp, 1, p), y: rat(1, pp, p) }];
    for (i, want) in exact.iter().enumerate() {
        if rec.steps.get(i + 1).map(|s| &s.point) != Some(want) {
            result = Err(format!("step {} is not the exact point {want:?}", i + 1));
        }
    }
    Outcome { name: "c = p, start (p + 2p^3, 2p)".into(), c, start, result: result.map_err(|e| (e, profiles)) }
}

/// `c = p - p^2` fixes `(p, p)`.
fn fixed_point(p: OddPrime) -> Outcome {
    let pp = p.get() as i64;
    let c = rat(pp - pp * pp, 1, p);
    let start = Point { x: rat(pp, 1, p), y: rat(pp, 1, p) };
    let rec = exact_orbit(&start, &c, PATTERN_STEPS);
    let profiles = rec.profiles();
    let mut result = match_pattern(&profiles, PATTERN_STEPS, |_| (-1, -1)).map(|k| format!("fixed for {k} steps"));
    if rec.steps.iter().any(|s| s.point != start) {
        result = Err("the orbit moved".into());
    }
    Outcome { name: "c = p - p^2, start (p, p)".into(), c, start, result: result.map_err(|e| (e, profiles)) }
}

/// `c = 1/p`, start `(1/p + p^2, 1)`: `(0, -2)`, `(-2, 3)`, then
/// `(2^n + 1, -2^n)` at step `2n + 1` and `(-2^n, 2^(n+1) + 1)` at step
/// `2n + 2`.
fn escape_with_small_parameter(p: OddPrime) -> Outcome {
    let pp = p.get() as i64;
    let c = rat(1, pp, p);
    let start = Point { x: rat(1 + pp.pow(3), pp, p), y: rat(1, 1, p) };
    let rec = exact_orbit(&start, &c, PATTERN_STEPS);
    let profiles = rec.profiles();
    let result = match_pattern(&profiles, PATTERN_STEPS, |n| match n {
        0 => (1, 0),
        1 => (0, -2),
        2 => (-2, 3),
        n if n % 2 == 1 => (pow2(n / 2) + 1, -pow2(n / 2)),
        n => (-pow2(n / 2 - 1), pow2(n / 2) + 1),
    })
    .map(|k| format!("closed-form profiles matched for {k} steps"));
    Outcome { name: "c = 1/p, start (1/p + p^2, 1)".into(), c, start, result: result.map_err(|e| (e, profiles)) }
}

/// `c = 1/p`, start `(1, 1)`: claimed to stay within `max(a, b) <= 1`.
fn bounded_with_small_parameter(p: OddPrime) -> Outcome {
    let c = rat(1, p.get() as i64, p);
    let start = Point { x: rat(1, 1, p), y: rat(1, 1, p) };
    let params = MapParams::new(c.clone());
    let opts = OrbitOptions::new(BOUNDED_STEPS, 1);
    let rec = backward_orbit_certified(&start, &params, &opts, BOUNDED_PRECISION);
    let (verdict, profiles) = match rec.verdict {
        // A cancellation to exactly zero looks like lost precision; redo
        // those steps exactly.
        Verdict::PrecisionExhausted { .. } => {
            let exact = backward_orbit_with(&start, &params, &opts.with_budget(BIT_BUDGET));
            (exact.verdict, exact.profiles())
        }
        v => (v, rec.profiles()),
    };
    let result = match verdict {
        Verdict::Completed { max_exponent, .. } if max_exponent <= NormExp::Finite(1) => {
            Ok(format!("max(a, b) <= 1 for {BOUNDED_STEPS} steps"))
        }
        Verdict::UndefinedInverse { step } => Err(format!("y = 0 after {} steps, so f^-{step} is undefined", step - 1)),
        v => Err(format!("verdict {v:?}")),
    };
    Outcome { name: "c = 1/p, start (1, 1)".into(), c, start, result: result.map_err(|e| (e, profiles)) }
}

/// `c = 1`, start `(-1, -p)`: step 1 is `(-p, 2/p)`, then
/// `(2^(n-1), -2^(n-1))` at step `2n` and `(-2^(n-1), 2^n)` at step `2n + 1`.
fn escape_with_unit_parameter(p: OddPrime) -> Outcome {
    let pp = p.get() as i64;
    let c = rat(1, 1, p);
    let start = Point { x: rat(-1, 1, p), y: rat(-pp, 1, p) };
    let rec = exact_orbit(&start, &c, PATTERN_STEPS);
    let profiles = rec.profiles();
    let mut result = match_pattern(&profiles, PATTERN_STEPS, |n| match n {
        0 => (0, -1),
        1 => (-1, 1),
        n if n % 2 == 0 => (pow2(n / 2 - 1), -pow2(n / 2 - 1)),
        n => (-pow2(n / 2 - 1), pow2(n / 2)),
    })
    .map(|k| format!("closed-form profiles matched for {k} steps"));
    let first = Point { x: rat(-pp, 1, p), y: rat(2, pp, p) };
    if rec.steps.get(1).map(|s| &s.point) != Some(&first) {
        result = Err("step 1 is not (-p, 2/p)".into());
    }
    Outcome { name: "c = 1, start (-1, -p)".into(), c, start, result: result.map_err(|e| (e, profiles)) }
}

/// `c = 1`: `(-1, -1)` has exact period 3 both ways.
fn three_cycle_orbit(p: OddPrime) -> Outcome {
    let c = rat(1, 1, p);
    let params = MapParams::new(c.clone());
    let cycle = three_cycle(&params);
    let start = cycle[0].clone();
    let opts = OrbitOptions::new(CYCLE_STEPS, i64::MAX);
    let back = backward_orbit_with(&start, &params, &opts);
    let fwd = forward_orbit(&start, &params, &opts);
    let ok_back = back.steps.len() == CYCLE_STEPS + 1
        && back.steps.iter().all(|s| s.point == cycle[(3 - s.n % 3) % 3]);
    let ok_fwd = fwd.steps.len() == CYCLE_STEPS + 1 && fwd.steps.iter().all(|s| s.point == cycle[s.n % 3]);
    let result = if ok_back && ok_fwd {
        Ok(format!("period 3 exactly for {CYCLE_STEPS} steps forward and backward"))
    } else {
        Err(("the orbit left the 3-cycle".to_string(), back.profiles()))
    };
    Outcome { name: "c = 1, start (-1, -1)".into(), c, start, result }
}

/// The worked orbits: two escaping patterns and a fixed point for `|c| < 1`
/// or `|c| > 1`, one bounded orbit, the `|c| = 1` escaping pattern and the
/// 3-cycle. One sample per orbit; each note records what was matched.
pub fn verify_remark_orbits(p: u64) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let prime = OddPrime::new(p)?;
    let outcomes = [
        escape_with_large_parameter(prime),
        fixed_point(prime),
        escape_with_small_parameter(prime),
        bounded_with_small_parameter(prime),
        escape_with_unit_parameter(prime),
        three_cycle_orbit(prime),
    ];
    let mut report = VerificationReport::new("worked orbits".into(), None, p, 0, outcomes.len());
    for o in outcomes {
        match o.result {
            Ok(msg) => {
                report.passes += 1;
                report.notes.push(format!("{}: {msg}", o.name));
            }
            Err((msg, trace)) => {
                report.notes.push(format!("{}: FAILED: {msg}", o.name));
                report.fail(Counterexample {
                    p,
                    c: o.c,
                    x: o.start.x,
                    y: o.start.y,
                    source: None,
                    trace,
                    landed: None,
                    reason: format!("{}: {msg}", o.name),
                });
            }
        }
    }
    Ok(report.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_hold_at_five() {
        let p = OddPrime::new(5).unwrap();
        for o in [escape_with_large_parameter(p), fixed_point(p), escape_with_small_parameter(p)] {
            assert!(o.result.is_ok(), "{}: {:?}", o.name, o.result);
        }
    }

    #[test]
    fn bounded_orbit_fails_at_three() {
        let o = bounded_with_small_parameter(OddPrime::new(3).unwrap());
        let (msg, trace) = o.result.unwrap_err();
        assert!(msg.contains("y = 0 after 5 steps"), "{msg}");
        assert_eq!(trace.len(), 6);
    }

    #[test]
    fn bounded_orbit_escapes_at_seven() {
        let o = bounded_with_small_parameter(OddPrime::new(7).unwrap());
        let (_, trace) = o.result.unwrap_err();
        assert_eq!(trace.len(), 23);
        assert_eq!(trace[22], NormProfile::new(-1, 2));
    }
}
