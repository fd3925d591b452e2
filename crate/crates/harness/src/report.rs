//! Serializable output schemas for the command line. JSON field names and CSV
//! headers here are the documented, stable formats.

use std::io::Write;

use qp_henon::dynamics::{forward_step, three_cycle, Direction, FixedPointReport, OrbitRecord, Verdict};
use qp_henon::measure::{region_window_measure, tn_partial_sums, tn_ratio, MeasureValue};
use qp_henon::rational::SquareClass;
use qp_henon::regions::Partition;
use qp_henon::{MapParams, NormExp, NormProfile, OddPrime, Point, Regime, RegionLabel};
use serde::{Deserialize, Serialize};

/// How an orbit ended; mirrors [`Verdict`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum VerdictOut {
    Completed { steps: usize, max_exponent: NormExp },
    EscapedThreshold { step: usize, exponent: i64 },
    UndefinedInverse { step: usize },
    BudgetExceeded { step: usize, bits: u64 },
    PrecisionExhausted { step: usize },
}

impl From<Verdict> for VerdictOut {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Completed { steps, max_exponent } => VerdictOut::Completed { steps, max_exponent },
            Verdict::EscapedThreshold { step, exponent } => VerdictOut::EscapedThreshold { step, exponent },
            Verdict::UndefinedInverse { step } => VerdictOut::UndefinedInverse { step },
            Verdict::BudgetExceeded { step, bits } => VerdictOut::BudgetExceeded { step, bits },
            Verdict::PrecisionExhausted { step } => VerdictOut::PrecisionExhausted { step },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOut {
    pub n: usize,
    /// Exact coordinates as `num/den` (or an integer), or certified digits.
    pub x: String,
    pub y: String,
    pub a: NormExp,
    pub b: NormExp,
    /// Short region name, e.g. `J0`; absent when not classified.
    pub region: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitOut {
    pub p: u64,
    pub c: String,
    /// `log_p |c|`; absent for `c = 0`.
    pub d: Option<i64>,
    pub regime: Option<Regime>,
    /// `backward` or `forward`.
    pub direction: String,
    pub steps: Vec<StepOut>,
    pub verdict: VerdictOut,
    /// First step spent in `Z` (`|c| < 1`) or `J0` (`|c| > 1`).
    pub entered_invariant_region: Option<usize>,
}

impl OrbitOut {
    /// Works for exact orbits and for certified ones, whose coordinates print
    /// as digit strings.
    pub fn new<T: std::fmt::Display>(rec: &OrbitRecord<T>, params: &MapParams) -> Self {
        let d = params.d();
        OrbitOut {
            p: params.prime().get(),
            c: params.c.to_string(),
            d,
            regime: d.map(Regime::of),
            direction: match rec.direction {
                Direction::Backward => "backward",
                Direction::Forward => "forward",
            }
            .into(),
            steps: rec
                .steps
                .iter()
                .map(|s| StepOut {
                    n: s.n,
                    x: s.point.x.to_string(),
                    y: s.point.y.to_string(),
                    a: s.profile.a,
                    b: s.profile.b,
                    region: s.region.map(|l| l.short_name()),
                })
                .collect(),
            verdict: rec.verdict.into(),
            entered_invariant_region: rec.entered_invariant_region.map(|e| e.step),
        }
    }

    /// One row per step with header `n,x,y,a,b,region`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for s in &self.steps {
            out.serialize(OrbitCsvRow {
                n: s.n,
                x: s.x.clone(),
                y: s.y.clone(),
                a: s.a.to_string(),
                b: s.b.to_string(),
                region: s.region.clone().unwrap_or_default(),
            })?;
        }
        out.flush()?;
        Ok(())
    }
}

/// CSV form of [`StepOut`]; `a`/`b` are integers or `zero`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCsvRow {
    pub n: usize,
    pub x: String,
    pub y: String,
    pub a: String,
    pub b: String,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyOut {
    pub d: i64,
    pub regime: Regime,
    pub a: NormExp,
    pub b: NormExp,
    /// The unique region of the partition.
    pub region: RegionLabel,
    /// The `T_n` overlay region, if any (`|c| > 1` only).
    pub t_overlay: Option<RegionLabel>,
    /// `A_i`, `B_i` or `D_i` of the second decomposition (`|c| > 1` only).
    pub decomposition: Vec<RegionLabel>,
}

impl ClassifyOut {
    pub fn new(part: &Partition, q: NormProfile) -> Self {
        let large = part.regime() == Regime::Large;
        ClassifyOut {
            d: part.d(),
            regime: part.regime(),
            a: q.a,
            b: q.b,
            region: part.classify(q),
            t_overlay: if large { part.t_overlay(q) } else { None },
            decomposition: if large { part.decomposition_matches(q) } else { Vec::new() },
        }
    }
}

/// One grid cell; CSV header `a,b,name,index`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRow {
    pub a: i64,
    pub b: i64,
    pub name: String,
    pub index: Option<u64>,
}

/// Every integer profile with `|a|, |b| <= window`, row-major in `a`.
pub fn grid(d: i64, window: i64) -> Vec<GridRow> {
    let part = Partition::new(d);
    let mut rows = Vec::with_capacity(((2 * window + 1) * (2 * window + 1)).max(0) as usize);
    for a in -window..=window {
        for b in -window..=window {
            let l = part.classify(NormProfile::new(a, b));
            rows.push(GridRow { a, b, name: l.name.as_str().to_string(), index: l.index });
        }
    }
    rows
}

pub fn write_csv_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

fn hint(m: &MeasureValue) -> f64 {
    m.to_f64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMeasureOut {
    pub label: RegionLabel,
    pub d: i64,
    pub p: u64,
    pub window: i64,
    /// Exact Haar measure of the region's profiles in the window.
    pub exact: MeasureValue,
    /// Floating-point approximation, for reading only.
    pub decimal_hint: f64,
}

pub fn region_measure(label: RegionLabel, d: i64, p: OddPrime, window: i64) -> RegionMeasureOut {
    let exact = region_window_measure(label, d, p, window);
    RegionMeasureOut { label, d, p: p.get(), window, decimal_hint: hint(&exact), exact }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TnRowOut {
    pub n: i64,
    pub measure: MeasureValue,
    /// `mu(|x| <= p^a) mu(|y| <= p^b)` at the extreme profile of `T_n`.
    pub ball_product: MeasureValue,
    /// `measure / ball_product`.
    pub ratio: MeasureValue,
    pub partial_sum: MeasureValue,
    pub decimal_hint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TnOut {
    pub p: u64,
    pub k: i64,
    pub rows: Vec<TnRowOut>,
}

pub fn tn_report(n_max: i64, k: i64, p: OddPrime) -> qp_henon::Result<TnOut> {
    let ratio = MeasureValue::Finite(tn_ratio(p));
    let rows = tn_partial_sums(n_max, k, p)?
        .into_iter()
        .map(|r| TnRowOut {
            n: r.n,
            decimal_hint: hint(&r.partial_sum),
            measure: r.measure,
            ball_product: r.ball_product,
            ratio: ratio.clone(),
            partial_sum: r.partial_sum,
        })
        .collect();
    Ok(TnOut { p: p.get(), k, rows })
}

/// CSV form of [`TnRowOut`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TnCsvRow {
    pub n: i64,
    pub measure: String,
    pub ball_product: String,
    pub ratio: String,
    pub partial_sum: String,
    pub decimal_hint: f64,
}

impl From<&TnRowOut> for TnCsvRow {
    fn from(r: &TnRowOut) -> Self {
        TnCsvRow {
            n: r.n,
            measure: r.measure.to_string(),
            ball_product: r.ball_product.to_string(),
            ratio: r.ratio.to_string(),
            partial_sum: r.partial_sum.to_string(),
            decimal_hint: r.decimal_hint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointOut {
    /// p-adic digits of `alpha`, lowest first, as printed by the core crate.
    pub alpha: String,
    /// Exact rational value when `1 - 4c` is a rational square.
    pub exact: Option<String>,
    /// `f(alpha, alpha) = (alpha, alpha)` checked in exact arithmetic; absent
    /// when `alpha` is irrational.
    pub exact_check: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointOut {
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointsOut {
    pub p: u64,
    pub c: String,
    pub discriminant: String,
    /// `zero`, `square` or `non-square`.
    pub square_class: String,
    pub message: String,
    pub points: Vec<FixedPointOut>,
    pub three_cycle: Vec<PointOut>,
    /// `f` permutes the three points cyclically, checked exactly.
    pub three_cycle_check: bool,
}

impl FixedPointsOut {
    pub fn new(report: &FixedPointReport, params: &MapParams) -> Self {
        let (class, message) = match report.square_class {
            SquareClass::Zero => ("zero", "one fixed point".to_string()),
            SquareClass::Square => ("square", "two fixed points".to_string()),
            SquareClass::NonSquare(_) => {
                ("non-square", "no fixed points in Q_p^2: 1 - 4c is not a square".to_string())
            }
        };
        let points = report
            .points
            .iter()
            .map(|fp| FixedPointOut {
                alpha: fp.alpha.to_string(),
                exact: fp.exact.as_ref().map(ToString::to_string),
                exact_check: fp.exact.as_ref().map(|a| {
                    let pt = Point { x: a.clone(), y: a.clone() };
                    forward_step(&pt, &params.c).is_ok_and(|q| q == pt)
                }),
            })
            .collect();
        let cycle = three_cycle(params);
        let cycle_check = (0..3).all(|i| forward_step(&cycle[i], &params.c).is_ok_and(|q| q == cycle[(i + 1) % 3]));
        FixedPointsOut {
            p: params.prime().get(),
            c: params.c.to_string(),
            discriminant: report.discriminant.to_string(),
            square_class: class.into(),
            message,
            points,
            three_cycle: cycle.iter().map(|q| PointOut { x: q.x.to_string(), y: q.y.to_string() }).collect(),
            three_cycle_check: cycle_check,
        }
    }

    /// Header `kind,x,y`: fixed points as `fixed` (exact value if known,
    /// digits otherwise), then the cycle as `cycle`.
    pub fn csv_rows(&self) -> Vec<PointRow> {
        let fixed = self.points.iter().map(|fp| {
            let v = fp.exact.clone().unwrap_or_else(|| fp.alpha.clone());
            PointRow { kind: "fixed".into(), x: v.clone(), y: v }
        });
        let cycle = self.three_cycle.iter().map(|q| PointRow { kind: "cycle".into(), x: q.x.clone(), y: q.y.clone() });
        fixed.chain(cycle).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRow {
    pub kind: String,
    pub x: String,
    pub y: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use qp_henon::dynamics::fixed_points;
    use qp_henon::PadicRational;

    #[test]
    fn grid_row_order() {
        let g = grid(2, 1);
        assert_eq!(g.len(), 9);
        assert_eq!((g[0].a, g[0].b, g[8].a, g[8].b), (-1, -1, 1, 1));
        assert_eq!((g[8].name.as_str(), g[8].index), ("J", Some(0)));
    }

    #[test]
    fn quarter_has_one_fixed_point() {
        let p = OddPrime::new(3).unwrap();
        let params = MapParams::new(PadicRational::parse("1/4", p).unwrap());
        let out = FixedPointsOut::new(&fixed_points(&params, 20).unwrap(), &params);
        assert_eq!(out.points.len(), 1);
        assert_eq!(out.points[0].exact.as_deref(), Some("1/2"));
        assert_eq!(out.points[0].exact_check, Some(true));
        assert!(out.three_cycle_check);
    }
}
