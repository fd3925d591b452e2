//! The `qp-henon` command line.
//!
//! Exit codes: 0 success, 1 a verification failure, 2 a usage or input
//! error, 3 an orbit that ran out of its bit budget.

use std::ffi::OsString;
use std::io::Write;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use qp_henon::dynamics::{
    backward_orbit_certified, backward_orbit_with, fixed_points, forward_orbit, OrbitOptions, Verdict,
};
use qp_henon::regions::Partition;
use qp_henon::{MapParams, NormProfile, OddPrime, PadicRational, Point, Regime, RegionLabel};
use serde::Serialize;

use crate::campaign::{Campaign, Overrides};
use crate::report::{
    grid, region_measure, tn_report, write_csv_rows, ClassifyOut, FixedPointsOut, GridRow, OrbitOut, TnCsvRow,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Bit budget for exact orbits when `--bit-budget` is not given.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qp-henon", version, about = "Backward dynamics of (x, y) -> (xy + c, x) over Q_p^2")]
pub struct Cli {
    /// Odd prime p.
    #[arg(long, global = true, default_value_t = 3)]
    pub prime: u64,
    /// Parameter c as num/den.
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    pub c: String,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Maximum number of orbit steps [default: 60].
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Escape once max(log_p|x|, log_p|y|) exceeds this [default: 8 for |c| <= 1, 8 d F_12 for |c| > 1].
    #[arg(long = "escape-exp", global = true, allow_hyphen_values = true)]
    pub escape_exp: Option<i64>,
    /// Profiles with |a|, |b| <= window [default: 60].
    #[arg(long, global = true)]
    pub window: Option<i64>,
    /// Samples per campaign entry (replaces the campaign's values).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output format [default: csv for grid, json otherwise].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Size limit in bits for exact rational coordinates.
    #[arg(long = "bit-budget", global = true)]
    pub bit_budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Follow the backward (or forward) orbit of a point.
    Orbit {
        #[command(flatten)]
        point: PointArgs,
        /// Use certified arithmetic with this many p-adic digits instead of
        /// exact rationals.
        #[arg(long)]
        precision: Option<u32>,
        /// Iterate f instead of f^-1.
        #[arg(long)]
        forward: bool,
    },
    /// Region of a point or of a norm profile (a, b).
    Classify {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, allow_hyphen_values = true, requires = "b", conflicts_with_all = ["x", "y", "x_num", "y_num"])]
        a: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "a")]
        b: Option<i64>,
    },
    /// Region of every integer profile in the window.
    Grid,
    /// Run a campaign file or a bundled campaign (all-lemmas, negative-control).
    Verify { campaign: String },
    /// Exact Haar measures.
    Measure {
        /// The T_n table for n = 0..=N.
        #[arg(long, conflicts_with = "region")]
        tn: bool,
        #[arg(long, default_value_t = 2)]
        k: i64,
        #[arg(long, default_value_t = 8)]
        n: i64,
        /// A region such as J0 or M3, measured over the window.
        #[arg(long)]
        region: Option<String>,
    },
    /// Fixed points and the 3-cycle through (-1, -1).
    FixedPoints {
        #[arg(long, default_value_t = 20)]
        precision: u32,
    },
}

/// A point given either as `--x num/den` or as `--x-num/--x-den`.
#[derive(Debug, clap::Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x_num")]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "y_num")]
    pub y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_num: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "x_num")]
    pub x_den: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_num: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "y_num")]
    pub y_den: Option<String>,
}

impl PointArgs {
    fn given(&self) -> bool {
        self.x.is_some() || self.y.is_some() || self.x_num.is_some() || self.y_num.is_some()
    }

    /// Missing coordinates default to 1.
    fn point(&self, p: OddPrime) -> anyhow::Result<Point> {
        let coord = |whole: &Option<String>, num: &Option<String>, den: &Option<String>, name: &str| {
            let text = match (whole, num) {
                (Some(w), _) => w.clone(),
                (None, Some(n)) => format!("{n}/{}", den.as_deref().unwrap_or("1")),
                (None, None) => "1".into(),
            };
            PadicRational::parse(&text, p).with_context(|| format!("--{name} {text:?}"))
        };
        Ok(Point { x: coord(&self.x, &self.x_num, &self.x_den, "x")?, y: coord(&self.y, &self.y_num, &self.y_den, "y")? })
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn json<T: Serialize>(out: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn nonzero_d(params: &MapParams) -> anyhow::Result<i64> {
    params.d().ok_or_else(|| anyhow!("c must be nonzero"))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let p = OddPrime::new(cli.prime).with_context(|| format!("--prime {}", cli.prime))?;
    let c = PadicRational::parse(&cli.c, p).with_context(|| format!("--c {:?}", cli.c))?;
    let params = MapParams::new(c);
    let window = cli.window.unwrap_or(60);
    if window < 0 {
        bail!("--window must be non-negative");
    }
    let format = cli.format;
    match &cli.command {
        Command::Orbit { point, precision, forward } => {
            let start = point.point(p)?;
            let mut opts = OrbitOptions::new(
                cli.steps.unwrap_or(60),
                cli.escape_exp.unwrap_or_else(|| params.default_escape_exponent()),
            );
            opts = opts.with_budget(cli.bit_budget.unwrap_or(DEFAULT_BIT_BUDGET));
            let rec = match (precision, forward) {
                (_, true) => forward_orbit(&start, &params, &opts),
                (Some(prec), false) => {
                    let r = backward_orbit_certified(&start, &params, &opts, *prec);
                    emit_orbit(out, format, &OrbitOut::new(&r, &params))?;
                    return Ok(orbit_code(r.verdict));
                }
                (None, false) => backward_orbit_with(&start, &params, &opts),
            };
            emit_orbit(out, format, &OrbitOut::new(&rec, &params))?;
            Ok(orbit_code(rec.verdict))
        }
        Command::Classify { point, a, b } => {
            let d = nonzero_d(&params)?;
            let q = match (a, b) {
                (Some(a), Some(b)) => NormProfile::new(*a, *b),
                _ if point.given() => point.point(p)?.profile(),
                _ => bail!("give --x/--y or --a/--b"),
            };
            let res = ClassifyOut::new(&Partition::new(d), q);
            match format.unwrap_or(Format::Json) {
                Format::Json => json(out, &res)?,
                Format::Csv => write_csv_rows(
                    &mut *out,
                    &[GridRowLike {
                        a: res.a.to_string(),
                        b: res.b.to_string(),
                        name: res.region.name.as_str().into(),
                        index: res.region.index,
                    }],
                )?,
            }
            Ok(EXIT_OK)
        }
        Command::Grid => {
            let rows: Vec<GridRow> = grid(nonzero_d(&params)?, window);
            match format.unwrap_or(Format::Csv) {
                Format::Csv => write_csv_rows(&mut *out, &rows)?,
                Format::Json => json(out, &rows)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify { campaign } => {
            let camp = Campaign::load(campaign)?;
            let overrides = Overrides {
                samples: cli.samples,
                seed: cli.seed,
                window: cli.window,
                steps: cli.steps,
                escape_exponent: cli.escape_exp,
                bit_budget: cli.bit_budget,
            };
            let report = camp.run_with(&overrides)?;
            match format.unwrap_or(Format::Json) {
                Format::Json => json(out, &report)?,
                Format::Csv => {
                    let rows: Vec<_> = report
                        .entries
                        .iter()
                        .map(|e| VerifyCsvRow {
                            id: e.id.clone(),
                            d: e.d,
                            p: e.p,
                            samples: e.sampled.as_ref().map_or(0, |r| r.samples),
                            passes: e.sampled.as_ref().map_or(0, |r| r.passes),
                            failures: e.sampled.as_ref().map_or(0, |r| r.failures),
                            skipped: e.sampled.as_ref().map_or(0, |r| r.skipped),
                            exhaustive_profiles: e.exhaustive.as_ref().map(|x| x.profiles),
                            exhaustive_failures: e.exhaustive.as_ref().map(|x| x.failures),
                        })
                        .collect();
                    write_csv_rows(&mut *out, &rows)?;
                }
            }
            Ok(if report.ok() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Measure { tn, k, n, region } => {
            match (tn, region) {
                (true, _) => {
                    let t = tn_report(*n, *k, p)?;
                    match format.unwrap_or(Format::Json) {
                        Format::Json => json(out, &t)?,
                        Format::Csv => {
                            write_csv_rows(&mut *out, &t.rows.iter().map(TnCsvRow::from).collect::<Vec<_>>())?
                        }
                    }
                }
                (false, Some(name)) => {
                    let d = nonzero_d(&params)?;
                    let label = RegionLabel::parse(Regime::of(d), name)?;
                    let m = region_measure(label, d, p, window);
                    match format.unwrap_or(Format::Json) {
                        Format::Json => json(out, &m)?,
                        Format::Csv => write_csv_rows(
                            &mut *out,
                            &[RegionMeasureCsvRow {
                                label: label.short_name(),
                                d,
                                p: p.get(),
                                window,
                                exact: m.exact.to_string(),
                                decimal_hint: m.decimal_hint,
                            }],
                        )?,
                    }
                }
                (false, None) => bail!("give --tn or --region"),
            }
            Ok(EXIT_OK)
        }
        Command::FixedPoints { precision } => {
            let report = fixed_points(&params, *precision)?;
            let res = FixedPointsOut::new(&report, &params);
            match format.unwrap_or(Format::Json) {
                Format::Json => json(out, &res)?,
                Format::Csv => write_csv_rows(&mut *out, &res.csv_rows())?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn orbit_code(v: Verdict) -> i32 {
    match v {
        Verdict::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_OK,
    }
}

fn emit_orbit(out: &mut dyn Write, format: Option<Format>, o: &OrbitOut) -> anyhow::Result<()> {
    match format.unwrap_or(Format::Json) {
        Format::Json => json(out, o),
        Format::Csv => Ok(o.write_csv(&mut *out)?),
    }
}

#[derive(Serialize)]
struct GridRowLike {
    a: String,
    b: String,
    name: String,
    index: Option<u64>,
}

#[derive(Serialize)]
struct VerifyCsvRow {
    id: String,
    d: Option<i64>,
    p: u64,
    samples: usize,
    passes: usize,
    failures: usize,
    skipped: usize,
    exhaustive_profiles: Option<u64>,
    exhaustive_failures: Option<u64>,
}

#[derive(Serialize)]
struct RegionMeasureCsvRow {
    label: String,
    d: i64,
    p: u64,
    window: i64,
    exact: String,
    decimal_hint: f64,
}
