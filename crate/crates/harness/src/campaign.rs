//! Declarative verification campaigns.
//!
//! A campaign is a JSON object with a `name` and a list of flat `entries`:
//!
//! ```json
//! { "name": "demo",
//!   "entries": [
//!     { "id": "large/j0-invariant", "d": 2, "p": 3, "samples": 1000, "seed": 1 },
//!     { "id": "escape/G", "d": 1, "samples": 500 },
//!     { "id": "sandwich/small", "d": -1, "samples": 500 },
//!     { "id": "remarks", "p": 5 } ] }
//! ```
//!
//! `id` is a transition claim identifier (checked by sampling and, unless
//! `"exhaustive": false`, over every profile of the window), `escape/<region>`
//! where `<region>` is a label such as `G` or `M3` or a family name such as
//! `M`, `sandwich/small|large|unit`, or `remarks`.

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use qp_henon::regions::TransitionClaim;
use qp_henon::{Regime, RegionLabel, RegionName};
use serde::{Deserialize, Serialize};

use crate::verifier::{
    verify_escape, verify_remark_orbits, verify_theorem_sandwich, verify_transition, verify_transition_exhaustive,
    EscapeSpec, ExhaustiveReport, LemmaSpec, SandwichSpec, Theorem, VerificationReport, VerifyError, WindowContext,
};

/// Campaigns shipped with the binary, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("all-lemmas", include_str!("../campaigns/all-lemmas.json")),
    ("negative-control", include_str!("../campaigns/negative-control.json")),
];

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("cannot read campaign {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed campaign: {0}")]
    Json(#[from] serde_json::Error),
    #[error("no campaign file or bundled campaign named {0:?}")]
    NotFound(String),
    #[error("entry {index} ({id}): {message}")]
    Entry { index: usize, id: String, message: String },
    #[error("entry {index}: {source}")]
    Verify { index: usize, source: VerifyError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub entries: Vec<CampaignEntry>,
}

fn default_p() -> u64 {
    3
}
fn default_samples() -> usize {
    1000
}
fn default_window() -> i64 {
    LemmaSpec::DEFAULT_WINDOW
}
fn default_digits() -> u32 {
    LemmaSpec::DEFAULT_DIGITS
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignEntry {
    pub id: String,
    /// Optional; must agree with the sign of `d` when given.
    #[serde(default)]
    pub regime: Option<Regime>,
    /// `log_p |c|`. Required for everything except `remarks`.
    #[serde(default)]
    pub d: Option<i64>,
    #[serde(default = "default_p")]
    pub p: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_window")]
    pub window: i64,
    #[serde(default = "default_digits")]
    pub digits: u32,
    /// Short region names restricting the sampled sources.
    #[serde(default)]
    pub sources: Option<Vec<String>>,
    /// Short region names replacing the claimed targets.
    #[serde(default)]
    pub targets: Option<Vec<String>>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub escape_exponent: Option<i64>,
    #[serde(default = "yes")]
    pub exhaustive: bool,
}

/// Command-line values that replace the corresponding entry fields.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub window: Option<i64>,
    pub steps: Option<usize>,
    pub escape_exponent: Option<i64>,
    pub bit_budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryOutcome {
    pub id: String,
    pub d: Option<i64>,
    pub p: u64,
    pub sampled: Option<VerificationReport>,
    pub exhaustive: Option<ExhaustiveReport>,
}

impl EntryOutcome {
    pub fn failures(&self) -> u64 {
        self.sampled.as_ref().map_or(0, |r| r.failures as u64) + self.exhaustive.as_ref().map_or(0, |r| r.failures)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub campaign: String,
    pub entries: Vec<EntryOutcome>,
    /// Sampled plus exhaustive failures over all entries.
    pub failures: u64,
    /// Samples whose inverse orbit hit `y = 0`, over all entries.
    pub undefined_inverse: u64,
    pub wall_time_ms: u64,
}

impl CampaignReport {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    /// Equal apart from timings.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let strip = |r: &Self| {
            let mut r = r.clone();
            r.wall_time_ms = 0;
            for e in &mut r.entries {
                if let Some(s) = &mut e.sampled {
                    s.wall_time_ms = 0;
                }
                if let Some(x) = &mut e.exhaustive {
                    x.wall_time_ms = 0;
                }
            }
            r
        };
        strip(self) == strip(other)
    }
}

impl Campaign {
    pub fn from_json(text: &str) -> Result<Self, CampaignError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn bundled(name: &str) -> Option<Self> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_json(text).expect("bundled campaigns parse"))
    }

    /// A campaign file, or a bundled campaign if no such file exists.
    pub fn load(path_or_name: &str) -> Result<Self, CampaignError> {
        let path = Path::new(path_or_name);
        if path.exists() {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CampaignError::Io { path: path_or_name.to_string(), source })?;
            return Self::from_json(&text);
        }
        Self::bundled(path_or_name).ok_or_else(|| CampaignError::NotFound(path_or_name.to_string()))
    }

    pub fn run(&self) -> Result<CampaignReport, CampaignError> {
        self.run_with(&Overrides::default())
    }

    pub fn run_with(&self, overrides: &Overrides) -> Result<CampaignReport, CampaignError> {
        let started = Instant::now();
        let mut contexts: HashMap<(i64, i64), WindowContext> = HashMap::new();
        let mut entries = Vec::with_capacity(self.entries.len());
        for (index, entry) in self.entries.iter().enumerate() {
            let entry = entry.with(overrides);
            entries.push(run_entry(index, &entry, overrides, &mut contexts)?);
        }
        let failures = entries.iter().map(EntryOutcome::failures).sum();
        let undefined_inverse =
            entries.iter().filter_map(|e| e.sampled.as_ref()).map(|r| r.undefined_inverse as u64).sum();
        Ok(CampaignReport {
            campaign: self.name.clone(),
            entries,
            failures,
            undefined_inverse,
            wall_time_ms: started.elapsed().as_millis() as u64,
        })
    }
}

impl CampaignEntry {
    fn with(&self, o: &Overrides) -> Self {
        let mut e = self.clone();
        if let Some(v) = o.samples {
            e.samples = v;
        }
        if let Some(v) = o.seed {
            e.seed = v;
        }
        if let Some(v) = o.window {
            e.window = v;
        }
        if let Some(v) = o.steps {
            e.steps = Some(v);
        }
        if let Some(v) = o.escape_exponent {
            e.escape_exponent = Some(v);
        }
        e
    }
}

fn run_entry(
    index: usize,
    entry: &CampaignEntry,
    overrides: &Overrides,
    contexts: &mut HashMap<(i64, i64), WindowContext>,
) -> Result<EntryOutcome, CampaignError> {
    let bad = |message: String| CampaignError::Entry { index, id: entry.id.clone(), message };
    let verr = |source: VerifyError| CampaignError::Verify { index, source };
    let mut outcome = EntryOutcome { id: entry.id.clone(), d: entry.d, p: entry.p, sampled: None, exhaustive: None };

    if entry.id == "remarks" {
        outcome.sampled = Some(verify_remark_orbits(entry.p).map_err(verr)?);
        return Ok(outcome);
    }
    let d = entry.d.ok_or_else(|| bad("missing d".into()))?;
    let regime = Regime::of(d);
    if let Some(r) = entry.regime {
        if r != regime {
            return Err(bad(format!("regime {r} does not match d = {d} ({regime})")));
        }
    }
    if entry.window < 1 {
        return Err(bad("window must be positive".into()));
    }
    let ctx = contexts.entry((d, entry.window)).or_insert_with(|| WindowContext::new(d, entry.window));
    let parse = |names: &Option<Vec<String>>| -> Result<Option<Vec<RegionLabel>>, CampaignError> {
        names
            .as_ref()
            .map(|v| v.iter().map(|s| RegionLabel::parse(regime, s).map_err(|e| bad(e.to_string()))).collect())
            .transpose()
    };

    if let Some(which) = entry.id.strip_prefix("escape/") {
        let regions = escape_regions(regime, which, ctx).map_err(bad)?;
        let mut spec = EscapeSpec::new(regions, d, entry.p, entry.samples, entry.seed);
        spec.window = entry.window;
        spec.digits = entry.digits;
        if let Some(s) = entry.steps {
            spec.steps = s;
        }
        if let Some(e) = entry.escape_exponent {
            spec.escape_exponent = e;
        }
        if let Some(b) = overrides.bit_budget {
            spec.bit_budget = b;
        }
        outcome.sampled = Some(verify_escape(&spec, Some(ctx)).map_err(verr)?);
    } else if let Some(which) = entry.id.strip_prefix("sandwich/") {
        let theorem: Theorem = which.parse().map_err(bad)?;
        let mut spec = SandwichSpec::new(theorem, d, entry.p, entry.samples, entry.seed);
        spec.window = entry.window;
        if let Some(s) = entry.steps {
            spec.steps = s;
        }
        outcome.sampled = Some(verify_theorem_sandwich(&spec).map_err(verr)?);
    } else {
        if TransitionClaim::by_id(&entry.id).is_none() {
            return Err(verr(VerifyError::UnknownLemma(entry.id.clone())));
        }
        let mut spec = LemmaSpec::new(&entry.id, d, entry.p, entry.samples, entry.seed);
        spec.window = entry.window;
        spec.digits = entry.digits;
        spec.sources = parse(&entry.sources)?;
        spec.targets = parse(&entry.targets)?;
        outcome.sampled = Some(verify_transition(&spec, Some(ctx)).map_err(verr)?);
        if entry.exhaustive {
            outcome.exhaustive = Some(verify_transition_exhaustive(&spec, ctx).map_err(verr)?);
        }
    }
    Ok(outcome)
}

/// `G`, `M3`, or a family name such as `M` meaning every member in the window.
fn escape_regions(regime: Regime, which: &str, ctx: &WindowContext) -> Result<Vec<RegionLabel>, String> {
    if let Ok(label) = RegionLabel::parse(regime, which) {
        return Ok(vec![label]);
    }
    let name: RegionName = which.parse().map_err(|e: qp_henon::Error| e.to_string())?;
    let labels: Vec<_> = ctx.index.keys().copied().filter(|l| l.name == name).collect();
    if labels.is_empty() {
        return Err(format!("no {which} region in the {regime} window"));
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_campaigns_parse() {
        for (name, _) in BUNDLED {
            let c = Campaign::bundled(name).unwrap();
            assert!(!c.entries.is_empty(), "{name}");
        }
    }

    #[test]
    fn regime_must_match_d() {
        let c = Campaign::from_json(
            r#"{"name": "x", "entries": [{"id": "large/j0-invariant", "regime": "SMALL", "d": 2, "samples": 1}]}"#,
        )
        .unwrap();
        assert!(matches!(c.run(), Err(CampaignError::Entry { .. })));
    }

    #[test]
    fn unknown_identifier_is_an_error() {
        let c = Campaign::from_json(r#"{"name": "x", "entries": [{"id": "no/such-claim", "d": 2}]}"#).unwrap();
        let err = c.run().unwrap_err();
        assert!(err.to_string().contains("unknown lemma identifier"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(Campaign::from_json(r#"{"name": "x", "entries": [{"id": "remarks", "sample": 3}]}"#).is_err());
    }

    #[test]
    fn escape_family_expands() {
        let ctx = WindowContext::new(1, 20);
        let m = escape_regions(Regime::Large, "M", &ctx).unwrap();
        assert!(m.len() > 1 && m.iter().all(|l| l.name == RegionName::M));
        assert_eq!(escape_regions(Regime::Large, "G", &ctx).unwrap().len(), 1);
    }
}
