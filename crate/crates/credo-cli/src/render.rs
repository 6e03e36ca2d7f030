//! Canonical text output: deterministic TOML with a pinned number
//! format, and JSON mirrors of the same shapes.
//!
//! The TOML emitter is hand-rolled so output is canonical: header keys
//! first, per-element tables with every element listed, focal and cell
//! rows in their stored order, and numbers printed the same way every
//! time. Re-emitting a parsed emission reproduces it byte for byte,
//! which makes documents diff- and cache-friendly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::doc::{Num, RawDocument, RawMeta};

/// Formats a number canonically:
///
/// - `0.0` and `1.0` exactly as such;
/// - magnitudes below `1e-6` in scientific notation;
/// - everything else in plain decimal with twelve significant digits;
/// - trailing zeros trimmed, but at least one digit after the point.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_owned();
    }
    if x == 1.0 {
        return "1.0".to_owned();
    }
    let ax = x.abs();
    if ax < 1e-6 {
        let formatted = format!("{x:.11e}");
        let (mantissa, exponent) = formatted
            .split_once('e')
            .expect("scientific format always carries an exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    } else {
        let digits_before = ax.log10().floor() as i64 + 1;
        let decimals = (12i64 - digits_before).clamp(1, 17) as usize;
        let formatted = format!("{x:.decimals$}");
        let trimmed = formatted.trim_end_matches('0');
        if trimmed.ends_with('.') {
            format!("{trimmed}0")
        } else {
            trimmed.to_owned()
        }
    }
}

/// Escapes a string for a TOML basic string.
fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

/// A TOML key: bare when possible, quoted otherwise.
fn key(s: &str) -> String {
    let bare = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if bare {
        s.to_owned()
    } else {
        quoted(s)
    }
}

fn string_array(items: &[String]) -> String {
    let quoted: Vec<String> = items.iter().map(|s| quoted(s)).collect();
    format!("[{}]", quoted.join(", "))
}

fn push_value_table(out: &mut String, name: &str, table: &BTreeMap<String, Num>) {
    if table.is_empty() {
        return;
    }
    let _ = writeln!(out, "\n[{name}]");
    for (k, v) in table {
        let _ = writeln!(out, "{} = {}", key(k), fmt_num(v.0));
    }
}

fn push_meta(out: &mut String, meta: &Option<RawMeta>) {
    if let Some(meta) = meta {
        if !meta.warnings.is_empty() {
            let _ = writeln!(out, "\n[meta]");
            let _ = writeln!(out, "warnings = {}", string_array(&meta.warnings));
        }
    }
}

/// Renders a state document as canonical TOML.
pub fn document_to_toml(raw: &RawDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format = {}", raw.format);
    let _ = writeln!(out, "kind = {}", quoted(&raw.kind));
    let _ = writeln!(out, "frame = {}", string_array(&raw.frame));
    if let Some(normalization) = &raw.normalization {
        let _ = writeln!(out, "normalization = {}", quoted(normalization));
    }

    push_value_table(&mut out, "probability", &raw.probability);
    push_value_table(&mut out, "possibility", &raw.possibility);
    if !raw.ocf.is_empty() {
        let _ = writeln!(out, "\n[ocf]");
        for (k, v) in &raw.ocf {
            let _ = writeln!(out, "{} = {}", key(k), v);
        }
    }
    for focal in &raw.focal {
        let _ = writeln!(out, "\n[[focal]]");
        let _ = writeln!(out, "subset = {}", string_array(&focal.subset));
        let _ = writeln!(out, "mass = {}", fmt_num(focal.mass.0));
    }
    for cell in &raw.cell {
        let _ = writeln!(out, "\n[[cell]]");
        let _ = writeln!(out, "members = {}", string_array(&cell.members));
        let _ = writeln!(out, "weight = {}", fmt_num(cell.weight.0));
    }
    push_meta(&mut out, &raw.meta);
    out
}

/// Pretty JSON mirror of any serializable output shape.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output shapes serialize");
    text.push('\n');
    text
}

/// Result of evaluating one query row against an interval valuation.
#[derive(Clone, Debug, Serialize)]
pub struct ValuationRow {
    /// Labels of the queried event.
    pub event: Vec<String>,
    /// Lower bound, absent when the rule is undefined for this event.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<Num>,
    /// Upper bound, absent when the rule is undefined for this event.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<Num>,
    /// Set when the bounds are undefined for this event.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub undefined: bool,
}

/// Interval-conditioning output: bounds per queried event.
#[derive(Clone, Debug, Serialize)]
pub struct ValuationOut {
    /// Format revision.
    pub format: u32,
    /// Always `"valuation"`.
    pub kind: &'static str,
    /// The frame's elements.
    pub frame: Vec<String>,
    /// The conditioning event.
    pub given: Vec<String>,
    /// The envelope rule that was requested.
    pub rule: String,
    /// One row per queried event.
    pub row: Vec<ValuationRow>,
}

/// Renders a valuation as canonical TOML.
pub fn valuation_to_toml(v: &ValuationOut) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format = {}", v.format);
    let _ = writeln!(out, "kind = {}", quoted(v.kind));
    let _ = writeln!(out, "frame = {}", string_array(&v.frame));
    let _ = writeln!(out, "given = {}", string_array(&v.given));
    let _ = writeln!(out, "rule = {}", quoted(&v.rule));
    for row in &v.row {
        let _ = writeln!(out, "\n[[row]]");
        let _ = writeln!(out, "event = {}", string_array(&row.event));
        match (row.lower, row.upper) {
            (Some(lower), Some(upper)) => {
                let _ = writeln!(out, "lower = {}", fmt_num(lower.0));
                let _ = writeln!(out, "upper = {}", fmt_num(upper.0));
            }
            _ => {
                let _ = writeln!(out, "undefined = true");
            }
        }
    }
    out
}

/// Output of `query`: the values a state assigns to one event.
#[derive(Clone, Debug, Serialize)]
pub struct QueryOut {
    /// Format revision.
    pub format: u32,
    /// Always `"query"`.
    pub kind: &'static str,
    /// The frame's elements.
    pub frame: Vec<String>,
    /// The queried event.
    pub event: Vec<String>,
    /// Probability documents: the event's probability.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<Num>,
    /// Mass documents: the event's belief.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub belief: Option<Num>,
    /// Mass documents: the event's plausibility.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plausibility: Option<Num>,
    /// Mass documents: mass on exactly this set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<Num>,
    /// Possibility documents: the event's possibility.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub possibility: Option<Num>,
    /// Possibility documents: the event's necessity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub necessity: Option<Num>,
    /// Ranking documents: the event's rank.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<u64>,
}

/// Renders a query result as canonical TOML.
pub fn query_to_toml(q: &QueryOut) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format = {}", q.format);
    let _ = writeln!(out, "kind = {}", quoted(q.kind));
    let _ = writeln!(out, "frame = {}", string_array(&q.frame));
    let _ = writeln!(out, "event = {}", string_array(&q.event));
    for (name, value) in [
        ("probability", q.probability),
        ("belief", q.belief),
        ("plausibility", q.plausibility),
        ("mass", q.mass),
        ("possibility", q.possibility),
        ("necessity", q.necessity),
    ] {
        if let Some(v) = value {
            let _ = writeln!(out, "{name} = {}", fmt_num(v.0));
        }
    }
    if let Some(rank) = q.rank {
        let _ = writeln!(out, "rank = {rank}");
    }
    out
}

/// Output of `compare`: both partition-update posteriors side by side.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonOut {
    /// Format revision.
    pub format: u32,
    /// Always `"comparison"`.
    pub kind: &'static str,
    /// The frame's elements.
    pub frame: Vec<String>,
    /// Largest absolute pointwise difference between the two posteriors.
    pub max_abs_diff: Num,
    /// Whether the observation dominates the prior pointwise.
    pub observation_dominates_prior: bool,
    /// Whether the prior dominates the observation pointwise.
    pub prior_dominates_observation: bool,
    /// Whether the cores of prior and observation intersect.
    pub cores_overlap: bool,
    /// Posterior of the ranking-theoretic update.
    pub spohn: BTreeMap<String, Num>,
    /// Posterior of the possibilistic Jeffrey update.
    pub possibilistic: BTreeMap<String, Num>,
    /// Warnings (for example a subnormal possibilistic posterior).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<RawMeta>,
}

/// Renders a comparison as canonical TOML.
pub fn comparison_to_toml(c: &ComparisonOut) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format = {}", c.format);
    let _ = writeln!(out, "kind = {}", quoted(c.kind));
    let _ = writeln!(out, "frame = {}", string_array(&c.frame));
    let _ = writeln!(out, "max_abs_diff = {}", fmt_num(c.max_abs_diff.0));
    let _ = writeln!(
        out,
        "observation_dominates_prior = {}",
        c.observation_dominates_prior
    );
    let _ = writeln!(
        out,
        "prior_dominates_observation = {}",
        c.prior_dominates_observation
    );
    let _ = writeln!(out, "cores_overlap = {}", c.cores_overlap);
    push_value_table(&mut out, "spohn", &c.spohn);
    push_value_table(&mut out, "possibilistic", &c.possibilistic);
    push_meta(&mut out, &c.meta);
    out
}

/// One check's outcome in `suite` output.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    /// Stable check name.
    pub name: String,
    /// Instance family description.
    pub family: String,
    /// Instances evaluated.
    pub instances: usize,
    /// Instances beyond tolerance.
    pub failures: usize,
    /// Worst deviation seen.
    pub max_deviation: Num,
    /// The tolerance judged against.
    pub tolerance: Num,
    /// Whether the check passed.
    pub passed: bool,
}
