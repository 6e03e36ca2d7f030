//! TOML document model for belief states.
//!
//! Every state the tools exchange lives in a small TOML document with a
//! shared header and one kind-specific section:
//!
//! ```toml
//! format = 1
//! kind = "mass"            # probability | mass | possibility | ocf | partition
//! frame = ["a", "b", "c"]
//!
//! [[focal]]
//! subset = ["a", "b"]
//! mass = 0.6
//!
//! [[focal]]
//! subset = ["c"]
//! mass = 0.4
//! ```
//!
//! `probability`, `possibility`, and `ocf` documents carry a table of
//! per-element values instead (`[probability]` with `a = 0.5`, ...);
//! elements omitted from the table default to zero. `partition`
//! documents carry `[[cell]]` rows (`members`, `weight`) plus a
//! `normalization` field, `"sum"` for probabilistic observations and
//! `"max"` for possibilistic ones. An optional `[meta]` table carries
//! `warnings` accumulated by earlier operations.
//!
//! Numeric values may be written as TOML integers or floats. Loading
//! validates against the same invariants the library enforces, so a
//! document that loads is a state the rules can work on.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use credo_core::{
    Error as CoreError, Frame, MassFunction, NormalizationMode, Ocf, PossibilityDistribution,
    ProbabilityMeasure, Subset, WeightedPartition,
};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Document format revision this build reads and writes.
pub const FORMAT: u32 = 1;

/// A numeric value that may be written as a TOML integer or float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct NumVisitor;
        impl de::Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
                Ok(Num(v))
            }
        }
        deserializer.deserialize_any(NumVisitor)
    }
}

/// The kinds of state documents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// A probability measure over the frame's elements.
    Probability,
    /// A mass function over subsets of the frame.
    Mass,
    /// A possibility distribution over the frame's elements.
    Possibility,
    /// An ordinal conditional (ranking) function.
    Ranking,
    /// A weighted partition, used as an observation.
    Partition,
}

impl Kind {
    /// The `kind` string used in documents.
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Probability => "probability",
            Kind::Mass => "mass",
            Kind::Possibility => "possibility",
            Kind::Ranking => "ocf",
            Kind::Partition => "partition",
        }
    }

    /// Parses a `kind` string.
    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "probability" => Some(Kind::Probability),
            "mass" => Some(Kind::Mass),
            "possibility" => Some(Kind::Possibility),
            "ocf" => Some(Kind::Ranking),
            "partition" => Some(Kind::Partition),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One `[[focal]]` row of a mass document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFocal {
    /// Labels of the focal set's members.
    pub subset: Vec<String>,
    /// Mass committed to exactly this set.
    pub mass: Num,
}

/// One `[[cell]]` row of a partition document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCell {
    /// Labels of the cell's members.
    pub members: Vec<String>,
    /// The cell's observation weight.
    pub weight: Num,
}

/// The optional `[meta]` table.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMeta {
    /// Warnings accumulated by the operations that produced the document.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// The serde-level shape of a state document. Use
/// [`KnowledgeDocument`] for validated access.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    /// Format revision; must equal [`FORMAT`].
    pub format: u32,
    /// Document kind string.
    pub kind: String,
    /// The frame's elements, in order.
    pub frame: Vec<String>,
    /// Partition documents: `"sum"` or `"max"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<String>,
    /// Probability documents: per-element weights.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub probability: BTreeMap<String, Num>,
    /// Possibility documents: per-element degrees.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub possibility: BTreeMap<String, Num>,
    /// Ranking documents: per-element ranks.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ocf: BTreeMap<String, u64>,
    /// Mass documents: focal rows.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub focal: Vec<RawFocal>,
    /// Partition documents: cell rows.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cell: Vec<RawCell>,
    /// Optional metadata.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<RawMeta>,
}

impl RawDocument {
    fn empty(kind: Kind, frame: &Frame) -> Self {
        RawDocument {
            format: FORMAT,
            kind: kind.as_str().to_owned(),
            frame: frame.labels().to_vec(),
            normalization: None,
            probability: BTreeMap::new(),
            possibility: BTreeMap::new(),
            ocf: BTreeMap::new(),
            focal: Vec::new(),
            cell: Vec::new(),
            meta: None,
        }
    }
}

/// The validated body of a state document.
#[derive(Clone, Debug)]
pub enum Body {
    /// `kind = "probability"`.
    Probability(ProbabilityMeasure),
    /// `kind = "mass"`.
    Mass(MassFunction),
    /// `kind = "possibility"`.
    Possibility(PossibilityDistribution),
    /// `kind = "ocf"`.
    Ranking(Ocf),
    /// `kind = "partition"`.
    Partition(WeightedPartition),
}

impl Body {
    /// The document kind of this body.
    pub fn kind(&self) -> Kind {
        match self {
            Body::Probability(_) => Kind::Probability,
            Body::Mass(_) => Kind::Mass,
            Body::Possibility(_) => Kind::Possibility,
            Body::Ranking(_) => Kind::Ranking,
            Body::Partition(_) => Kind::Partition,
        }
    }

    /// The frame the state lives on.
    pub fn frame(&self) -> &Frame {
        match self {
            Body::Probability(p) => p.frame(),
            Body::Mass(m) => m.frame(),
            Body::Possibility(pi) => pi.frame(),
            Body::Ranking(k) => k.frame(),
            Body::Partition(w) => w.frame(),
        }
    }
}

/// A validated belief-state document: the state plus any warnings
/// carried along from the operations that produced it.
#[derive(Clone, Debug)]
pub struct KnowledgeDocument {
    /// The validated state.
    pub body: Body,
    /// Carried-over warnings, shown under `[meta]`.
    pub warnings: Vec<String>,
}

impl KnowledgeDocument {
    /// Wraps a body with no warnings.
    pub fn new(body: Body) -> Self {
        KnowledgeDocument {
            body,
            warnings: Vec::new(),
        }
    }

    /// The document kind.
    pub fn kind(&self) -> Kind {
        self.body.kind()
    }

    /// The frame the state lives on.
    pub fn frame(&self) -> &Frame {
        self.body.frame()
    }

    /// Loads and validates a document from a TOML file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    /// Parses and validates a document from TOML text; `origin` names the
    /// source in errors.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let raw: RawDocument = toml::from_str(text).map_err(|e| CliError::Parse {
            path: origin.to_owned(),
            message: e.message().to_owned(),
        })?;
        Self::from_raw(raw, origin)
    }

    /// Validates a raw document; `origin` names the source in errors.
    pub fn from_raw(raw: RawDocument, origin: &Path) -> Result<Self> {
        let invalid = |message: String| CliError::Validation {
            path: origin.to_owned(),
            message,
        };
        let lift = |e: CoreError| {
            CliError::Validation {
                path: origin.to_owned(),
                message: e.to_string(),
            }
        };

        if raw.format != FORMAT {
            return Err(invalid(format!(
                "unsupported format {}; this build reads format {FORMAT}",
                raw.format
            )));
        }
        let kind = Kind::parse(&raw.kind).ok_or_else(|| {
            invalid(format!(
                "unknown kind {:?}; expected probability, mass, possibility, ocf, or partition",
                raw.kind
            ))
        })?;
        let frame = Frame::new(raw.frame.clone()).map_err(lift)?;

        // Only the section matching the kind may be present.
        let misplaced: &[(&str, bool)] = &[
            ("[probability]", !raw.probability.is_empty() && kind != Kind::Probability),
            ("[possibility]", !raw.possibility.is_empty() && kind != Kind::Possibility),
            ("[ocf]", !raw.ocf.is_empty() && kind != Kind::Ranking),
            ("[[focal]]", !raw.focal.is_empty() && kind != Kind::Mass),
            ("[[cell]]", !raw.cell.is_empty() && kind != Kind::Partition),
            ("normalization", raw.normalization.is_some() && kind != Kind::Partition),
        ];
        for (section, wrong) in misplaced {
            if *wrong {
                return Err(invalid(format!(
                    "a {kind} document does not carry {section}"
                )));
            }
        }

        let body = match kind {
            Kind::Probability => Body::Probability(
                ProbabilityMeasure::from_labeled(
                    frame,
                    raw.probability.iter().map(|(k, v)| (k.as_str(), v.0)),
                )
                .map_err(lift)?,
            ),
            Kind::Possibility => Body::Possibility(
                PossibilityDistribution::from_labeled(
                    frame,
                    raw.possibility.iter().map(|(k, v)| (k.as_str(), v.0)),
                )
                .map_err(lift)?,
            ),
            Kind::Ranking => Body::Ranking(
                Ocf::from_labeled(frame, raw.ocf.iter().map(|(k, v)| (k.as_str(), *v)))
                    .map_err(lift)?,
            ),
            Kind::Mass => {
                if raw.focal.is_empty() {
                    return Err(invalid(
                        "a mass document needs at least one [[focal]] row".to_owned(),
                    ));
                }
                let mut entries: Vec<(Subset, f64)> = Vec::with_capacity(raw.focal.len());
                for row in &raw.focal {
                    let subset = frame
                        .subset(row.subset.iter().map(String::as_str))
                        .map_err(lift)?;
                    entries.push((subset, row.mass.0));
                }
                Body::Mass(MassFunction::new(frame, entries).map_err(lift)?)
            }
            Kind::Partition => {
                let mode = match raw.normalization.as_deref() {
                    Some("sum") => NormalizationMode::Sum,
                    Some("max") => NormalizationMode::Max,
                    Some(other) => {
                        return Err(invalid(format!(
                            "unknown normalization {other:?}; expected \"sum\" or \"max\""
                        )))
                    }
                    None => {
                        return Err(invalid(
                            "a partition document needs normalization = \"sum\" or \"max\""
                                .to_owned(),
                        ))
                    }
                };
                if raw.cell.is_empty() {
                    return Err(invalid(
                        "a partition document needs at least one [[cell]] row".to_owned(),
                    ));
                }
                let mut cells: Vec<(Subset, f64)> = Vec::with_capacity(raw.cell.len());
                for row in &raw.cell {
                    let subset = frame
                        .subset(row.members.iter().map(String::as_str))
                        .map_err(lift)?;
                    cells.push((subset, row.weight.0));
                }
                Body::Partition(WeightedPartition::new(cells, mode).map_err(lift)?)
            }
        };

        Ok(KnowledgeDocument {
            body,
            warnings: raw.meta.map(|m| m.warnings).unwrap_or_default(),
        })
    }

    /// The raw (serializable) view of this document, with every element
    /// listed explicitly and entries in canonical order.
    pub fn to_raw(&self) -> RawDocument {
        let frame = self.frame().clone();
        let mut raw = RawDocument::empty(self.kind(), &frame);
        match &self.body {
            Body::Probability(p) => {
                for (label, w) in frame.labels().iter().zip(p.weights()) {
                    raw.probability.insert(label.clone(), Num(*w));
                }
            }
            Body::Possibility(pi) => {
                for (label, v) in frame.labels().iter().zip(pi.values()) {
                    raw.possibility.insert(label.clone(), Num(*v));
                }
            }
            Body::Ranking(k) => {
                for (label, r) in frame.labels().iter().zip(k.ranks()) {
                    raw.ocf.insert(label.clone(), *r);
                }
            }
            Body::Mass(m) => {
                for (subset, mass) in m.focals() {
                    raw.focal.push(RawFocal {
                        subset: subset.members().iter().map(|s| s.to_string()).collect(),
                        mass: Num(mass),
                    });
                }
            }
            Body::Partition(w) => {
                raw.normalization = Some(match w.mode() {
                    NormalizationMode::Sum => "sum".to_owned(),
                    NormalizationMode::Max => "max".to_owned(),
                });
                for (subset, weight) in w.cells() {
                    raw.cell.push(RawCell {
                        members: subset.members().iter().map(|s| s.to_string()).collect(),
                        weight: Num(weight),
                    });
                }
            }
        }
        if !self.warnings.is_empty() {
            raw.meta = Some(RawMeta {
                warnings: self.warnings.clone(),
            });
        }
        raw
    }
}

/// One `[[step]]` row of a pipeline document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStep {
    /// Operation name (see the operation registry).
    pub op: String,
    /// Event labels, for conditioning steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on: Option<Vec<String>>,
    /// Path to a second state document, for combination steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub with: Option<PathBuf>,
    /// Path to an observation document, for updating steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<PathBuf>,
    /// Conjunction operator for possibilistic combination:
    /// `"min"`, `"product"`, or `"lukasiewicz"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    /// Rank shift for ranked conditionalization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<u64>,
}

/// A forgiving first look at a document: just its `kind`, ignoring the
/// rest. Used to tell "not a pipeline at all" apart from "a malformed
/// pipeline" before the strict parse runs.
#[derive(Deserialize)]
struct KindProbe {
    #[serde(default)]
    kind: Option<String>,
}

/// The serde-level shape of a pipeline document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPipeline {
    /// Format revision; must equal [`FORMAT`].
    pub format: u32,
    /// Must be `"pipeline"`.
    pub kind: String,
    /// The steps, applied in order.
    #[serde(default)]
    pub step: Vec<RawStep>,
}

/// A validated pipeline: ordered steps plus the directory against which
/// relative document references are resolved.
#[derive(Clone, Debug)]
pub struct Pipeline {
    /// The steps, in application order.
    pub steps: Vec<RawStep>,
    /// Directory of the pipeline file; step paths resolve against it.
    pub base_dir: PathBuf,
    /// The pipeline file itself, named in step-parameter errors.
    pub origin: PathBuf,
}

impl Pipeline {
    /// Loads and validates a pipeline document from a TOML file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        if let Ok(KindProbe { kind: Some(kind) }) = toml::from_str::<KindProbe>(&text) {
            if kind != "pipeline" {
                return Err(CliError::KindMismatch {
                    context: format!("loading {}", path.display()),
                    expected: "pipeline".to_owned(),
                    found: kind,
                });
            }
        }
        let raw: RawPipeline = toml::from_str(&text).map_err(|e| CliError::Parse {
            path: path.to_owned(),
            message: e.message().to_owned(),
        })?;
        if raw.format != FORMAT {
            return Err(CliError::Validation {
                path: path.to_owned(),
                message: format!(
                    "unsupported format {}; this build reads format {FORMAT}",
                    raw.format
                ),
            });
        }
        if raw.kind != "pipeline" {
            return Err(CliError::KindMismatch {
                context: format!("loading {}", path.display()),
                expected: "pipeline".to_owned(),
                found: raw.kind,
            });
        }
        Ok(Pipeline {
            steps: raw.step,
            base_dir: path.parent().unwrap_or_else(|| Path::new(".")).to_owned(),
            origin: path.to_owned(),
        })
    }
}
