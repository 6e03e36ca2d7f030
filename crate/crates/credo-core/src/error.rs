//! Error type shared by every module in the crate.
//!
//! Errors fall into two broad categories that callers may want to treat
//! differently:
//!
//! * **validation** — the inputs themselves are malformed (labels collide,
//!   masses do not normalize, a partition leaves elements uncovered);
//! * **rule undefined** — the inputs are fine but the requested updating
//!   rule has no value on them (conditioning on a null event, combining
//!   totally conflicting sources, translating a distribution that is not
//!   on the rank grid).
//!
//! [`Error::category`] exposes that split so front ends can map it onto
//! distinct exit codes without matching on every variant.

use alloc::string::String;
use core::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Coarse classification of an [`Error`], useful for exit-code mapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Inputs violate a structural invariant.
    Validation,
    /// Inputs are well formed but the rule is undefined on them.
    RuleUndefined,
}

/// Normalization discipline of a weighted partition.
///
/// `Sum` partitions carry additive weights (probabilistic observations,
/// weights sum to 1); `Max` partitions carry maxitive weights
/// (possibilistic observations, largest weight is 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizationMode {
    /// Weights must sum to 1.
    Sum,
    /// The largest weight must equal 1.
    Max,
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizationMode::Sum => write!(f, "sum"),
            NormalizationMode::Max => write!(f, "max"),
        }
    }
}

/// Everything that can go wrong while building state or applying a rule.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A frame needs at least one element.
    EmptyFrame,
    /// Element labels must be non-empty strings.
    EmptyLabel,
    /// Element labels must be pairwise distinct.
    DuplicateLabel {
        /// The label that appeared twice.
        label: String,
    },
    /// A label was used that the frame does not contain.
    UnknownElement {
        /// The offending label.
        label: String,
    },
    /// Two values built over different frames were combined.
    FrameMismatch,
    /// Powerset enumeration was requested past the configured cap.
    FrameTooLarge {
        /// Number of elements in the frame.
        size: usize,
        /// Largest frame size the operation is willing to enumerate.
        cap: usize,
    },
    /// The empty set has no minimum rank / no defined value here.
    EmptySet,
    /// A value vector does not line up with the frame.
    LengthMismatch {
        /// Number of elements in the frame.
        expected: usize,
        /// Number of values supplied.
        found: usize,
    },
    /// Masses must normalize: the focal masses do not sum to 1.
    MassNormalization {
        /// The sum that was actually observed.
        sum: f64,
    },
    /// Atom probabilities must sum to 1.
    ProbabilityNormalization {
        /// The sum that was actually observed.
        sum: f64,
    },
    /// The empty set cannot carry positive mass.
    EmptyFocal,
    /// A mass function was expected to be Bayesian (all focals singletons).
    NotBayesian,
    /// A mass, weight, or degree was negative.
    NegativeValue {
        /// What kind of quantity was negative.
        what: &'static str,
        /// The offending value.
        value: f64,
    },
    /// A degree left its admissible range.
    ValueOutOfRange {
        /// What kind of quantity was out of range.
        what: &'static str,
        /// The offending value.
        value: f64,
    },
    /// A possibility distribution must reach 1 somewhere.
    PossibilityNormalization {
        /// The largest value that was actually observed.
        max: f64,
    },
    /// A ranking function must reach rank 0 somewhere.
    RankNormalization {
        /// The smallest rank that was actually observed.
        min: u64,
    },
    /// A rank exceeded the configured cap.
    RankCapExceeded {
        /// The offending rank.
        rank: u64,
        /// The cap in force.
        cap: u64,
    },
    /// Partition cells must be pairwise disjoint.
    PartitionNotDisjoint,
    /// Partition cells must jointly cover the frame.
    PartitionIncomplete,
    /// Weights failed their normalization discipline.
    WeightNormalization {
        /// Which discipline was violated (`sum` or `max`).
        mode: NormalizationMode,
        /// The sum or maximum that was actually observed.
        actual: f64,
    },
    /// An operation got a partition in the wrong normalization mode.
    NormalizationModeMismatch {
        /// The mode the operation needs.
        expected: NormalizationMode,
        /// The mode the partition was built with.
        found: NormalizationMode,
    },
    /// Bayes or Jeffrey conditioning hit a cell of probability zero.
    ConditioningOnNull {
        /// Description of the null event or cell.
        event: String,
    },
    /// A conditioning rule's precondition failed.
    ConditioningUndefined {
        /// Which rule was undefined.
        rule: &'static str,
        /// Which precondition failed, rendered for humans.
        detail: String,
    },
    /// Sources are in total conflict; no normalized result exists.
    TotalConflict,
    /// No selection of the focal elements gives the event positive probability.
    NoFeasibleSelection,
    /// A possibility value is not `e^(-k)` for any whole rank `k`.
    NotOnRankGrid {
        /// The element whose value is off the grid.
        element: String,
        /// The value `-ln pi` that failed to be close to an integer.
        log_value: f64,
    },
    /// Rank translation needs strictly positive possibility everywhere.
    ZeroPossibility {
        /// The element carrying possibility 0.
        element: String,
    },
    /// Conditioning with a shift needs a non-degenerate complement.
    DegenerateComplement,
    /// The named rule or check does not exist.
    UnknownRule {
        /// The name that failed to resolve.
        name: String,
    },
    /// An instance generator exhausted its rejection budget.
    GeneratorConstraintUnsatisfiable {
        /// The instance family that could not be satisfied.
        family: String,
        /// How many rounds of rejection sampling were attempted.
        rounds: usize,
    },
}

impl Error {
    /// Coarse classification used for exit-code mapping.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::ConditioningOnNull { .. }
            | Error::ConditioningUndefined { .. }
            | Error::TotalConflict
            | Error::NoFeasibleSelection
            | Error::NotOnRankGrid { .. }
            | Error::ZeroPossibility { .. }
            | Error::DegenerateComplement => ErrorCategory::RuleUndefined,
            _ => ErrorCategory::Validation,
        }
    }

    /// Short stable name of the violated invariant or failed precondition.
    ///
    /// Front ends report this alongside the human-readable message so that
    /// scripted callers can match on something sturdier than prose.
    pub fn invariant_name(&self) -> &'static str {
        match self {
            Error::EmptyFrame => "frame non-empty",
            Error::EmptyLabel => "label non-empty",
            Error::DuplicateLabel { .. } => "labels distinct",
            Error::UnknownElement { .. } => "element known",
            Error::FrameMismatch => "frames match",
            Error::FrameTooLarge { .. } => "frame within enumeration cap",
            Error::EmptySet => "set non-empty",
            Error::LengthMismatch { .. } => "values aligned with frame",
            Error::MassNormalization { .. } => "mass normalization",
            Error::ProbabilityNormalization { .. } => "probability normalization",
            Error::EmptyFocal => "no empty focal element",
            Error::NotBayesian => "mass function Bayesian",
            Error::NegativeValue { .. } => "value non-negative",
            Error::ValueOutOfRange { .. } => "value in range",
            Error::PossibilityNormalization { .. } => "possibility normalization",
            Error::RankNormalization { .. } => "rank normalization",
            Error::RankCapExceeded { .. } => "rank within cap",
            Error::PartitionNotDisjoint => "partition disjoint",
            Error::PartitionIncomplete => "partition covers frame",
            Error::WeightNormalization { .. } => "weight normalization",
            Error::NormalizationModeMismatch { .. } => "normalization mode",
            Error::ConditioningOnNull { .. } => "conditioning event non-null",
            Error::ConditioningUndefined { .. } => "conditioning defined",
            Error::TotalConflict => "sources not totally conflicting",
            Error::NoFeasibleSelection => "feasible selection exists",
            Error::NotOnRankGrid { .. } => "possibility on rank grid",
            Error::ZeroPossibility { .. } => "possibility strictly positive",
            Error::DegenerateComplement => "complement non-degenerate",
            Error::UnknownRule { .. } => "rule known",
            Error::GeneratorConstraintUnsatisfiable { .. } => "generator constraint satisfiable",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyFrame => write!(f, "a frame needs at least one element"),
            Error::EmptyLabel => write!(f, "element labels must be non-empty"),
            Error::DuplicateLabel { label } => {
                write!(f, "duplicate element label {label:?}")
            }
            Error::UnknownElement { label } => {
                write!(f, "element {label:?} is not in the frame")
            }
            Error::FrameMismatch => {
                write!(f, "operands are defined over different frames")
            }
            Error::FrameTooLarge { size, cap } => write!(
                f,
                "frame has {size} elements; enumeration is capped at {cap}"
            ),
            Error::EmptySet => write!(f, "the empty set is not admissible here"),
            Error::LengthMismatch { expected, found } => write!(
                f,
                "expected {expected} values, one per frame element, got {found}"
            ),
            Error::MassNormalization { sum } => {
                write!(f, "focal masses sum to {sum}, expected 1")
            }
            Error::ProbabilityNormalization { sum } => {
                write!(f, "atom probabilities sum to {sum}, expected 1")
            }
            Error::EmptyFocal => {
                write!(f, "the empty set cannot carry positive mass")
            }
            Error::NotBayesian => write!(
                f,
                "mass function has a non-singleton focal element; expected a Bayesian one"
            ),
            Error::NegativeValue { what, value } => {
                write!(f, "{what} must be non-negative, got {value}")
            }
            Error::ValueOutOfRange { what, value } => {
                write!(f, "{what} is out of range: {value}")
            }
            Error::PossibilityNormalization { max } => write!(
                f,
                "possibility distribution peaks at {max}, expected a maximum of 1"
            ),
            Error::RankNormalization { min } => write!(
                f,
                "ranking function has minimum rank {min}, expected rank 0 somewhere"
            ),
            Error::RankCapExceeded { rank, cap } => {
                write!(f, "rank {rank} exceeds the cap of {cap}")
            }
            Error::PartitionNotDisjoint => {
                write!(f, "partition cells overlap")
            }
            Error::PartitionIncomplete => {
                write!(f, "partition cells do not cover the frame")
            }
            Error::WeightNormalization { mode, actual } => match mode {
                NormalizationMode::Sum => {
                    write!(f, "cell weights sum to {actual}, expected 1")
                }
                NormalizationMode::Max => {
                    write!(f, "largest cell weight is {actual}, expected 1")
                }
            },
            Error::NormalizationModeMismatch { expected, found } => write!(
                f,
                "operation needs a {expected}-normalized partition, got a {found}-normalized one"
            ),
            Error::ConditioningOnNull { event } => {
                write!(f, "conditioning on an event of probability zero: {event}")
            }
            Error::ConditioningUndefined { rule, detail } => {
                write!(f, "{rule} conditioning is undefined: {detail}")
            }
            Error::TotalConflict => {
                write!(f, "sources are in total conflict; no normalized result exists")
            }
            Error::NoFeasibleSelection => write!(
                f,
                "no selection of the focal elements gives the conditioning event positive probability"
            ),
            Error::NotOnRankGrid { element, log_value } => write!(
                f,
                "possibility of {element:?} is off the rank grid: -ln pi = {log_value} is not near a whole number"
            ),
            Error::ZeroPossibility { element } => write!(
                f,
                "element {element:?} has possibility 0; rank translation needs strictly positive values"
            ),
            Error::DegenerateComplement => write!(
                f,
                "the conditioning event covers the whole frame; its complement cannot absorb a shift"
            ),
            Error::UnknownRule { name } => write!(f, "unknown rule or check {name:?}"),
            Error::GeneratorConstraintUnsatisfiable { family, rounds } => write!(
                f,
                "could not generate a {family:?} instance after {rounds} rounds of rejection sampling"
            ),
        }
    }
}

impl core::error::Error for Error {}
