//! Cross-calculus coincidence checks over seeded random instances.
//!
//! The updating rules of the different calculi are not independent: on
//! special inputs they provably collapse into one another. Categorical
//! combination is Dempster conditioning; the evidential Jeffrey update on
//! Bayesian states is Jeffrey's rule; zero-conflict combination *is* the
//! evidential Jeffrey update; the envelope conditioning rules match the
//! brute-force credal bounds; ranked conditionalization commutes with the
//! exponential translation; and so on.
//!
//! Each such coincidence is represented by a [`Coincidence`] variant. A
//! [`CoincidenceSpec`] pairs it with an instance count and a deviation
//! tolerance, and [`run`] evaluates both routes on freshly generated
//! random instances, reporting the worst deviation and a witness for the
//! worst failure. Generation is driven by a seeded, portable generator,
//! so a report is exactly reproducible from `(spec, seed)`.
//!
//! The [`gen`] module exposes the instance generators themselves. They
//! use rejection sampling against each family's constraint, give up after
//! a bounded number of rounds with
//! [`Error::GeneratorConstraintUnsatisfiable`], and re-verify constraints
//! after construction, so a returned instance always satisfies its
//! family.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evidence::MassFunction;
use crate::frame::Subset;
use crate::ocf::{spohn_update, SpohnObservation};
use crate::possibility::{ConjunctionOp, PossibilityDistribution};
use crate::probability::WeightedPartition;
use crate::Tolerance;

/// Seeded instance generators for the coincidence families.
///
/// All generators draw from a caller-supplied [`rand::Rng`]; the suite
/// uses a fixed-algorithm generator so instances are identical across
/// platforms and runs. Constrained families use rejection sampling with
/// at most [`REJECTION_LIMIT`] rounds.
pub mod gen {
    use alloc::string::String;
    use alloc::vec;
    use alloc::vec::Vec;

    use rand::Rng;

    use crate::error::{Error, NormalizationMode, Result};
    use crate::evidence::MassFunction;
    use crate::frame::{Frame, Subset};
    use crate::ocf::Ocf;
    use crate::possibility::PossibilityDistribution;
    use crate::probability::{ProbabilityMeasure, WeightedPartition};

    /// Rejection-sampling budget per constrained draw.
    pub const REJECTION_LIMIT: usize = 100_000;

    /// Smallest weight the generators hand out, keeping products of
    /// generated weights comfortably above comparison tolerances.
    pub const MIN_WEIGHT: f64 = 0.05;

    /// Retries `draw` until it yields, up to [`REJECTION_LIMIT`] rounds.
    pub fn retry<T>(family: &str, mut draw: impl FnMut() -> Option<T>) -> Result<T> {
        for _ in 0..REJECTION_LIMIT {
            if let Some(value) = draw() {
                return Ok(value);
            }
        }
        Err(Error::GeneratorConstraintUnsatisfiable {
            family: String::from(family),
            rounds: REJECTION_LIMIT,
        })
    }

    /// A frame of `size` single-letter labels `a, b, c, ...` (size <= 26).
    pub fn frame(size: usize) -> Frame {
        assert!(
            (1..=26).contains(&size),
            "letter frames support 1 to 26 elements, got {size}"
        );
        let labels: Vec<String> = (0..size)
            .map(|i| String::from(char::from(b'a' + i as u8)))
            .collect();
        Frame::new(labels).expect("letter labels are distinct and non-empty")
    }

    /// A uniformly random subset (possibly empty).
    pub fn subset<R: Rng>(rng: &mut R, frame: &Frame) -> Subset {
        let members: Vec<&str> = frame
            .labels()
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .map(String::as_str)
            .collect();
        frame.subset(members).expect("labels come from the frame")
    }

    /// A uniformly random non-empty subset.
    pub fn nonempty_subset<R: Rng>(rng: &mut R, frame: &Frame) -> Result<Subset> {
        retry("non-empty subset", || {
            let s = subset(rng, frame);
            (!s.is_empty()).then_some(s)
        })
    }

    /// A uniformly random subset that is neither empty nor the frame.
    pub fn proper_nonempty_subset<R: Rng>(rng: &mut R, frame: &Frame) -> Result<Subset> {
        retry("proper non-empty subset", || {
            let s = subset(rng, frame);
            (!s.is_empty() && !s.is_full()).then_some(s)
        })
    }

    /// A weight in `[MIN_WEIGHT, 1)`.
    fn weight<R: Rng>(rng: &mut R) -> f64 {
        MIN_WEIGHT + (1.0 - MIN_WEIGHT) * rng.gen::<f64>()
    }

    /// A random mass function with between 1 and `max_focals` focal sets.
    pub fn mass_function<R: Rng>(
        rng: &mut R,
        frame: &Frame,
        max_focals: usize,
    ) -> Result<MassFunction> {
        let available = (1usize << frame.size()) - 1;
        let count = rng.gen_range(1..=max_focals.min(available).max(1));
        mass_function_with_exact_focals(rng, frame, count)
    }

    /// A random mass function with exactly `count` distinct focal sets.
    ///
    /// Fails with [`Error::GeneratorConstraintUnsatisfiable`] when the
    /// frame has fewer than `count` non-empty subsets.
    pub fn mass_function_with_exact_focals<R: Rng>(
        rng: &mut R,
        frame: &Frame,
        count: usize,
    ) -> Result<MassFunction> {
        let mut focals: Vec<Subset> = Vec::with_capacity(count);
        while focals.len() < count {
            let candidate = retry("distinct non-empty focal set", || {
                let s = subset(rng, frame);
                (!s.is_empty() && !focals.contains(&s)).then_some(s)
            })?;
            focals.push(candidate);
        }
        let weights: Vec<f64> = (0..count).map(|_| weight(rng)).collect();
        let total: f64 = weights.iter().sum();
        MassFunction::new(
            frame.clone(),
            focals
                .into_iter()
                .zip(weights)
                .map(|(s, w)| (s, w / total)),
        )
    }

    /// A random Bayesian mass function with full support.
    pub fn bayesian_mass_function<R: Rng>(rng: &mut R, frame: &Frame) -> Result<MassFunction> {
        let weights: Vec<f64> = (0..frame.size()).map(|_| weight(rng)).collect();
        let total: f64 = weights.iter().sum();
        let entries: Result<Vec<(Subset, f64)>> = frame
            .labels()
            .iter()
            .zip(&weights)
            .map(|(label, w)| Ok((frame.singleton(label)?, w / total)))
            .collect();
        MassFunction::new(frame.clone(), entries?)
    }

    /// A random probability measure with full support.
    pub fn probability_measure<R: Rng>(rng: &mut R, frame: &Frame) -> ProbabilityMeasure {
        let weights: Vec<f64> = (0..frame.size()).map(|_| weight(rng)).collect();
        let total: f64 = weights.iter().sum();
        ProbabilityMeasure::new(frame.clone(), weights.into_iter().map(|w| w / total).collect())
            .expect("normalized positive weights")
    }

    /// A random normalized possibility distribution (one world forced to 1).
    pub fn possibility_distribution<R: Rng>(
        rng: &mut R,
        frame: &Frame,
    ) -> PossibilityDistribution {
        let mut values: Vec<f64> = (0..frame.size()).map(|_| rng.gen::<f64>()).collect();
        let peak = rng.gen_range(0..frame.size());
        values[peak] = 1.0;
        PossibilityDistribution::new(frame.clone(), values)
            .expect("values lie in [0, 1] and peak at exactly 1")
    }

    /// A random normalized possibility distribution bounded away from 0.
    pub fn full_support_possibility<R: Rng>(
        rng: &mut R,
        frame: &Frame,
    ) -> PossibilityDistribution {
        let mut values: Vec<f64> = (0..frame.size()).map(|_| weight(rng)).collect();
        let peak = rng.gen_range(0..frame.size());
        values[peak] = 1.0;
        PossibilityDistribution::new(frame.clone(), values)
            .expect("values lie in [MIN_WEIGHT, 1] and peak at exactly 1")
    }

    /// A random weighted partition with at most `max_cells` non-empty
    /// cells, normalized for `mode`.
    pub fn partition<R: Rng>(
        rng: &mut R,
        frame: &Frame,
        max_cells: usize,
        mode: NormalizationMode,
    ) -> Result<WeightedPartition> {
        let cells = rng.gen_range(1..=max_cells.max(1));
        let mut members: Vec<Vec<&str>> = vec![Vec::new(); cells];
        for label in frame.labels() {
            members[rng.gen_range(0..cells)].push(label.as_str());
        }
        let mut entries: Vec<(Subset, f64)> = Vec::new();
        for cell_members in members.into_iter().filter(|m| !m.is_empty()) {
            entries.push((frame.subset(cell_members)?, weight(rng)));
        }
        match mode {
            NormalizationMode::Sum => {
                let total: f64 = entries.iter().map(|(_, w)| *w).sum();
                for (_, w) in &mut entries {
                    *w /= total;
                }
            }
            NormalizationMode::Max => {
                let max = entries.iter().map(|(_, w)| *w).fold(0.0, f64::max);
                for (_, w) in &mut entries {
                    *w /= max;
                }
            }
        }
        WeightedPartition::new(entries, mode)
    }

    /// A random OCF with ranks up to `max_rank` (one world forced to 0).
    pub fn ocf<R: Rng>(rng: &mut R, frame: &Frame, max_rank: u64) -> Ocf {
        let mut ranks: Vec<u64> = (0..frame.size())
            .map(|_| rng.gen_range(0..=max_rank))
            .collect();
        let floor = rng.gen_range(0..frame.size());
        ranks[floor] = 0;
        Ocf::new(frame.clone(), ranks).expect("rank 0 is forced somewhere")
    }
}

/// One cross-calculus coincidence: two independent routes that provably
/// agree on a family of random instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coincidence {
    /// Combining with a categorical source is Dempster conditioning.
    DempsterConditioningViaCombination,
    /// On Bayesian states, the evidential Jeffrey update is Jeffrey's rule.
    JeffreyOnBayesianPriors,
    /// With zero conflict, combination is the evidential Jeffrey update.
    CombinationWithoutConflict,
    /// Jeffrey's rule over singletons substitutes the target measure.
    JeffreySingletonSubstitution,
    /// Envelope conditioning matches the brute-force credal bounds.
    EnvelopesAgainstCredalOracle,
    /// Conditioned plausibility times plausibility is joint plausibility.
    ProductLawDempster,
    /// Conditioned belief times belief is joint belief (geometric rule).
    ProductLawGeometric,
    /// The closed-form possibilistic Jeffrey rule equals its cut supremum.
    PossibilisticJeffreyForms,
    /// Crisp-with-doubt updating equals the Jeffrey route it abbreviates.
    CrispDoubtClosedForm,
    /// Ranked conditionalization commutes with the exponential translation.
    RankedTwoPathUpdate,
    /// Translated partial rankings equal conditioned translations.
    RankedConditioningViaTranslation,
    /// Jeffrey's rule on a certain two-cell partition is Bayes conditioning.
    TwoCellJeffreyIsBayes,
    /// Min-combining with an indicator is possibilistic conditioning.
    ConditioningViaCrispCombination,
    /// The ranked partition update over singletons substitutes the target.
    RankedSingletonSubstitution,
}

impl Coincidence {
    /// Every coincidence, in suite order.
    pub fn all() -> &'static [Coincidence] {
        use Coincidence::*;
        &[
            DempsterConditioningViaCombination,
            JeffreyOnBayesianPriors,
            CombinationWithoutConflict,
            JeffreySingletonSubstitution,
            EnvelopesAgainstCredalOracle,
            ProductLawDempster,
            ProductLawGeometric,
            PossibilisticJeffreyForms,
            CrispDoubtClosedForm,
            RankedTwoPathUpdate,
            RankedConditioningViaTranslation,
            TwoCellJeffreyIsBayes,
            ConditioningViaCrispCombination,
            RankedSingletonSubstitution,
        ]
    }

    /// Stable kebab-case name, used by front ends to select a check.
    pub fn name(&self) -> &'static str {
        match self {
            Coincidence::DempsterConditioningViaCombination => {
                "dempster-conditioning-via-combination"
            }
            Coincidence::JeffreyOnBayesianPriors => "jeffrey-on-bayesian-priors",
            Coincidence::CombinationWithoutConflict => "combination-without-conflict",
            Coincidence::JeffreySingletonSubstitution => "jeffrey-singleton-substitution",
            Coincidence::EnvelopesAgainstCredalOracle => "envelopes-against-credal-oracle",
            Coincidence::ProductLawDempster => "product-law-dempster",
            Coincidence::ProductLawGeometric => "product-law-geometric",
            Coincidence::PossibilisticJeffreyForms => "possibilistic-jeffrey-forms",
            Coincidence::CrispDoubtClosedForm => "crisp-doubt-closed-form",
            Coincidence::RankedTwoPathUpdate => "ranked-two-path-update",
            Coincidence::RankedConditioningViaTranslation => {
                "ranked-conditioning-via-translation"
            }
            Coincidence::TwoCellJeffreyIsBayes => "two-cell-jeffrey-is-bayes",
            Coincidence::ConditioningViaCrispCombination => {
                "conditioning-via-crisp-combination"
            }
            Coincidence::RankedSingletonSubstitution => "ranked-singleton-substitution",
        }
    }

    /// Resolves a stable name back to the coincidence.
    pub fn from_name(name: &str) -> Result<Coincidence> {
        Coincidence::all()
            .iter()
            .copied()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownRule {
                name: String::from(name),
            })
    }

    /// Human-readable description of the instance family the check draws
    /// from.
    pub fn family(&self) -> &'static str {
        match self {
            Coincidence::DempsterConditioningViaCombination => {
                "4-world frames, up to 5 focals, events of positive plausibility"
            }
            Coincidence::JeffreyOnBayesianPriors => {
                "4-world frames, full-support Bayesian priors, sum partitions of up to 3 cells"
            }
            Coincidence::CombinationWithoutConflict => {
                "4-world frames, source pairs of up to 4 focals each with zero conflict"
            }
            Coincidence::JeffreySingletonSubstitution => {
                "4-world frames, full-support priors and targets, singleton partitions"
            }
            Coincidence::EnvelopesAgainstCredalOracle => {
                "3- to 5-world frames, up to 6 focals, all event/query pairs where defined"
            }
            Coincidence::ProductLawDempster => {
                "4-world frames, up to 5 focals, events of positive plausibility"
            }
            Coincidence::ProductLawGeometric => {
                "4-world frames, up to 5 focals, events of positive belief"
            }
            Coincidence::PossibilisticJeffreyForms => {
                "2- to 8-world frames, normalized pairs with overlapping support"
            }
            Coincidence::CrispDoubtClosedForm => {
                "4-world frames, events of positive possibility, doubt in [0, 1)"
            }
            Coincidence::RankedTwoPathUpdate => {
                "4-world frames, ranks up to 12, proper events, shifts up to 20"
            }
            Coincidence::RankedConditioningViaTranslation => {
                "4-world frames, ranks up to 12, non-empty events"
            }
            Coincidence::TwoCellJeffreyIsBayes => {
                "4-world frames, full-support priors, proper events"
            }
            Coincidence::ConditioningViaCrispCombination => {
                "4-world frames, events of positive possibility"
            }
            Coincidence::RankedSingletonSubstitution => {
                "4-world frames, full-support priors, singleton observations"
            }
        }
    }

    /// The default spec: the instance count and tolerance the built-in
    /// suite runs this check at.
    pub fn default_spec(&self) -> CoincidenceSpec {
        let (instances, tolerance) = match self {
            Coincidence::PossibilisticJeffreyForms => (500, 1e-12),
            Coincidence::CrispDoubtClosedForm => (200, 1e-12),
            Coincidence::RankedConditioningViaTranslation => (200, 1e-12),
            Coincidence::ConditioningViaCrispCombination => (200, 1e-12),
            _ => (200, 1e-9),
        };
        CoincidenceSpec {
            check: *self,
            instances,
            tolerance,
        }
    }
}

impl fmt::Display for Coincidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A coincidence check with its instance count and pass tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoincidenceSpec {
    /// Which coincidence to check.
    pub check: Coincidence,
    /// How many random instances to draw.
    pub instances: usize,
    /// Largest deviation counted as agreement.
    pub tolerance: f64,
}

/// The worst-deviating failing instance of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Zero-based index of the instance in generation order.
    pub index: usize,
    /// Its deviation.
    pub deviation: f64,
    /// Rendered instance data and both routes' results.
    pub detail: String,
}

/// Outcome of running one [`CoincidenceSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoincidenceReport {
    /// Stable name of the check.
    pub name: &'static str,
    /// Instance family description.
    pub family: &'static str,
    /// Instances evaluated.
    pub instances: usize,
    /// Instances whose deviation exceeded the tolerance.
    pub failures: usize,
    /// Worst deviation seen.
    pub max_deviation: f64,
    /// The tolerance the run was judged at.
    pub tolerance: f64,
    /// Whether every instance agreed within tolerance.
    pub passed: bool,
    /// The worst failing instance, if any failed.
    pub witness: Option<Witness>,
}

impl fmt::Display for CoincidenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(
                f,
                "{}: PASS ({} instances, max deviation {:e} <= {:e})",
                self.name, self.instances, self.max_deviation, self.tolerance
            )
        } else {
            write!(
                f,
                "{}: FAIL ({} of {} instances deviate, worst {:e} > {:e})",
                self.name, self.failures, self.instances, self.max_deviation, self.tolerance
            )
        }
    }
}

/// Runs one coincidence check; fully determined by `(spec, seed)`.
pub fn run(spec: &CoincidenceSpec, seed: u64) -> Result<CoincidenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerance::default();
    let mut max_deviation = 0.0f64;
    let mut failures = 0usize;
    let mut witness: Option<Witness> = None;
    for index in 0..spec.instances {
        let (deviation, detail) = run_one(spec.check, &mut rng, spec.tolerance, tol)?;
        if deviation > max_deviation {
            max_deviation = deviation;
        }
        if deviation > spec.tolerance {
            failures += 1;
            let replace = witness
                .as_ref()
                .map(|w| deviation > w.deviation)
                .unwrap_or(true);
            if replace {
                witness = Some(Witness {
                    index,
                    deviation,
                    detail: detail.unwrap_or_default(),
                });
            }
        }
    }
    Ok(CoincidenceReport {
        name: spec.check.name(),
        family: spec.check.family(),
        instances: spec.instances,
        failures,
        max_deviation,
        tolerance: spec.tolerance,
        passed: failures == 0,
        witness,
    })
}

/// The default spec of every coincidence, in suite order.
pub fn builtin_suite() -> Vec<CoincidenceSpec> {
    Coincidence::all().iter().map(|c| c.default_spec()).collect()
}

/// Runs the whole built-in suite; each check gets an independent stream
/// derived from `seed` and its position, so reports are reproducible and
/// insensitive to each other.
pub fn run_suite(seed: u64) -> Result<Vec<CoincidenceReport>> {
    builtin_suite()
        .iter()
        .enumerate()
        .map(|(i, spec)| run(spec, derived_seed(seed, i)))
        .collect()
}

/// Derives the per-check seed used by [`run_suite`].
pub fn derived_seed(seed: u64, position: usize) -> u64 {
    seed.wrapping_add((position as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Largest absolute difference between the two mass assignments, over
/// the union of their focal sets.
fn mass_deviation(a: &MassFunction, b: &MassFunction) -> Result<f64> {
    let mut worst = 0.0f64;
    for (subset, mass) in a.focals() {
        worst = worst.max(libm::fabs(mass - b.mass(&subset)?));
    }
    for (subset, mass) in b.focals() {
        worst = worst.max(libm::fabs(mass - a.mass(&subset)?));
    }
    Ok(worst)
}

/// Largest absolute pointwise difference.
fn values_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max(libm::fabs(x - y)))
}

/// Largest relative pointwise difference (`|x - y| / max(|x|, |y|)`).
fn relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| {
            let scale = libm::fabs(*x).max(libm::fabs(*y));
            if scale == 0.0 {
                acc
            } else {
                acc.max(libm::fabs(x - y) / scale)
            }
        })
}

fn detail_if(
    failing: bool,
    build: impl FnOnce() -> String,
) -> Option<String> {
    failing.then(build)
}

/// Evaluates one instance of `check`, returning its deviation and, when
/// it exceeds `pass_tol`, a rendered witness.
fn run_one(
    check: Coincidence,
    rng: &mut ChaCha8Rng,
    pass_tol: f64,
    tol: Tolerance,
) -> Result<(f64, Option<String>)> {
    match check {
        Coincidence::DempsterConditioningViaCombination => {
            let frame = gen::frame(4);
            let prior = gen::mass_function(rng, &frame, 5)?;
            let event = gen::retry("event of positive plausibility", || {
                let s = gen::subset(rng, &frame);
                (!s.is_empty() && tol.positive(prior.plausibility(&s).ok()?)).then_some(s)
            })?;
            let categorical = MassFunction::categorical(&event)?;
            let combined = prior.combine_dempster(&categorical, tol)?;
            let conditioned = prior.condition_dempster(&event, tol)?;
            let deviation = mass_deviation(&combined, &conditioned)?;
            let detail = detail_if(deviation > pass_tol, || {
                format!(
                    "prior {prior}, event {event}: combination {combined}, conditioning {conditioned}"
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::JeffreyOnBayesianPriors => {
            let frame = gen::frame(4);
            let prior = gen::bayesian_mass_function(rng, &frame)?;
            let partition = gen::partition(
                rng,
                &frame,
                3,
                crate::NormalizationMode::Sum,
            )?;
            let obs_mass = MassFunction::new(frame.clone(), partition.cells())?;
            let evidential = prior.jeffrey_update(&obs_mass, tol)?.to_probability()?;
            let probabilistic = prior.to_probability()?.jeffrey_update(&partition, tol)?;
            let deviation = values_deviation(evidential.weights(), probabilistic.weights());
            let detail = detail_if(deviation > pass_tol, || {
                format!(
                    "prior {prior}: evidential route {evidential}, probabilistic route {probabilistic}"
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::CombinationWithoutConflict => {
            let frame = gen::frame(4);
            let (m1, m2) = gen::retry("zero-conflict source pair", || {
                let m1 = gen::mass_function(rng, &frame, 4).ok()?;
                let m2 = gen::mass_function(rng, &frame, 4).ok()?;
                let clash = m1.focals().any(|(a, _)| {
                    m2.focals()
                        .any(|(b, _)| a.is_disjoint_from(&b).unwrap_or(true))
                });
                (!clash).then_some((m1, m2))
            })?;
            let combined = m1.combine_dempster(&m2, tol)?;
            let updated = m1.jeffrey_update(&m2, tol)?;
            let deviation = mass_deviation(&combined, &updated)?;
            let detail = detail_if(deviation > pass_tol, || {
                format!("m1 {m1}, m2 {m2}: combination {combined}, jeffrey update {updated}")
            });
            Ok((deviation, detail))
        }
        Coincidence::JeffreySingletonSubstitution => {
            let frame = gen::frame(4);
            let prior = gen::probability_measure(rng, &frame);
            let target = gen::probability_measure(rng, &frame);
            let cells: Result<Vec<(Subset, f64)>> = frame
                .labels()
                .iter()
                .enumerate()
                .map(|(i, label)| Ok((frame.singleton(label)?, target.weight(i))))
                .collect();
            let observation =
                WeightedPartition::new(cells?, crate::NormalizationMode::Sum)?;
            let updated = prior.jeffrey_update(&observation, tol)?;
            let deviation = values_deviation(updated.weights(), target.weights());
            let detail = detail_if(deviation > pass_tol, || {
                format!("prior {prior}, target {target}: update {updated}")
            });
            Ok((deviation, detail))
        }
        Coincidence::EnvelopesAgainstCredalOracle => {
            let size = rng.gen_range(3..=5);
            let frame = gen::frame(size);
            let prior = gen::mass_function(rng, &frame, 6)?;
            let mut deviation = 0.0f64;
            let mut worst_pair: Option<(Subset, Subset, f64, f64, f64, f64)> = None;
            for event in frame.subsets()? {
                if event.is_empty() {
                    continue;
                }
                let valuation = match prior.condition(
                    &event,
                    crate::ConditioningRule::Upper,
                    tol,
                )? {
                    crate::Conditioned::Interval(v) => v,
                    crate::Conditioned::Mass(_) => unreachable!("upper rule yields intervals"),
                };
                for query in frame.subsets()? {
                    let bounds = match valuation.interval(&query, tol) {
                        Ok(bounds) => bounds,
                        Err(Error::ConditioningUndefined { .. }) => continue,
                        Err(e) => return Err(e),
                    };
                    let oracle = prior.credal_oracle(&query, &event, tol)?;
                    let d = libm::fabs(bounds.0 - oracle.0).max(libm::fabs(bounds.1 - oracle.1));
                    if d > deviation {
                        deviation = d;
                        worst_pair =
                            Some((query.clone(), event.clone(), bounds.0, bounds.1, oracle.0, oracle.1));
                    }
                }
            }
            let detail = detail_if(deviation > pass_tol, || {
                let (query, event, lo, hi, olo, ohi) =
                    worst_pair.expect("a deviating pair was recorded");
                format!(
                    "prior {prior}, query {query} given {event}: envelopes [{lo}, {hi}], oracle [{olo}, {ohi}]"
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::ProductLawDempster => {
            let frame = gen::frame(4);
            let prior = gen::mass_function(rng, &frame, 5)?;
            let event = gen::retry("event of positive plausibility", || {
                let s = gen::subset(rng, &frame);
                (!s.is_empty() && tol.positive(prior.plausibility(&s).ok()?)).then_some(s)
            })?;
            let query = gen::subset(rng, &frame);
            let conditioned = prior.condition_dempster(&event, tol)?;
            let lhs = conditioned.plausibility(&query)? * prior.plausibility(&event)?;
            let rhs = prior.plausibility(&query.intersect(&event)?)?;
            let deviation = libm::fabs(lhs - rhs);
            let detail = detail_if(deviation > pass_tol, || {
                format!("prior {prior}, query {query}, event {event}: {lhs} vs {rhs}")
            });
            Ok((deviation, detail))
        }
        Coincidence::ProductLawGeometric => {
            let frame = gen::frame(4);
            let prior = gen::mass_function(rng, &frame, 5)?;
            let event = gen::retry("event of positive belief", || {
                let s = gen::subset(rng, &frame);
                (!s.is_empty() && tol.positive(prior.belief(&s).ok()?)).then_some(s)
            })?;
            let query = gen::subset(rng, &frame);
            let conditioned = prior.condition_geometric(&event, tol)?;
            let lhs = conditioned.belief(&query)? * prior.belief(&event)?;
            let rhs = prior.belief(&query.intersect(&event)?)?;
            let deviation = libm::fabs(lhs - rhs);
            let detail = detail_if(deviation > pass_tol, || {
                format!("prior {prior}, query {query}, event {event}: {lhs} vs {rhs}")
            });
            Ok((deviation, detail))
        }
        Coincidence::PossibilisticJeffreyForms => {
            let size = rng.gen_range(2..=8);
            let frame = gen::frame(size);
            let (prior, observation) = gen::retry("overlapping-support pair", || {
                let p = gen::possibility_distribution(rng, &frame);
                let o = gen::possibility_distribution(rng, &frame);
                let overlap = p
                    .values()
                    .iter()
                    .zip(o.values())
                    .any(|(a, b)| tol.positive(*a) && tol.positive(*b));
                overlap.then_some((p, o))
            })?;
            let compact = prior.jeffrey_update(&observation, tol)?;
            let by_cuts = prior.jeffrey_update_by_cuts(&observation, tol)?;
            let mut deviation = values_deviation(
                compact.distribution.values(),
                by_cuts.distribution.values(),
            );
            if compact.warning != by_cuts.warning {
                deviation = deviation.max(1.0);
            }
            let detail = detail_if(deviation > pass_tol, || {
                format!(
                    "prior {prior}, observation {observation}: closed form {}, cut supremum {}",
                    compact.distribution, by_cuts.distribution
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::CrispDoubtClosedForm => {
            let frame = gen::frame(4);
            let prior = gen::possibility_distribution(rng, &frame);
            let event = gen::retry("event of positive possibility", || {
                let s = gen::subset(rng, &frame);
                (!s.is_empty() && tol.positive(prior.possibility_of(&s).ok()?)).then_some(s)
            })?;
            let lambda = rng.gen::<f64>();
            let closed = prior.update_crisp_with_doubt(&event, lambda, tol)?;
            let observation = PossibilityDistribution::new(
                frame.clone(),
                (0..frame.size())
                    .map(|i| if event.contains_index(i) { 1.0 } else { lambda })
                    .collect(),
            )?;
            let jeffrey = prior.jeffrey_update(&observation, tol)?;
            let mut deviation =
                values_deviation(closed.values(), jeffrey.distribution.values());
            if jeffrey.warning.is_some() {
                deviation = deviation.max(1.0);
            }
            let detail = detail_if(deviation > pass_tol, || {
                format!(
                    "prior {prior}, event {event}, doubt {lambda}: closed form {closed}, jeffrey route {}",
                    jeffrey.distribution
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::RankedTwoPathUpdate => {
            let frame = gen::frame(4);
            let ranking = gen::ocf(rng, &frame, 12);
            let event = gen::proper_nonempty_subset(rng, &frame)?;
            let shift = rng.gen_range(0..=20u64);
            let via_ranks = ranking.conditionalize(&event, shift, tol)?.to_possibility();
            let observation = SpohnObservation::certainty_shift(&event, shift)?;
            let via_translation = ranking.spohn_update(&observation, tol)?;
            let deviation =
                relative_deviation(via_ranks.values(), via_translation.values());
            let detail = detail_if(deviation > pass_tol, || {
                format!(
                    "ranking {ranking}, event {event}, shift {shift}: rank route {via_ranks}, translated route {via_translation}"
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::RankedConditioningViaTranslation => {
            let frame = gen::frame(4);
            let ranking = gen::ocf(rng, &frame, 12);
            let event = gen::nonempty_subset(rng, &frame)?;
            let via_part = ranking.a_part(&event)?.to_possibility();
            let via_conditioning = ranking.to_possibility().condition(&event, tol)?;
            let deviation = values_deviation(via_part.values(), via_conditioning.values());
            let detail = detail_if(deviation > pass_tol, || {
                format!(
                    "ranking {ranking}, event {event}: partial translation {via_part}, conditioned translation {via_conditioning}"
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::TwoCellJeffreyIsBayes => {
            let frame = gen::frame(4);
            let prior = gen::probability_measure(rng, &frame);
            let event = gen::proper_nonempty_subset(rng, &frame)?;
            let observation = WeightedPartition::new(
                alloc::vec![(event.clone(), 1.0), (event.complement(), 0.0)],
                crate::NormalizationMode::Sum,
            )?;
            let via_jeffrey = prior.jeffrey_update(&observation, tol)?;
            let via_bayes = prior.bayes_condition(&event, tol)?;
            let deviation = values_deviation(via_jeffrey.weights(), via_bayes.weights());
            let detail = detail_if(deviation > pass_tol, || {
                format!(
                    "prior {prior}, event {event}: jeffrey {via_jeffrey}, bayes {via_bayes}"
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::ConditioningViaCrispCombination => {
            let frame = gen::frame(4);
            let prior = gen::possibility_distribution(rng, &frame);
            let event = gen::retry("event of positive possibility", || {
                let s = gen::subset(rng, &frame);
                (!s.is_empty() && tol.positive(prior.possibility_of(&s).ok()?)).then_some(s)
            })?;
            let crisp = PossibilityDistribution::indicator(&event)?;
            let combined = prior.combine(&crisp, ConjunctionOp::Min, tol)?;
            let conditioned = prior.condition(&event, tol)?;
            let deviation = values_deviation(combined.values(), conditioned.values());
            let detail = detail_if(deviation > pass_tol, || {
                format!(
                    "prior {prior}, event {event}: combination {combined}, conditioning {conditioned}"
                )
            });
            Ok((deviation, detail))
        }
        Coincidence::RankedSingletonSubstitution => {
            let frame = gen::frame(4);
            let prior = gen::full_support_possibility(rng, &frame);
            let target = gen::possibility_distribution(rng, &frame);
            let cells: Result<Vec<(Subset, f64)>> = frame
                .labels()
                .iter()
                .enumerate()
                .map(|(i, label)| Ok((frame.singleton(label)?, target.value(i))))
                .collect();
            let observation = SpohnObservation::from_cells(cells?)?;
            let updated = spohn_update(&prior, &observation, tol)?;
            let deviation = values_deviation(updated.values(), target.values());
            let detail = detail_if(deviation > pass_tol, || {
                format!("prior {prior}, target {target}: update {updated}")
            });
            Ok((deviation, detail))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for check in Coincidence::all() {
            assert_eq!(Coincidence::from_name(check.name()).unwrap(), *check);
        }
        assert_eq!(
            Coincidence::from_name("no-such-check"),
            Err(Error::UnknownRule {
                name: "no-such-check".into()
            })
        );
    }

    #[test]
    fn runs_are_deterministic() {
        let spec = CoincidenceSpec {
            check: Coincidence::TwoCellJeffreyIsBayes,
            instances: 25,
            tolerance: 1e-9,
        };
        let a = run(&spec, 42).unwrap();
        let b = run(&spec, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
        assert_eq!(a.max_deviation.to_bits(), b.max_deviation.to_bits());
    }

    #[test]
    fn every_check_passes_a_short_run() {
        for check in Coincidence::all() {
            let spec = CoincidenceSpec {
                instances: 20,
                ..check.default_spec()
            };
            let report = run(&spec, 7).unwrap();
            assert!(report.passed, "{report}");
            assert!(report.witness.is_none());
        }
    }

    #[test]
    fn impossible_generator_constraints_are_reported() {
        let frame = gen::frame(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match gen::mass_function_with_exact_focals(&mut rng, &frame, 2) {
            Err(Error::GeneratorConstraintUnsatisfiable { family, rounds }) => {
                assert!(family.contains("focal"));
                assert_eq!(rounds, gen::REJECTION_LIMIT);
            }
            other => panic!("expected GeneratorConstraintUnsatisfiable, got {other:?}"),
        }
    }

    #[test]
    fn suite_covers_every_coincidence_once() {
        let suite = builtin_suite();
        assert_eq!(suite.len(), Coincidence::all().len());
        for (spec, check) in suite.iter().zip(Coincidence::all()) {
            assert_eq!(spec.check, *check);
        }
    }
}
