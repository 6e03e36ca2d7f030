//! The operations behind the command-line verbs: querying states,
//! conditioning, combining, updating, translating, comparing the two
//! partition-update rules, and running multi-step pipelines.
//!
//! Every operation takes validated documents, dispatches on the
//! document kind and a rule name, and returns an [`Output`] that renders
//! to canonical TOML or JSON. Rule names are resolved here; a name that
//! does not fit the document's kind is a [`CliError::KindMismatch`], an
//! unknown name is a [`CliError::Usage`].

use std::collections::BTreeMap;

use credo_core::{
    compare_rules, spohn_update, Conditioned, ConditioningRule, ConjunctionOp, ErrorCategory,
    Frame, MassFunction, Ocf, PossibilityDistribution, ProbabilityMeasure, RuleComparison,
    SpohnObservation, Subset, Tolerance, Updated, WeightedPartition,
};

use crate::doc::{Body, KnowledgeDocument, Num, Pipeline, RawMeta, RawStep, FORMAT};
use crate::error::{CliError, Result};
use crate::render::{
    comparison_to_toml, document_to_toml, query_to_toml, to_json, valuation_to_toml,
    ComparisonOut, QueryOut, ValuationOut, ValuationRow,
};

/// The result of one command-line operation, ready to render.
#[derive(Clone, Debug)]
pub enum Output {
    /// A new state document.
    Document(KnowledgeDocument),
    /// Per-event probability bounds from an envelope rule.
    Valuation(ValuationOut),
    /// The values a state assigns to one event.
    Query(QueryOut),
    /// Both partition-update posteriors side by side.
    Comparison(ComparisonOut),
}

impl Output {
    /// Renders the result as canonical TOML.
    pub fn to_toml(&self) -> String {
        match self {
            Output::Document(doc) => document_to_toml(&doc.to_raw()),
            Output::Valuation(v) => valuation_to_toml(v),
            Output::Query(q) => query_to_toml(q),
            Output::Comparison(c) => comparison_to_toml(c),
        }
    }

    /// Renders the result as pretty JSON.
    pub fn to_json(&self) -> String {
        match self {
            Output::Document(doc) => to_json(&doc.to_raw()),
            Output::Valuation(v) => to_json(v),
            Output::Query(q) => to_json(q),
            Output::Comparison(c) => to_json(c),
        }
    }
}

fn usage(message: String) -> CliError {
    CliError::Usage { message }
}

fn mismatch(context: &str, expected: &str, doc: &KnowledgeDocument) -> CliError {
    CliError::KindMismatch {
        context: context.to_owned(),
        expected: expected.to_owned(),
        found: doc.kind().to_string(),
    }
}

fn as_probability<'a>(
    doc: &'a KnowledgeDocument,
    context: &str,
) -> Result<&'a ProbabilityMeasure> {
    match &doc.body {
        Body::Probability(p) => Ok(p),
        _ => Err(mismatch(context, "probability", doc)),
    }
}

fn as_mass<'a>(doc: &'a KnowledgeDocument, context: &str) -> Result<&'a MassFunction> {
    match &doc.body {
        Body::Mass(m) => Ok(m),
        _ => Err(mismatch(context, "mass", doc)),
    }
}

fn as_possibility<'a>(
    doc: &'a KnowledgeDocument,
    context: &str,
) -> Result<&'a PossibilityDistribution> {
    match &doc.body {
        Body::Possibility(pi) => Ok(pi),
        _ => Err(mismatch(context, "possibility", doc)),
    }
}

fn as_ranking<'a>(doc: &'a KnowledgeDocument, context: &str) -> Result<&'a Ocf> {
    match &doc.body {
        Body::Ranking(k) => Ok(k),
        _ => Err(mismatch(context, "ocf", doc)),
    }
}

fn as_partition<'a>(
    doc: &'a KnowledgeDocument,
    context: &str,
) -> Result<&'a WeightedPartition> {
    match &doc.body {
        Body::Partition(w) => Ok(w),
        _ => Err(mismatch(context, "partition", doc)),
    }
}

fn event(frame: &Frame, labels: &[String]) -> Result<Subset> {
    Ok(frame.subset(labels.iter().map(String::as_str))?)
}

fn labels_of(subset: &Subset) -> Vec<String> {
    subset.members().iter().map(|s| (*s).to_owned()).collect()
}

fn value_table(frame: &Frame, values: &[f64]) -> BTreeMap<String, Num> {
    frame
        .labels()
        .iter()
        .zip(values)
        .map(|(label, v)| (label.clone(), Num(*v)))
        .collect()
}

fn document(body: Body) -> Output {
    Output::Document(KnowledgeDocument::new(body))
}

fn document_with_warnings(body: Body, warnings: Vec<String>) -> Output {
    Output::Document(KnowledgeDocument { body, warnings })
}

/// Evaluates one event against a state: probabilities for probability
/// documents, belief/plausibility/mass for mass documents, possibility
/// and necessity for possibility documents, ranks for OCF documents.
pub fn query(doc: &KnowledgeDocument, on: &[String]) -> Result<Output> {
    let ev = event(doc.frame(), on)?;
    let mut out = QueryOut {
        format: FORMAT,
        kind: "query",
        frame: doc.frame().labels().to_vec(),
        event: labels_of(&ev),
        probability: None,
        belief: None,
        plausibility: None,
        mass: None,
        possibility: None,
        necessity: None,
        rank: None,
    };
    match &doc.body {
        Body::Probability(p) => {
            out.probability = Some(Num(p.probability_of(&ev)?));
        }
        Body::Mass(m) => {
            out.belief = Some(Num(m.belief(&ev)?));
            out.plausibility = Some(Num(m.plausibility(&ev)?));
            out.mass = Some(Num(m.mass(&ev)?));
        }
        Body::Possibility(pi) => {
            out.possibility = Some(Num(pi.possibility_of(&ev)?));
            out.necessity = Some(Num(pi.necessity_of(&ev)?));
        }
        Body::Ranking(k) => {
            out.rank = Some(k.rank_of(&ev)?);
        }
        Body::Partition(_) => {
            return Err(mismatch(
                "query",
                "probability, mass, possibility, or ocf",
                doc,
            ))
        }
    }
    Ok(Output::Query(out))
}

/// Builds the per-singleton bound rows of an envelope valuation. Rows
/// whose bounds are undefined are marked rather than failing the whole
/// command; errors other than rule undefinedness propagate.
fn envelope_rows(
    mass: &MassFunction,
    ev: &Subset,
    rule: ConditioningRule,
    tol: Tolerance,
) -> Result<Vec<ValuationRow>> {
    let valuation = match mass.condition(ev, rule, tol)? {
        Conditioned::Interval(v) => v,
        Conditioned::Mass(_) => unreachable!("envelope rules produce interval valuations"),
    };
    let frame = mass.frame();
    let mut rows = Vec::with_capacity(frame.size());
    for label in frame.labels() {
        let q = frame.singleton(label)?;
        match valuation.interval(&q, tol) {
            Ok((lower, upper)) => rows.push(ValuationRow {
                event: vec![label.clone()],
                lower: Some(Num(lower)),
                upper: Some(Num(upper)),
                undefined: false,
            }),
            Err(e) if e.category() == ErrorCategory::RuleUndefined => {
                rows.push(ValuationRow {
                    event: vec![label.clone()],
                    lower: None,
                    upper: None,
                    undefined: true,
                })
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rows)
}

/// Conditions a state on an event learned with certainty.
///
/// Rules by document kind: `bayes` (probability), `dempster`,
/// `geometric`, `upper`, `lower` (mass; the envelope rules yield
/// per-element probability bounds instead of a new state),
/// `possibilistic` (possibility), and `ocf` (ranking, with `shift`).
pub fn condition(
    doc: &KnowledgeDocument,
    on: &[String],
    rule: &str,
    shift: u64,
    tol: Tolerance,
) -> Result<Output> {
    if shift != 0 && rule != "ocf" {
        return Err(usage(format!(
            "--shift only applies to rule \"ocf\", not {rule:?}"
        )));
    }
    let ev = event(doc.frame(), on)?;
    let context = format!("rule {rule}");
    match rule {
        "bayes" => {
            let p = as_probability(doc, &context)?;
            Ok(document(Body::Probability(p.bayes_condition(&ev, tol)?)))
        }
        "dempster" => {
            let m = as_mass(doc, &context)?;
            Ok(document(Body::Mass(m.condition_dempster(&ev, tol)?)))
        }
        "geometric" => {
            let m = as_mass(doc, &context)?;
            Ok(document(Body::Mass(m.condition_geometric(&ev, tol)?)))
        }
        "upper" | "lower" => {
            let m = as_mass(doc, &context)?;
            let core_rule = if rule == "upper" {
                ConditioningRule::Upper
            } else {
                ConditioningRule::Lower
            };
            let row = envelope_rows(m, &ev, core_rule, tol)?;
            Ok(Output::Valuation(ValuationOut {
                format: FORMAT,
                kind: "valuation",
                frame: doc.frame().labels().to_vec(),
                given: labels_of(&ev),
                rule: rule.to_owned(),
                row,
            }))
        }
        "possibilistic" => {
            let pi = as_possibility(doc, &context)?;
            Ok(document(Body::Possibility(pi.condition(&ev, tol)?)))
        }
        "ocf" => {
            let k = as_ranking(doc, &context)?;
            Ok(document(Body::Ranking(k.conditionalize(&ev, shift, tol)?)))
        }
        other => Err(usage(format!(
            "unknown conditioning rule {other:?}; expected bayes, dempster, geometric, \
             upper, lower, possibilistic, or ocf"
        ))),
    }
}

/// Combines two independent states of the same kind.
///
/// Rules: `dempster` (mass functions) and `poss-min`, `poss-product`,
/// `poss-lukasiewicz` (possibility distributions, by the named
/// conjunction, renormalized).
pub fn combine(
    left: &KnowledgeDocument,
    right: &KnowledgeDocument,
    rule: &str,
    tol: Tolerance,
) -> Result<Output> {
    let context = format!("rule {rule}");
    match rule {
        "dempster" => {
            let l = as_mass(left, &context)?;
            let r = as_mass(right, &context)?;
            Ok(document(Body::Mass(l.combine_dempster(r, tol)?)))
        }
        "poss-min" | "poss-product" | "poss-lukasiewicz" => {
            let op = match rule {
                "poss-min" => ConjunctionOp::Min,
                "poss-product" => ConjunctionOp::Product,
                _ => ConjunctionOp::Lukasiewicz,
            };
            let l = as_possibility(left, &context)?;
            let r = as_possibility(right, &context)?;
            Ok(document(Body::Possibility(l.combine(r, op, tol)?)))
        }
        other => Err(usage(format!(
            "unknown combination rule {other:?}; expected dempster, poss-min, \
             poss-product, or poss-lukasiewicz"
        ))),
    }
}

/// Revises a state by an uncertain observation.
///
/// Rules: `jeffrey` (probability by a sum-normalized partition),
/// `jeffrey-ds` and `jeffrey-geometric` (mass by an observed mass
/// function), `poss-jeffrey` (possibility by an observed possibility
/// distribution), and `spohn` (possibility by a max-normalized
/// partition).
pub fn update(
    doc: &KnowledgeDocument,
    obs: &KnowledgeDocument,
    rule: &str,
    tol: Tolerance,
) -> Result<Output> {
    let context = format!("rule {rule}");
    let obs_context = format!("rule {rule} observation");
    match rule {
        "jeffrey" => {
            let p = as_probability(doc, &context)?;
            let w = as_partition(obs, &obs_context)?;
            Ok(document(Body::Probability(p.jeffrey_update(w, tol)?)))
        }
        "jeffrey-ds" => {
            let m = as_mass(doc, &context)?;
            let o = as_mass(obs, &obs_context)?;
            Ok(document(Body::Mass(m.jeffrey_update(o, tol)?)))
        }
        "jeffrey-geometric" => {
            let m = as_mass(doc, &context)?;
            let o = as_mass(obs, &obs_context)?;
            Ok(document(Body::Mass(m.jeffrey_update_geometric(o, tol)?)))
        }
        "poss-jeffrey" => {
            let pi = as_possibility(doc, &context)?;
            let o = as_possibility(obs, &obs_context)?;
            let Updated {
                distribution,
                warning,
            } = pi.jeffrey_update(o, tol)?;
            let warnings = warning.into_iter().map(|w| w.to_string()).collect();
            Ok(document_with_warnings(
                Body::Possibility(distribution),
                warnings,
            ))
        }
        "spohn" => {
            let pi = as_possibility(doc, &context)?;
            let w = as_partition(obs, &obs_context)?;
            let observation = SpohnObservation::new(w.clone())?;
            Ok(document(Body::Possibility(spohn_update(
                pi,
                &observation,
                tol,
            )?)))
        }
        other => Err(usage(format!(
            "unknown update rule {other:?}; expected jeffrey, jeffrey-ds, \
             jeffrey-geometric, poss-jeffrey, or spohn"
        ))),
    }
}

/// Translates between the graded representations: an OCF to its
/// possibility distribution (`--to possibility`) or a possibility
/// distribution whose values sit on the rank grid back to an OCF
/// (`--to ocf`).
pub fn translate(doc: &KnowledgeDocument, to: &str) -> Result<Output> {
    match to {
        "possibility" => {
            let k = as_ranking(doc, "translate --to possibility")?;
            Ok(document(Body::Possibility(k.to_possibility())))
        }
        "ocf" => {
            let pi = as_possibility(doc, "translate --to ocf")?;
            Ok(document(Body::Ranking(Ocf::from_possibility(pi)?)))
        }
        other => Err(usage(format!(
            "unknown translation target {other:?}; expected possibility or ocf"
        ))),
    }
}

/// Runs both partition-update rules — the ranking-theoretic one and the
/// possibilistic Jeffrey one — on the same prior and observation and
/// reports the posteriors side by side with their pointwise drift.
///
/// The prior may be a possibility document or an OCF document (the
/// latter is translated first); the observation must be a max-normalized
/// partition.
pub fn compare(
    doc: &KnowledgeDocument,
    obs: &KnowledgeDocument,
    tol: Tolerance,
) -> Result<Output> {
    let w = as_partition(obs, "compare observation")?;
    let observation = SpohnObservation::new(w.clone())?;
    let comparison = match &doc.body {
        Body::Possibility(pi) => compare_rules(pi, &observation, tol)?,
        Body::Ranking(k) => k.compare_rules(&observation, tol)?,
        _ => return Err(mismatch("compare", "possibility or ocf", doc)),
    };
    let RuleComparison {
        spohn,
        possibilistic,
        possibilistic_warning,
        pointwise_diff: _,
        max_abs_diff,
        observation_dominates_prior,
        prior_dominates_observation,
        cores_overlap,
    } = comparison;
    let frame = doc.frame();
    let meta = possibilistic_warning.map(|w| RawMeta {
        warnings: vec![format!("possibilistic posterior: {w}")],
    });
    Ok(Output::Comparison(ComparisonOut {
        format: FORMAT,
        kind: "comparison",
        frame: frame.labels().to_vec(),
        max_abs_diff: Num(max_abs_diff),
        observation_dominates_prior,
        prior_dominates_observation,
        cores_overlap,
        spohn: value_table(frame, spohn.values()),
        possibilistic: value_table(frame, possibilistic.values()),
        meta,
    }))
}

fn step_param<'a, T>(
    pipe: &Pipeline,
    step: &RawStep,
    param: &str,
    value: Option<&'a T>,
) -> Result<&'a T> {
    value.ok_or_else(|| CliError::Validation {
        path: pipe.origin.clone(),
        message: format!("op {:?} needs {param}", step.op),
    })
}

fn load_step_doc(pipe: &Pipeline, path: &std::path::Path) -> Result<KnowledgeDocument> {
    KnowledgeDocument::load(&pipe.base_dir.join(path))
}

/// Applies one pipeline step to a state, returning the next state with
/// only the warnings this step itself raised.
fn apply_step(
    state: &KnowledgeDocument,
    step: &RawStep,
    pipe: &Pipeline,
    tol: Tolerance,
) -> Result<KnowledgeDocument> {
    let op = step.op.as_str();
    let context = format!("op {op}");
    let on = || -> Result<Subset> {
        let labels = step_param(pipe, step, "on = [...]", step.on.as_ref())?;
        event(state.frame(), labels)
    };
    let with_doc = || -> Result<KnowledgeDocument> {
        let path = step_param(pipe, step, "with = \"...\"", step.with.as_ref())?;
        load_step_doc(pipe, path)
    };
    let obs_doc = || -> Result<KnowledgeDocument> {
        let path = step_param(pipe, step, "observation = \"...\"", step.observation.as_ref())?;
        load_step_doc(pipe, path)
    };

    let next = match op {
        "bayes_condition" => {
            let p = as_probability(state, &context)?;
            KnowledgeDocument::new(Body::Probability(p.bayes_condition(&on()?, tol)?))
        }
        "jeffrey_update" => {
            let p = as_probability(state, &context)?;
            let obs = obs_doc()?;
            let w = as_partition(&obs, &context)?;
            KnowledgeDocument::new(Body::Probability(p.jeffrey_update(w, tol)?))
        }
        "dempster_condition" => {
            let m = as_mass(state, &context)?;
            KnowledgeDocument::new(Body::Mass(m.condition_dempster(&on()?, tol)?))
        }
        "geometric_condition" => {
            let m = as_mass(state, &context)?;
            KnowledgeDocument::new(Body::Mass(m.condition_geometric(&on()?, tol)?))
        }
        "dempster_combine" => {
            let m = as_mass(state, &context)?;
            let other = with_doc()?;
            let o = as_mass(&other, &context)?;
            KnowledgeDocument::new(Body::Mass(m.combine_dempster(o, tol)?))
        }
        "jeffrey_ds_update" => {
            let m = as_mass(state, &context)?;
            let obs = obs_doc()?;
            let o = as_mass(&obs, &context)?;
            KnowledgeDocument::new(Body::Mass(m.jeffrey_update(o, tol)?))
        }
        "jeffrey_geometric_update" => {
            let m = as_mass(state, &context)?;
            let obs = obs_doc()?;
            let o = as_mass(&obs, &context)?;
            KnowledgeDocument::new(Body::Mass(m.jeffrey_update_geometric(o, tol)?))
        }
        "poss_condition" => {
            let pi = as_possibility(state, &context)?;
            KnowledgeDocument::new(Body::Possibility(pi.condition(&on()?, tol)?))
        }
        "poss_combine" => {
            let pi = as_possibility(state, &context)?;
            let conj = match step.rule.as_deref() {
                None | Some("min") => ConjunctionOp::Min,
                Some("product") => ConjunctionOp::Product,
                Some("lukasiewicz") => ConjunctionOp::Lukasiewicz,
                Some(other) => {
                    return Err(CliError::Validation {
                        path: pipe.origin.clone(),
                        message: format!(
                            "unknown conjunction {other:?}; expected min, product, or lukasiewicz"
                        ),
                    })
                }
            };
            let other = with_doc()?;
            let o = as_possibility(&other, &context)?;
            KnowledgeDocument::new(Body::Possibility(pi.combine(o, conj, tol)?))
        }
        "poss_jeffrey_update" => {
            let pi = as_possibility(state, &context)?;
            let obs = obs_doc()?;
            let o = as_possibility(&obs, &context)?;
            let Updated {
                distribution,
                warning,
            } = pi.jeffrey_update(o, tol)?;
            KnowledgeDocument {
                body: Body::Possibility(distribution),
                warnings: warning.into_iter().map(|w| w.to_string()).collect(),
            }
        }
        "spohn_update" => {
            let pi = as_possibility(state, &context)?;
            let obs = obs_doc()?;
            let w = as_partition(&obs, &context)?;
            let observation = SpohnObservation::new(w.clone())?;
            KnowledgeDocument::new(Body::Possibility(spohn_update(pi, &observation, tol)?))
        }
        "ocf_conditionalize" => {
            let k = as_ranking(state, &context)?;
            let shift = step.shift.unwrap_or(0);
            KnowledgeDocument::new(Body::Ranking(k.conditionalize(&on()?, shift, tol)?))
        }
        "ocf_to_possibility" => {
            let k = as_ranking(state, &context)?;
            KnowledgeDocument::new(Body::Possibility(k.to_possibility()))
        }
        "possibility_to_ocf" => {
            let pi = as_possibility(state, &context)?;
            KnowledgeDocument::new(Body::Ranking(Ocf::from_possibility(pi)?))
        }
        other => {
            return Err(CliError::Validation {
                path: pipe.origin.clone(),
                message: format!(
                    "unknown op {other:?}; see the pipeline section of the documentation \
                     for the recognized operations"
                ),
            })
        }
    };
    Ok(next)
}

/// Runs a pipeline from an initial state, threading the state through
/// the steps in order. A failing step aborts the run, wrapped in
/// [`CliError::Step`] with its one-based index. Warnings raised along
/// the way are carried into the final document, prefixed with the step
/// that raised them.
pub fn run_pipeline(
    initial: KnowledgeDocument,
    pipe: &Pipeline,
    tol: Tolerance,
) -> Result<KnowledgeDocument> {
    let mut warnings = initial.warnings.clone();
    let mut state = initial;
    for (i, step) in pipe.steps.iter().enumerate() {
        let index = i + 1;
        let next = apply_step(&state, step, pipe, tol).map_err(|e| CliError::Step {
            index,
            op: step.op.clone(),
            source: Box::new(e),
        })?;
        warnings.extend(
            next.warnings
                .iter()
                .map(|w| format!("step {index} ({}): {w}", step.op)),
        );
        state = KnowledgeDocument::new(next.body);
    }
    Ok(KnowledgeDocument {
        body: state.body,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::doc::RawDocument;

    fn doc_from(text: &str) -> KnowledgeDocument {
        KnowledgeDocument::from_toml_str(text, Path::new("test.toml")).unwrap()
    }

    fn mass_doc() -> KnowledgeDocument {
        doc_from(
            r#"
            format = 1
            kind = "mass"
            frame = ["a", "b", "c"]
            [[focal]]
            subset = ["a", "b"]
            mass = 0.6
            [[focal]]
            subset = ["c"]
            mass = 0.4
            "#,
        )
    }

    #[test]
    fn query_reports_the_kind_specific_values() {
        let out = query(&mass_doc(), &["a".into(), "b".into()]).unwrap();
        let Output::Query(q) = out else {
            panic!("expected a query output");
        };
        assert_eq!(q.belief.unwrap().0, 0.6);
        assert_eq!(q.plausibility.unwrap().0, 0.6);
        assert_eq!(q.mass.unwrap().0, 0.6);
        assert!(q.probability.is_none());
    }

    #[test]
    fn conditioning_rules_check_the_document_kind() {
        let err = condition(
            &mass_doc(),
            &["a".into()],
            "bayes",
            0,
            Tolerance::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("expected a probability document"));
        assert_eq!(err.exit_code(), crate::error::EXIT_INVALID);
    }

    #[test]
    fn unknown_rules_are_usage_errors() {
        let err = condition(
            &mass_doc(),
            &["a".into()],
            "osmosis",
            0,
            Tolerance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Usage { .. }));
        assert!(err.to_string().contains("osmosis"));
    }

    #[test]
    fn shift_is_rejected_outside_the_ranked_rule() {
        let err = condition(
            &mass_doc(),
            &["a".into()],
            "dempster",
            3,
            Tolerance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Usage { .. }));
    }

    #[test]
    fn envelope_conditioning_yields_bounds_per_element() {
        let out = condition(
            &mass_doc(),
            &["a".into(), "c".into()],
            "upper",
            0,
            Tolerance::default(),
        )
        .unwrap();
        let Output::Valuation(v) = out else {
            panic!("expected a valuation output");
        };
        assert_eq!(v.row.len(), 3);
        assert_eq!(v.rule, "upper");
        // b is ruled out by the conditioning event.
        let b_row = &v.row[1];
        assert_eq!(b_row.event, vec!["b".to_owned()]);
        assert_eq!(b_row.upper.unwrap().0, 0.0);
    }

    #[test]
    fn documents_round_trip_through_output() {
        let out = condition(
            &mass_doc(),
            &["a".into(), "b".into()],
            "dempster",
            0,
            Tolerance::default(),
        )
        .unwrap();
        let text = out.to_toml();
        let reloaded = KnowledgeDocument::from_toml_str(&text, Path::new("out.toml")).unwrap();
        let raw: RawDocument = toml::from_str(&text).unwrap();
        assert_eq!(raw.kind, "mass");
        assert_eq!(reloaded.kind(), crate::doc::Kind::Mass);
    }
}
