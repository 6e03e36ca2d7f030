//! `credo` — inspect and revise belief states from the command line.
//!
//! States live in small TOML documents (probability measures, mass
//! functions, possibility distributions, ordinal conditional functions,
//! and weighted partitions used as observations). Every subcommand
//! reads documents, applies one of the library's rules, and writes a
//! canonical TOML (or, with `--json`, JSON) result to standard output
//! or `--output`.
//!
//! Exit codes: 0 success, 1 failed check suite, 2 usage errors caught
//! by the argument parser, 3 malformed or invalid input, 4 a rule that
//! is undefined on the given input, 5 filesystem problems.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use credo_core::compare::{self, Coincidence};
use credo_core::Tolerance;

use credo_cli::doc::{KnowledgeDocument, Num, Pipeline};
use credo_cli::error::{CliError, Result, EXIT_SUITE_FAILED};
use credo_cli::ops::{self, Output};
use credo_cli::render::{to_json, SuiteRow};

#[derive(Parser)]
#[command(name = "credo", version, about = "Belief states: query, revise, cross-check")]
struct Cli {
    /// Emit JSON instead of TOML.
    #[arg(long, global = true)]
    json: bool,

    /// Numeric tolerance for definedness tests (default 1e-9).
    #[arg(long, global = true, value_name = "EPS")]
    tolerance: Option<f64>,

    /// Write the result to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one event against a state document.
    Query {
        /// The state document.
        doc: PathBuf,
        /// Comma-separated element labels of the event.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        event: Vec<String>,
    },

    /// Condition a state on an event learned with certainty.
    Condition {
        /// The state document.
        doc: PathBuf,
        /// Comma-separated element labels of the conditioning event.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        on: Vec<String>,
        /// Conditioning rule: bayes, dempster, geometric, upper, lower,
        /// possibilistic, or ocf.
        #[arg(long)]
        rule: String,
        /// Rank shift for rule ocf: how firmly the event is accepted.
        #[arg(long, default_value_t = 0)]
        shift: u64,
    },

    /// Combine two independent states of the same kind.
    Combine {
        /// The first state document.
        left: PathBuf,
        /// The second state document.
        right: PathBuf,
        /// Combination rule: dempster, poss-min, poss-product, or
        /// poss-lukasiewicz.
        #[arg(long)]
        rule: String,
    },

    /// Revise a state by an uncertain observation document.
    Update {
        /// The state document.
        doc: PathBuf,
        /// The observation document.
        #[arg(long)]
        obs: PathBuf,
        /// Update rule: jeffrey, jeffrey-ds, jeffrey-geometric,
        /// poss-jeffrey, or spohn.
        #[arg(long)]
        rule: String,
    },

    /// Translate between possibility distributions and OCFs.
    Translate {
        /// The state document.
        doc: PathBuf,
        /// Target representation: possibility or ocf.
        #[arg(long)]
        to: String,
    },

    /// Run both partition-update rules side by side and report drift.
    Compare {
        /// The prior: a possibility or ocf document.
        doc: PathBuf,
        /// The observation: a max-normalized partition document.
        #[arg(long)]
        obs: PathBuf,
    },

    /// Apply a pipeline document's steps to a state document.
    Pipeline {
        /// The initial state document.
        doc: PathBuf,
        /// The pipeline document.
        pipeline: PathBuf,
    },

    /// Run the built-in cross-validation suite of rule coincidences.
    Suite {
        /// Run a single named check instead of the whole suite.
        #[arg(long)]
        name: Option<String>,
        /// Seed for the deterministic instance generators.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let tol = cli.tolerance.map(Tolerance::new).unwrap_or_default();
    let rendered = match &cli.command {
        Command::Query { doc, event } => {
            let doc = KnowledgeDocument::load(doc)?;
            render(&ops::query(&doc, event)?, cli.json)
        }
        Command::Condition {
            doc,
            on,
            rule,
            shift,
        } => {
            let doc = KnowledgeDocument::load(doc)?;
            render(&ops::condition(&doc, on, rule, *shift, tol)?, cli.json)
        }
        Command::Combine { left, right, rule } => {
            let left = KnowledgeDocument::load(left)?;
            let right = KnowledgeDocument::load(right)?;
            render(&ops::combine(&left, &right, rule, tol)?, cli.json)
        }
        Command::Update { doc, obs, rule } => {
            let doc = KnowledgeDocument::load(doc)?;
            let obs = KnowledgeDocument::load(obs)?;
            render(&ops::update(&doc, &obs, rule, tol)?, cli.json)
        }
        Command::Translate { doc, to } => {
            let doc = KnowledgeDocument::load(doc)?;
            render(&ops::translate(&doc, to)?, cli.json)
        }
        Command::Compare { doc, obs } => {
            let doc = KnowledgeDocument::load(doc)?;
            let obs = KnowledgeDocument::load(obs)?;
            render(&ops::compare(&doc, &obs, tol)?, cli.json)
        }
        Command::Pipeline { doc, pipeline } => {
            let doc = KnowledgeDocument::load(doc)?;
            let pipeline = Pipeline::load(pipeline)?;
            let result = ops::run_pipeline(doc, &pipeline, tol)?;
            render(&Output::Document(result), cli.json)
        }
        Command::Suite { name, seed } => {
            let reports = match name {
                Some(name) => vec![compare::run(
                    &Coincidence::from_name(name)?.default_spec(),
                    *seed,
                )?],
                None => compare::run_suite(*seed)?,
            };
            let failed = reports.iter().any(|r| !r.passed);
            let text = if cli.json {
                let rows: Vec<SuiteRow> = reports
                    .iter()
                    .map(|r| SuiteRow {
                        name: r.name.to_owned(),
                        family: r.family.to_owned(),
                        instances: r.instances,
                        failures: r.failures,
                        max_deviation: Num(r.max_deviation),
                        tolerance: Num(r.tolerance),
                        passed: r.passed,
                    })
                    .collect();
                to_json(&rows)
            } else {
                let mut text = String::new();
                for report in &reports {
                    text.push_str(&report.to_string());
                    text.push('\n');
                    if let Some(witness) = &report.witness {
                        text.push_str(&format!(
                            "  worst instance {}: {}\n",
                            witness.index, witness.detail
                        ));
                    }
                }
                text
            };
            emit(&text, &cli.output)?;
            return Ok(if failed { EXIT_SUITE_FAILED } else { 0 });
        }
    };
    emit(&rendered, &cli.output)?;
    Ok(0)
}

fn render(output: &Output, json: bool) -> String {
    if json {
        output.to_json()
    } else {
        output.to_toml()
    }
}

fn emit(text: &str, output: &Option<PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
