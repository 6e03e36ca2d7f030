//! Command-line companion to [`credo_core`]: a TOML document format for
//! belief states, canonical rendering, and the operations behind the
//! `credo` binary.
//!
//! The library half of the crate is organized as:
//!
//! - [`doc`] — the document model: parsing, validation, and the mapping
//!   between TOML documents and the typed states of the core library;
//! - [`render`] — canonical TOML and JSON emission with a pinned number
//!   format, so equal states produce byte-identical documents;
//! - [`ops`] — the operations the binary exposes: query, condition,
//!   combine, update, translate, compare, and pipelines;
//! - [`error`] — the failure classes and their process exit codes.

pub mod doc;
pub mod error;
pub mod ops;
pub mod render;

pub use doc::{Body, Kind, KnowledgeDocument, Num, Pipeline, RawDocument, FORMAT};
pub use error::{
    CliError, Result, EXIT_INVALID, EXIT_IO, EXIT_SUITE_FAILED, EXIT_UNDEFINED,
};
pub use ops::Output;
