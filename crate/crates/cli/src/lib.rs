//! Declarative model documents and check suites for `groupoidal-core`.
//!
//! A model document is a JSON object describing a discrete groupoid, an
//! optional cocycle, measure, named elements and a unitary. [`parse_model`]
//! validates it (reporting every schema error with its path) and
//! [`run_suite`] executes a named suite into a [`SuiteReport`].

pub mod document;
pub mod report;
pub mod suites;

pub use document::{parse_model, Document, Regime, Scalar, SchemaError};
pub use report::{Check, Status, SuiteReport};
pub use suites::{run_suite, RunOptions, Suite};

/// Version of the model and report schemas.
pub const SCHEMA_VERSION: u64 = 1;
