//! Two-level thimac modeling.
//!
//! The static level is a timeless potentiality graph: thimacs owning
//! generic actions, connected by flow and trigger arcs, with named event
//! regions. The dynamic level binds those regions to discrete time slots:
//! an event is either Potential or Actual at every slot, and stopping an
//! event is potentialization (a return to the static level), never a
//! third negated state.
//!
//! Crate layout:
//!
//! - [`model`] — the metamodel and its integrity-checked builder
//! - [`dsl`] — `.tm` / `.tms` parsing and canonical serialization
//! - [`validate`] — well-formedness rules V1..V6 beyond referential
//!   integrity
//! - [`regions`] — enumeration of connected induced subdiagrams
//! - [`dynamics`] — the slot engine: trigger lifting, stepping, traces
//! - [`behavior`] — occurrences, the chronology graph, and the P/A table
//!
//! With the default `parallel` feature, region enumeration and batch
//! scenario runs use rayon; disabling it falls back to equivalent
//! sequential code.

pub mod behavior;
pub mod diag;
pub mod dsl;
pub mod dynamics;
pub mod model;
pub mod regions;
pub mod validate;

pub use diag::{Diagnostic, Severity, SourceSpan};
pub use dsl::{parse_model, parse_scenario, resolve_path, write_model, ScenarioScript};
pub use dynamics::{run_scenario, Trace};
pub use model::{ActionKind, EventKind, ModelBuilder, Polarity, StaticModel};
pub use validate::{validate, validate_with, ValidationReport};
