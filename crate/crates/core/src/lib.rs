//! Core algorithms for training-data curation pipelines.
//!
//! This crate is `no_std` (alloc required) and contains no I/O: every function
//! here is a pure transformation over in-memory values, so the same code can
//! run inside a CLI, a service, or an embedded scoring harness. File formats,
//! manifests, and the `curate` command line live in the companion crate.
//!
//! The major pieces:
//!
//! - [`model`] — the sample/message data model shared by every stage.
//! - [`code`] — staged code-corpus refinement: language identification,
//!   education scoring, file-level noise filtering, syntactic executability
//!   checking, difficulty and task labeling, distribution reporting.
//! - [`math`] — three-axis math tagging, grid distributions, and gap-filling
//!   synthesis planning.
//! - [`quality`] — the binary judge contract, Pass/Review/Reject triage, and
//!   judge-vs-gold agreement metrics.
//! - [`style`] — response-structure statistics and before/after deltas.
//! - [`pack`] / [`blend`] / [`curriculum`] — best-fit-decreasing sequence
//!   packing, mixture-controlled batch blending, difficulty scoring and
//!   curriculum selection.
//! - [`merge`] — linear checkpoint merging over named tensors.
//! - [`reward`] — shared penalties and verifiable accuracy rewards.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod blend;
pub mod code;
pub mod curriculum;
pub mod math;
pub mod merge;
pub mod model;
pub mod pack;
pub mod quality;
pub mod reward;
pub mod style;

pub use model::{DropLog, Message, MetaMap, MetaValue, Role, Sample, Stage};
