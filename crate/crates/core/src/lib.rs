//! Core library for the criminal-justice AI tool atlas.
//!
//! * [`taxonomy`] parses, prints and normalizes classification descriptors.
//! * [`compose`] decides whether one tool's outputs can feed another's inputs.
//! * [`registry`] stores validated tool records and moderates change requests.
//! * [`analytics`] computes per-stage tables, percentage shares and the map.

pub mod analytics;
pub mod compose;
pub mod registry;
pub mod taxonomy;

pub use taxonomy::{parse_classification, print_classification, Classification};
