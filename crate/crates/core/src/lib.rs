//! Procedural building levels from a building construction grammar.
//!
//! The pipeline runs rule file → [`grammar::Grammar`] → element sequence
//! ([`derive`]) → [`derive::BuildingPlan`] → styled models ([`style`]) →
//! positioned blocks ([`layout`]) → JSON / XML / SVG ([`emit`]).
//! [`enumerate`] counts the level space of a rule-set bundle.

pub mod cli;
pub mod derive;
pub mod element;
pub mod emit;
pub mod enumerate;
pub mod fixed;
pub mod grammar;
pub mod layout;
pub mod rng;
pub mod style;

pub use element::{Element, Part};

/// Written into level metadata.
pub const GENERATOR: &str = concat!("bcg ", env!("CARGO_PKG_VERSION"));
