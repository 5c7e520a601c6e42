//! Resonant triads of rotating Euler flows on periodic lattices: lattice
//! search, the rigid-body resonant systems, their conservation laws and the
//! closed-form period and burst bounds.

pub mod cli;
pub mod closed_form;
pub mod dynamics;
pub mod error;
pub mod invariants;
pub mod lattice;

pub use error::{Error, Result};

/// Version tag carried by every serialized artifact.
pub const SCHEMA_VERSION: &str = "v1";
