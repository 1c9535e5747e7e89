//! Relative-decoherence toolkit.
//!
//! Composite pure and mixed states over tensor-factored Hilbert spaces,
//! beable-labelled branch decompositions, conditional subsystem states,
//! Monte-Carlo sampling of beable values into subensembles, coherence
//! witnesses for the interference between branches, and a declarative
//! scenario runner that moves the object/subject cut around a composite
//! state.
//!
//! All numerics are dense and double precision; total Hilbert-space
//! dimension is capped at [`MAX_DIM`].

pub mod engine;
mod error;
pub mod layout;
pub mod linalg;
pub mod operator;
pub mod qstate;
pub mod rng;
pub mod scenario;
pub mod schema;
pub mod state;
pub mod witness;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use error::{Error, Result};
pub use layout::SubsystemLayout;
pub use linalg::C64;
pub use operator::{BeableObservable, LocalOperator, Observable, Projector};
pub use state::{DensityOperator, Ket, QuantumState};

/// Tolerance for every algebraic identity (norms, traces, Hermiticity,
/// idempotence, reconstruction).
pub const TAU_ALG: f64 = 1e-10;

/// Branch weights at or below this value are treated as non-occurring.
pub const TAU_BRANCH: f64 = 1e-12;

/// Largest total Hilbert-space dimension accepted anywhere.
pub const MAX_DIM: usize = 4096;

/// Version tag written into every serialized report and expected in specs.
pub const SCHEMA_VERSION: u32 = 1;
