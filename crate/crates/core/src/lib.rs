//! Core data model and algorithms for TCP-nets: CP-nets extended with
//! unconditional and conditional relative importance between variables.
//!
//! - [`model`]: nets, outcomes, partial assignments and hard constraints.
//! - [`consistency`]: conditional acyclicity with certificates and witnesses.
//! - [`semantics`]: improving flips, dominance and the brute-force oracle.
//! - [`optimize`]: constraint propagation, reduction and the optimal-outcome
//!   search.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod consistency;
pub mod fixtures;
pub mod graph;
pub mod model;
pub mod optimize;
pub mod random;
pub mod semantics;

pub use consistency::{check_consistency, is_conditionally_acyclic, ConsistencyConfig, ConsistencyVerdict};
pub use model::{
    ArcKind, ConstraintSet, ModelError, NetDraft, Outcome, PartialAssignment, TcpNet, ValidationReport, VarId,
};
pub use optimize::{search, OptimizeError, SearchConfig, SearchEvent, SearchMode, SearchReport};
pub use semantics::{dominates, improving_neighbors, Flip, FlipKind, FlippingSequence};
