//! Finite combinatorics of free and open projective planes.
//!
//! The crate works with partial planes: two-sorted incidence structures
//! in which two points lie on at most one common line and two lines meet
//! in at most one common point. On top of that it provides
//!
//! * staged free completions and the base configurations `pi_base(n)`,
//! * openness testing by peeling, hyper-free orderings, ranks and
//!   ordering counts,
//! * digraphs of hyper-free orderings with closures and distances,
//! * free, canonical and primitive amalgams,
//! * the superstability gadget, coded chains, c-gadgets and tree
//!   digraphs,
//! * deterministic isomorphism search with pinning,
//! * seeded random generators and JSON documents for all of the above.
//!
//! Everything is deterministic: iteration follows element indices, maps
//! are ordered, and random generators take explicit seeds.

pub mod amalgam;
pub mod catalog;
pub mod completion;
pub mod digraph;
pub mod error;
pub mod gadgets;
pub mod iso;
pub mod json;
pub mod openness;
pub mod plane;
pub mod random;

pub use error::{Axiom, PlaneError, Result};
pub use plane::{ElementId, PartialPlane, PlaneBuilder, Sort};

/// Default cap on elements materialized by completions and gadget builders.
pub const DEFAULT_ELEMENT_BUDGET: usize = 100_000;

/// Default cap on backtracking nodes per isomorphism search.
pub const DEFAULT_ISO_BUDGET: usize = 64;
