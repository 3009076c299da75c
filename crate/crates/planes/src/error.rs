use thiserror::Error;

use crate::plane::Sort;

/// Which incidence axiom a configuration violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// Two distinct points lie on at most one common line.
    A,
    /// Two distinct lines meet in at most one common point.
    B,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axiom::A => write!(f, "A"),
            Axiom::B => write!(f, "B"),
        }
    }
}

#[derive(Debug, Error)]
pub enum PlaneError {
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("incidence endpoint {0:?} is not a declared element")]
    UnknownEndpoint(String),

    #[error("unknown element {0:?}")]
    UnknownElement(String),

    #[error("element {label:?} has the wrong sort, expected {expected:?}")]
    WrongSort { label: String, expected: Sort },

    #[error("axiom {axiom} violated: {first:?} and {second:?} are both incident with {third:?} and {fourth:?}")]
    AxiomViolation {
        axiom: Axiom,
        first: String,
        second: String,
        third: String,
        fourth: String,
    },

    #[error("element budget exceeded: limit {limit}, at least {needed} required")]
    BudgetExceeded { limit: usize, needed: usize },

    #[error("rank {0} is not admissible, the smallest free plane has rank 4")]
    InvalidRank(u32),

    #[error("plane is not open: confined core of {core_size} elements remains")]
    NotOpen { core_size: usize },

    #[error("sequence is not a permutation of the non-base elements: {0}")]
    NotPermutation(String),

    #[error("element {label:?} at position {position} has {count} incidences with the base and its predecessors")]
    HfViolation {
        label: String,
        position: usize,
        count: usize,
    },

    #[error("digraph edge from {from:?} into base element {to:?}")]
    EdgeIntoBase { from: String, to: String },

    #[error("digraph edges of {label:?} do not cover its incidences: {detail}")]
    CoverageMismatch { label: String, detail: String },

    #[error("element {label:?} has in-degree {count}, at most 2 is allowed")]
    InDegreeExceeded { label: String, count: usize },

    #[error("edges in both directions between {0:?} and {1:?}")]
    AntisymmetryViolation(String, String),

    #[error("set contains base element {0:?}")]
    BaseElementInSet(String),

    #[error("set is not closed under predecessors: {0}")]
    NotClosed(String),

    #[error("shared part mismatch: {0}")]
    OverlapMismatch(String),

    #[error("extension is not primitive: {0}")]
    NotPrimitive(String),

    #[error("configuration is not hyper-free over the base: {0}")]
    NotHfOver(String),

    #[error("gadget base is not independent: {0}")]
    BaseNotIndependent(String),

    #[error("invalid gadget parameter: {0}")]
    InvalidGadget(String),

    #[error("invalid pinned pair: {0}")]
    InvalidPinned(String),

    #[error("invalid document: {0}")]
    InvalidDocument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PlaneError>;
