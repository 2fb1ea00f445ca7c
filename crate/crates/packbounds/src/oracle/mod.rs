//! Brute-force ground-truth engines.
//!
//! Everything in this module trades speed for being obviously correct at
//! desk scale: dual-feasibility checking by exhaustive multiset search,
//! exact packability of tiny instances by backtracking over canonical
//! coordinates, exact knapsacks, packing-class validation, and maximum
//! clique. The bound computations elsewhere in the crate are tested against
//! these oracles; the oracles refuse inputs beyond their guards rather than
//! ever returning a wrong answer.

mod dff_check;
mod knapsack;
mod pack;
mod packing_class;

pub use dff_check::{check_dff, check_fn, DffVerdict};
pub use knapsack::{knapsack, knapsack_max_weight, MaxWeight, DP_DENOM_LIMIT, EXACT_ENUM_LIMIT};
pub use pack::{
    exact_bin_count, exact_okp_value, exact_packable, exact_packable_with_limit, find_packing,
    DEFAULT_PACK_LIMIT,
};
pub use packing_class::{
    max_clique, packing_class_exists, packing_class_exists_containing,
    packing_class_from_placement, validate_packing_class, ClassVerdict, PackingClass,
};

use crate::dff::DffError;
use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what}: {got} exceeds the oracle limit {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("max_denominator must be at least 2")]
    BadMaxDenominator,
    #[error("forced item `{id}` alone exceeds the capacity")]
    ForcedExceedsCapacity { id: String },
    #[error("box `{id}` has no value")]
    MissingValue { id: String },
    #[error("unknown box id `{id}`")]
    UnknownId { id: String },
    #[error("edge endpoints must differ: `{id}`")]
    SelfEdge { id: String },
    #[error("packing class covers {got} dimensions, instance has {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("placement lists {got} positions for {expected} boxes")]
    PlacementMismatch { expected: usize, got: usize },
    #[error("vertex {v} out of range")]
    BadVertex { v: usize },
    #[error(transparent)]
    Dff(#[from] DffError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
