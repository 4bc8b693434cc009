//! Thinning perfect, Laver, Miller and Silver conditions along a coloring of
//! block indices, and certifying that differently colored thinnings are
//! incompatible.

mod antichain;
mod certificate;
mod laver;
mod plan;
mod sacks;
mod silver;

use thiserror::Error;

use crate::baire::BaireError;
use crate::trees::{Node, TreeError};

pub use antichain::{antichain_build, branching_antichain, silver_antichain, Antichain, AntichainMember, PairCertificate};
pub use certificate::{ForcingKind, IncompatibilityCertificate, SharedSplit};
pub use laver::{
    branching_good_blocks, branching_incompatibility, branching_thin, laver_extract_x0, laver_incompatibility, laver_thin,
    laver_weakly_obeys_at, miller_incompatibility, miller_thin, BranchingKind, Horizon, LaverThin,
};
pub use plan::{
    divergence_index, divergence_level, ev_diff_family, split_permitted, Coloring, LowPolicy, ThinPlan,
};
pub use sacks::{good_blocks, sacks_incompatibility, sacks_thin, sacks_weakly_obeys_at, Obedience, ObeyWitness, SacksThin};
pub use silver::{
    silver_good_blocks, silver_incompatibility, silver_thin, silver_to_tree, silver_tree, PermitMask, SilverCondition, SilverTree,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("coloring undefined at block index {i}")]
    ColoringUndefined { i: u32 },
    #[error("coloring value {value} at block index {i} is not below 2^{i}")]
    ColoringOutOfRange { i: u32, value: u64 },
    #[error("enforced block indices must be strictly increasing")]
    EnforcedNotSorted,
    #[error("block {i} is not good for the tree")]
    NotGood { i: u32 },
    #[error("tree {index} has no good block")]
    NoGoodBlocks { index: usize },
    #[error("node {node} has no successor in the designated sub-block of block {block}")]
    EnforcementImpossible { node: Node, block: u32 },
    #[error("no ω-branching node within depth {depth}")]
    NoInfiniteBranching { depth: usize },
    #[error("value bound {value_bound} exhausted before a second element")]
    BoundExhausted { value_bound: u64 },
    #[error("horizon {depth} does not exceed divergence {divergence_level}")]
    HorizonTooShort { depth: usize, divergence_level: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Enumeration(#[from] BaireError),
}
