//! Tree representations and the structural predicates on them.

mod dot;
mod finite;
mod fusion;
mod lazy;
mod node;
pub mod oracles;
mod walk;

use thiserror::Error;

use crate::baire::BaireError;

pub use dot::{to_dot, DotOptions};
pub use finite::{BelowMode, FiniteTree, LeqMode};
pub use fusion::{stabilized_fusion, FusionReport, RankStability};
pub use lazy::{LazyTree, Oracle, SplittingBound, Successors};
pub use node::{Node, Width};
pub use walk::{walk_levels, ClassKey, ClassRep, Meet, TreeView};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {node} has a prefix missing from the tree")]
    NotPrefixClosed { node: Node },
    #[error("tree does not contain the root")]
    MissingRoot,
    #[error("node {node} has an entry outside the alphabet")]
    WidthViolation { node: Node },
    #[error("node {node} is not in the tree")]
    NotInTree { node: Node },
    #[error("node {node} is not a ramification point")]
    NotRamification { node: Node },
    #[error("level {level} must exceed the length of {node}")]
    BadLevel { node: Node, level: usize },
    #[error("ω-branching tree queried without a value bound")]
    MissingValueBound,
    #[error("dead end at {node}")]
    DeadEnd { node: Node },
    #[error("no split within {gap} levels above {node}")]
    NotPerfect { node: Node, gap: u64 },
    #[error("splitting bound must be monotone and at least 1")]
    InvalidBound,
    #[error("fusion chain breaks at index {index}: ≤_{index} fails")]
    FusionBroken { index: usize },
    #[error("{0}")]
    Oracle(String),
    #[error("widths differ")]
    WidthMismatch,
    #[error(transparent)]
    Enumeration(#[from] BaireError),
}
