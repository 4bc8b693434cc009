//! Finite, checkable tree combinatorics for Sacks-style forcing arguments:
//! perfect-tree surgery, the finite-condition poset of skew trees, and the
//! assignment of names over a finite poset.

pub mod baire;
pub mod namecraft;
pub mod qforcing;
pub mod registry;
pub mod scenario;
pub mod surgery;
pub mod trees;
