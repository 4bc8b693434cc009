//! Serializable references to trees and their resolution to lazy trees.
//!
//! A reference is either a name (`"full-binary"`, `"leftmost"`,
//! `"omega-full"`, `"omega-leftmost"`, `"cone:01"`, or a name defined in the
//! registry) or an inline specification. Resolving the same reference twice
//! through one [`Registry`] yields trees sharing one oracle, so restrictions
//! of them are recognized as such.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baire::EnumeratedSet;
use crate::surgery::{
    branching_thin, sacks_thin, silver_tree, BranchingKind, Horizon, SilverCondition, SurgeryError, ThinPlan,
};
use crate::trees::oracles::{Explicit, FullBinary, Leftmost, OmegaLevels, PatternTree, SplitLevels};
use crate::trees::{
    ClassKey, FiniteTree, LazyTree, Meet, Node, Oracle, Successors, TreeError, TreeView, Width,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeRef {
    Name(String),
    Spec(Box<TreeSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TreeSpec {
    Explicit(FiniteTree),
    Cone {
        base: TreeRef,
        at: Node,
    },
    SplitLevels(EnumeratedSet),
    Pattern(PatternTree),
    OmegaLevels {
        levels: EnumeratedSet,
        successors: EnumeratedSet,
    },
    Thinned {
        base: TreeRef,
        plan: ThinPlan,
    },
    LaverThinned {
        base: TreeRef,
        plan: ThinPlan,
        mode: BranchingKind,
        horizon: Horizon,
    },
    Silver(SilverCondition),
    Intersection {
        left: TreeRef,
        right: TreeRef,
    },
}

impl TreeRef {
    pub fn spec(spec: TreeSpec) -> Self {
        TreeRef::Spec(Box::new(spec))
    }

    pub fn cone(base: TreeRef, at: Node) -> Self {
        match base {
            TreeRef::Name(ref n) if n == "full-binary" => TreeRef::Name(format!("cone:{}", at.compact())),
            _ => TreeRef::spec(TreeSpec::Cone { base, at }),
        }
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown tree name {0:?}")]
    UnknownName(String),
    #[error("bad node in {name:?}: {reason}")]
    BadNode { name: String, reason: String },
    #[error("intersection needs trees of the same width")]
    WidthMismatch,
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

/// The node-set intersection of two trees as a tree of its own.
#[derive(Debug)]
pub struct Intersection {
    left: LazyTree,
    right: LazyTree,
}

impl Oracle for Intersection {
    fn width(&self) -> Width {
        self.left.width()
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        let meet = Meet {
            left: &self.left,
            right: &self.right,
            value_bound: None,
        };
        meet.successors(node)
    }

    fn class_key(&self, node: &Node) -> Option<ClassKey> {
        Meet {
            left: &self.left,
            right: &self.right,
            value_bound: None,
        }
        .class_key(node)
    }

    fn describe(&self) -> TreeRef {
        TreeRef::spec(TreeSpec::Intersection {
            left: self.left.describe(),
            right: self.right.describe(),
        })
    }
}

/// Interns oracles by reference and holds user-defined names.
#[derive(Default)]
pub struct Registry {
    defined: HashMap<String, TreeRef>,
    interned: HashMap<String, LazyTree>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Makes `name` resolve to `tree`.
    pub fn define(&mut self, name: impl Into<String>, tree: TreeRef) {
        self.defined.insert(name.into(), tree);
    }

    pub fn resolve(&mut self, r: &TreeRef) -> Result<LazyTree, RegistryError> {
        let key = serde_json::to_string(r).expect("tree refs serialize");
        if let Some(t) = self.interned.get(&key) {
            return Ok(t.clone());
        }
        let tree = self.build(r)?;
        self.interned.insert(key, tree.clone());
        Ok(tree)
    }

    fn build(&mut self, r: &TreeRef) -> Result<LazyTree, RegistryError> {
        match r {
            TreeRef::Name(name) => self.named(name),
            TreeRef::Spec(spec) => match spec.as_ref() {
                TreeSpec::Explicit(t) => Ok(LazyTree::new(Explicit(t.clone()))),
                TreeSpec::Cone { base, at } => Ok(self.resolve(base)?.restrict(at)?),
                TreeSpec::SplitLevels(levels) => Ok(LazyTree::new(SplitLevels { levels: levels.clone() })),
                TreeSpec::Pattern(p) => Ok(LazyTree::new(p.clone())),
                TreeSpec::OmegaLevels { levels, successors } => Ok(LazyTree::new(OmegaLevels {
                    levels: levels.clone(),
                    successors: successors.clone(),
                })),
                TreeSpec::Thinned { base, plan } => {
                    let base = self.resolve(base)?;
                    Ok(sacks_thin(&base, plan)?)
                }
                TreeSpec::LaverThinned {
                    base,
                    plan,
                    mode,
                    horizon,
                } => {
                    let base = self.resolve(base)?;
                    Ok(branching_thin(&base, plan, *mode, *horizon)?)
                }
                TreeSpec::Silver(p) => {
                    p.validate()?;
                    Ok(silver_tree(p))
                }
                TreeSpec::Intersection { left, right } => {
                    let left = self.resolve(left)?;
                    let right = self.resolve(right)?;
                    if left.width() != right.width() {
                        return Err(RegistryError::WidthMismatch);
                    }
                    Ok(LazyTree::new(Intersection { left, right }))
                }
            },
        }
    }

    fn named(&mut self, name: &str) -> Result<LazyTree, RegistryError> {
        if let Some(r) = self.defined.get(name).cloned() {
            return self.resolve(&r);
        }
        match name {
            "full-binary" => Ok(LazyTree::from_arc(Arc::new(FullBinary))),
            "leftmost" => Ok(LazyTree::new(Leftmost(Width::Binary))),
            "omega-leftmost" => Ok(LazyTree::new(Leftmost(Width::Omega))),
            "omega-full" => Ok(LazyTree::new(OmegaLevels::laver(0, EnumeratedSet::naturals()))),
            _ => {
                if let Some(node) = name.strip_prefix("cone:") {
                    let at: Node = node.parse().map_err(|reason| RegistryError::BadNode {
                        name: name.to_string(),
                        reason,
                    })?;
                    let full = self.resolve(&TreeRef::Name("full-binary".into()))?;
                    return Ok(full.restrict(&at)?);
                }
                if let Some(plan) = name.strip_prefix("thinned:") {
                    let plan: ThinPlan = serde_json::from_str(plan).map_err(|e| RegistryError::BadNode {
                        name: name.to_string(),
                        reason: e.to_string(),
                    })?;
                    let full = self.resolve(&TreeRef::Name("full-binary".into()))?;
                    return Ok(sacks_thin(&full, &plan)?);
                }
                Err(RegistryError::UnknownName(name.to_string()))
            }
        }
    }
}
