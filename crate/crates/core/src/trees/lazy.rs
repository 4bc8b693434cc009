use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::walk::{walk_levels, ClassKey, TreeView};
use super::{FiniteTree, Node, TreeError, Width};
use crate::baire::EnumeratedSet;
use crate::registry::TreeRef;

/// The immediate successors of a node: an explicit finite list, or an
/// infinite increasing enumerator (ω-branching).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Successors {
    Finite(Vec<u64>),
    Infinite(EnumeratedSet),
}

impl Successors {
    pub fn is_empty(&self) -> bool {
        matches!(self, Successors::Finite(v) if v.is_empty())
    }

    /// Two or more successors.
    pub fn is_ramification(&self) -> bool {
        match self {
            Successors::Finite(v) => v.len() >= 2,
            Successors::Infinite(_) => true,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Successors::Infinite(_))
    }

    pub fn least(&self) -> Result<Option<u64>, TreeError> {
        match self {
            Successors::Finite(v) => Ok(v.first().copied()),
            Successors::Infinite(set) => Ok(Some(set.mu(0)?)),
        }
    }

    pub fn contains(&self, value: u64) -> Result<bool, TreeError> {
        match self {
            Successors::Finite(v) => Ok(v.binary_search(&value).is_ok()),
            Successors::Infinite(set) => Ok(set.contains(value)?),
        }
    }

    /// Successor values in `[lo, hi)`.
    pub fn in_range(&self, lo: u64, hi: u64) -> Result<Vec<u64>, TreeError> {
        match self {
            Successors::Finite(v) => Ok(v.iter().copied().filter(|x| (lo..hi).contains(x)).collect()),
            Successors::Infinite(set) => Ok(set.values_in(lo, hi)?),
        }
    }

    /// All successors below `value_bound`; ω-branching nodes need a bound.
    pub fn below(&self, value_bound: Option<u64>) -> Result<Vec<u64>, TreeError> {
        match (self, value_bound) {
            (Successors::Finite(v), None) => Ok(v.clone()),
            (Successors::Finite(v), Some(b)) => Ok(v.iter().copied().filter(|&x| x < b).collect()),
            (Successors::Infinite(_), None) => Err(TreeError::MissingValueBound),
            (Successors::Infinite(set), Some(b)) => Ok(set.values_in(0, b)?),
        }
    }
}

/// A monotone nondecreasing gap function: from a node at depth `d`, some
/// descendant at depth `< d + gap(d)` ramifies. `u64::MAX` means "no claim".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingBound {
    table: Vec<u64>,
    tail: u64,
}

impl SplittingBound {
    pub fn constant(gap: u64) -> Self {
        SplittingBound {
            table: Vec::new(),
            tail: gap.max(1),
        }
    }

    /// No certificate at any depth.
    pub fn none() -> Self {
        SplittingBound {
            table: Vec::new(),
            tail: u64::MAX,
        }
    }

    /// Gaps for depths `0..table.len()`, `tail` beyond.
    pub fn from_table(table: Vec<u64>, tail: u64) -> Result<Self, TreeError> {
        let mut prev = 1;
        for &g in table.iter().chain(std::iter::once(&tail)) {
            if g < prev {
                return Err(TreeError::InvalidBound);
            }
            prev = g;
        }
        Ok(SplittingBound { table, tail })
    }

    pub fn gap(&self, depth: usize) -> u64 {
        self.table.get(depth).copied().unwrap_or(self.tail)
    }

    pub fn is_none(&self) -> bool {
        self.table.is_empty() && self.tail == u64::MAX
    }
}

/// Source of a lazily generated tree. Implementations must be pure.
pub trait Oracle: Send + Sync + fmt::Debug {
    fn width(&self) -> Width;

    /// Successors of a node of the tree. Only called on members.
    fn successors(&self, node: &Node) -> Result<Successors, TreeError>;

    /// Nodes of equal length with equal keys have identical subtrees above
    /// them. `None` means the node is its own class.
    fn class_key(&self, _node: &Node) -> Option<ClassKey> {
        None
    }

    fn splitting_bound(&self) -> SplittingBound {
        SplittingBound::none()
    }

    /// Serializable provenance, as accepted by [`crate::registry::Registry`].
    fn describe(&self) -> TreeRef;

    fn as_explicit(&self) -> Option<&FiniteTree> {
        None
    }
}

/// A tree given by a children-oracle, optionally restricted to the cone
/// `(T)_focus`.
///
/// Restrictions share the underlying oracle, which is what identifies a tree
/// as "constructed as a restriction of" another.
#[derive(Clone)]
pub struct LazyTree {
    source: Arc<dyn Oracle>,
    focus: Node,
}

impl fmt::Debug for LazyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyTree")
            .field("source", &self.source)
            .field("focus", &self.focus)
            .finish()
    }
}

impl LazyTree {
    pub fn new(oracle: impl Oracle + 'static) -> Self {
        LazyTree {
            source: Arc::new(oracle),
            focus: Node::root(),
        }
    }

    pub fn from_arc(source: Arc<dyn Oracle>) -> Self {
        LazyTree {
            source,
            focus: Node::root(),
        }
    }

    pub fn width(&self) -> Width {
        self.source.width()
    }

    pub fn focus(&self) -> &Node {
        &self.focus
    }

    pub fn source(&self) -> &Arc<dyn Oracle> {
        &self.source
    }

    pub fn splitting_bound(&self) -> SplittingBound {
        self.source.splitting_bound()
    }

    pub fn same_source(&self, other: &LazyTree) -> bool {
        Arc::ptr_eq(&self.source, &other.source)
    }

    /// Successors of `node`, which must be a member.
    pub fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        if node.is_proper_prefix_of(&self.focus) {
            return Ok(Successors::Finite(vec![self.focus.entries()[node.len()]]));
        }
        self.source.successors(node)
    }

    pub fn children(&self, node: &Node, value_bound: Option<u64>) -> Result<Vec<u64>, TreeError> {
        self.successors(node)?.below(value_bound)
    }

    pub fn contains(&self, node: &Node) -> Result<bool, TreeError> {
        if !node.comparable(&self.focus) {
            return Ok(false);
        }
        let mut cur = Node::root();
        for &e in node.entries() {
            if !self.successors(&cur)?.contains(e)? {
                return Ok(false);
            }
            cur = cur.child(e);
        }
        Ok(true)
    }

    /// `(T)_t`; requires `t ∈ T`.
    pub fn restrict(&self, t: &Node) -> Result<LazyTree, TreeError> {
        if !self.contains(t)? {
            return Err(TreeError::NotInTree { node: t.clone() });
        }
        let focus = if t.len() > self.focus.len() {
            t.clone()
        } else {
            self.focus.clone()
        };
        Ok(LazyTree {
            source: Arc::clone(&self.source),
            focus,
        })
    }

    /// Whether `self` was constructed as `(parent)_s`. Explicit finite trees
    /// are also compared extensionally.
    pub fn is_restriction_of(&self, parent: &LazyTree, s: &Node) -> bool {
        if !s.comparable(&parent.focus) {
            return false;
        }
        if self.same_source(parent) {
            let expected = if s.len() > parent.focus.len() {
                s
            } else {
                &parent.focus
            };
            return &self.focus == expected && parent.contains(s).unwrap_or(false);
        }
        match (self.as_explicit(), parent.as_explicit()) {
            (Some(mine), Some(theirs)) => theirs.restrict(s).map(|r| r == mine).unwrap_or(false),
            _ => false,
        }
    }

    /// The explicit node set when the source is a finite tree.
    pub fn as_explicit(&self) -> Option<FiniteTree> {
        let t = self.source.as_explicit()?;
        if self.focus.is_root() {
            Some(t.clone())
        } else {
            t.restrict(&self.focus).ok()
        }
    }

    pub fn describe(&self) -> TreeRef {
        let base = self.source.describe();
        if self.focus.is_root() {
            base
        } else {
            TreeRef::cone(base, self.focus.clone())
        }
    }

    /// Exactly the nodes of length ≤ `depth` (successor values below
    /// `value_bound` for ω-trees, where the bound is mandatory).
    pub fn truncate(&self, depth: usize, value_bound: Option<u64>) -> Result<FiniteTree, TreeError> {
        if self.width() == Width::Omega && value_bound.is_none() {
            return Err(TreeError::MissingValueBound);
        }
        let mut nodes = BTreeSet::new();
        let mut level = vec![Node::root()];
        for d in 0..=depth {
            let mut next = Vec::new();
            if d < depth {
                for n in &level {
                    for c in self.children(n, value_bound)? {
                        next.push(n.child(c));
                    }
                }
            }
            nodes.extend(level);
            level = next;
        }
        Ok(FiniteTree::from_closed(self.width(), nodes))
    }

    /// Follows least successors from `t` until length `len`.
    pub fn leftmost_extension(&self, t: &Node, len: usize) -> Result<Node, TreeError> {
        let mut cur = t.clone();
        while cur.len() < len {
            match self.successors(&cur)?.least()? {
                Some(e) => cur = cur.child(e),
                None => return Err(TreeError::DeadEnd { node: cur }),
            }
        }
        Ok(cur)
    }

    /// Earliest-level, then leftmost, ramification point extending `from`
    /// with length below `limit`.
    pub fn first_split(&self, from: &Node, limit: usize) -> Result<Option<Node>, TreeError> {
        if limit <= from.len() {
            return Ok(None);
        }
        let mut found = None;
        walk_levels(self, from, limit - 1, None, |_, reps| {
            found = reps
                .iter()
                .find(|r| r.successors.is_ramification())
                .map(|r| r.node.clone());
            Ok(found.is_none())
        })?;
        Ok(found)
    }

    /// No dead ends below `depth`, and the declared splitting bound holds at
    /// every node `t` (at or above the focus) with `|t| + gap(|t|) ≤ depth`.
    pub fn check_perfect(&self, depth: usize, value_bound: Option<u64>) -> Result<(), TreeError> {
        let bound = self.splitting_bound();
        let mut failure = None;
        walk_levels(self, &Node::root(), depth, value_bound, |level, reps| {
            for r in reps {
                if level < depth && r.successors.is_empty() {
                    failure = Some(TreeError::DeadEnd { node: r.node.clone() });
                    return Ok(false);
                }
                if r.node.is_proper_prefix_of(&self.focus) {
                    continue;
                }
                let gap = bound.gap(level);
                if (level as u64).saturating_add(gap) > depth as u64 {
                    continue;
                }
                let limit = level + gap as usize;
                if self.first_split(&r.node, limit)?.is_none() {
                    failure = Some(TreeError::NotPerfect {
                        node: r.node.clone(),
                        gap,
                    });
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

impl TreeView for LazyTree {
    fn width(&self) -> Width {
        LazyTree::width(self)
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        LazyTree::successors(self, node)
    }

    fn class_key(&self, node: &Node) -> Option<ClassKey> {
        if node.is_proper_prefix_of(&self.focus) {
            None
        } else {
            self.source.class_key(node)
        }
    }
}
