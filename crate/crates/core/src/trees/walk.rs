//! Level-by-level traversal with subtree-class compression.
//!
//! Oracles may tag nodes with a [`ClassKey`]; two nodes of the same length
//! carrying the same key have identical subtrees, so only the leftmost of
//! them (the representative) is expanded. Trees without keys are walked
//! node by node.

use std::collections::HashMap;

use super::{Node, Successors, TreeError, Width};

pub type ClassKey = Vec<u64>;

/// Anything that can be walked: a lazy tree, or the meet of two.
pub trait TreeView {
    fn width(&self) -> Width;
    fn successors(&self, node: &Node) -> Result<Successors, TreeError>;
    fn class_key(&self, node: &Node) -> Option<ClassKey>;
}

/// The leftmost node of a class at some level, how many nodes it stands
/// for, and its successors.
#[derive(Clone, Debug)]
pub struct ClassRep {
    pub node: Node,
    pub multiplicity: u64,
    pub successors: Successors,
}

/// Visits levels `|start|..=max_level` of the subtree above `start`.
///
/// `visit` receives the level and its representatives in lexicographic order
/// and returns `Ok(false)` to stop early. Successors of ω-branching nodes are
/// cut at `value_bound`.
pub fn walk_levels<V, F>(
    view: &V,
    start: &Node,
    max_level: usize,
    value_bound: Option<u64>,
    mut visit: F,
) -> Result<(), TreeError>
where
    V: TreeView + ?Sized,
    F: FnMut(usize, &[ClassRep]) -> Result<bool, TreeError>,
{
    let mut level = start.len();
    let mut frontier = vec![ClassRep {
        node: start.clone(),
        multiplicity: 1,
        successors: view.successors(start)?,
    }];
    loop {
        if !visit(level, &frontier)? || level >= max_level {
            return Ok(());
        }
        let mut next: Vec<ClassRep> = Vec::new();
        let mut index: HashMap<ClassKey, usize> = HashMap::new();
        for rep in &frontier {
            for c in rep.successors.below(value_bound)? {
                let child = rep.node.child(c);
                if let Some(key) = view.class_key(&child) {
                    if let Some(&k) = index.get(&key) {
                        next[k].multiplicity = next[k].multiplicity.saturating_add(rep.multiplicity);
                        continue;
                    }
                    index.insert(key, next.len());
                }
                let successors = view.successors(&child)?;
                next.push(ClassRep {
                    node: child,
                    multiplicity: rep.multiplicity,
                    successors,
                });
            }
        }
        if next.is_empty() {
            return Ok(());
        }
        frontier = next;
        level += 1;
    }
}

/// The node-set intersection of two trees, walked without materializing
/// either side.
pub struct Meet<'a, A: TreeView + ?Sized, B: TreeView + ?Sized> {
    pub left: &'a A,
    pub right: &'a B,
    /// Cut applied when both sides are ω-branching at a node.
    pub value_bound: Option<u64>,
}

impl<A: TreeView + ?Sized, B: TreeView + ?Sized> TreeView for Meet<'_, A, B> {
    fn width(&self) -> Width {
        self.left.width()
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        let a = self.left.successors(node)?;
        let b = self.right.successors(node)?;
        let shared = match (&a, &b) {
            (Successors::Finite(x), other) | (other, Successors::Finite(x)) => {
                let mut out = Vec::new();
                for &v in x {
                    if other.contains(v)? {
                        out.push(v);
                    }
                }
                out
            }
            (Successors::Infinite(_), Successors::Infinite(_)) => {
                let bx = a.below(self.value_bound)?;
                let mut out = Vec::new();
                for v in bx {
                    if b.contains(v)? {
                        out.push(v);
                    }
                }
                out
            }
        };
        Ok(Successors::Finite(shared))
    }

    fn class_key(&self, node: &Node) -> Option<ClassKey> {
        let a = self.left.class_key(node)?;
        let b = self.right.class_key(node)?;
        let mut key = Vec::with_capacity(a.len() + b.len() + 1);
        key.push(a.len() as u64);
        key.extend(a);
        key.extend(b);
        Some(key)
    }
}
