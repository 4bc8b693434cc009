use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Node, TreeError, Width};

/// How the bound in "s ramifies below k" is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BelowMode {
    /// Witness length `< k − 1`.
    Strict,
    /// Witness length `< k`.
    #[default]
    Inclusive,
}

impl BelowMode {
    /// Exclusive upper bound on the level of a witnessing split.
    pub fn limit(&self, k: usize) -> usize {
        match self {
            BelowMode::Strict => k.saturating_sub(1),
            BelowMode::Inclusive => k,
        }
    }
}

/// What `T ≤ₙ T'` asks of the rank-≤n ramification points of `T`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeqMode {
    /// They are members of `T'`.
    Literal,
    /// They are members of `T'` and still ramify there.
    #[default]
    Strict,
}

/// An explicit prefix-closed finite set of nodes.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteTreeRepr", into = "FiniteTreeRepr")]
pub struct FiniteTree {
    width: Width,
    nodes: BTreeSet<Node>,
    children: BTreeMap<Node, Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiniteTreeRepr {
    width: Width,
    nodes: Vec<Node>,
}

impl TryFrom<FiniteTreeRepr> for FiniteTree {
    type Error = TreeError;

    fn try_from(r: FiniteTreeRepr) -> Result<Self, TreeError> {
        FiniteTree::new(r.width, r.nodes)
    }
}

impl From<FiniteTree> for FiniteTreeRepr {
    fn from(t: FiniteTree) -> Self {
        FiniteTreeRepr {
            width: t.width,
            nodes: t.nodes.into_iter().collect(),
        }
    }
}

impl std::fmt::Debug for FiniteTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set()
            .entries(self.nodes.iter().map(Node::compact))
            .finish()
    }
}

impl FiniteTree {
    /// Validates root presence, prefix closure and entry widths.
    pub fn new(width: Width, nodes: impl IntoIterator<Item = Node>) -> Result<Self, TreeError> {
        let nodes: BTreeSet<Node> = nodes.into_iter().collect();
        if !nodes.contains(&Node::root()) {
            return Err(TreeError::MissingRoot);
        }
        for n in &nodes {
            if n.entries().iter().any(|&e| !width.admits(e)) {
                return Err(TreeError::WidthViolation { node: n.clone() });
            }
            if let Some(p) = n.parent() {
                if !nodes.contains(&p) {
                    return Err(TreeError::NotPrefixClosed { node: n.clone() });
                }
            }
        }
        Ok(Self::from_closed(width, nodes))
    }

    pub(crate) fn from_closed(width: Width, nodes: BTreeSet<Node>) -> Self {
        let mut children: BTreeMap<Node, Vec<u64>> = BTreeMap::new();
        for n in &nodes {
            if let (Some(p), Some(e)) = (n.parent(), n.last()) {
                children.entry(p).or_default().push(e);
            }
        }
        FiniteTree {
            width,
            nodes,
            children,
        }
    }

    /// `2^{≤depth}`.
    pub fn full_binary(depth: usize) -> Self {
        let mut nodes = BTreeSet::new();
        let mut level = vec![Node::root()];
        for _ in 0..depth {
            let next: Vec<Node> = level.iter().flat_map(|n| [n.child(0), n.child(1)]).collect();
            nodes.extend(level);
            level = next;
        }
        nodes.extend(level);
        Self::from_closed(Width::Binary, nodes)
    }

    /// The prefixes of `tip`.
    pub fn chain(width: Width, tip: &Node) -> Self {
        Self::from_closed(width, tip.prefixes().collect())
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn nodes(&self) -> &BTreeSet<Node> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length of the longest node.
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Node::len).max().unwrap_or(0)
    }

    pub fn contains(&self, node: &Node) -> bool {
        self.nodes.contains(node)
    }

    /// Immediate successor entries of `node`, ascending.
    pub fn children(&self, node: &Node) -> &[u64] {
        self.children.get(node).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| self.children(n).is_empty())
    }

    pub fn level(&self, len: usize) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.len() == len)
    }

    /// `(T)_t = {s ∈ T : s ⊆ t or t ⊆ s}`.
    pub fn restrict(&self, t: &Node) -> Result<FiniteTree, TreeError> {
        if !self.contains(t) {
            return Err(TreeError::NotInTree { node: t.clone() });
        }
        let nodes = self
            .nodes
            .iter()
            .filter(|s| s.comparable(t))
            .cloned()
            .collect();
        Ok(Self::from_closed(self.width, nodes))
    }

    pub fn ramifies(&self, node: &Node) -> bool {
        self.children(node).len() >= 2
    }

    /// Nodes with at least two immediate successors.
    pub fn ramification_points(&self) -> BTreeSet<Node> {
        self.children
            .iter()
            .filter(|(_, c)| c.len() >= 2)
            .map(|(n, _)| n.clone())
            .collect()
    }

    pub fn ramification_levels(&self) -> BTreeSet<usize> {
        self.ramification_points().iter().map(Node::len).collect()
    }

    /// Number of proper initial segments of `t` that ramify.
    pub fn ramification_rank(&self, t: &Node) -> Result<usize, TreeError> {
        if !self.ramifies(t) {
            return Err(TreeError::NotRamification { node: t.clone() });
        }
        Ok(t.prefixes()
            .take(t.len())
            .filter(|p| self.ramifies(p))
            .count())
    }

    /// A ramification point `t ⊇ s` whose length is below `mode.limit(k)`,
    /// earliest level first then leftmost.
    pub fn ramifies_below(
        &self,
        s: &Node,
        k: usize,
        mode: BelowMode,
    ) -> Result<Option<Node>, TreeError> {
        if !self.contains(s) {
            return Err(TreeError::NotInTree { node: s.clone() });
        }
        if k <= s.len() {
            return Err(TreeError::BadLevel {
                node: s.clone(),
                level: k,
            });
        }
        let limit = mode.limit(k);
        Ok(self
            .nodes
            .range(s.clone()..)
            .take_while(|t| s.is_prefix_of(t))
            .filter(|t| t.len() < limit && self.ramifies(t))
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
            .cloned())
    }

    /// At most one ramification point per level.
    pub fn is_skew(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.ramification_points().iter().all(|t| seen.insert(t.len()))
    }

    /// `T ≤ T'`: the stronger tree `T'` is a subset of `T`.
    pub fn tree_leq(&self, stronger: &FiniteTree) -> bool {
        self.width == stronger.width && stronger.nodes.is_subset(&self.nodes)
    }

    /// `T ≤ₙ T'`.
    pub fn tree_leq_n(&self, stronger: &FiniteTree, n: usize, mode: LeqMode) -> bool {
        if !self.tree_leq(stronger) {
            return false;
        }
        self.rank_at_most(n).iter().all(|t| match mode {
            LeqMode::Literal => stronger.contains(t),
            LeqMode::Strict => stronger.ramifies(t),
        })
    }

    /// Ramification points of rank ≤ n.
    pub fn rank_at_most(&self, n: usize) -> BTreeSet<Node> {
        let points = self.ramification_points();
        points
            .iter()
            .filter(|t| {
                t.prefixes()
                    .take(t.len())
                    .filter(|p| points.contains(p))
                    .count()
                    <= n
            })
            .cloned()
            .collect()
    }

    /// Nodes of length ≤ `depth`.
    pub fn truncate(&self, depth: usize) -> FiniteTree {
        Self::from_closed(
            self.width,
            self.nodes.iter().filter(|n| n.len() <= depth).cloned().collect(),
        )
    }

    pub fn intersection(&self, other: &FiniteTree) -> FiniteTree {
        Self::from_closed(
            self.width,
            self.nodes.intersection(&other.nodes).cloned().collect(),
        )
    }
}
