//! The finite-condition poset of skew trees with attached perfect side trees,
//! its order, and the three extension moves: amalgamation of two conditions
//! with the same stem, forcing compatibility with a side tree, and avoiding a
//! forbidden tree.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registry::{Registry, RegistryError, TreeRef};
use crate::surgery::{sacks_incompatibility, IncompatibilityCertificate, SurgeryError};
use crate::trees::{walk_levels, FiniteTree, LazyTree, Meet, Node, TreeError, Width};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QError {
    #[error("conditions differ in height or stem tree")]
    DifferentBase,
    #[error("{node} is not a leaf of the condition")]
    NotALeaf { node: Node },
    #[error("side tree of {leaf} has no usable split within depth {horizon}")]
    NoSplit { leaf: Node, horizon: usize },
    #[error("side tree of {leaf} stays inside the forbidden tree to depth {depth}")]
    NoEscape { leaf: Node, depth: usize },
    #[error("side tree of {leaf} is not certified incompatible with forbidden tree {index}")]
    CertificateFailed { leaf: Node, index: usize },
    #[error("no forbidden tree with index {0}")]
    BadIndex(usize),
    #[error("leaf selector index {0} out of range")]
    BadSelector(usize),
    #[error("invalid condition: {0}")]
    Invalid(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error("{0}")]
    Registry(String),
}

impl From<RegistryError> for QError {
    fn from(e: RegistryError) -> Self {
        QError::Registry(e.to_string())
    }
}

/// A condition `(n, F, S̄)`.
#[derive(Clone, Debug)]
pub struct QCondition {
    pub n: usize,
    pub f: FiniteTree,
    pub side: BTreeMap<Node, LazyTree>,
}

/// Serialized form of a condition; side trees are references.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QConditionSpec {
    pub n: usize,
    #[serde(rename = "F")]
    pub f: FiniteTree,
    pub side: Vec<SideSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideSpec {
    pub leaf: Node,
    pub tree: TreeRef,
}

impl QCondition {
    /// `(0, {⟨⟩}, ⟨⟩ ↦ s)`.
    pub fn seed(s: LazyTree) -> Self {
        QCondition {
            n: 0,
            f: FiniteTree::chain(Width::Binary, &Node::root()),
            side: BTreeMap::from([(Node::root(), s)]),
        }
    }

    /// Resolves side references; each side tree is restricted to its leaf
    /// when the leaf belongs to it.
    pub fn from_spec(spec: &QConditionSpec, reg: &mut Registry) -> Result<Self, QError> {
        let mut side = BTreeMap::new();
        for s in &spec.side {
            let tree = reg.resolve(&s.tree)?;
            let tree = if tree.contains(&s.leaf)? {
                tree.restrict(&s.leaf)?
            } else {
                tree
            };
            if side.insert(s.leaf.clone(), tree).is_some() {
                return Err(QError::Invalid(format!("leaf {} listed twice", s.leaf)));
            }
        }
        Ok(QCondition {
            n: spec.n,
            f: spec.f.clone(),
            side,
        })
    }

    pub fn to_spec(&self) -> QConditionSpec {
        QConditionSpec {
            n: self.n,
            f: self.f.clone(),
            side: self
                .side
                .iter()
                .map(|(leaf, t)| SideSpec {
                    leaf: leaf.clone(),
                    tree: t.describe(),
                })
                .collect(),
        }
    }

    /// Nodes of `F` at level `n`, in lexicographic order.
    pub fn leaves(&self) -> Vec<Node> {
        self.f.level(self.n).cloned().collect()
    }

    fn side_of(&self, leaf: &Node) -> Result<&LazyTree, QError> {
        self.side.get(leaf).ok_or_else(|| QError::NotALeaf { node: leaf.clone() })
    }
}

/// Trees the side trees must be certified incompatible with.
#[derive(Clone, Debug)]
pub struct ForbiddenList {
    pub trees: Vec<LazyTree>,
    /// Horizon of the certificates.
    pub depth: usize,
    pub divergence_level: u64,
}

impl ForbiddenList {
    pub fn empty(depth: usize) -> Self {
        ForbiddenList {
            trees: Vec::new(),
            depth,
            divergence_level: depth as u64 / 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub clause: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCertificate {
    pub leaf: Node,
    pub forbidden: usize,
    pub certificate: IncompatibilityCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub clauses: Vec<Clause>,
    pub certificates: Vec<SideCertificate>,
}

fn clause(name: &str, failures: Vec<String>) -> Clause {
    Clause {
        clause: name.to_string(),
        ok: failures.is_empty(),
        detail: (!failures.is_empty()).then(|| failures.join("; ")),
    }
}

/// Whether the nodes of `s` through level `n` form the chain below `leaf`.
fn chain_through(s: &LazyTree, leaf: &Node, n: usize) -> Result<bool, TreeError> {
    let mut ok = true;
    walk_levels(s, &Node::root(), n, None, |level, reps| {
        ok = reps.len() == 1 && reps[0].multiplicity == 1 && reps[0].node == leaf.truncated(level);
        Ok(ok)
    })?;
    Ok(ok)
}

/// Checks every clause of the definition separately, then certifies each side
/// tree against each forbidden tree.
pub fn q_validate(c: &QCondition, forbidden: &ForbiddenList) -> Result<Validation, QError> {
    let mut clauses = Vec::new();
    let mut bad = Vec::new();
    if c.f.width() != Width::Binary {
        bad.push("stem tree is not binary".to_string());
    }
    if c.f.depth() != c.n {
        bad.push(format!("height {} differs from n = {}", c.f.depth(), c.n));
    }
    for leaf in c.f.leaves() {
        if leaf.len() != c.n {
            bad.push(format!("maximal node {leaf} has length {}", leaf.len()));
        }
    }
    clauses.push(clause("height", bad));
    clauses.push(clause(
        "skew",
        if c.f.is_skew() {
            vec![]
        } else {
            vec!["two ramification points on one level".into()]
        },
    ));
    let leaves: BTreeSet<Node> = c.leaves().into_iter().collect();
    let keys: BTreeSet<Node> = c.side.keys().cloned().collect();
    let mut bad: Vec<String> = leaves
        .difference(&keys)
        .map(|l| format!("leaf {l} has no side tree"))
        .collect();
    bad.extend(keys.difference(&leaves).map(|k| format!("{k} is not a leaf")));
    clauses.push(clause("side-keys", bad));

    let mut chain_bad = Vec::new();
    let mut perfect_bad = Vec::new();
    for (leaf, s) in &c.side {
        if s.width() != Width::Binary {
            chain_bad.push(format!("side tree of {leaf} is not binary"));
            continue;
        }
        if !chain_through(s, leaf, c.n)? {
            chain_bad.push(format!("side tree of {leaf} does not run through it up to level {}", c.n));
        }
        if let Err(e) = s.check_perfect(forbidden.depth, None) {
            perfect_bad.push(format!("side tree of {leaf}: {e}"));
        }
    }
    clauses.push(clause("chain", chain_bad));
    clauses.push(clause("perfect", perfect_bad));

    let mut certificates = Vec::new();
    let mut cert_bad = Vec::new();
    for (leaf, s) in &c.side {
        for (index, t) in forbidden.trees.iter().enumerate() {
            let certificate = sacks_incompatibility(s, t, forbidden.divergence_level, forbidden.depth)?;
            if !certificate.passed() {
                cert_bad.push(format!("side tree of {leaf} shares splits with forbidden tree {index}"));
            }
            certificates.push(SideCertificate {
                leaf: leaf.clone(),
                forbidden: index,
                certificate,
            });
        }
    }
    clauses.push(clause("incompatible", cert_bad));
    Ok(Validation {
        valid: clauses.iter().all(|c| c.ok),
        clauses,
        certificates,
    })
}

/// `c0 ≤ c1`: `F¹↾n⁰ = F⁰` and every old leaf `t` has a new leaf `s ⊇ t`
/// whose side tree was built as `(S⁰_t)_s`.
pub fn q_leq(c0: &QCondition, c1: &QCondition) -> bool {
    if c1.n < c0.n || c1.f.truncate(c0.n) != c0.f {
        return false;
    }
    c0.side.iter().all(|(t, s0)| {
        c1.side
            .iter()
            .any(|(s, s1)| t.is_prefix_of(s) && s1.is_restriction_of(s0, s))
    })
}

fn extend_f(f: &FiniteTree, tips: &[Node]) -> FiniteTree {
    let mut nodes = f.nodes().clone();
    for tip in tips {
        nodes.extend(tip.prefixes());
    }
    FiniteTree::new(Width::Binary, nodes).expect("prefix-closed by construction")
}

/// Lexicographically least `(x, y)`, `x ≠ y`, with `x` from `a` and `y` from `b`.
fn distinct_pair(a: &[u64], b: &[u64]) -> Option<(u64, u64)> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .find(|(x, y)| x != y)
}

/// Up to `limit` levels, from `t` upward within `horizon`, at which `si` and
/// `sj` share a node they leave by distinct children; the leftmost such node
/// per level.
fn divergence_candidates(
    si: &LazyTree,
    sj: &LazyTree,
    t: &Node,
    horizon: usize,
    limit: usize,
) -> Result<Vec<(Node, u64, u64)>, QError> {
    let meet = Meet {
        left: si,
        right: sj,
        value_bound: None,
    };
    let mut found = Vec::new();
    walk_levels(&meet, t, horizon, None, |_, reps| {
        for r in reps {
            let a = si.children(&r.node, None)?;
            let b = sj.children(&r.node, None)?;
            if let Some((x, y)) = distinct_pair(&a, &b) {
                found.push((r.node.clone(), x, y));
                break;
            }
        }
        Ok(found.len() < limit)
    })?;
    Ok(found)
}

/// Assigns each leaf one candidate so that no two share a level, using only
/// levels below `cap`. Leaves are matched in order by augmenting paths, each
/// preferring its lowest level.
fn match_levels(cands: &[Vec<(Node, u64, u64)>], cap: usize) -> Result<Vec<usize>, usize> {
    fn augment(
        k: usize,
        cands: &[Vec<(Node, u64, u64)>],
        cap: usize,
        owner: &mut BTreeMap<usize, usize>,
        pick: &mut [usize],
        seen: &mut BTreeSet<usize>,
    ) -> bool {
        for (c, (u, _, _)) in cands[k].iter().enumerate() {
            let level = u.len();
            if level >= cap || !seen.insert(level) {
                continue;
            }
            let free = match owner.get(&level).copied() {
                None => true,
                Some(other) => augment(other, cands, cap, owner, pick, seen),
            };
            if free {
                owner.insert(level, k);
                pick[k] = c;
                return true;
            }
        }
        false
    }
    let mut owner = BTreeMap::new();
    let mut pick = vec![0; cands.len()];
    for k in 0..cands.len() {
        if !augment(k, cands, cap, &mut owner, &mut pick, &mut BTreeSet::new()) {
            return Err(k);
        }
    }
    Ok(pick)
}

/// Common upper bound of two conditions with the same `n` and `F`.
///
/// Each leaf `t` needs a node `u` common to `Sⁱ_t` and `Sʲ_t` from which the
/// two trees leave by distinct children, on a level of its own so that the
/// result stays skew. Levels are assigned to keep `n*` least; `l(t)`
/// continues in `Sⁱ_t` and `r(t)` in `Sʲ_t`.
pub fn q_amalgamate(ci: &QCondition, cj: &QCondition, horizon: usize) -> Result<QCondition, QError> {
    if ci.n != cj.n || ci.f != cj.f {
        return Err(QError::DifferentBase);
    }
    let leaves = ci.leaves();
    let mut cands = Vec::with_capacity(leaves.len());
    for t in &leaves {
        cands.push(divergence_candidates(ci.side_of(t)?, cj.side_of(t)?, t, horizon, leaves.len())?);
    }
    let caps: BTreeSet<usize> = cands.iter().flatten().map(|(u, _, _)| u.len() + 1).collect();
    let mut chosen = None;
    for &cap in &caps {
        if let Ok(pick) = match_levels(&cands, cap) {
            chosen = Some(pick);
            break;
        }
    }
    let pick = match chosen {
        Some(p) => p,
        None => {
            let k = match_levels(&cands, usize::MAX).err().unwrap_or(0);
            return Err(QError::NoSplit {
                leaf: leaves.get(k).cloned().unwrap_or_else(Node::root),
                horizon,
            });
        }
    };
    let picks: Vec<_> = leaves
        .iter()
        .zip(&pick)
        .zip(&cands)
        .map(|((t, &c), cs)| (t.clone(), cs[c].clone()))
        .collect();
    let n_star = picks.iter().map(|p| p.1 .0.len() + 1).max().unwrap_or(ci.n + 1);
    let mut side = BTreeMap::new();
    let mut tips = Vec::new();
    for (t, (u, x, y)) in picks {
        let si = ci.side_of(&t)?;
        let sj = cj.side_of(&t)?;
        let l = si.leftmost_extension(&u.child(x), n_star)?;
        let r = sj.leftmost_extension(&u.child(y), n_star)?;
        side.insert(l.clone(), si.restrict(&l)?);
        side.insert(r.clone(), sj.restrict(&r)?);
        tips.push(l);
        tips.push(r);
    }
    Ok(QCondition {
        n: n_star,
        f: extend_f(&ci.f, &tips),
        side,
    })
}

/// Splits `t0` at the earliest ramification point of its side tree and
/// extends every other leaf along its leftmost branch.
pub fn q_ensure_compatible(c: &QCondition, t0: &Node, horizon: usize) -> Result<QCondition, QError> {
    let s0 = c.side_of(t0)?;
    let u = s0.first_split(t0, horizon)?.ok_or(QError::NoSplit {
        leaf: t0.clone(),
        horizon,
    })?;
    let n1 = u.len() + 1;
    let kids = s0.children(&u, None)?;
    let mut side = BTreeMap::new();
    let mut tips = Vec::new();
    for &k in &kids[..2] {
        let tip = u.child(k);
        side.insert(tip.clone(), s0.restrict(&tip)?);
        tips.push(tip);
    }
    for (t, s) in &c.side {
        if t == t0 {
            continue;
        }
        let tip = s.leftmost_extension(t, n1)?;
        side.insert(tip.clone(), s.restrict(&tip)?);
        tips.push(tip);
    }
    Ok(QCondition {
        n: n1,
        f: extend_f(&c.f, &tips),
        side,
    })
}

/// The least-level, then leftmost, node of `s` above `t` at a level `> min_level`
/// that is not in `forbidden`.
fn escape(s: &LazyTree, forbidden: &LazyTree, t: &Node, min_level: usize, depth: usize) -> Result<Option<Node>, QError> {
    if !forbidden.contains(t)? {
        return Ok(Some(s.leftmost_extension(t, min_level + 1)?));
    }
    let meet = Meet {
        left: s,
        right: forbidden,
        value_bound: None,
    };
    let mut found = None;
    walk_levels(&meet, t, depth.saturating_sub(1), None, |level, reps| {
        for r in reps {
            if level < min_level {
                break;
            }
            for c in s.children(&r.node, None)? {
                if !forbidden.successors(&r.node)?.contains(c)? {
                    found = Some(r.node.child(c));
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })?;
    match found {
        Some(v) if v.len() <= min_level => Ok(Some(s.leftmost_extension(&v, min_level + 1)?)),
        other => Ok(other),
    }
}

/// Moves every leaf out of `t_alpha` at the least common height `n* > n`.
pub fn q_avoid(
    c: &QCondition,
    t_alpha: &LazyTree,
    divergence_level: u64,
    depth: usize,
) -> Result<(QCondition, Vec<SideCertificate>), QError> {
    let mut certificates = Vec::new();
    for (leaf, s) in &c.side {
        let certificate = sacks_incompatibility(s, t_alpha, divergence_level, depth)?;
        if !certificate.passed() {
            return Err(QError::CertificateFailed {
                leaf: leaf.clone(),
                index: 0,
            });
        }
        certificates.push(SideCertificate {
            leaf: leaf.clone(),
            forbidden: 0,
            certificate,
        });
    }
    let mut escapes = Vec::new();
    for (t, s) in &c.side {
        let v = escape(s, t_alpha, t, c.n, depth)?.ok_or(QError::NoEscape {
            leaf: t.clone(),
            depth,
        })?;
        escapes.push((t.clone(), v));
    }
    let n_star = escapes.iter().map(|e| e.1.len()).max().unwrap_or(c.n + 1);
    let mut side = BTreeMap::new();
    let mut tips = Vec::new();
    for (t, v) in escapes {
        let s = c.side_of(&t)?;
        let tip = s.leftmost_extension(&v, n_star)?;
        side.insert(tip.clone(), s.restrict(&tip)?);
        tips.push(tip);
    }
    Ok((
        QCondition {
            n: n_star,
            f: extend_f(&c.f, &tips),
            side,
        },
        certificates,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafSelector {
    Leftmost,
    Rightmost,
    All,
    #[serde(untagged)]
    Index {
        index: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    GrowSplit(LeafSelector),
    Avoid(usize),
    EnsureCompatible(LeafSelector),
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub task: Task,
    pub condition: QConditionSpec,
    pub certificates: Vec<SideCertificate>,
    /// For `avoid`: the height above which `F` stays out of the tree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avoid_height: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericRun {
    #[serde(rename = "F")]
    pub f: FiniteTree,
    pub trace: Vec<TraceStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
    #[serde(skip)]
    pub last: Option<QCondition>,
}

impl GenericRun {
    pub fn completed(&self) -> bool {
        self.aborted.is_none()
    }
}

fn select(c: &QCondition, sel: LeafSelector) -> Result<Vec<Node>, QError> {
    let leaves = c.leaves();
    Ok(match sel {
        LeafSelector::Leftmost => leaves.first().cloned().into_iter().collect(),
        LeafSelector::Rightmost => leaves.last().cloned().into_iter().collect(),
        LeafSelector::All => leaves,
        LeafSelector::Index { index } => vec![leaves.get(index).cloned().ok_or(QError::BadSelector(index))?],
    })
}

fn ensure_each(c: &QCondition, targets: &[Node], horizon: usize) -> Result<QCondition, QError> {
    let mut cur = c.clone();
    for t in targets {
        let leaf = cur
            .leaves()
            .into_iter()
            .find(|l| t.is_prefix_of(l))
            .ok_or_else(|| QError::NotALeaf { node: t.clone() })?;
        cur = q_ensure_compatible(&cur, &leaf, horizon)?;
    }
    Ok(cur)
}

fn step(c: &QCondition, task: Task, forbidden: &ForbiddenList, horizon: usize) -> Result<(TraceStep, QCondition), QError> {
    let mut certificates = Vec::new();
    let mut avoid_height = None;
    let next = match task {
        Task::GrowSplit(LeafSelector::All) => q_amalgamate(c, c, horizon)?,
        Task::GrowSplit(sel) | Task::EnsureCompatible(sel) => ensure_each(c, &select(c, sel)?, horizon)?,
        Task::Avoid(index) => {
            let t = forbidden.trees.get(index).ok_or(QError::BadIndex(index))?;
            let (next, mut certs) = q_avoid(c, t, forbidden.divergence_level, forbidden.depth)?;
            for cert in &mut certs {
                cert.forbidden = index;
            }
            certificates = certs;
            avoid_height = Some(next.n);
            next
        }
    };
    let step = TraceStep {
        task,
        condition: next.to_spec(),
        certificates,
        avoid_height,
    };
    Ok((step, next))
}

/// Folds the schedule over `seed`. A failing step ends the run; the trace
/// keeps every step before it.
pub fn q_generic_run(seed: &QCondition, forbidden: &ForbiddenList, schedule: &[Task], horizon: usize) -> GenericRun {
    let mut cur = seed.clone();
    let mut trace = Vec::new();
    let mut aborted = None;
    for &task in schedule {
        match step(&cur, task, forbidden, horizon) {
            Ok((s, next)) => {
                cur = next;
                trace.push(s);
            }
            Err(e) => {
                aborted = Some(format!("step {} ({task:?}): {e}", trace.len()));
                break;
            }
        }
    }
    GenericRun {
        f: cur.f.clone(),
        trace,
        aborted,
        last: Some(cur),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::oracles::{FullBinary, SplitLevels};
    use crate::baire::EnumeratedSet;

    fn node(s: &str) -> Node {
        s.parse().unwrap()
    }

    fn full() -> LazyTree {
        LazyTree::new(FullBinary)
    }

    #[test]
    fn validate_examples() {
        let seed = QCondition::seed(full());
        assert!(q_validate(&seed, &ForbiddenList::empty(8)).unwrap().valid);

        let split_root = QCondition {
            n: 1,
            f: FiniteTree::full_binary(1),
            side: [node("0"), node("1")].into_iter().map(|l| (l.clone(), full().restrict(&l).unwrap())).collect(),
        };
        assert!(q_validate(&split_root, &ForbiddenList::empty(8)).unwrap().valid);

        let two = FiniteTree::full_binary(2);
        let bushy = QCondition {
            n: 2,
            side: two.level(2).map(|l| (l.clone(), full().restrict(l).unwrap())).collect(),
            f: two,
        };
        let v = q_validate(&bushy, &ForbiddenList::empty(8)).unwrap();
        assert!(!v.valid);
        assert!(v.clauses.iter().any(|c| c.clause == "skew" && !c.ok));

        let forbidden = ForbiddenList {
            trees: vec![full()],
            depth: 8,
            divergence_level: 4,
        };
        let v = q_validate(&seed, &forbidden).unwrap();
        assert!(!v.valid);
        assert!(!v.certificates[0].certificate.passed());
    }

    #[test]
    fn leq_examples() {
        let c = QCondition::seed(full());
        assert!(q_leq(&c, &c));
        let c1 = q_ensure_compatible(&c, &Node::root(), 10).unwrap();
        assert!(q_leq(&c, &c1));
        assert!(!q_leq(&c1, &c));
        let mut other = c1.clone();
        other.f = FiniteTree::new(Width::Binary, [Node::root(), node("1")]).unwrap();
        assert!(!q_leq(&c1, &other));
    }

    #[test]
    fn amalgamate_examples() {
        let c = QCondition::seed(full());
        let star = q_amalgamate(&c, &c, 10).unwrap();
        assert!(q_leq(&c, &star));
        assert!(q_validate(&star, &ForbiddenList::empty(8)).unwrap().valid);

        let ci = QCondition::seed(full().restrict(&node("00")).unwrap());
        let cj = QCondition::seed(full().restrict(&node("01")).unwrap());
        let star = q_amalgamate(&ci, &cj, 10).unwrap();
        assert!(q_leq(&ci, &star) && q_leq(&cj, &star));
        let leaves = star.leaves();
        assert_eq!(leaves, vec![node("00"), node("01")]);

        let mut shifted = cj.clone();
        shifted.f = FiniteTree::chain(Width::Binary, &node("0"));
        shifted.n = 1;
        assert_eq!(q_amalgamate(&ci, &shifted, 10).unwrap_err(), QError::DifferentBase);
    }

    #[test]
    fn amalgamate_reassigns_levels() {
        // leaf ⟨1⟩ can only split at level 1, so leaf ⟨0⟩ must move up
        let ci = q_ensure_compatible(&QCondition::seed(full()), &Node::root(), 10).unwrap();
        let mut cj = ci.clone();
        let mut ci = ci;
        ci.side.insert(node("1"), full().restrict(&node("10")).unwrap());
        cj.side.insert(node("1"), full().restrict(&node("11")).unwrap());
        let star = q_amalgamate(&ci, &cj, 10).unwrap();
        assert_eq!(star.n, 3);
        assert!(star.f.is_skew());
        assert!(q_leq(&ci, &star) && q_leq(&cj, &star));
        assert_eq!(star.f.ramification_levels(), BTreeSet::from([0, 1, 2]));

        // both leaves pinned to level 1
        let mut di = ci.clone();
        let mut dj = cj.clone();
        di.side.insert(node("0"), full().restrict(&node("00")).unwrap());
        dj.side.insert(node("0"), full().restrict(&node("01")).unwrap());
        assert!(matches!(q_amalgamate(&di, &dj, 10), Err(QError::NoSplit { .. })));
    }

    #[test]
    fn ensure_compatible_examples() {
        let c = QCondition::seed(full());
        let c1 = q_ensure_compatible(&c, &Node::root(), 10).unwrap();
        assert_eq!(c1.n, 1);
        assert_eq!(c1.leaves(), vec![node("0"), node("1")]);

        let late = LazyTree::new(SplitLevels {
            levels: EnumeratedSet::Affine { a: 1, b: 5 },
        });
        let c = QCondition::seed(late);
        let c1 = q_ensure_compatible(&c, &Node::root(), 10).unwrap();
        assert_eq!(c1.n, 6);
        assert_eq!(c1.leaves(), vec![node("000000"), node("000001")]);
        assert!(q_leq(&c, &c1));

        assert!(matches!(
            q_ensure_compatible(&c1, &node("0"), 10),
            Err(QError::NotALeaf { .. })
        ));
    }

    #[test]
    fn avoid_examples() {
        let c = QCondition::seed(full().restrict(&node("1")).unwrap());
        let cone0 = full().restrict(&node("0")).unwrap();
        let (c1, certs) = q_avoid(&c, &cone0, 1, 8).unwrap();
        assert_eq!(c1.n, 1);
        assert_eq!(c1.leaves(), vec![node("1")]);
        assert!(certs.iter().all(|c| c.certificate.passed()));

        let inside = QCondition::seed(full().restrict(&node("0")).unwrap());
        assert!(q_avoid(&inside, &cone0, 1, 10).is_err());

        // two leaves escaping at different heights
        let forbid = LazyTree::new(crate::trees::oracles::Explicit(
            FiniteTree::new(
                Width::Binary,
                ["", "0", "1", "00", "10", "11", "100", "110", "1000"].iter().map(|s| node(s)),
            )
            .unwrap(),
        ));
        let c = q_ensure_compatible(&QCondition::seed(full()), &Node::root(), 10).unwrap();
        let (c1, _) = q_avoid(&c, &forbid, 2, 8).unwrap();
        // ⟨0⟩ escapes at 01, ⟨1⟩ at 101; the shorter one is extended leftmost
        assert_eq!(c1.n, 3);
        assert_eq!(c1.leaves(), vec![node("010"), node("101")]);
        for leaf in c1.leaves() {
            assert!(!forbid.contains(&leaf).unwrap());
        }
    }

    #[test]
    fn generic_run_examples() {
        let seed = QCondition::seed(full());
        let schedule = vec![Task::EnsureCompatible(LeafSelector::Leftmost); 3];
        let run = q_generic_run(&seed, &ForbiddenList::empty(8), &schedule, 20);
        assert!(run.completed());
        assert_eq!(run.f.ramification_points().len(), 3);
        assert!(run.f.is_skew());

        let run = q_generic_run(&seed, &ForbiddenList::empty(8), &[], 20);
        assert_eq!(run.f, seed.f);

        let forbidden = ForbiddenList {
            trees: vec![full()],
            depth: 6,
            divergence_level: 3,
        };
        let run = q_generic_run(&seed, &forbidden, &[Task::Avoid(0)], 20);
        assert!(!run.completed());
        assert!(run.trace.is_empty());
    }

    #[test]
    fn task_json() {
        let tasks: Vec<Task> = serde_json::from_str(
            r#"[{"grow-split": "all"}, {"avoid": 0}, {"ensure-compatible": {"index": 1}}, {"ensure-compatible": "rightmost"}]"#,
        )
        .unwrap();
        assert_eq!(tasks[2], Task::EnsureCompatible(LeafSelector::Index { index: 1 }));
        assert_eq!(serde_json::to_string(&tasks[0]).unwrap(), r#"{"grow-split":"all"}"#);
    }
}
