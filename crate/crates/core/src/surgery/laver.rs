use serde::{Deserialize, Serialize};

use super::certificate::{certify, ForcingKind, IncompatibilityCertificate};
use super::plan::ThinPlan;
use super::SurgeryError;
use crate::baire::{block, Block, EnumeratedSet, MAX_BLOCK_INDEX};
use crate::registry::{TreeRef, TreeSpec};
use crate::trees::{walk_levels, ClassKey, LazyTree, Node, Oracle, SplittingBound, Successors, TreeError, Width};

/// Which nodes a Laver-style thinning acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchingKind {
    /// Every node with two or more successors.
    Laver,
    /// Only ω-branching nodes.
    Miller,
}

impl BranchingKind {
    pub fn acts_on(&self, succ: &Successors) -> bool {
        match self {
            BranchingKind::Laver => succ.is_ramification(),
            BranchingKind::Miller => succ.is_infinite(),
        }
    }

    pub fn forcing(&self) -> ForcingKind {
        match self {
            BranchingKind::Laver => ForcingKind::Laver,
            BranchingKind::Miller => ForcingKind::Miller,
        }
    }
}

/// Depth and successor-value cut for scanning an ω-tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub depth: usize,
    pub value_bound: u64,
}

/// Every sub-block of block `i` contains a successor of `t`.
pub fn laver_weakly_obeys_at(tree: &LazyTree, t: &Node, x: &EnumeratedSet, i: u32) -> Result<bool, SurgeryError> {
    successors_obey(&tree.successors(t)?, x, i)
}

fn successors_obey(succ: &Successors, x: &EnumeratedSet, i: u32) -> Result<bool, SurgeryError> {
    if i >= MAX_BLOCK_INDEX {
        return Err(crate::baire::BaireError::BlockIndexTooLarge(i).into());
    }
    for j in 0..1u64 << i {
        let b = block(x, i, j)?;
        if succ.in_range(b.lo, b.hi)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy prefix of a set `X₀` such that each supplied point has a successor
/// in every gap `[μ(k), μ(k+1))`.
pub fn laver_extract_x0(tree: &LazyTree, points: &[Node], value_bound: u64) -> Result<EnumeratedSet, SurgeryError> {
    let succs = points
        .iter()
        .map(|p| tree.successors(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut mu = vec![0u64];
    loop {
        let lo = *mu.last().unwrap();
        let mut need = lo;
        let mut stuck = false;
        for s in &succs {
            match s.in_range(lo, value_bound)?.first() {
                Some(&v) => need = need.max(v + 1),
                None => {
                    stuck = true;
                    break;
                }
            }
        }
        if stuck || need > value_bound || need == lo {
            break;
        }
        mu.push(need);
    }
    if mu.len() < 2 {
        return Err(SurgeryError::BoundExhausted { value_bound });
    }
    Ok(EnumeratedSet::explicit(mu)?)
}

/// Laver or Miller thinning: successors at the acted-on nodes are cut to the
/// enforced designated sub-blocks.
#[derive(Debug)]
pub struct LaverThin {
    base: LazyTree,
    plan: ThinPlan,
    kind: BranchingKind,
    horizon: Horizon,
    designated: Vec<(u32, Block)>,
}

impl LaverThin {
    fn filter(&self, node: &Node, succ: Successors) -> Result<Successors, TreeError> {
        let mut kept = Vec::new();
        for &(i, b) in &self.designated {
            let here = succ.in_range(b.lo, b.hi)?;
            if here.is_empty() {
                return Err(TreeError::Oracle(format!(
                    "no successor of {node} in the designated sub-block of block {i}"
                )));
            }
            kept.extend(here);
        }
        Ok(Successors::Finite(kept))
    }
}

impl Oracle for LaverThin {
    fn width(&self) -> Width {
        Width::Omega
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        let succ = self.base.successors(node)?;
        if self.kind.acts_on(&succ) {
            self.filter(node, succ)
        } else {
            Ok(succ)
        }
    }

    fn class_key(&self, node: &Node) -> Option<ClassKey> {
        self.base.source().class_key(node).filter(|_| !node.is_proper_prefix_of(self.base.focus()))
    }

    fn splitting_bound(&self) -> SplittingBound {
        self.base.splitting_bound()
    }

    fn describe(&self) -> TreeRef {
        TreeRef::spec(TreeSpec::LaverThinned {
            base: self.base.describe(),
            plan: self.plan.clone(),
            mode: self.kind,
            horizon: self.horizon,
        })
    }
}

/// Checks the acted-on nodes of `t` within the horizon and returns the lazy
/// thinning.
pub fn branching_thin(
    t: &LazyTree,
    plan: &ThinPlan,
    kind: BranchingKind,
    horizon: Horizon,
) -> Result<LazyTree, SurgeryError> {
    plan.validate()?;
    if t.width() != Width::Omega {
        return Err(TreeError::WidthMismatch.into());
    }
    let mut designated = Vec::new();
    for &i in &plan.enforced {
        designated.push((i, plan.designated(i)?));
    }
    let mut failure = None;
    let mut saw_infinite = false;
    walk_levels(t, &Node::root(), horizon.depth, Some(horizon.value_bound), |level, reps| {
        for r in reps {
            saw_infinite |= r.successors.is_infinite();
            if level >= horizon.depth || !kind.acts_on(&r.successors) {
                continue;
            }
            for &(i, b) in &designated {
                if r.successors.in_range(b.lo, b.hi)?.is_empty() {
                    failure = Some((r.node.clone(), i));
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })?;
    if let Some((node, block)) = failure {
        return Err(SurgeryError::EnforcementImpossible { node, block });
    }
    if kind == BranchingKind::Miller && !saw_infinite {
        return Err(SurgeryError::NoInfiniteBranching { depth: horizon.depth });
    }
    Ok(LazyTree::new(LaverThin {
        base: t.clone(),
        plan: plan.clone(),
        kind,
        horizon,
        designated,
    }))
}

/// Block indices `i ≤ i_max` such that every acted-on node within the
/// horizon has a successor in every sub-block of block `i`.
pub fn branching_good_blocks(
    t: &LazyTree,
    x: &EnumeratedSet,
    i_max: u32,
    kind: BranchingKind,
    horizon: Horizon,
) -> Result<Vec<u32>, SurgeryError> {
    let mut good: Vec<u32> = (0..=i_max).collect();
    walk_levels(t, &Node::root(), horizon.depth, Some(horizon.value_bound), |level, reps| {
        if level >= horizon.depth {
            return Ok(false);
        }
        for r in reps {
            if kind.acts_on(&r.successors) {
                let mut keep = Vec::with_capacity(good.len());
                for &i in &good {
                    if successors_obey(&r.successors, x, i).map_err(|e| match e {
                        SurgeryError::Enumeration(b) => TreeError::Enumeration(b),
                        SurgeryError::Tree(t) => t,
                        other => TreeError::Oracle(other.to_string()),
                    })? {
                        keep.push(i);
                    }
                }
                good = keep;
            }
        }
        Ok(!good.is_empty())
    })?;
    Ok(good)
}

pub fn laver_thin(t: &LazyTree, plan: &ThinPlan, horizon: Horizon) -> Result<LazyTree, SurgeryError> {
    branching_thin(t, plan, BranchingKind::Laver, horizon)
}

pub fn miller_thin(t: &LazyTree, plan: &ThinPlan, horizon: Horizon) -> Result<LazyTree, SurgeryError> {
    branching_thin(t, plan, BranchingKind::Miller, horizon)
}

/// Passes iff no node of the intersection, to `depth`, keeps two shared
/// successors with values in `[threshold, value_bound)`.
pub fn branching_incompatibility(
    kind: BranchingKind,
    s1: &LazyTree,
    s2: &LazyTree,
    threshold: u64,
    depth: usize,
    value_bound: u64,
) -> Result<IncompatibilityCertificate, SurgeryError> {
    if value_bound <= threshold {
        return Err(SurgeryError::HorizonTooShort {
            depth: value_bound as usize,
            divergence_level: threshold,
        });
    }
    certify(kind.forcing(), s1, s2, threshold, depth, Some(value_bound))
}

pub fn laver_incompatibility(
    s1: &LazyTree,
    s2: &LazyTree,
    threshold: u64,
    depth: usize,
    value_bound: u64,
) -> Result<IncompatibilityCertificate, SurgeryError> {
    branching_incompatibility(BranchingKind::Laver, s1, s2, threshold, depth, value_bound)
}

pub fn miller_incompatibility(
    s1: &LazyTree,
    s2: &LazyTree,
    threshold: u64,
    depth: usize,
    value_bound: u64,
) -> Result<IncompatibilityCertificate, SurgeryError> {
    branching_incompatibility(BranchingKind::Miller, s1, s2, threshold, depth, value_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surgery::{divergence_level, ev_diff_family, Coloring, LowPolicy};
    use crate::trees::oracles::OmegaLevels;
    use std::collections::BTreeSet;

    const H: Horizon = Horizon {
        depth: 3,
        value_bound: 64,
    };

    fn laver(succ: EnumeratedSet) -> LazyTree {
        LazyTree::new(OmegaLevels::laver(0, succ))
    }

    fn plan(h: Coloring, enforced: Vec<u32>) -> ThinPlan {
        ThinPlan::new(EnumeratedSet::evens(), h, enforced, LowPolicy::Keep).unwrap()
    }

    fn values(t: &LazyTree, depth: usize) -> BTreeSet<u64> {
        t.truncate(depth, Some(16))
            .unwrap()
            .nodes()
            .iter()
            .flat_map(|n| n.entries().to_vec())
            .collect()
    }

    #[test]
    fn weakly_obeys_examples() {
        let root = Node::root();
        let evens = laver(EnumeratedSet::evens());
        for i in 0..5 {
            assert!(laver_weakly_obeys_at(&evens, &root, &EnumeratedSet::multiples(4), i).unwrap());
        }
        let powers = laver(EnumeratedSet::Powers { base: 2 });
        assert!(!laver_weakly_obeys_at(&powers, &root, &EnumeratedSet::evens(), 3).unwrap());
        let omega = laver(EnumeratedSet::naturals());
        assert!(laver_weakly_obeys_at(&omega, &root, &EnumeratedSet::Affine { a: 7, b: 3 }, 3).unwrap());
    }

    #[test]
    fn extract_examples() {
        let evens = laver(EnumeratedSet::evens());
        let x0 = laver_extract_x0(&evens, &[Node::root()], 100).unwrap();
        assert_eq!(x0.mu(0).unwrap(), 0);
        assert_eq!(x0.mu(1).unwrap(), 1);
        assert_eq!(x0.mu(4).unwrap(), 7);
        // root: {2,4,…}; everything else: {3,6,…}
        let two_three = LazyTree::new(TwoPoints);
        let x0 = laver_extract_x0(&two_three, &[Node::root(), Node::new(vec![2])], 100).unwrap();
        assert_eq!((x0.mu(0).unwrap(), x0.mu(1).unwrap()), (0, 4));
        // brute force: least v with an even ≥ 2 and a multiple of 3 ≥ 3 in [0, v)
        let v = (1..100u64)
            .find(|&v| (0..v).any(|k| k >= 2 && k % 2 == 0) && (0..v).any(|k| k >= 3 && k % 3 == 0))
            .unwrap();
        assert_eq!(v, 4);
        let late = laver(EnumeratedSet::Affine { a: 1, b: 100 });
        assert!(matches!(
            laver_extract_x0(&late, &[Node::root()], 50),
            Err(SurgeryError::BoundExhausted { .. })
        ));
    }

    #[derive(Debug)]
    struct TwoPoints;

    impl Oracle for TwoPoints {
        fn width(&self) -> Width {
            Width::Omega
        }

        fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
            let a = if node.is_root() { 2 } else { 3 };
            Ok(Successors::Infinite(EnumeratedSet::Affine { a, b: a }))
        }

        fn describe(&self) -> TreeRef {
            TreeRef::Name("two-points".into())
        }
    }

    #[test]
    fn thin_examples() {
        let omega = laver(EnumeratedSet::naturals());
        let s = laver_thin(&omega, &plan(Coloring::Modular(0), vec![0, 1, 2]), H).unwrap();
        assert_eq!(values(&s, 3), BTreeSet::from([2, 3, 4, 5, 8, 9]));
        let top = Coloring::Explicit(vec![0, 1, 3, 7]);
        let s = laver_thin(&omega, &plan(top, vec![0, 1, 2]), H).unwrap();
        assert_eq!(values(&s, 3), BTreeSet::from([2, 3, 6, 7, 14, 15]));
        let odds = laver(EnumeratedSet::odds());
        let s = laver_thin(&odds, &plan(Coloring::Modular(0), vec![1]), H).unwrap();
        assert_eq!(values(&s, 2), BTreeSet::from([5]));
    }

    #[test]
    fn thin_rejects_sparse_successors() {
        let powers = laver(EnumeratedSet::Powers { base: 2 });
        // block (3, 1) of the evens is [18, 20)
        let err = laver_thin(&powers, &plan(Coloring::Modular(1), vec![3]), H).unwrap_err();
        assert!(matches!(err, SurgeryError::EnforcementImpossible { block: 3, .. }));
    }

    #[test]
    fn miller_examples() {
        let miller = LazyTree::new(OmegaLevels {
            levels: EnumeratedSet::explicit(vec![3, 1000]).unwrap(),
            successors: EnumeratedSet::naturals(),
        });
        let p = plan(Coloring::Modular(0), vec![0, 1]);
        let s = miller_thin(&miller, &p, Horizon { depth: 5, value_bound: 32 }).unwrap();
        let t = s.truncate(5, Some(32)).unwrap();
        assert_eq!(t.ramification_points(), BTreeSet::from(["0.0.0".parse().unwrap()]));
        assert_eq!(t.children(&"0.0.0".parse().unwrap()), &[2, 3, 4, 5]);

        let omega = laver(EnumeratedSet::naturals());
        let a = laver_thin(&omega, &p, H).unwrap().truncate(3, Some(32)).unwrap();
        let b = miller_thin(&omega, &p, H).unwrap().truncate(3, Some(32)).unwrap();
        assert_eq!(a, b);

        let finite = LazyTree::new(OmegaLevels {
            levels: EnumeratedSet::Affine { a: 1, b: 50 },
            successors: EnumeratedSet::naturals(),
        });
        assert!(matches!(
            miller_thin(&finite, &p, Horizon { depth: 10, value_bound: 32 }),
            Err(SurgeryError::NoInfiniteBranching { depth: 10 })
        ));
    }

    #[test]
    fn incompatibility_examples() {
        let omega = laver(EnumeratedSet::naturals());
        let fam = ev_diff_family(3);
        let enforced = vec![0, 1, 2, 3];
        let s1 = laver_thin(&omega, &plan(fam[1].clone(), enforced.clone()), H).unwrap();
        let s2 = laver_thin(&omega, &plan(fam[2].clone(), enforced), H).unwrap();
        let threshold = divergence_level(&EnumeratedSet::evens(), 1, 2).unwrap();
        let cert = laver_incompatibility(&s1, &s2, threshold, 4, 64).unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert!(!laver_incompatibility(&s1, &s1, threshold, 4, 64).unwrap().passed());

        // share only the stem ⟨0⟩
        let a = LazyTree::new(OmegaLevels {
            levels: EnumeratedSet::Affine { a: 1, b: 1 },
            successors: EnumeratedSet::evens(),
        });
        let b = LazyTree::new(OmegaLevels {
            levels: EnumeratedSet::Affine { a: 1, b: 1 },
            successors: EnumeratedSet::odds(),
        });
        let cert = laver_incompatibility(&a, &b, 0, 4, 64).unwrap();
        assert!(cert.passed());
        assert!(cert.violations.is_empty() && cert.shared_ramifications.is_empty());
    }
}
