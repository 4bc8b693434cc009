use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::certificate::{certify, ForcingKind, IncompatibilityCertificate};
use super::plan::{LowPolicy, ThinPlan};
use super::SurgeryError;
use crate::baire::{block, locate_block, Block, EnumeratedSet, MAX_BLOCK_INDEX};
use crate::registry::{TreeRef, TreeSpec};
use crate::trees::{
    walk_levels, BelowMode, LazyTree, Node, Oracle, SplittingBound, Successors, TreeError, Width,
};

/// A node at the start of a sub-block and the split that serves it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObeyWitness {
    pub node: Node,
    pub split: Node,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obedience {
    pub holds: bool,
    pub witnesses: Vec<ObeyWitness>,
    /// First node found without a split below its sub-block's end.
    pub failure: Option<Node>,
}

/// Whether every node of `t` at each level `μ_X(2^i + j)`, `j < 2^i`,
/// ramifies below `μ_X(2^i + j + 1)`.
pub fn sacks_weakly_obeys_at(
    t: &LazyTree,
    x: &EnumeratedSet,
    i: u32,
    mode: BelowMode,
) -> Result<Obedience, SurgeryError> {
    if i >= MAX_BLOCK_INDEX {
        return Err(crate::baire::BaireError::BlockIndexTooLarge(i).into());
    }
    let count = 1u64 << i;
    let mut starts = Vec::with_capacity(count as usize);
    for j in 0..count {
        let b = block(x, i, j)?;
        starts.push((b.lo as usize, b.hi as usize));
    }
    let last = starts.last().map(|s| s.0).unwrap_or(0);
    let mut frontiers: HashMap<usize, Vec<(Node, u64)>> = HashMap::new();
    walk_levels(t, &Node::root(), last, None, |level, reps| {
        if starts.iter().any(|s| s.0 == level) {
            frontiers.insert(level, reps.iter().map(|r| (r.node.clone(), r.multiplicity)).collect());
        }
        Ok(true)
    })?;
    let mut witnesses = Vec::new();
    for (lo, hi) in starts {
        let reps = frontiers.remove(&lo).unwrap_or_default();
        for (node, multiplicity) in reps {
            match t.first_split(&node, mode.limit(hi))? {
                Some(split) => witnesses.push(ObeyWitness {
                    node,
                    split,
                    multiplicity,
                }),
                None => {
                    return Ok(Obedience {
                        holds: false,
                        witnesses,
                        failure: Some(node),
                    })
                }
            }
        }
    }
    Ok(Obedience {
        holds: true,
        witnesses,
        failure: None,
    })
}

/// The block indices `i ≤ i_max` at which `t` weakly obeys `x`.
pub fn good_blocks(t: &LazyTree, x: &EnumeratedSet, i_max: u32, mode: BelowMode) -> Result<Vec<u32>, SurgeryError> {
    let mut out = Vec::new();
    for i in 0..=i_max {
        if sacks_weakly_obeys_at(t, x, i, mode)?.holds {
            out.push(i);
        }
    }
    Ok(out)
}

/// The thinning of a perfect tree by a plan: outside the low region only the
/// least child is kept, except along the path to the earliest split of each
/// enforced designated sub-block.
#[derive(Debug)]
pub struct SacksThin {
    base: LazyTree,
    plan: ThinPlan,
    bound: SplittingBound,
    designated: BTreeMap<u32, Block>,
    splits: Mutex<HashMap<Node, Node>>,
}

impl SacksThin {
    pub fn plan(&self) -> &ThinPlan {
        &self.plan
    }

    pub fn base(&self) -> &LazyTree {
        &self.base
    }

    fn designated_split(&self, anchor: &Node, hi: usize) -> Result<Node, TreeError> {
        if let Some(s) = self.splits.lock().unwrap().get(anchor) {
            return Ok(s.clone());
        }
        let split = self.base.first_split(anchor, hi)?.ok_or_else(|| TreeError::NotPerfect {
            node: anchor.clone(),
            gap: (hi - anchor.len()) as u64,
        })?;
        self.splits.lock().unwrap().insert(anchor.clone(), split.clone());
        Ok(split)
    }

    fn least(&self, node: &Node) -> Result<Successors, TreeError> {
        match self.base.successors(node)?.least()? {
            Some(e) => Ok(Successors::Finite(vec![e])),
            None => Err(TreeError::DeadEnd { node: node.clone() }),
        }
    }
}

/// `gap(d)`: distance from `d` to the end of the first enforced designated
/// sub-block starting at or after `d`, made monotone; no claim past the last.
fn thin_bound(plan: &ThinPlan) -> Result<SplittingBound, SurgeryError> {
    let mut blocks = Vec::new();
    for &i in &plan.enforced {
        blocks.push(plan.designated(i)?);
    }
    let Some(last) = blocks.last() else {
        return Ok(SplittingBound::none());
    };
    let mut table = Vec::with_capacity(last.lo as usize + 1);
    let mut running = 1u64;
    for d in 0..=last.lo {
        let b = blocks.iter().find(|b| b.lo >= d).unwrap();
        running = running.max(b.hi - d);
        table.push(running);
    }
    Ok(SplittingBound::from_table(table, u64::MAX)?)
}

impl Oracle for SacksThin {
    fn width(&self) -> Width {
        Width::Binary
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        let level = node.len();
        let located = locate_block(&self.plan.x, level as u64)?;
        let Some((i, _)) = located else {
            return match self.plan.low_policy {
                LowPolicy::Keep => self.base.successors(node),
                LowPolicy::Leftmost => self.least(node),
            };
        };
        let Some(b) = self.designated.get(&i).filter(|b| b.contains(level as u64)) else {
            return self.least(node);
        };
        let anchor = node.truncated(b.lo as usize);
        let split = self.designated_split(&anchor, b.hi as usize)?;
        if node == &split {
            self.base.successors(node)
        } else if node.is_proper_prefix_of(&split) {
            Ok(Successors::Finite(vec![split.entries()[level]]))
        } else {
            self.least(node)
        }
    }

    fn splitting_bound(&self) -> SplittingBound {
        self.bound.clone()
    }

    fn describe(&self) -> TreeRef {
        TreeRef::spec(TreeSpec::Thinned {
            base: self.base.describe(),
            plan: self.plan.clone(),
        })
    }
}

/// Thins `t` by `plan`; every enforced block must be good for `t`.
pub fn sacks_thin(t: &LazyTree, plan: &ThinPlan) -> Result<LazyTree, SurgeryError> {
    plan.validate()?;
    if t.width() != Width::Binary {
        return Err(TreeError::WidthMismatch.into());
    }
    if plan.enforced.is_empty() {
        return Err(SurgeryError::NoGoodBlocks { index: 0 });
    }
    for &i in &plan.enforced {
        if !sacks_weakly_obeys_at(t, &plan.x, i, BelowMode::Inclusive)?.holds {
            return Err(SurgeryError::NotGood { i });
        }
    }
    Ok(LazyTree::new(SacksThin {
        base: t.clone(),
        plan: plan.clone(),
        bound: thin_bound(plan)?,
        designated: plan
            .enforced
            .iter()
            .map(|&i| Ok((i, plan.designated(i)?)))
            .collect::<Result<_, SurgeryError>>()?,
        splits: Mutex::new(HashMap::new()),
    }))
}

/// Ramification points of `truncate(s1, depth) ∩ truncate(s2, depth)`;
/// passes iff all lie below `divergence_level`.
pub fn sacks_incompatibility(
    s1: &LazyTree,
    s2: &LazyTree,
    divergence_level: u64,
    depth: usize,
) -> Result<IncompatibilityCertificate, SurgeryError> {
    if (depth as u64) <= divergence_level {
        return Err(SurgeryError::HorizonTooShort {
            depth,
            divergence_level,
        });
    }
    certify(ForcingKind::Sacks, s1, s2, divergence_level, depth, None)
}
