use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::certificate::{certify, ForcingKind, IncompatibilityCertificate};
use super::plan::{split_permitted, Coloring, ThinPlan};
use super::SurgeryError;
use crate::baire::EnumeratedSet;
use crate::registry::{TreeRef, TreeSpec};
use crate::trees::{ClassKey, FiniteTree, LazyTree, Node, Oracle, Successors, TreeError, Width};

/// Restriction of the free positions to the levels a coloring permits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermitMask {
    #[serde(rename = "X")]
    pub x: EnumeratedSet,
    pub h: Coloring,
}

/// A partial function ω ⇀ 2 with infinite complement of its domain.
///
/// Positions in `free` that every mask permits are undetermined; every other
/// position takes its entry in `values`, or 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SilverCondition {
    pub free: EnumeratedSet,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<u64, u8>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub masks: Vec<PermitMask>,
}

impl SilverCondition {
    /// The empty condition: every position free.
    pub fn empty() -> Self {
        SilverCondition {
            free: EnumeratedSet::naturals(),
            values: BTreeMap::new(),
            masks: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SurgeryError> {
        self.free.validate()?;
        if let Some((k, v)) = self.values.iter().find(|(_, &v)| v > 1) {
            return Err(SurgeryError::Invalid(format!("value {v} at position {k} is not a bit")));
        }
        for m in &self.masks {
            m.h.validate()?;
        }
        Ok(())
    }

    pub fn is_free(&self, k: u64) -> Result<bool, SurgeryError> {
        if !self.free.contains(k)? {
            return Ok(false);
        }
        for m in &self.masks {
            if !split_permitted(&m.x, &m.h, k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn value(&self, k: u64) -> u8 {
        self.values.get(&k).copied().unwrap_or(0)
    }

    /// Free positions in `[lo, hi)`.
    pub fn free_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>, SurgeryError> {
        let mut out = Vec::new();
        for k in self.free.values_in(lo, hi)? {
            if self.is_free(k)? {
                out.push(k);
            }
        }
        Ok(out)
    }
}

/// The tree of all total extensions of a Silver condition.
#[derive(Debug, Clone)]
pub struct SilverTree(pub SilverCondition);

impl Oracle for SilverTree {
    fn width(&self) -> Width {
        Width::Binary
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        let k = node.len() as u64;
        let free = self.0.is_free(k).map_err(|e| match e {
            SurgeryError::Tree(t) => t,
            SurgeryError::Enumeration(b) => TreeError::Enumeration(b),
            other => TreeError::Oracle(other.to_string()),
        })?;
        if free {
            Ok(Successors::Finite(vec![0, 1]))
        } else {
            Ok(Successors::Finite(vec![self.0.value(k) as u64]))
        }
    }

    fn class_key(&self, _node: &Node) -> Option<ClassKey> {
        Some(Vec::new())
    }

    fn describe(&self) -> TreeRef {
        TreeRef::spec(TreeSpec::Silver(self.0.clone()))
    }
}

pub fn silver_tree(p: &SilverCondition) -> LazyTree {
    LazyTree::new(SilverTree(p.clone()))
}

/// `{s ∈ 2^{≤n} : s(k) = p(k) for fixed k < |s|}`.
pub fn silver_to_tree(p: &SilverCondition, n: usize) -> Result<FiniteTree, SurgeryError> {
    p.validate()?;
    Ok(silver_tree(p).truncate(n, None)?)
}

/// Block indices `i ≤ i_max` all of whose sub-blocks contain a free position.
pub fn silver_good_blocks(p: &SilverCondition, x: &EnumeratedSet, i_max: u32) -> Result<Vec<u32>, SurgeryError> {
    let mut out = Vec::new();
    'blocks: for i in 0..=i_max {
        for j in 0..1u64 << i {
            let b = crate::baire::block(x, i, j)?;
            if p.free_in(b.lo, b.hi)?.is_empty() {
                continue 'blocks;
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// Fixes (to 0) the free positions outside the levels `plan` permits.
pub fn silver_thin(p: &SilverCondition, plan: &ThinPlan) -> Result<SilverCondition, SurgeryError> {
    p.validate()?;
    plan.validate()?;
    for &i in &plan.enforced {
        let b = plan.designated(i)?;
        if p.free_in(b.lo, b.hi)?.is_empty() {
            return Err(SurgeryError::NotGood { i });
        }
    }
    let mut q = p.clone();
    q.masks.push(PermitMask {
        x: plan.x.clone(),
        h: plan.h.clone(),
    });
    Ok(q)
}

/// The Sacks certificate on the trees of the two conditions.
pub fn silver_incompatibility(
    p: &SilverCondition,
    q: &SilverCondition,
    divergence_level: u64,
    depth: usize,
) -> Result<IncompatibilityCertificate, SurgeryError> {
    if (depth as u64) <= divergence_level {
        return Err(SurgeryError::HorizonTooShort {
            depth,
            divergence_level,
        });
    }
    certify(ForcingKind::Silver, &silver_tree(p), &silver_tree(q), divergence_level, depth, None)
}
