use serde::{Deserialize, Serialize};

use super::SurgeryError;
use crate::trees::{walk_levels, LazyTree, Meet, Node};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    Sacks,
    Laver,
    Miller,
    Silver,
}

impl ForcingKind {
    /// Laver and Miller certificates threshold successor values, not levels.
    pub fn thresholds_values(&self) -> bool {
        matches!(self, ForcingKind::Laver | ForcingKind::Miller)
    }
}

/// A node of the intersection that keeps two or more successors.
/// `multiplicity` counts the nodes of the same level it stands for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedSplit {
    pub node: Node,
    pub level: usize,
    pub multiplicity: u64,
    /// Shared successor values; for Laver/Miller only those at or above the threshold.
    pub successors: Vec<u64>,
}

/// Finite evidence that two conditions are incompatible: the intersection of
/// their truncations has no ramification point past the divergence.
///
/// For Sacks and Silver, `divergence_level` is a level and a violation is a
/// shared split at or above it. For Laver and Miller it is a successor value,
/// and a violation is a node with two shared successors at or above it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncompatibilityCertificate {
    pub kind: ForcingKind,
    pub divergence_level: u64,
    pub checked_to: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_bound: Option<u64>,
    pub shared_ramifications: Vec<SharedSplit>,
    pub violations: Vec<SharedSplit>,
}

impl IncompatibilityCertificate {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Walks the meet of the two trees to `depth` and sorts its ramification
/// points into shared splits and violations.
pub(crate) fn certify(
    kind: ForcingKind,
    s1: &LazyTree,
    s2: &LazyTree,
    divergence_level: u64,
    depth: usize,
    value_bound: Option<u64>,
) -> Result<IncompatibilityCertificate, SurgeryError> {
    let meet = Meet {
        left: s1,
        right: s2,
        value_bound,
    };
    let mut shared = Vec::new();
    let mut violations = Vec::new();
    walk_levels(&meet, &Node::root(), depth, value_bound, |level, reps| {
        if level >= depth {
            return Ok(false);
        }
        for r in reps {
            let succ = r.successors.below(value_bound)?;
            if succ.len() < 2 {
                continue;
            }
            if kind.thresholds_values() {
                let high: Vec<u64> = succ.iter().copied().filter(|&v| v >= divergence_level).collect();
                let entry = SharedSplit {
                    node: r.node.clone(),
                    level,
                    multiplicity: r.multiplicity,
                    successors: if high.len() >= 2 { high.clone() } else { succ.clone() },
                };
                if high.len() >= 2 {
                    violations.push(entry);
                } else {
                    shared.push(entry);
                }
            } else {
                let entry = SharedSplit {
                    node: r.node.clone(),
                    level,
                    multiplicity: r.multiplicity,
                    successors: succ,
                };
                if (level as u64) < divergence_level {
                    shared.push(entry);
                } else {
                    violations.push(entry);
                }
            }
        }
        Ok(true)
    })?;
    Ok(IncompatibilityCertificate {
        kind,
        divergence_level,
        checked_to: depth,
        value_bound,
        shared_ramifications: shared,
        violations,
    })
}
