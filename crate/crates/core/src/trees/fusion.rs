use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{FiniteTree, LeqMode, Node, TreeError};

/// When the rank-≤k ramification points stopped changing along a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankStability {
    pub rank: usize,
    /// Least index from which every later member has the same rank-≤k points.
    pub stable_from: usize,
    pub points: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionReport {
    pub depth: usize,
    pub ranks: Vec<RankStability>,
}

/// Intersects a finite fusion chain truncated to `depth`.
///
/// Each step must satisfy `seq[m] ≤ₘ seq[m+1]` with splits preserved.
pub fn stabilized_fusion(seq: &[FiniteTree], depth: usize) -> Result<(FiniteTree, FusionReport), TreeError> {
    let cut: Vec<FiniteTree> = seq.iter().map(|t| t.truncate(depth)).collect();
    let Some(first) = cut.first() else {
        return Ok((
            FiniteTree::chain(super::Width::Binary, &Node::root()),
            FusionReport { depth, ranks: Vec::new() },
        ));
    };
    for w in cut.windows(2) {
        if w[0].width() != w[1].width() {
            return Err(TreeError::WidthMismatch);
        }
    }
    for (m, w) in cut.windows(2).enumerate() {
        if !w[0].tree_leq_n(&w[1], m, LeqMode::Strict) {
            return Err(TreeError::FusionBroken { index: m });
        }
    }
    let mut out = first.clone();
    for t in &cut[1..] {
        out = out.intersection(t);
    }

    let mut ranks = Vec::new();
    for k in 0..cut.len().saturating_sub(1) {
        let sets: Vec<BTreeSet<Node>> = cut.iter().map(|t| t.rank_at_most(k)).collect();
        let last = sets.last().unwrap();
        let mut stable_from = sets.len() - 1;
        while stable_from > 0 && &sets[stable_from - 1] == last {
            stable_from -= 1;
        }
        ranks.push(RankStability {
            rank: k,
            stable_from,
            points: last.iter().cloned().collect(),
        });
    }
    Ok((out, FusionReport { depth, ranks }))
}
