use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SurgeryError;
use crate::baire::{block, locate_block, Block, EnumeratedSet, MAX_BLOCK_INDEX};

/// A function `h` with `h(i) < 2^i`, choosing one sub-block of each block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Coloring {
    /// `h(i) = α mod 2^i`.
    Modular(u64),
    /// Values for `i = 0, 1, …`; undefined past the end.
    Explicit(Vec<u64>),
}

impl Coloring {
    pub fn eval(&self, i: u32) -> Result<u64, SurgeryError> {
        let v = match self {
            Coloring::Modular(alpha) => {
                if i >= 64 {
                    *alpha
                } else {
                    alpha % (1u64 << i)
                }
            }
            Coloring::Explicit(values) => *values
                .get(i as usize)
                .ok_or(SurgeryError::ColoringUndefined { i })?,
        };
        if i < 64 && v >= 1u64 << i {
            return Err(SurgeryError::ColoringOutOfRange { i, value: v });
        }
        Ok(v)
    }

    pub fn validate(&self) -> Result<(), SurgeryError> {
        if let Coloring::Explicit(values) = self {
            for i in 0..values.len() as u32 {
                self.eval(i)?;
            }
        }
        Ok(())
    }
}

/// Behaviour of a thinned tree below `μ_X(1)`, where no block applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowPolicy {
    #[default]
    Keep,
    Leftmost,
}

/// The data of one thinning: the set, the coloring, and the blocks whose
/// designated sub-block must keep a split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinPlan {
    #[serde(rename = "X")]
    pub x: EnumeratedSet,
    pub h: Coloring,
    pub enforced: Vec<u32>,
    #[serde(default)]
    pub low_policy: LowPolicy,
}

impl ThinPlan {
    pub fn new(x: EnumeratedSet, h: Coloring, enforced: Vec<u32>, low_policy: LowPolicy) -> Result<Self, SurgeryError> {
        let plan = ThinPlan {
            x,
            h,
            enforced,
            low_policy,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Enforced indices sorted and distinct, colorings defined on them.
    pub fn validate(&self) -> Result<(), SurgeryError> {
        self.h.validate()?;
        let mut seen = BTreeSet::new();
        for (k, &i) in self.enforced.iter().enumerate() {
            if i > MAX_BLOCK_INDEX - 1 {
                return Err(crate::baire::BaireError::BlockIndexTooLarge(i).into());
            }
            if !seen.insert(i) || (k > 0 && self.enforced[k - 1] > i) {
                return Err(SurgeryError::EnforcedNotSorted);
            }
            self.h.eval(i)?;
        }
        Ok(())
    }

    /// `block(X, i, h(i))`.
    pub fn designated(&self, i: u32) -> Result<Block, SurgeryError> {
        Ok(block(&self.x, i, self.h.eval(i)?)?)
    }

    pub fn is_enforced(&self, i: u32) -> bool {
        self.enforced.binary_search(&i).is_ok()
    }

    /// Start levels of the enforced designated sub-blocks.
    pub fn enforced_levels(&self) -> Result<BTreeSet<usize>, SurgeryError> {
        self.enforced
            .iter()
            .map(|&i| Ok(self.designated(i)?.lo as usize))
            .collect()
    }
}

/// Splitting at `level` is allowed: below `μ_X(1)`, or inside the
/// designated sub-block `h(i)` of its block.
pub fn split_permitted(x: &EnumeratedSet, h: &Coloring, level: u64) -> Result<bool, SurgeryError> {
    match locate_block(x, level)? {
        None => Ok(true),
        Some((i, j)) => Ok(h.eval(i)? == j),
    }
}

/// `h_α(i) = α mod 2^i` for `α < count`.
pub fn ev_diff_family(count: usize) -> Vec<Coloring> {
    (0..count as u64).map(Coloring::Modular).collect()
}

/// Least `i` with `2^i > max(α, β)`: from there on `h_α(i) ≠ h_β(i)`.
pub fn divergence_index(alpha: u64, beta: u64) -> u32 {
    let m = alpha.max(beta);
    64 - m.leading_zeros()
}

/// `μ_X(2^i)` for the divergence index `i`; two thinnings by `h_α`, `h_β`
/// share no split at or above this level.
pub fn divergence_level(x: &EnumeratedSet, alpha: u64, beta: u64) -> Result<u64, SurgeryError> {
    let i = divergence_index(alpha, beta);
    if i > MAX_BLOCK_INDEX {
        return Err(crate::baire::BaireError::BlockIndexTooLarge(i).into());
    }
    Ok(x.mu(1u64 << i)?)
}
