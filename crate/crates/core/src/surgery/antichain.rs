use rayon::prelude::*;
use serde::Serialize;

use super::certificate::IncompatibilityCertificate;
use super::laver::{branching_good_blocks, branching_incompatibility, branching_thin, BranchingKind, Horizon};
use super::plan::{divergence_level, ev_diff_family, Coloring, LowPolicy, ThinPlan};
use super::sacks::{good_blocks, sacks_incompatibility, sacks_thin};
use super::silver::{silver_good_blocks, silver_incompatibility, silver_thin, silver_tree, SilverCondition};
use super::SurgeryError;
use crate::baire::EnumeratedSet;
use crate::trees::{BelowMode, LazyTree};

#[derive(Clone, Debug, Serialize)]
pub struct AntichainMember {
    pub index: usize,
    pub plan: ThinPlan,
    #[serde(skip)]
    pub tree: LazyTree,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<SilverCondition>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCertificate {
    pub alpha: usize,
    pub beta: usize,
    pub certificate: IncompatibilityCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Antichain {
    pub members: Vec<AntichainMember>,
    pub certificates: Vec<PairCertificate>,
}

impl Antichain {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.certificate.passed())
    }
}

/// Thins the `α`-th tree by `h_α` on all its good blocks `≤ i_max` and
/// certifies every pair to `depth`.
pub fn antichain_build(
    x: &EnumeratedSet,
    trees: &[LazyTree],
    i_max: u32,
    depth: usize,
    low_policy: LowPolicy,
) -> Result<Antichain, SurgeryError> {
    let colorings = ev_diff_family(trees.len());
    let members = trees
        .par_iter()
        .zip(colorings)
        .enumerate()
        .map(|(index, (t, h))| {
            let enforced = good_blocks(t, x, i_max, BelowMode::Inclusive)?;
            if enforced.is_empty() {
                return Err(SurgeryError::NoGoodBlocks { index });
            }
            let plan = ThinPlan::new(x.clone(), h, enforced, low_policy)?;
            let tree = sacks_thin(t, &plan)?;
            Ok(AntichainMember {
                index,
                plan,
                tree,
                condition: None,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let certificates = all_pairs(members.len())
        .par_iter()
        .map(|&(alpha, beta)| {
            let div = divergence_level(x, alpha as u64, beta as u64)?;
            let certificate = sacks_incompatibility(&members[alpha].tree, &members[beta].tree, div, depth)?;
            Ok(PairCertificate {
                alpha,
                beta,
                certificate,
            })
        })
        .collect::<Result<Vec<_>, SurgeryError>>()?;
    Ok(Antichain {
        members,
        certificates,
    })
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// The Laver or Miller version of [`antichain_build`]: good blocks and
/// certificates are taken within `horizon`; the certificate threshold of a
/// pair is its divergence level read as a successor value.
pub fn branching_antichain(
    kind: BranchingKind,
    x: &EnumeratedSet,
    trees: &[LazyTree],
    i_max: u32,
    horizon: Horizon,
) -> Result<Antichain, SurgeryError> {
    let members = trees
        .par_iter()
        .zip(ev_diff_family(trees.len()))
        .enumerate()
        .map(|(index, (t, h))| {
            let enforced = branching_good_blocks(t, x, i_max, kind, horizon)?;
            if enforced.is_empty() {
                return Err(SurgeryError::NoGoodBlocks { index });
            }
            let plan = ThinPlan::new(x.clone(), h, enforced, LowPolicy::Keep)?;
            let tree = branching_thin(t, &plan, kind, horizon)?;
            Ok(AntichainMember {
                index,
                plan,
                tree,
                condition: None,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let certificates = all_pairs(members.len())
        .par_iter()
        .map(|&(alpha, beta)| {
            let threshold = divergence_level(x, alpha as u64, beta as u64)?;
            let certificate = branching_incompatibility(
                kind,
                &members[alpha].tree,
                &members[beta].tree,
                threshold,
                horizon.depth,
                horizon.value_bound,
            )?;
            Ok(PairCertificate {
                alpha,
                beta,
                certificate,
            })
        })
        .collect::<Result<Vec<_>, SurgeryError>>()?;
    Ok(Antichain {
        members,
        certificates,
    })
}

/// The Silver version: conditions are thinned on their good blocks and
/// certified through their trees.
pub fn silver_antichain(
    x: &EnumeratedSet,
    conditions: &[SilverCondition],
    i_max: u32,
    depth: usize,
) -> Result<Antichain, SurgeryError> {
    let members = conditions
        .par_iter()
        .zip(ev_diff_family(conditions.len()))
        .enumerate()
        .map(|(index, (p, h)): (usize, (&SilverCondition, Coloring))| {
            let enforced = silver_good_blocks(p, x, i_max)?;
            if enforced.is_empty() {
                return Err(SurgeryError::NoGoodBlocks { index });
            }
            let plan = ThinPlan::new(x.clone(), h, enforced, LowPolicy::Keep)?;
            let q = silver_thin(p, &plan)?;
            Ok(AntichainMember {
                index,
                plan,
                tree: silver_tree(&q),
                condition: Some(q),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let certificates = all_pairs(members.len())
        .par_iter()
        .map(|&(alpha, beta)| {
            let div = divergence_level(x, alpha as u64, beta as u64)?;
            let (p, q) = (&members[alpha].condition, &members[beta].condition);
            let certificate = silver_incompatibility(p.as_ref().unwrap(), q.as_ref().unwrap(), div, depth)?;
            Ok(PairCertificate {
                alpha,
                beta,
                certificate,
            })
        })
        .collect::<Result<Vec<_>, SurgeryError>>()?;
    Ok(Antichain {
        members,
        certificates,
    })
}
