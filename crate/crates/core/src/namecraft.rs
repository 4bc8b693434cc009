//! Assigning targets to the members of an antichain so that above every
//! "large" condition each target is hit, over a finite poset.
//!
//! "Has as many extensions in the antichain as the poset has elements" is
//! replaced by a count threshold; the assignment is a greedy matching that
//! succeeds whenever the threshold is at least `|Large| · |targets|`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NameError {
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("{a:?} and {b:?} are below each other but distinct")]
    NotAntisymmetric { a: String, b: String },
    #[error("antichain {index}: {a:?} and {b:?} are compatible")]
    NotAntichain { index: usize, a: String, b: String },
    #[error("threshold {threshold} is below the number of targets {targets}")]
    ThresholdTooSmall { threshold: usize, targets: usize },
    #[error("no fresh member of the antichain above {p:?} for target {target:?}")]
    Starved { p: String, target: String },
    #[error("no targets")]
    NoTargets,
}

/// A finite partial order; `leq(p, q)` means `q` is stronger than `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PosetSpec", into = "PosetSpec")]
pub struct FinitePoset {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
}

impl TryFrom<PosetSpec> for FinitePoset {
    type Error = NameError;

    fn try_from(spec: PosetSpec) -> Result<Self, NameError> {
        let mut index = HashMap::new();
        for (k, e) in spec.elements.iter().enumerate() {
            if index.insert(e.clone(), k).is_some() {
                return Err(NameError::DuplicateElement(e.clone()));
            }
        }
        let look = |e: &String| index.get(e).copied().ok_or_else(|| NameError::UnknownElement(e.clone()));
        let pairs = spec
            .leq
            .iter()
            .map(|(a, b)| Ok((look(a)?, look(b)?)))
            .collect::<Result<Vec<_>, NameError>>()?;
        FinitePoset::new(spec.elements, &pairs)
    }
}

impl From<FinitePoset> for PosetSpec {
    fn from(p: FinitePoset) -> Self {
        let mut leq = Vec::new();
        for a in 0..p.len() {
            for b in 0..p.len() {
                if a != b && p.leq[a][b] {
                    leq.push((p.names[a].clone(), p.names[b].clone()));
                }
            }
        }
        PosetSpec {
            elements: p.names,
            leq,
        }
    }
}

impl FinitePoset {
    /// Reflexive-transitive closure of `pairs`, rejected unless antisymmetric.
    pub fn new(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, NameError> {
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (k, row) in leq.iter_mut().enumerate() {
            row[k] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(NameError::UnknownElement(format!("#{}", a.max(b))));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            let through = leq[k].clone();
            for row in leq.iter_mut().filter(|row| row[k]) {
                for (cell, &kb) in row.iter_mut().zip(&through) {
                    *cell |= kb;
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if leq[a][b] && leq[b][a] {
                    return Err(NameError::NotAntisymmetric {
                        a: names[a].clone(),
                        b: names[b].clone(),
                    });
                }
            }
        }
        Ok(FinitePoset { names, leq })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, k: usize) -> &str {
        &self.names[k]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, NameError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| NameError::UnknownElement(name.to_string()))
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.leq[p][q]
    }

    /// Some element is above both.
    pub fn compatible(&self, a: usize, b: usize) -> bool {
        (0..self.len()).any(|r| self.leq[a][r] && self.leq[b][r])
    }

    /// Elements with nothing strictly above them.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| (0..self.len()).all(|b| b == a || !self.leq[a][b]))
            .collect()
    }

    /// Members of `set` above `p`.
    pub fn above_in(&self, p: usize, set: &[usize]) -> Vec<usize> {
        set.iter().copied().filter(|&q| self.leq[p][q]).collect()
    }
}

/// Antichains given as index lists, each pairwise incompatible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntichainFamily {
    sets: Vec<Vec<usize>>,
}

impl AntichainFamily {
    pub fn new(poset: &FinitePoset, sets: Vec<Vec<usize>>) -> Result<Self, NameError> {
        for (index, set) in sets.iter().enumerate() {
            for (k, &a) in set.iter().enumerate() {
                if a >= poset.len() {
                    return Err(NameError::UnknownElement(format!("#{a}")));
                }
                for &b in &set[k + 1..] {
                    if a == b || poset.compatible(a, b) {
                        return Err(NameError::NotAntichain {
                            index,
                            a: poset.name(a).to_string(),
                            b: poset.name(b).to_string(),
                        });
                    }
                }
            }
        }
        Ok(AntichainFamily { sets })
    }

    pub fn from_names(poset: &FinitePoset, sets: &[Vec<String>]) -> Result<Self, NameError> {
        let sets = sets
            .iter()
            .map(|s| s.iter().map(|n| poset.index_of(n)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(poset, sets)
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarVerdict {
    /// Element ↦ least antichain index with enough extensions above it.
    pub witnesses: BTreeMap<String, usize>,
    pub unwitnessed: Vec<String>,
}

impl StarVerdict {
    pub fn holds(&self) -> bool {
        self.unwitnessed.is_empty()
    }
}

/// For each element, the least antichain with at least `threshold` members
/// above it.
pub fn verify_star(
    poset: &FinitePoset,
    fam: &AntichainFamily,
    targets: usize,
    threshold: usize,
) -> Result<StarVerdict, NameError> {
    if threshold < targets {
        return Err(NameError::ThresholdTooSmall { threshold, targets });
    }
    let mut witnesses = BTreeMap::new();
    let mut unwitnessed = Vec::new();
    for p in 0..poset.len() {
        match fam.sets.iter().position(|a| poset.above_in(p, a).len() >= threshold) {
            Some(z) => {
                witnesses.insert(poset.name(p).to_string(), z);
            }
            None => unwitnessed.push(poset.name(p).to_string()),
        }
    }
    Ok(StarVerdict {
        witnesses,
        unwitnessed,
    })
}

/// Elements with at least `threshold` members of `a` above them.
pub fn large_elements(poset: &FinitePoset, a: &[usize], threshold: usize) -> Vec<usize> {
    (0..poset.len())
        .filter(|&p| poset.above_in(p, a).len() >= threshold)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub p: usize,
    pub target: usize,
    pub q: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Phi {
    /// `φ(q)` for each `q` of the antichain, in antichain order.
    pub assignment: Vec<(usize, usize)>,
    pub pairs: Vec<PairWitness>,
    pub large: Vec<usize>,
    /// `threshold ≥ |Large| · |targets|`.
    pub precondition: bool,
}

impl Phi {
    pub fn get(&self, q: usize) -> Option<usize> {
        self.assignment.iter().find(|(k, _)| *k == q).map(|(_, t)| *t)
    }
}

/// Greedy over pairs `(p, target)`, `p` large in element order: each pair
/// takes the least unused member of `a` above `p`. Unused members get target 0.
pub fn build_phi(
    poset: &FinitePoset,
    a: &[usize],
    targets: &[String],
    threshold: usize,
) -> Result<Phi, NameError> {
    if targets.is_empty() {
        return Err(NameError::NoTargets);
    }
    let large = large_elements(poset, a, threshold);
    let mut phi: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pairs = Vec::new();
    for &p in &large {
        for (target, name) in targets.iter().enumerate() {
            let q = a
                .iter()
                .copied()
                .find(|&q| poset.leq(p, q) && !phi.contains_key(&q))
                .ok_or_else(|| NameError::Starved {
                    p: poset.name(p).to_string(),
                    target: name.clone(),
                })?;
            phi.insert(q, target);
            pairs.push(PairWitness { p, target, q });
        }
    }
    Ok(Phi {
        assignment: a.iter().map(|&q| (q, phi.get(&q).copied().unwrap_or(0))).collect(),
        pairs,
        precondition: threshold >= large.len() * targets.len(),
        large,
    })
}

/// Exhaustive check: above every large `p`, every target is some `φ(q)`.
pub fn check_phi(poset: &FinitePoset, a: &[usize], phi: &Phi, targets: usize, threshold: usize) -> bool {
    if a.iter().any(|&q| phi.get(q).is_none_or(|t| t >= targets)) {
        return false;
    }
    large_elements(poset, a, threshold).into_iter().all(|p| {
        (0..targets).all(|t| a.iter().any(|&q| poset.leq(p, q) && phi.get(q) == Some(t)))
    })
}
