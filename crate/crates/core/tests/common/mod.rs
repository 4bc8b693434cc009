//! Brute-force oracles shared by the integration tests. Trees here are plain
//! sets of bit strings; nothing is computed through the library.

#![allow(dead_code)]

use std::collections::BTreeSet;

use treeforge_core::trees::{FiniteTree, Node, Width};

pub type Bits = Vec<u8>;
pub type NaiveTree = BTreeSet<Bits>;

/// Tree from per-node choices over the heap-indexed full tree of `depth`:
/// 0 leaf, 1 left child, 2 right child, 3 both.
pub fn naive_from_choices(choices: &[u8], depth: usize) -> NaiveTree {
    let mut out = NaiveTree::new();
    let mut frontier = vec![Bits::new()];
    out.insert(Bits::new());
    while let Some(n) = frontier.pop() {
        if n.len() >= depth {
            continue;
        }
        let idx = n.iter().fold(1usize, |acc, &b| acc * 2 + b as usize);
        let c = choices.get(idx - 1).copied().unwrap_or(0) % 4;
        for (bit, on) in [(0u8, c & 1 != 0), (1u8, c & 2 != 0)] {
            if on {
                let mut child = n.clone();
                child.push(bit);
                out.insert(child.clone());
                frontier.push(child);
            }
        }
    }
    out
}

pub fn to_finite(t: &NaiveTree) -> FiniteTree {
    FiniteTree::new(
        Width::Binary,
        t.iter().map(|b| Node::new(b.iter().map(|&x| x as u64).collect())),
    )
    .unwrap()
}

pub fn to_bits(n: &Node) -> Bits {
    n.entries().iter().map(|&x| x as u8).collect()
}

pub fn children(t: &NaiveTree, n: &Bits) -> usize {
    (0..2u8)
        .filter(|&b| {
            let mut c = n.clone();
            c.push(b);
            t.contains(&c)
        })
        .count()
}

pub fn splits(t: &NaiveTree) -> BTreeSet<Bits> {
    t.iter().filter(|n| children(t, n) >= 2).cloned().collect()
}

pub fn rank(t: &NaiveTree, n: &Bits) -> usize {
    (0..n.len()).filter(|&k| children(t, &n[..k].to_vec()) >= 2).count()
}

pub fn skew(t: &NaiveTree) -> bool {
    let lens: Vec<usize> = splits(t).iter().map(Vec::len).collect();
    let distinct: BTreeSet<usize> = lens.iter().copied().collect();
    distinct.len() == lens.len()
}

pub fn comparable(a: &Bits, b: &Bits) -> bool {
    let k = a.len().min(b.len());
    a[..k] == b[..k]
}

pub fn restrict(t: &NaiveTree, at: &Bits) -> NaiveTree {
    t.iter().filter(|s| comparable(s, at)).cloned().collect()
}

/// `T ≤ₙ T'`; `strict` asks the low-rank splits to still split in `T'`.
pub fn leq_n(t: &NaiveTree, stronger: &NaiveTree, n: usize, strict: bool) -> bool {
    stronger.is_subset(t)
        && splits(t)
            .iter()
            .filter(|s| rank(t, s) <= n)
            .all(|s| if strict { children(stronger, s) >= 2 } else { stronger.contains(s) })
}

/// A finite poset as `up[a]` = bitmask of elements `≥ a`.
#[derive(Clone, Debug)]
pub struct NaivePoset {
    pub up: Vec<u32>,
}

impl NaivePoset {
    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a] >> b & 1 == 1
    }

    pub fn compatible(&self, a: usize, b: usize) -> bool {
        self.up[a] & self.up[b] != 0
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len()).map(|k| format!("e{k}")).collect()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && self.leq(a, b))
            .collect()
    }

    /// Adds an element above exactly the down-set `below`.
    pub fn extend(&self, below: u32) -> NaivePoset {
        let k = self.len();
        let mut up = self.up.clone();
        for (a, u) in up.iter_mut().enumerate() {
            if below >> a & 1 == 1 {
                *u |= 1 << k;
            }
        }
        up.push(1 << k);
        NaivePoset { up }
    }

    /// Subsets closed downward.
    pub fn down_sets(&self) -> Vec<u32> {
        let n = self.len();
        (0..1u32 << n)
            .filter(|&s| {
                (0..n).all(|b| s >> b & 1 == 0 || (0..n).all(|a| !self.leq(a, b) || s >> a & 1 == 1))
            })
            .collect()
    }
}

/// Every naturally labelled poset on `n` elements (each labelling of a
/// linear extension counted once).
pub fn posets_of_size(n: usize) -> Vec<NaivePoset> {
    let mut level = vec![NaivePoset { up: Vec::new() }];
    for _ in 0..n {
        level = level
            .iter()
            .flat_map(|p| p.down_sets().into_iter().map(move |d| p.extend(d)))
            .collect();
    }
    level
}

/// Pairwise incompatible subset of `candidates`, chosen greedily in order.
pub fn greedy_antichain(p: &NaivePoset, candidates: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for c in candidates {
        if out.iter().all(|&a| !p.compatible(a, c)) {
            out.push(c);
        }
    }
    out
}
