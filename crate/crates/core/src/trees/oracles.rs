//! Built-in tree sources.

use serde::{Deserialize, Serialize};

use super::walk::ClassKey;
use super::{FiniteTree, Node, Oracle, SplittingBound, Successors, TreeError, Width};
use crate::baire::EnumeratedSet;
use crate::registry::{TreeRef, TreeSpec};

/// `2^{<ω}`.
#[derive(Debug, Clone, Copy)]
pub struct FullBinary;

impl Oracle for FullBinary {
    fn width(&self) -> Width {
        Width::Binary
    }

    fn successors(&self, _node: &Node) -> Result<Successors, TreeError> {
        Ok(Successors::Finite(vec![0, 1]))
    }

    fn class_key(&self, _node: &Node) -> Option<ClassKey> {
        Some(Vec::new())
    }

    fn splitting_bound(&self) -> SplittingBound {
        SplittingBound::constant(1)
    }

    fn describe(&self) -> TreeRef {
        TreeRef::Name("full-binary".into())
    }
}

/// The single branch of zeros.
#[derive(Debug, Clone, Copy)]
pub struct Leftmost(pub Width);

impl Oracle for Leftmost {
    fn width(&self) -> Width {
        self.0
    }

    fn successors(&self, _node: &Node) -> Result<Successors, TreeError> {
        Ok(Successors::Finite(vec![0]))
    }

    fn class_key(&self, _node: &Node) -> Option<ClassKey> {
        Some(Vec::new())
    }

    fn describe(&self) -> TreeRef {
        match self.0 {
            Width::Binary => TreeRef::Name("leftmost".into()),
            Width::Omega => TreeRef::Name("omega-leftmost".into()),
        }
    }
}

/// An explicit finite tree; its leaves are dead ends.
#[derive(Debug, Clone)]
pub struct Explicit(pub FiniteTree);

impl Oracle for Explicit {
    fn width(&self) -> Width {
        self.0.width()
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        Ok(Successors::Finite(self.0.children(node).to_vec()))
    }

    fn describe(&self) -> TreeRef {
        TreeRef::spec(TreeSpec::Explicit(self.0.clone()))
    }

    fn as_explicit(&self) -> Option<&FiniteTree> {
        Some(&self.0)
    }
}

/// Binary tree in which every node at a level in `levels` splits and every
/// other node keeps only its `0` child.
#[derive(Debug, Clone)]
pub struct SplitLevels {
    pub levels: EnumeratedSet,
}

impl Oracle for SplitLevels {
    fn width(&self) -> Width {
        Width::Binary
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        if self.levels.contains(node.len() as u64)? {
            Ok(Successors::Finite(vec![0, 1]))
        } else {
            Ok(Successors::Finite(vec![0]))
        }
    }

    fn class_key(&self, _node: &Node) -> Option<ClassKey> {
        Some(Vec::new())
    }

    fn splitting_bound(&self) -> SplittingBound {
        // Largest gap between consecutive split levels among the first few.
        let mut prev: Option<u64> = None;
        let mut gap = 1u64;
        for v in self.levels.iter().take(64) {
            let Ok(v) = v else { return SplittingBound::none() };
            gap = gap.max(match prev {
                None => v + 1,
                Some(p) => v - p,
            });
            prev = Some(v);
        }
        if matches!(self.levels, EnumeratedSet::Affine { .. }) {
            SplittingBound::constant(gap)
        } else {
            SplittingBound::none()
        }
    }

    fn describe(&self) -> TreeRef {
        TreeRef::spec(TreeSpec::SplitLevels(self.levels.clone()))
    }
}

/// What a node does at one level of a [`PatternTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternRule {
    Split,
    Keep(u64),
}

impl PatternRule {
    fn parse(c: char) -> Result<Self, String> {
        match c {
            's' => Ok(PatternRule::Split),
            '0' => Ok(PatternRule::Keep(0)),
            '1' => Ok(PatternRule::Keep(1)),
            other => Err(format!("bad pattern rule {other:?}")),
        }
    }

    fn symbol(&self) -> char {
        match self {
            PatternRule::Split => 's',
            PatternRule::Keep(0) => '0',
            PatternRule::Keep(_) => '1',
        }
    }
}

/// Binary tree whose successors depend on the node's level (cyclically) and
/// its last entry. Each level is two rule symbols: one for nodes ending in
/// `0` (and the root), one for nodes ending in `1`; `s` splits, `0`/`1` keep
/// that single child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct PatternTree {
    rules: Vec<[PatternRule; 2]>,
    bound: u64,
}

impl TryFrom<Vec<String>> for PatternTree {
    type Error = String;

    fn try_from(levels: Vec<String>) -> Result<Self, String> {
        if levels.is_empty() {
            return Err("pattern needs at least one level".into());
        }
        let rules = levels
            .iter()
            .map(|s| {
                let cs: Vec<char> = s.chars().collect();
                if cs.len() != 2 {
                    return Err(format!("pattern level {s:?} must have two symbols"));
                }
                Ok([PatternRule::parse(cs[0])?, PatternRule::parse(cs[1])?])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PatternTree::new(rules))
    }
}

impl From<PatternTree> for Vec<String> {
    fn from(p: PatternTree) -> Self {
        p.rules
            .iter()
            .map(|[a, b]| [a.symbol(), b.symbol()].iter().collect())
            .collect()
    }
}

impl PatternTree {
    pub fn new(rules: Vec<[PatternRule; 2]>) -> Self {
        let mut p = PatternTree { rules, bound: 0 };
        p.bound = p.computed_gap();
        p
    }

    pub fn rules(&self) -> &[[PatternRule; 2]] {
        &self.rules
    }

    fn rule(&self, level: usize, last: u64) -> PatternRule {
        self.rules[level % self.rules.len()][last.min(1) as usize]
    }

    /// Worst case, over starting (level, last entry) states in one period,
    /// of the number of levels until a split is forced on every path; 0 when
    /// some path never splits.
    fn computed_gap(&self) -> u64 {
        let period = self.rules.len();
        // worst[k][b]: longest split-free run starting at level k with last b,
        // computed by iterating over two periods plus slack.
        let mut worst = 0u64;
        for start in 0..period {
            for last in 0..2u64 {
                let mut states = vec![last];
                let mut steps = 0u64;
                let mut split_everywhere = false;
                while steps <= 2 * period as u64 + 2 {
                    let level = start + steps as usize;
                    let mut next = Vec::new();
                    let mut all_split = true;
                    for &b in &states {
                        match self.rule(level, b) {
                            PatternRule::Split => {}
                            PatternRule::Keep(c) => {
                                all_split = false;
                                if !next.contains(&c) {
                                    next.push(c);
                                }
                            }
                        }
                    }
                    steps += 1;
                    if all_split {
                        split_everywhere = true;
                        break;
                    }
                    states = next;
                }
                if !split_everywhere {
                    return 0;
                }
                worst = worst.max(steps);
            }
        }
        worst
    }

    /// The verified constant gap, or `None` if some branch never splits.
    pub fn gap(&self) -> Option<u64> {
        (self.bound > 0).then_some(self.bound)
    }
}

impl Oracle for PatternTree {
    fn width(&self) -> Width {
        Width::Binary
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        Ok(match self.rule(node.len(), node.last().unwrap_or(0)) {
            PatternRule::Split => Successors::Finite(vec![0, 1]),
            PatternRule::Keep(c) => Successors::Finite(vec![c]),
        })
    }

    fn class_key(&self, node: &Node) -> Option<ClassKey> {
        Some(vec![node.last().unwrap_or(0).min(1)])
    }

    fn splitting_bound(&self) -> SplittingBound {
        match self.gap() {
            Some(g) => SplittingBound::constant(g),
            None => SplittingBound::none(),
        }
    }

    fn describe(&self) -> TreeRef {
        TreeRef::spec(TreeSpec::Pattern(self.clone()))
    }
}

/// Tree on ω: nodes at a level in `levels` have successor set `successors`
/// (ω-branching), every other node has the single successor `0`.
///
/// `levels = {m, m+1, …}` gives a Laver tree with stem `0^m`; sparser level
/// sets give Miller trees.
#[derive(Debug, Clone)]
pub struct OmegaLevels {
    pub levels: EnumeratedSet,
    pub successors: EnumeratedSet,
}

impl OmegaLevels {
    pub fn laver(stem_len: u64, successors: EnumeratedSet) -> Self {
        OmegaLevels {
            levels: EnumeratedSet::Affine { a: 1, b: stem_len },
            successors,
        }
    }
}

impl Oracle for OmegaLevels {
    fn width(&self) -> Width {
        Width::Omega
    }

    fn successors(&self, node: &Node) -> Result<Successors, TreeError> {
        if self.levels.contains(node.len() as u64)? {
            Ok(Successors::Infinite(self.successors.clone()))
        } else {
            Ok(Successors::Finite(vec![0]))
        }
    }

    fn class_key(&self, _node: &Node) -> Option<ClassKey> {
        Some(Vec::new())
    }

    fn describe(&self) -> TreeRef {
        TreeRef::spec(TreeSpec::OmegaLevels {
            levels: self.levels.clone(),
            successors: self.successors.clone(),
        })
    }
}
