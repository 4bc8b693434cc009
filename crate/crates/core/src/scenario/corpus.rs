//! Seeded generators for scenario corpora.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::trees::oracles::{PatternRule, PatternTree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A pattern tree with period at most 4 whose splitting gap is at most
/// `max_gap` (at least 1).
pub fn random_pattern(rng: &mut impl Rng, max_gap: u64) -> PatternTree {
    let max_gap = max_gap.max(1);
    loop {
        let period = rng.gen_range(1..=4);
        let rules = (0..period)
            .map(|_| {
                [0, 1].map(|_| match rng.gen_range(0..4) {
                    0 | 1 => PatternRule::Split,
                    2 => PatternRule::Keep(0),
                    _ => PatternRule::Keep(1),
                })
            })
            .collect();
        let p = PatternTree::new(rules);
        if p.gap().is_some_and(|g| g <= max_gap) {
            return p;
        }
    }
}
