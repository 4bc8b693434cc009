use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baire::{block_counts, window_count, BaireError, EnumeratedSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepPredicate {
    /// The window `[μ_X(n), μ_X(n+1))` holds two members of `Y`.
    Dominates,
    /// Every sub-block of block `i` holds two members of `Y`.
    WeaklyDominates,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    /// `n` for `dominates`, `i` for `weakly-dominates`.
    pub index: u64,
    pub verdict: bool,
    /// One count per window or sub-block.
    pub counts: Vec<usize>,
}

/// Evaluates the predicate at every index of `from..=to`, cells in parallel.
pub fn sweep(
    predicate: SweepPredicate,
    x: &EnumeratedSet,
    y: &EnumeratedSet,
    from: u64,
    to: u64,
) -> Result<Vec<SweepRow>, BaireError> {
    (from..=to)
        .into_par_iter()
        .map(|index| {
            let counts = match predicate {
                SweepPredicate::Dominates => vec![window_count(x, y, index)?],
                SweepPredicate::WeaklyDominates => {
                    let i = u32::try_from(index).map_err(|_| BaireError::BlockIndexTooLarge(u32::MAX))?;
                    block_counts(x, y, i)?
                }
            };
            Ok(SweepRow {
                index,
                verdict: counts.iter().all(|&c| c >= 2),
                counts,
            })
        })
        .collect()
}

/// Header `n,verdict,count` or `i,verdict,counts`; sub-block counts are
/// joined with `;`.
pub fn sweep_csv(predicate: SweepPredicate, rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let header = match predicate {
        SweepPredicate::Dominates => ["n", "verdict", "count"],
        SweepPredicate::WeaklyDominates => ["i", "verdict", "counts"],
    };
    w.write_record(header).unwrap();
    for r in rows {
        let counts: Vec<String> = r.counts.iter().map(usize::to_string).collect();
        w.write_record([r.index.to_string(), r.verdict.to_string(), counts.join(";")])
            .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
