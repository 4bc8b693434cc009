//! Acceptance run: one line per criterion, exit status 1 if any fails.
//!
//! Every criterion recomputes its claim with a brute-force model kept in this
//! file or in `common`, then compares against the library.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use treeforge_core::baire::EnumeratedSet;
use treeforge_core::namecraft::{build_phi, check_phi, verify_star, AntichainFamily, FinitePoset};
use treeforge_core::qforcing::{
    q_amalgamate, q_avoid, q_ensure_compatible, q_generic_run, q_leq, q_validate, ForbiddenList, LeafSelector,
    QCondition, QError, Task,
};
use treeforge_core::registry::{Registry, TreeRef, TreeSpec};
use treeforge_core::scenario::{random_pattern, rng, run_scenario, RunOptions};
use treeforge_core::surgery::{
    branching_antichain, ev_diff_family, good_blocks, sacks_incompatibility, sacks_thin, silver_antichain,
    silver_to_tree, BranchingKind, Horizon, LowPolicy, SilverCondition, ThinPlan,
};
use treeforge_core::trees::oracles::{PatternRule, PatternTree};
use treeforge_core::trees::{BelowMode, LazyTree, LeqMode, Node, TreeError};

use common::*;

type Outcome = Result<String, Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+).into());
        }
    };
}

type Seq = Vec<u64>;

/// `μ(n) = a·n + b`.
fn mu(a: u64, b: u64, n: u64) -> u64 {
    a * n + b
}

/// Block `(i, j)` holding `level`, or `None` below `μ(1)`.
fn locate(a: u64, b: u64, level: u64) -> Option<(u32, u64)> {
    if level < mu(a, b, 1) {
        return None;
    }
    let n = (level - b) / a;
    let i = 63 - n.leading_zeros();
    Some((i, n - (1 << i)))
}

fn permitted(a: u64, b: u64, alpha: u64, level: u64) -> bool {
    match locate(a, b, level) {
        None => true,
        Some((i, j)) => alpha % (1 << i) == j,
    }
}

/// Designated sub-block of block `i` under `h_α`.
fn designated(a: u64, b: u64, alpha: u64, i: u32) -> (u64, u64) {
    let n = (1u64 << i) + alpha % (1 << i);
    (mu(a, b, n), mu(a, b, n + 1))
}

/// `⌈log₂ m⌉ + 1`, the divergence index the acceptance threshold is stated with.
fn stated_divergence_index(m: u64) -> u32 {
    let ceil_log = if m.is_power_of_two() { m.trailing_zeros() } else { 64 - m.leading_zeros() };
    ceil_log + 1
}

fn pattern_allows(rules: &[[PatternRule; 2]], s: &[u64]) -> bool {
    s.iter().enumerate().all(|(k, &bit)| {
        let last = if k == 0 { 0 } else { s[k - 1].min(1) };
        match rules[k % rules.len()][last as usize] {
            PatternRule::Split => bit < 2,
            PatternRule::Keep(c) => bit == c,
        }
    })
}

/// All nodes of `t` to `depth`, found by following its successor lists.
fn enumerate(t: &LazyTree, depth: usize, value_bound: Option<u64>) -> Result<HashSet<Seq>, TreeError> {
    let mut out = HashSet::new();
    let mut stack = vec![Node::root()];
    while let Some(n) = stack.pop() {
        if n.len() < depth {
            for c in t.children(&n, value_bound)? {
                stack.push(n.child(c));
            }
        }
        out.insert(n.entries().to_vec());
    }
    Ok(out)
}

fn binary_kids(set: &HashSet<Seq>, n: &[u64]) -> usize {
    (0..2)
        .filter(|&c| {
            let mut k = n.to_vec();
            k.push(c);
            set.contains(&k)
        })
        .count()
}

fn has_split_before(set: &HashSet<Seq>, from: &[u64], hi: usize) -> bool {
    let mut stack = vec![from.to_vec()];
    while let Some(n) = stack.pop() {
        if n.len() >= hi {
            continue;
        }
        if binary_kids(set, &n) >= 2 {
            return true;
        }
        for c in 0..2 {
            let mut k = n.clone();
            k.push(c);
            if set.contains(&k) {
                stack.push(k);
            }
        }
    }
    false
}

fn thinning_soundness() -> Outcome {
    let mut r = rng(1);
    let family = ev_diff_family(8);
    let (mut instances, mut five, mut kept_low, mut attempts) = (0, 0, 0, 0);
    while instances < 120 {
        attempts += 1;
        check!(attempts < 5000, "only {instances} usable instances in {attempts} attempts");
        let pattern = random_pattern(&mut r, 4);
        let (a, b) = (r.gen_range(2..=5u64), r.gen_range(0..3u64));
        let alpha = r.gen_range(0..8u64);
        let x = EnumeratedSet::Affine { a, b };
        let base = LazyTree::new(pattern.clone());
        let enforced: Vec<u32> = good_blocks(&base, &x, 5, BelowMode::Inclusive)?.into_iter().take(5).collect();
        if enforced.is_empty() {
            continue;
        }
        instances += 1;
        five += usize::from(enforced.len() == 5);
        let low = if a + b <= 3 {
            kept_low += 1;
            LowPolicy::Keep
        } else {
            LowPolicy::Leftmost
        };
        let plan = ThinPlan::new(x, family[alpha as usize].clone(), enforced.clone(), low)?;
        let s = sacks_thin(&base, &plan)?;
        let depth = mu(a, b, 64) as usize;
        let nodes = enumerate(&s, depth, None)?;
        for n in &nodes {
            check!(pattern_allows(pattern.rules(), n), "instance {instances}: {n:?} is not in the base tree");
            if n.len() < depth && !permitted(a, b, alpha, n.len() as u64) {
                check!(binary_kids(&nodes, n) <= 1, "instance {instances}: {n:?} splits at a forbidden level");
            }
        }
        for &i in &enforced {
            let (lo, hi) = designated(a, b, alpha, i);
            for n in nodes.iter().filter(|n| n.len() == lo as usize) {
                check!(
                    has_split_before(&nodes, n, hi as usize),
                    "instance {instances}: {n:?} has no split in the designated sub-block of block {i}"
                );
            }
        }
    }
    Ok(format!("{instances} instances, {five} with five enforced blocks, {kept_low} keeping the low region"))
}

fn pairwise_incompatibility() -> Outcome {
    let (a, b) = (3, 1);
    let x = EnumeratedSet::Affine { a, b };
    let base = Registry::new().resolve(&TreeRef::Name("full-binary".into()))?;
    let enforced = good_blocks(&base, &x, 5, BelowMode::Inclusive)?;
    check!(enforced == (0..=5).collect::<Vec<_>>(), "full binary tree has good blocks {enforced:?}");
    let family = ev_diff_family(8);
    let max_level = mu(a, b, 1 << stated_divergence_index(7));
    let depth = 2 * max_level as usize;
    let mut trees = Vec::new();
    let mut node_sets = Vec::new();
    for h in &family {
        let plan = ThinPlan::new(x.clone(), h.clone(), enforced.clone(), LowPolicy::Keep)?;
        let s = sacks_thin(&base, &plan)?;
        node_sets.push(enumerate(&s, depth, None)?);
        trees.push(s);
    }
    let mut pairs = 0;
    for alpha in 0..8 {
        for beta in alpha + 1..8 {
            let div = mu(a, b, 1 << stated_divergence_index(beta as u64));
            let d = 2 * div as usize;
            let meet: HashSet<&Seq> = node_sets[alpha].intersection(&node_sets[beta]).filter(|n| n.len() <= d).collect();
            for n in &meet {
                if n.len() >= div as usize && n.len() < d {
                    let kids = (0..2u64)
                        .filter(|&c| {
                            let mut k = (*n).clone();
                            k.push(c);
                            meet.contains(&k)
                        })
                        .count();
                    check!(kids <= 1, "pair ({alpha}, {beta}) shares the split {n:?} at or above level {div}");
                }
            }
            let cert = sacks_incompatibility(&trees[alpha], &trees[beta], div, d)?;
            check!(cert.passed(), "pair ({alpha}, {beta}) certificate has violations");
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs, horizons up to {depth}"))
}

fn branching_analogues() -> Outcome {
    let (a, b) = (2, 0);
    let x = EnumeratedSet::Affine { a, b };
    let value_bound = 2 * mu(a, b, 64);
    let mut reg = Registry::new();
    let mut summary = Vec::new();
    for (kind, base, depth) in [
        (BranchingKind::Laver, TreeRef::Name("omega-full".into()), 3usize),
        (
            BranchingKind::Miller,
            TreeRef::spec(TreeSpec::OmegaLevels {
                levels: EnumeratedSet::evens(),
                successors: EnumeratedSet::naturals(),
            }),
            4,
        ),
    ] {
        let base = reg.resolve(&base)?;
        let horizon = Horizon { depth, value_bound };
        let chain = branching_antichain(kind, &x, &vec![base; 8], 5, horizon)?;
        // kept successor values of member α at a branching level
        let kept: Vec<BTreeSet<u64>> = (0..8u64)
            .map(|alpha| (0..=5).flat_map(|i| { let (lo, hi) = designated(a, b, alpha, i); lo..hi }).collect())
            .collect();
        let branches = |level: usize| kind == BranchingKind::Laver || level.is_multiple_of(2);
        for (alpha, m) in chain.members.iter().enumerate() {
            check!(m.plan.enforced == (0..=5).collect::<Vec<_>>(), "{kind:?} member {alpha} enforced {:?}", m.plan.enforced);
            let got: BTreeSet<Seq> = m.tree.truncate(depth, Some(value_bound))?.nodes().iter().map(|n| n.entries().to_vec()).collect();
            let mut want = BTreeSet::from([Seq::new()]);
            let mut frontier = vec![Seq::new()];
            while let Some(n) = frontier.pop() {
                if n.len() == depth {
                    continue;
                }
                let succ: Vec<u64> = if branches(n.len()) { kept[alpha].iter().copied().collect() } else { vec![0] };
                for v in succ {
                    let mut k = n.clone();
                    k.push(v);
                    want.insert(k.clone());
                    frontier.push(k);
                }
            }
            check!(got == want, "{kind:?} member {alpha}: thinned tree differs from the model");
        }
        for alpha in 0..8usize {
            for beta in alpha + 1..8 {
                let threshold = mu(a, b, 1 << stated_divergence_index(beta as u64));
                let shared: BTreeSet<u64> = kept[alpha].intersection(&kept[beta]).copied().collect();
                let mut frontier = vec![Seq::new()];
                while let Some(n) = frontier.pop() {
                    if n.len() == depth {
                        continue;
                    }
                    let succ: Vec<u64> = if branches(n.len()) { shared.iter().copied().collect() } else { vec![0] };
                    let high = succ.iter().filter(|&&v| v >= threshold && v < value_bound).count();
                    check!(high <= 1, "{kind:?} pair ({alpha}, {beta}): {n:?} keeps {high} shared successors above {threshold}");
                    for v in succ {
                        let mut k = n.clone();
                        k.push(v);
                        frontier.push(k);
                    }
                }
            }
        }
        check!(chain.passed(), "{kind:?} library certificates fail");
        summary.push(format!("{kind:?} {} pairs", chain.certificates.len()));
    }

    let depth = 2 * mu(a, b, 1 << stated_divergence_index(7)) as usize;
    let chain = silver_antichain(&x, &vec![SilverCondition::empty(); 8], 5, depth)?;
    let free: Vec<BTreeSet<usize>> = (0..8u64)
        .map(|alpha| (0..depth).filter(|&k| permitted(a, b, alpha, k as u64)).collect())
        .collect();
    for (alpha, m) in chain.members.iter().enumerate() {
        let q = m.condition.as_ref().ok_or("silver member without condition")?;
        let levels = silver_to_tree(q, depth)?.ramification_levels();
        check!(levels == free[alpha], "Silver member {alpha}: splits at {levels:?}");
    }
    for alpha in 0..8usize {
        for beta in alpha + 1..8 {
            let div = mu(a, b, 1 << stated_divergence_index(beta as u64)) as usize;
            let common: Vec<usize> = free[alpha].intersection(&free[beta]).copied().filter(|&k| k >= div).collect();
            check!(common.is_empty(), "Silver pair ({alpha}, {beta}) shares free positions {common:?}");
        }
    }
    check!(chain.passed(), "Silver library certificates fail");
    summary.push(format!("Silver {} pairs", chain.certificates.len()));
    Ok(summary.join(", "))
}

fn chain_pattern(r: &mut ChaCha8Rng) -> PatternTree {
    let period = r.gen_range(1..=4);
    PatternTree::new((0..period).map(|_| [0, 1].map(|_| PatternRule::Keep(r.gen_range(0..2)))).collect())
}

fn random_side(r: &mut ChaCha8Rng, reg: &mut Registry, t: &Node) -> Result<LazyTree, Box<dyn Error>> {
    let cone = TreeRef::cone(TreeRef::Name("full-binary".into()), t.clone());
    let tree = match r.gen_range(0..3) {
        0 => reg.resolve(&cone)?,
        1 => reg.resolve(&TreeRef::spec(TreeSpec::SplitLevels(EnumeratedSet::naturals())))?.restrict(t)?,
        _ => {
            let p = reg.resolve(&TreeRef::spec(TreeSpec::Pattern(random_pattern(r, 3))))?;
            if p.contains(t)? { p.restrict(t)? } else { reg.resolve(&cone)? }
        }
    };
    Ok(tree)
}

fn seed_condition(r: &mut ChaCha8Rng, reg: &mut Registry) -> Result<QCondition, Box<dyn Error>> {
    let base = reg.resolve(&TreeRef::spec(TreeSpec::Pattern(random_pattern(r, 3))))?;
    Ok(QCondition::seed(base))
}

fn leaves_above(c: &QCondition, t: &Node) -> Vec<Node> {
    c.leaves().into_iter().filter(|l| t.is_prefix_of(l)).collect()
}

fn bits_of(f: &treeforge_core::trees::FiniteTree) -> NaiveTree {
    f.nodes().iter().map(to_bits).collect()
}

/// Levels below `horizon` where some node common to `si` and `sj` above `t`
/// has children `x ≠ y` with `x ∈ si`, `y ∈ sj`; stops once `want` are found.
fn naive_divergence_levels(
    si: &LazyTree,
    sj: &LazyTree,
    t: &Node,
    horizon: usize,
    want: usize,
) -> Result<BTreeSet<usize>, TreeError> {
    let mut levels = BTreeSet::new();
    let mut stack = vec![t.clone()];
    while let Some(u) = stack.pop() {
        if u.len() >= horizon || levels.len() >= want {
            continue;
        }
        let a = si.children(&u, None)?;
        let b = sj.children(&u, None)?;
        if a.iter().any(|x| b.iter().any(|y| x != y)) {
            levels.insert(u.len());
        }
        stack.extend(a.iter().filter(|c| b.contains(c)).map(|&c| u.child(c)));
    }
    Ok(levels)
}

/// Whether each set can give a distinct level.
fn distinct_choice(sets: &[BTreeSet<usize>], used: &mut BTreeSet<usize>) -> bool {
    let Some((first, rest)) = sets.split_first() else { return true };
    for &l in first {
        if used.insert(l) {
            if distinct_choice(rest, used) {
                return true;
            }
            used.remove(&l);
        }
    }
    false
}

fn q_claims() -> Outcome {
    let mut r = rng(4);
    let mut reg = Registry::new();
    let empty = ForbiddenList::empty(24);
    let horizon = 256;
    let (mut pairs, mut infeasible) = (0, 0);
    while pairs < 120 {
        check!(infeasible < 1000, "{infeasible} pairs could not be amalgamated");
        let mut ci = seed_condition(&mut r, &mut reg)?;
        for _ in 0..r.gen_range(0..4) {
            let leaves = ci.leaves();
            let t = leaves[r.gen_range(0..leaves.len())].clone();
            ci = q_ensure_compatible(&ci, &t, horizon)?;
        }
        let mut cj = ci.clone();
        for t in ci.leaves() {
            cj.side.insert(t.clone(), random_side(&mut r, &mut reg, &t)?);
        }
        check!(q_validate(&ci, &empty)?.valid && q_validate(&cj, &empty)?.valid, "pair {pairs}: invalid input");

        let star = match q_amalgamate(&ci, &cj, horizon) {
            Ok(star) => star,
            Err(QError::NoSplit { .. }) => {
                let k = ci.leaves().len();
                let sets = ci
                    .leaves()
                    .iter()
                    .map(|t| naive_divergence_levels(&ci.side[t], &cj.side[t], t, horizon, k))
                    .collect::<Result<Vec<_>, _>>()?;
                check!(!distinct_choice(&sets, &mut BTreeSet::new()), "pair {pairs}: amalgamation refused a feasible pair");
                infeasible += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        check!(q_leq(&ci, &star) && q_leq(&cj, &star), "pair {pairs}: amalgamation is not above both");
        let f = bits_of(&star.f);
        check!(skew(&f), "pair {pairs}: amalgamated stem tree is not skew");
        let old = bits_of(&ci.f);
        check!(f.iter().filter(|s| s.len() <= ci.n).cloned().collect::<NaiveTree>() == old, "pair {pairs}: stem tree not extended");
        for t in ci.leaves() {
            let above = leaves_above(&star, &t);
            let in_i = above.iter().filter(|l| ci.side[&t].contains(l).unwrap_or(false)).count();
            let in_j = above.iter().filter(|l| cj.side[&t].contains(l).unwrap_or(false)).count();
            check!(above.len() == 2 && in_i >= 1 && in_j >= 1, "pair {pairs}: leaf {t} not split between both sides");
        }

        let leaves = ci.leaves();
        let t0 = leaves[r.gen_range(0..leaves.len())].clone();
        let c1 = q_ensure_compatible(&ci, &t0, horizon)?;
        let above = leaves_above(&c1, &t0);
        check!(above.len() == 2 && above[0] != above[1], "pair {pairs}: {t0} has {} extensions", above.len());
        for l in &above {
            check!(l.len() == c1.n && ci.side[&t0].contains(l)?, "pair {pairs}: {l} is not a level-{} node of the old side tree", c1.n);
        }
        check!(q_leq(&ci, &c1), "pair {pairs}: ensure-compatible output is not an extension");

        let chain = chain_pattern(&mut r);
        let t_alpha = reg.resolve(&TreeRef::spec(TreeSpec::Pattern(chain.clone())))?;
        let (c2, _) = q_avoid(&ci, &t_alpha, 8, 64)?;
        for l in c2.leaves() {
            check!(!pattern_allows(chain.rules(), l.entries()), "pair {pairs}: leaf {l} lies in the forbidden tree");
        }
        check!(q_leq(&ci, &c2), "pair {pairs}: avoid output is not an extension");
        pairs += 1;
    }
    Ok(format!("{pairs} pairs amalgamated, {infeasible} infeasible pairs confirmed by search"))
}

fn generic_run_skew() -> Outcome {
    let mut r = rng(5);
    let mut reg = Registry::new();
    let mut steps = 0;
    for run_index in 0..50 {
        let forbidden = ForbiddenList {
            trees: (0..2)
                .map(|_| reg.resolve(&TreeRef::spec(TreeSpec::Pattern(chain_pattern(&mut r)))))
                .collect::<Result<_, _>>()?,
            depth: 256,
            divergence_level: 128,
        };
        let seed = seed_condition(&mut r, &mut reg)?;
        check!(q_validate(&seed, &forbidden)?.valid, "run {run_index}: seed is not valid");
        let mut all_left = 2;
        let schedule: Vec<Task> = (0..10)
            .map(|_| match r.gen_range(0..7) {
                0 => Task::EnsureCompatible(LeafSelector::Leftmost),
                1 => Task::EnsureCompatible(LeafSelector::Rightmost),
                2 => Task::EnsureCompatible(LeafSelector::Index { index: 0 }),
                3 => Task::GrowSplit(LeafSelector::Leftmost),
                4 if all_left > 0 => {
                    all_left -= 1;
                    Task::GrowSplit(LeafSelector::All)
                }
                _ => Task::Avoid(r.gen_range(0..2)),
            })
            .collect();
        let run = q_generic_run(&seed, &forbidden, &schedule, 256);
        check!(run.completed(), "run {run_index} aborted: {}", run.aborted.as_deref().unwrap_or(""));
        let (mut prev, mut prev_n) = (bits_of(&seed.f), seed.n);
        for (k, step) in run.trace.iter().enumerate() {
            let f = bits_of(&step.condition.f);
            check!(skew(&f), "run {run_index} step {k}: F is not skew");
            check!(step.condition.n > prev_n, "run {run_index} step {k}: height did not grow");
            let cut: NaiveTree = f.iter().filter(|s| s.len() <= prev_n).cloned().collect();
            check!(cut == prev, "run {run_index} step {k}: F does not restrict to its predecessor");
            (prev, prev_n) = (f, step.condition.n);
            steps += 1;
        }
    }
    Ok(format!("50 runs, {steps} steps"))
}

/// `p ≤ q` for at least `threshold` members `q` of `a`.
fn naive_large(p: &NaivePoset, a: &[usize], threshold: usize) -> Vec<usize> {
    (0..p.len()).filter(|&e| a.iter().filter(|&&q| p.leq(e, q)).count() >= threshold).collect()
}

fn check_poset(p: &NaivePoset) -> Result<usize, String> {
    let poset = FinitePoset::new(p.names(), &p.pairs()).map_err(|e| e.to_string())?;
    let n = p.len();
    let top = greedy_antichain(p, (0..n).rev());
    let bottom = greedy_antichain(p, 0..n);
    let fam = AntichainFamily::new(&poset, vec![top.clone(), bottom.clone()]).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for k in 1..=2usize {
        let targets: Vec<String> = (0..k).map(|t| format!("v{t}")).collect();
        for a in [&top, &bottom] {
            for threshold in k..=a.len() + 1 {
                let large = naive_large(p, a, threshold);
                if threshold < large.len() * k {
                    continue;
                }
                checked += 1;
                let phi = build_phi(&poset, a, &targets, threshold).map_err(|e| format!("{p:?}: {e}"))?;
                if !phi.precondition || !check_phi(&poset, a, &phi, k, threshold) {
                    return Err(format!("{p:?}: φ rejected at threshold {threshold}"));
                }
                for &e in &large {
                    for t in 0..k {
                        if !a.iter().any(|&q| p.leq(e, q) && phi.get(q) == Some(t)) {
                            return Err(format!("{p:?}: target {t} missing above {e}"));
                        }
                    }
                }
            }
        }
        let mut previous: Option<BTreeSet<String>> = None;
        for threshold in (k..=n + 1).rev() {
            let v = verify_star(&poset, &fam, k, threshold).map_err(|e| e.to_string())?;
            let got: BTreeSet<String> = v.witnesses.keys().cloned().collect();
            let want: BTreeSet<String> = (0..n)
                .filter(|&e| [&top, &bottom].iter().any(|a| a.iter().filter(|&&q| p.leq(e, q)).count() >= threshold))
                .map(|e| format!("e{e}"))
                .collect();
            if got != want {
                return Err(format!("{p:?}: witnessed {got:?} at threshold {threshold}"));
            }
            if let Some(prev) = &previous {
                if !prev.is_subset(&got) {
                    return Err(format!("{p:?}: star not monotone at threshold {threshold}"));
                }
            }
            previous = Some(got);
        }
    }
    Ok(checked)
}

fn lemma_surrogate() -> Outcome {
    let mut corpus: Vec<NaivePoset> = (1..=7).flat_map(posets_of_size).collect();
    let exhaustive = corpus.len();
    let mut r = rng(6);
    let sevens = posets_of_size(7);
    for _ in 0..20_000 {
        let p = &sevens[r.gen_range(0..sevens.len())];
        let downs = p.down_sets();
        corpus.push(p.extend(downs[r.gen_range(0..downs.len())]));
    }
    let chain = |n: usize| NaivePoset { up: (0..n).map(|a| (!0u32 << a) & ((1 << n) - 1)).collect() };
    let antichain = |n: usize| NaivePoset { up: (0..n).map(|a| 1 << a).collect() };
    for n in 2..=12 {
        corpus.push(chain(n));
        corpus.push(antichain(n));
        // fan: a root below n − 1 leaves, and its dual
        corpus.push(NaivePoset { up: std::iter::once((1u32 << n) - 1).chain((1..n).map(|a| 1 << a)).collect() });
        corpus.push(NaivePoset { up: (0..n - 1).map(|a| 1 << a | 1 << (n - 1)).chain(std::iter::once(1 << (n - 1))).collect() });
    }
    let mut checked = 0;
    for p in &corpus {
        checked += check_poset(p)?;
    }
    Ok(format!("{} posets ({exhaustive} exhaustive to size 7), {checked} φ instances", corpus.len()))
}

fn random_naive_tree(r: &mut ChaCha8Rng) -> NaiveTree {
    let depth = r.gen_range(1..=5);
    let choices: Vec<u8> = (0..31)
        .map(|_| match r.gen_range(0..10) {
            0 => 0,
            1 | 2 => 1,
            3 | 4 => 2,
            _ => 3,
        })
        .collect();
    naive_from_choices(&choices, depth)
}

fn kernel_oracles() -> Outcome {
    let mut r = rng(7);
    let mut comparisons = 0u64;
    for k in 0..12_000 {
        let t = random_naive_tree(&mut r);
        let f = to_finite(&t);
        let got: BTreeSet<Bits> = f.ramification_points().iter().map(to_bits).collect();
        check!(got == splits(&t), "tree {k}: ramification points differ");
        for s in &got {
            let node = Node::new(s.iter().map(|&b| b as u64).collect());
            check!(f.ramification_rank(&node)? == rank(&t, s), "tree {k}: rank of {node} differs");
        }
        check!(f.is_skew() == skew(&t), "tree {k}: skewness differs");
        for s in &t {
            let node = Node::new(s.iter().map(|&b| b as u64).collect());
            check!(bits_of(&f.restrict(&node)?) == restrict(&t, s), "tree {k}: restriction to {node} differs");
        }
        let other = random_naive_tree(&mut r);
        let g: NaiveTree = t.intersection(&other).cloned().collect();
        let pick = t.iter().nth(r.gen_range(0..t.len())).unwrap().clone();
        let h = restrict(&t, &pick);
        for stronger in [&g, &h] {
            let fs = to_finite(stronger);
            for n in 0..=4 {
                for (mode, strict) in [(LeqMode::Literal, false), (LeqMode::Strict, true)] {
                    check!(f.tree_leq_n(&fs, n, mode) == leq_n(&t, stronger, n, strict), "tree {k}: ≤{n} {mode:?} differs");
                    check!(fs.tree_leq_n(&f, n, mode) == leq_n(stronger, &t, n, strict), "tree {k}: reversed ≤{n} {mode:?} differs");
                    comparisons += 2;
                }
            }
        }
    }
    Ok(format!("12000 trees, {comparisons} order comparisons"))
}

fn determinism() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    check!(!files.is_empty(), "no scenarios in {}", dir.display());
    for f in &files {
        let bytes = std::fs::read(f)?;
        let name = f.file_name().unwrap().to_string_lossy().to_string();
        let one = run_scenario(&bytes, &name, RunOptions { seed: 0, jobs: 1 });
        let four = run_scenario(&bytes, &name, RunOptions { seed: 0, jobs: 4 });
        check!(one.report.without_timings() == four.report.without_timings(), "{name}: reports differ");
        let arts = |o: &treeforge_core::scenario::Outcome| o.artifacts.iter().map(|a| (a.name.clone(), a.bytes.clone())).collect::<Vec<_>>();
        check!(arts(&one) == arts(&four), "{name}: artifacts differ");
    }
    Ok(format!("{} scenarios, jobs 1 vs 4", files.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("thinning soundness", thinning_soundness),
        ("pairwise incompatibility", pairwise_incompatibility),
        ("Laver/Miller/Silver analogues", branching_analogues),
        ("Q(T) extension claims", q_claims),
        ("generic run skewness", generic_run_skew),
        ("counting lemma surrogate", lemma_surrogate),
        ("kernel oracle equivalence", kernel_oracles),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.2}s]", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({e}) [{secs:.2}s]", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
