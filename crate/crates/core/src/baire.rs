//! Enumerated infinite subsets of ω, the block windows they induce, and the
//! dominating / weakly-dominating window predicates.
//!
//! Every "for infinitely many" or "for almost all" statement is replaced by a
//! bounded verdict with explicit witnesses: a list of good indices, or a
//! threshold together with the counterexamples that refute it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest block index accepted by [`block`]; keeps `2^(i+1)` inside `u64`.
pub const MAX_BLOCK_INDEX: u32 = 61;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BaireError {
    #[error("enumeration is not strictly increasing at index {index}")]
    NotIncreasing { index: u64 },
    #[error("index {index} is beyond the explicit prefix of length {len}")]
    BeyondPrefix { index: u64, len: usize },
    #[error("value {value} is beyond what the explicit prefix determines")]
    Undetermined { value: u64 },
    #[error("growth function is not progressive at {at}: f({at}) = {value}")]
    NotProgressive { at: u64, value: u64 },
    #[error("arithmetic overflow while evaluating the enumeration")]
    Overflow,
    #[error("sub-block index {j} out of range for block {i} (must be < 2^{i})")]
    SubBlockOutOfRange { i: u32, j: u64 },
    #[error("block index {0} too large")]
    BlockIndexTooLarge(u32),
    #[error("invalid enumeration: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, BaireError>;

/// A function ω → ω used to generate orbit sets and compared under ≤*.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum GrowthFunction {
    Explicit(Vec<u64>),
    Affine { a: u64, b: u64 },
    /// Coefficients in increasing degree: `[c0, c1, c2]` is `c0 + c1·n + c2·n²`.
    Polynomial(Vec<u64>),
}

impl GrowthFunction {
    pub fn eval(&self, n: u64) -> Result<u64> {
        match self {
            GrowthFunction::Explicit(values) => {
                values
                    .get(usize::try_from(n).map_err(|_| BaireError::Overflow)?)
                    .copied()
                    .ok_or(BaireError::BeyondPrefix {
                        index: n,
                        len: values.len(),
                    })
            }
            GrowthFunction::Affine { a, b } => a
                .checked_mul(n)
                .and_then(|v| v.checked_add(*b))
                .ok_or(BaireError::Overflow),
            GrowthFunction::Polynomial(coeffs) => horner(coeffs, n),
        }
    }
}

fn horner(coeffs: &[u64], n: u64) -> Result<u64> {
    coeffs.iter().rev().try_fold(0u64, |acc, &c| {
        acc.checked_mul(n)
            .and_then(|v| v.checked_add(c))
            .ok_or(BaireError::Overflow)
    })
}

/// An infinite subset X ⊆ ω, given by its strictly increasing enumeration μ_X.
///
/// Membership is decided by enumerating up to the value in question; there is
/// no separate characteristic function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", try_from = "SetRepr", into = "SetRepr")]
pub enum EnumeratedSet {
    /// A finite prefix; queries past it are errors.
    Explicit(Vec<u64>),
    /// μ(n) = a·n + b with a ≥ 1.
    Affine { a: u64, b: u64 },
    /// μ(n) = Σ cₖ nᵏ with nonnegative coefficients and some cₖ > 0, k ≥ 1.
    Polynomial(Vec<u64>),
    /// μ(n) = baseⁿ.
    Powers { base: u64 },
    /// {f(s), f(f(s)), f(f(f(s))), …}.
    Orbit { f: GrowthFunction, start: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
enum SetRepr {
    Explicit(Vec<u64>),
    Affine { a: u64, b: u64 },
    Polynomial(Vec<u64>),
    Powers { base: u64 },
    Orbit { f: GrowthFunction, start: u64 },
}

impl TryFrom<SetRepr> for EnumeratedSet {
    type Error = BaireError;

    fn try_from(repr: SetRepr) -> Result<Self> {
        let set = match repr {
            SetRepr::Explicit(v) => EnumeratedSet::Explicit(v),
            SetRepr::Affine { a, b } => EnumeratedSet::Affine { a, b },
            SetRepr::Polynomial(c) => EnumeratedSet::Polynomial(c),
            SetRepr::Powers { base } => EnumeratedSet::Powers { base },
            SetRepr::Orbit { f, start } => EnumeratedSet::Orbit { f, start },
        };
        set.validate()?;
        Ok(set)
    }
}

impl From<EnumeratedSet> for SetRepr {
    fn from(set: EnumeratedSet) -> Self {
        match set {
            EnumeratedSet::Explicit(v) => SetRepr::Explicit(v),
            EnumeratedSet::Affine { a, b } => SetRepr::Affine { a, b },
            EnumeratedSet::Polynomial(c) => SetRepr::Polynomial(c),
            EnumeratedSet::Powers { base } => SetRepr::Powers { base },
            EnumeratedSet::Orbit { f, start } => SetRepr::Orbit { f, start },
        }
    }
}

impl EnumeratedSet {
    pub fn naturals() -> Self {
        EnumeratedSet::Affine { a: 1, b: 0 }
    }

    pub fn evens() -> Self {
        EnumeratedSet::Affine { a: 2, b: 0 }
    }

    pub fn odds() -> Self {
        EnumeratedSet::Affine { a: 2, b: 1 }
    }

    pub fn multiples(a: u64) -> Self {
        EnumeratedSet::Affine { a, b: 0 }
    }

    pub fn explicit(values: Vec<u64>) -> Result<Self> {
        let set = EnumeratedSet::Explicit(values);
        set.validate()?;
        Ok(set)
    }

    /// Structural validation; orbit sets are additionally checked lazily as
    /// they are enumerated.
    pub fn validate(&self) -> Result<()> {
        match self {
            EnumeratedSet::Explicit(values) => {
                for (k, w) in values.windows(2).enumerate() {
                    if w[1] <= w[0] {
                        return Err(BaireError::NotIncreasing {
                            index: k as u64 + 1,
                        });
                    }
                }
                Ok(())
            }
            EnumeratedSet::Affine { a, .. } => {
                if *a == 0 {
                    Err(BaireError::NotIncreasing { index: 1 })
                } else {
                    Ok(())
                }
            }
            EnumeratedSet::Polynomial(coeffs) => {
                if coeffs.iter().skip(1).any(|&c| c > 0) {
                    Ok(())
                } else {
                    Err(BaireError::NotIncreasing { index: 1 })
                }
            }
            EnumeratedSet::Powers { base } => {
                if *base >= 2 {
                    Ok(())
                } else {
                    Err(BaireError::NotIncreasing { index: 1 })
                }
            }
            EnumeratedSet::Orbit { f, start } => {
                let first = f.eval(*start)?;
                if first <= *start {
                    return Err(BaireError::NotProgressive {
                        at: *start,
                        value: first,
                    });
                }
                Ok(())
            }
        }
    }

    /// μ_X(n).
    pub fn mu(&self, n: u64) -> Result<u64> {
        match self {
            EnumeratedSet::Explicit(values) => values
                .get(usize::try_from(n).map_err(|_| BaireError::Overflow)?)
                .copied()
                .ok_or(BaireError::BeyondPrefix {
                    index: n,
                    len: values.len(),
                }),
            EnumeratedSet::Affine { a, b } => a
                .checked_mul(n)
                .and_then(|v| v.checked_add(*b))
                .ok_or(BaireError::Overflow),
            EnumeratedSet::Polynomial(coeffs) => horner(coeffs, n),
            EnumeratedSet::Powers { base } => {
                let exp = u32::try_from(n).map_err(|_| BaireError::Overflow)?;
                base.checked_pow(exp).ok_or(BaireError::Overflow)
            }
            EnumeratedSet::Orbit { .. } => {
                let mut last = 0;
                for (k, v) in self.iter().enumerate() {
                    last = v?;
                    if k as u64 == n {
                        break;
                    }
                }
                Ok(last)
            }
        }
    }

    /// Sequential enumeration μ(0), μ(1), … ; explicit prefixes end, every
    /// other form is infinite (until overflow, reported as an error item).
    pub fn iter(&self) -> SetIter<'_> {
        SetIter {
            set: self,
            index: 0,
            orbit_state: None,
            done: false,
        }
    }

    /// Whether `value ∈ X`, decided by enumerating up to `value`.
    pub fn contains(&self, value: u64) -> Result<bool> {
        match self {
            EnumeratedSet::Explicit(values) => match values.last() {
                Some(&last) if value <= last => Ok(values.binary_search(&value).is_ok()),
                _ => Err(BaireError::Undetermined { value }),
            },
            EnumeratedSet::Affine { a, b } => Ok(value >= *b && (value - b).is_multiple_of(*a)),
            _ => {
                for v in self.iter() {
                    let v = v?;
                    if v == value {
                        return Ok(true);
                    }
                    if v > value {
                        return Ok(false);
                    }
                }
                Ok(false)
            }
        }
    }

    /// All members in `[lo, hi)`, in increasing order.
    pub fn values_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        if hi <= lo {
            return Ok(Vec::new());
        }
        match self {
            EnumeratedSet::Explicit(values) => match values.last() {
                Some(&last) if last >= hi - 1 => Ok(values
                    .iter()
                    .copied()
                    .filter(|v| (lo..hi).contains(v))
                    .collect()),
                _ => Err(BaireError::Undetermined { value: hi - 1 }),
            },
            EnumeratedSet::Affine { a, b } => {
                let first = if lo <= *b {
                    *b
                } else {
                    let k = (lo - b).div_ceil(*a);
                    a.checked_mul(k)
                        .and_then(|v| v.checked_add(*b))
                        .ok_or(BaireError::Overflow)?
                };
                Ok((0..)
                    .map_while(|k: u64| first.checked_add(k.checked_mul(*a)?))
                    .take_while(|&v| v < hi)
                    .collect())
            }
            _ => {
                let mut out = Vec::new();
                for v in self.iter() {
                    let v = v?;
                    if v >= hi {
                        break;
                    }
                    if v >= lo {
                        out.push(v);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Number of members in `[lo, hi)`.
    pub fn count_in(&self, lo: u64, hi: u64) -> Result<usize> {
        match self {
            EnumeratedSet::Affine { a, b } => {
                let below = |x: u64| if x <= *b { 0 } else { (x - b).div_ceil(*a) };
                Ok(below(hi).saturating_sub(below(lo)) as usize)
            }
            _ => Ok(self.values_in(lo, hi)?.len()),
        }
    }
}

pub struct SetIter<'a> {
    set: &'a EnumeratedSet,
    index: u64,
    orbit_state: Option<u64>,
    done: bool,
}

impl Iterator for SetIter<'_> {
    type Item = Result<u64>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = match self.set {
            EnumeratedSet::Explicit(values) => match values.get(self.index as usize) {
                Some(&v) => Ok(v),
                None => {
                    self.done = true;
                    return None;
                }
            },
            EnumeratedSet::Orbit { f, start } => {
                let prev = self.orbit_state.unwrap_or(*start);
                match f.eval(prev) {
                    Ok(v) if v > prev => {
                        self.orbit_state = Some(v);
                        Ok(v)
                    }
                    Ok(v) => Err(BaireError::NotProgressive { at: prev, value: v }),
                    Err(e) => Err(e),
                }
            }
            other => other.mu(self.index),
        };
        if item.is_err() {
            self.done = true;
        }
        self.index += 1;
        Some(item)
    }
}

/// The half-open interval `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub lo: u64,
    pub hi: u64,
}

impl Block {
    pub fn contains(&self, v: u64) -> bool {
        self.lo <= v && v < self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }
}

fn pow2(i: u32) -> Result<u64> {
    if i > MAX_BLOCK_INDEX {
        return Err(BaireError::BlockIndexTooLarge(i));
    }
    Ok(1u64 << i)
}

/// `[μ_X(2^i + j), μ_X(2^i + j + 1))` for `j < 2^i`.
pub fn block(x: &EnumeratedSet, i: u32, j: u64) -> Result<Block> {
    let base = pow2(i)?;
    if j >= base {
        return Err(BaireError::SubBlockOutOfRange { i, j });
    }
    Ok(Block {
        lo: x.mu(base + j)?,
        hi: x.mu(base + j + 1)?,
    })
}

/// The whole index-`i` window `[μ_X(2^i), μ_X(2^{i+1}))`.
pub fn block_span(x: &EnumeratedSet, i: u32) -> Result<Block> {
    let base = pow2(i)?;
    Ok(Block {
        lo: x.mu(base)?,
        hi: x.mu(2 * base)?,
    })
}

/// Finds `(i, j)` with `level ∈ block(x, i, j)`, or `None` when
/// `level < μ_X(1)` (the region no block covers).
pub fn locate_block(x: &EnumeratedSet, level: u64) -> Result<Option<(u32, u64)>> {
    if level < x.mu(1)? {
        return Ok(None);
    }
    let mut i = 0u32;
    loop {
        if x.mu(pow2(i + 1)?)? > level {
            break;
        }
        i += 1;
    }
    let base = pow2(i)?;
    // largest j < 2^i with μ(2^i + j) ≤ level
    let (mut lo, mut hi) = (0u64, base);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if x.mu(base + mid)? <= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some((i, lo)))
}

/// Number of members of `y` in `[μ_X(n), μ_X(n+1))`.
pub fn window_count(x: &EnumeratedSet, y: &EnumeratedSet, n: u64) -> Result<usize> {
    let lo = x.mu(n)?;
    let hi = x.mu(n.checked_add(1).ok_or(BaireError::Overflow)?)?;
    y.count_in(lo, hi)
}

/// `|[μ_X(n), μ_X(n+1)) ∩ Y| ≥ 2`.
pub fn dominates_window(x: &EnumeratedSet, y: &EnumeratedSet, n: u64) -> Result<bool> {
    Ok(window_count(x, y, n)? >= 2)
}

/// Per-sub-block counts `|block(X, i, j) ∩ Y|` for `j < 2^i`.
pub fn block_counts(x: &EnumeratedSet, y: &EnumeratedSet, i: u32) -> Result<Vec<usize>> {
    let base = pow2(i)?;
    (0..base)
        .map(|j| {
            let b = block(x, i, j)?;
            y.count_in(b.lo, b.hi)
        })
        .collect()
}

/// Every sub-block of block `i` holds at least two members of `Y`.
pub fn weakly_dominates_at(x: &EnumeratedSet, y: &EnumeratedSet, i: u32) -> Result<bool> {
    let base = pow2(i)?;
    for j in 0..base {
        let b = block(x, i, j)?;
        if y.count_in(b.lo, b.hi)? < 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All `i ≤ i_max` at which `weakly_dominates_at` holds.
pub fn find_good_indices(x: &EnumeratedSet, y: &EnumeratedSet, i_max: u32) -> Result<Vec<u32>> {
    let mut good = Vec::new();
    for i in 0..=i_max {
        if weakly_dominates_at(x, y, i)? {
            good.push(i);
        }
    }
    Ok(good)
}

/// `X_{f,n} = {f(n), f(f(n)), …}`.
pub fn iterate_set(f: &GrowthFunction, n: u64) -> Result<EnumeratedSet> {
    let set = EnumeratedSet::Orbit {
        f: f.clone(),
        start: n,
    };
    set.validate()?;
    Ok(set)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeqStar {
    /// `f(n) ≤ g(n)` for every `n ∈ [threshold, N]`, and `threshold` is least.
    Holds { threshold: u64 },
    /// `f(N) > g(N)`; every `n ≤ N` with `f(n) > g(n)`.
    Fails { counterexamples: Vec<u64> },
}

/// Bounded stand-in for `f ≤* g`, checked on `[0, N]`.
pub fn leq_star_upto(f: &GrowthFunction, g: &GrowthFunction, bound: u64) -> Result<LeqStar> {
    let mut bad = Vec::new();
    for n in 0..=bound {
        if f.eval(n)? > g.eval(n)? {
            bad.push(n);
        }
    }
    match bad.last() {
        Some(&last) if last == bound => Ok(LeqStar::Fails {
            counterexamples: bad,
        }),
        Some(&last) => Ok(LeqStar::Holds { threshold: last + 1 }),
        None => Ok(LeqStar::Holds { threshold: 0 }),
    }
}
