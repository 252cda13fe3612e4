//! Partitions, rank functions and the conversions between them.
//!
//! A nilpotent `n × n` matrix is determined up to similarity by its Jordan
//! partition, and equally by its rank function `m ↦ rk(A^m)`. Everything in
//! the crate is built on the two bijections below:
//!
//! * `r(m) = Σ_j max(k_j − m, 0)` (partition to rank function),
//! * multiplicity of part `s` is `r(s−1) − 2r(s) + r(s+1)` (back again).
//!
//! Rank functions are always stored on `m = 0..=n`. An `n × n` matrix has
//! stabilised by `m = n`, so `r(m) = r(n)` for every `m > n`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Jordan partition: block sizes in weakly decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts in any order. Parts must be positive.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::MalformedPartition {
                input: format!("{parts:?}"),
                reason: "parts must be positive".into(),
            });
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// `(1, 1, …, 1)`: the Jordan partition of the zero matrix.
    pub fn ones(n: usize) -> Self {
        Partition { parts: vec![1; n] }
    }

    /// `(n)`: a single full Jordan block.
    pub fn full_block(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Partition { parts: vec![n] }
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Total size, the sum of the parts.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// True when the nilpotent matrix is nonzero, i.e. some block has size ≥ 2.
    pub fn is_nontrivial(&self) -> bool {
        self.parts.first().is_some_and(|&p| p >= 2)
    }

    /// Multiset union, re-sorted.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the comma-separated form, e.g. `"3,2,1,1,1"`. The empty string is
    /// the empty partition.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = trimmed
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::MalformedPartition {
                        input: s.to_string(),
                        reason: format!("{:?}: {e}", tok.trim()),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts).map_err(|_| Error::MalformedPartition {
            input: s.to_string(),
            reason: "parts must be positive".into(),
        })
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the part sequence.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

/// All partitions of `n`, in increasing lexicographic order of their part
/// sequences. `partitions(0)` is the single empty partition.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for first in 1..=max.min(remaining) {
            prefix.push(first);
            go(remaining - first, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Partitions of `n` with at least one part ≥ 2.
pub fn nontrivial_partitions(n: usize) -> Vec<Partition> {
    partitions(n)
        .into_iter()
        .filter(Partition::is_nontrivial)
        .collect()
}

/// The sequence `r(0), …, r(n)` of ranks of matrix powers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct RankFunction {
    values: Vec<usize>,
}

impl RankFunction {
    /// Validates `values` (length `n + 1`, `values[0] = n`, weakly decreasing,
    /// convex).
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if let Some(reason) = rank_violation(&values) {
            return Err(Error::InvalidRankFunction { values, reason });
        }
        Ok(RankFunction { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values[0]
    }

    /// `r(m)`, extended by the constant `r(n)` for `m > n`.
    pub fn at(&self, m: usize) -> usize {
        self.values
            .get(m)
            .copied()
            .unwrap_or_else(|| self.stable_rank())
    }

    /// `r(n)`: the size of the invertible part.
    pub fn stable_rank(&self) -> usize {
        *self.values.last().expect("rank function is never empty")
    }

    pub fn is_nilpotent(&self) -> bool {
        self.stable_rank() == 0
    }

    /// Pointwise maximum. Both inputs must share `n`.
    pub fn pointwise_max(&self, other: &RankFunction) -> Result<RankFunction> {
        check_same_n(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a.max(b))
            .collect();
        RankFunction::new(values)
    }

    /// Splits into the nilpotent part and the stable rank.
    pub fn to_class(&self) -> MatrixClass {
        let q = self.stable_rank();
        let nilp_n = self.n() - q;
        let shifted = RankFunction {
            values: self.values[..=nilp_n].iter().map(|v| v - q).collect(),
        };
        MatrixClass {
            nilp: multiplicities_to_partition(&shifted),
            q,
        }
    }
}

impl TryFrom<Vec<usize>> for RankFunction {
    type Error = Error;

    fn try_from(values: Vec<usize>) -> Result<Self> {
        RankFunction::new(values)
    }
}

impl From<RankFunction> for Vec<usize> {
    fn from(r: RankFunction) -> Self {
        r.values
    }
}

fn rank_violation(seq: &[usize]) -> Option<String> {
    let Some(&first) = seq.first() else {
        return Some("empty sequence".into());
    };
    let n = seq.len() - 1;
    if first != n {
        return Some(format!(
            "r(0) = {first} but the sequence has length n + 1 = {}",
            n + 1
        ));
    }
    if let Some(m) = seq.windows(2).position(|w| w[0] < w[1]) {
        return Some(format!("increases between m = {m} and m = {}", m + 1));
    }
    if let Some(m) = seq.windows(3).position(|w| w[0] + w[2] < 2 * w[1]) {
        return Some(format!("convexity fails at m = {m}"));
    }
    None
}

/// True iff `seq` is the rank function of some `n × n` matrix, `n = len − 1`.
pub fn is_valid_rank_function(seq: &[usize]) -> bool {
    rank_violation(seq).is_none()
}

fn check_same_n(a: &RankFunction, b: &RankFunction) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}

pub fn partition_to_rank(p: &Partition) -> RankFunction {
    let n = p.n();
    let values = (0..=n)
        .map(|m| p.parts.iter().map(|&k| k.saturating_sub(m)).sum())
        .collect();
    RankFunction { values }
}

// Only meaningful on nilpotent rank functions; convexity keeps every
// multiplicity non-negative.
fn multiplicities_to_partition(r: &RankFunction) -> Partition {
    let n = r.n();
    let mut parts = Vec::new();
    for size in (1..=n).rev() {
        let mult = r.at(size - 1) + r.at(size + 1) - 2 * r.at(size);
        parts.extend(std::iter::repeat_n(size, mult));
    }
    Partition { parts }
}

/// Recovers the Jordan partition of a nilpotent class from its rank function.
pub fn rank_to_partition(r: &RankFunction) -> Result<Partition> {
    if !r.is_nilpotent() {
        return Err(Error::NotNilpotent {
            values: r.values.clone(),
            stable_rank: r.stable_rank(),
        });
    }
    Ok(multiplicities_to_partition(r))
}

/// Transpose of the Young diagram: `conjugate(p)[i] = #{j : p[j] > i}`.
pub fn conjugate(p: &Partition) -> Partition {
    let width = p.parts.first().copied().unwrap_or(0);
    let parts = (1..=width)
        .map(|i| p.parts.iter().take_while(|&&k| k >= i).count())
        .collect();
    Partition { parts }
}

/// `a ≺ b`: `a(m) ≤ b(m)` for every `m`.
pub fn dominates(a: &RankFunction, b: &RankFunction) -> Result<bool> {
    check_same_n(a, b)?;
    Ok(a.values.iter().zip(&b.values).all(|(x, y)| x <= y))
}

/// Similarity class of `C ⊕ D` with `C` nilpotent of Jordan type `nilp` and
/// `D` invertible of size `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatrixClass {
    pub nilp: Partition,
    pub q: usize,
}

impl MatrixClass {
    pub fn new(nilp: Partition, q: usize) -> Self {
        MatrixClass { nilp, q }
    }

    pub fn nilpotent(nilp: Partition) -> Self {
        MatrixClass { nilp, q: 0 }
    }

    pub fn n(&self) -> usize {
        self.nilp.n() + self.q
    }

    pub fn is_nilpotent(&self) -> bool {
        self.q == 0
    }

    /// Not the zero matrix.
    pub fn is_nonzero(&self) -> bool {
        self.q > 0 || self.nilp.is_nontrivial()
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.nilp, self.q)
    }
}

impl FromStr for MatrixClass {
    type Err = Error;

    /// `"2,1:1"` is `N₂ ⊕ N₁` plus a 1×1 invertible block; a bare partition
    /// means `q = 0`, and `":3"` is a 3×3 invertible matrix.
    fn from_str(s: &str) -> Result<Self> {
        let (nilp, q) = match s.split_once(':') {
            Some((p, q)) => {
                let q = q
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| Error::MalformedPartition {
                        input: s.to_string(),
                        reason: format!("stable rank {q:?}: {e}"),
                    })?;
                (p.parse::<Partition>()?, q)
            }
            None => (s.parse::<Partition>()?, 0),
        };
        Ok(MatrixClass { nilp, q })
    }
}

/// Rank function of a class: the nilpotent rank function shifted up by `q`,
/// stored on `0..=n` with tail `q`.
pub fn class_rank(c: &MatrixClass) -> RankFunction {
    let n = c.n();
    let nilp = partition_to_rank(&c.nilp);
    let values = (0..=n).map(|m| nilp.at(m) + c.q).collect();
    RankFunction { values }
}

/// Block sizes ≥ 2, in decreasing order.
pub fn nontrivial_blocks(p: &Partition) -> Vec<usize> {
    p.parts.iter().copied().take_while(|&k| k >= 2).collect()
}
