//! Rank function equations
//!
//! ```text
//! f(r_{A_1}(m)) + … + f(r_{A_k}(m)) = g(r_B(m))     for m in S
//! ```
//!
//! `f` and `g` are tabulated on `0..=n`; only their values at attainable ranks
//! matter. `S` is always `{1, …, n}` (optionally with `0`): rank functions are
//! constant from `m = n` on, so this is the same as taking all positive `m`.
//!
//! For strictly increasing convex `f` with `f(0) = 0` and `g = id` a solution
//! exists iff `2r(1) − r(2) ≤ n`, where `r(m) = Σ f(r_{A_i}(m))`, and then `r`
//! itself (with `r(0) = n`) is the rank function of `B`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, TableViolation};
use crate::partition::{
    class_rank, is_valid_rank_function, nontrivial_blocks, nontrivial_partitions,
    partition_to_rank, partitions, MatrixClass, Partition, RankFunction,
};

/// Default cap on the number of tuples an exhaustive search may visit.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// How a function `ℕ → ℕ` is described on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FnSpec {
    Id,
    Square,
    Table { values: Vec<u64> },
}

impl FnSpec {
    /// Values on `0..=n`.
    pub fn table(&self, n: usize) -> Result<FnTable> {
        let values = match self {
            FnSpec::Id => (0..=n as u64).collect(),
            FnSpec::Square => (0..=n as u64).map(|m| m * m).collect(),
            FnSpec::Table { values } => {
                if values.len() < n + 1 {
                    return Err(Error::TableTooShort {
                        len: values.len(),
                        n,
                    });
                }
                values.clone()
            }
        };
        Ok(FnTable { values })
    }

    /// Values on `0..=n`, validated as strictly increasing and convex.
    pub fn convex_table(&self, n: usize) -> Result<ConvexTable> {
        validate_convex_table(self.table(n)?.values)
    }

    pub fn is_identity_on(&self, n: usize) -> bool {
        match self {
            FnSpec::Id => true,
            FnSpec::Square => n <= 1,
            FnSpec::Table { values } => {
                values.len() > n && values[..=n].iter().enumerate().all(|(i, &v)| v == i as u64)
            }
        }
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::Id => f.write_str("id"),
            FnSpec::Square => f.write_str("square"),
            FnSpec::Table { values } => {
                f.write_str("table:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FnSpec {
    type Err = String;

    /// `id`, `square`, or `table:0,1,3,6,…`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "id" => Ok(FnSpec::Id),
            "square" => Ok(FnSpec::Square),
            other => {
                let Some(rest) = other.strip_prefix("table:") else {
                    return Err(format!(
                        "unknown function {other:?}; expected id, square or table:v0,v1,…"
                    ));
                };
                let values = rest
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u64>()
                            .map_err(|e| format!("table entry {t:?}: {e}"))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(FnSpec::Table { values })
            }
        }
    }
}

/// Arbitrary tabulated function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FnTable {
    values: Vec<u64>,
}

impl FnTable {
    pub fn new(values: Vec<u64>) -> Self {
        FnTable { values }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Panics outside the tabulated range; callers check the length against `n`.
    pub fn eval(&self, x: usize) -> u64 {
        self.values[x]
    }
}

/// Tabulated `f` with `f(0) = 0`, strictly increasing and convex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ConvexTable {
    values: Vec<u64>,
}

impl ConvexTable {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eval(&self, x: usize) -> u64 {
        self.values[x]
    }

    pub fn identity(n: usize) -> Self {
        ConvexTable {
            values: (0..=n as u64).collect(),
        }
    }

    pub fn squares(n: usize) -> Self {
        ConvexTable {
            values: (0..=n as u64).map(|m| m * m).collect(),
        }
    }

    fn covers(&self, n: usize) -> Result<()> {
        if self.values.len() < n + 1 {
            return Err(Error::TableTooShort {
                len: self.values.len(),
                n,
            });
        }
        Ok(())
    }
}

impl From<ConvexTable> for FnTable {
    fn from(t: ConvexTable) -> Self {
        FnTable { values: t.values }
    }
}

pub fn validate_convex_table(values: Vec<u64>) -> Result<ConvexTable> {
    let violation = if values.is_empty() {
        Some(TableViolation::Empty)
    } else if values[0] != 0 {
        Some(TableViolation::NotZeroAtZero)
    } else if let Some(at) = values.windows(2).position(|w| w[1] <= w[0]) {
        Some(TableViolation::NotStrictlyIncreasing { at })
    } else {
        values
            .windows(3)
            .position(|w| w[0] + w[2] < 2 * w[1])
            .map(|at| TableViolation::NotConvex { at })
    };
    match violation {
        Some(v) => Err(Error::InvalidTable(v)),
        None => Ok(ConvexTable { values }),
    }
}

/// An equation instance as exchanged in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSpec {
    pub n: usize,
    pub k: usize,
    pub f: FnSpec,
    pub g: FnSpec,
    #[serde(default)]
    pub include_zero: bool,
}

impl EquationSpec {
    /// Checks `k ≥ 2`, `n ≥ 2`, and that both tables reach `n`.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::TooFewMatrices { k: self.k, min: 2 });
        }
        if self.n < 2 {
            return Err(Error::SizeTooSmall(self.n));
        }
        self.f.table(self.n)?;
        self.g.table(self.n)?;
        Ok(())
    }

    /// The evaluation set `S`.
    pub fn points(&self) -> std::ops::RangeInclusive<usize> {
        let start = if self.include_zero { 0 } else { 1 };
        start..=self.n
    }
}

/// `(A_1, …, A_k, B)` up to similarity. Every member is a nonzero class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTuple")]
pub struct SolutionTuple {
    lhs: Vec<MatrixClass>,
    rhs: MatrixClass,
}

#[derive(Deserialize)]
struct RawTuple {
    lhs: Vec<MatrixClass>,
    rhs: MatrixClass,
}

impl TryFrom<RawTuple> for SolutionTuple {
    type Error = Error;

    fn try_from(raw: RawTuple) -> Result<Self> {
        SolutionTuple::new(raw.lhs, raw.rhs)
    }
}

impl SolutionTuple {
    pub fn new(lhs: Vec<MatrixClass>, rhs: MatrixClass) -> Result<Self> {
        if let Some(index) = lhs
            .iter()
            .chain(std::iter::once(&rhs))
            .position(|c| !c.is_nonzero())
        {
            return Err(Error::TrivialMember { index });
        }
        Ok(SolutionTuple { lhs, rhs })
    }

    pub fn nilpotent(lhs: &[Partition], rhs: &Partition) -> Result<Self> {
        SolutionTuple::new(
            lhs.iter().cloned().map(MatrixClass::nilpotent).collect(),
            MatrixClass::nilpotent(rhs.clone()),
        )
    }

    pub fn lhs(&self) -> &[MatrixClass] {
        &self.lhs
    }

    pub fn rhs(&self) -> &MatrixClass {
        &self.rhs
    }

    pub fn k(&self) -> usize {
        self.lhs.len()
    }

    /// `A_1, …, A_k, B`.
    pub fn members(&self) -> impl Iterator<Item = &MatrixClass> {
        self.lhs.iter().chain(std::iter::once(&self.rhs))
    }

    pub fn is_nilpotent(&self) -> bool {
        self.members().all(MatrixClass::is_nilpotent)
    }

    /// Concatenated part sequences, then the stable ranks.
    pub fn sort_key(&self) -> (Vec<usize>, Vec<usize>) {
        let parts = self
            .members()
            .flat_map(|c| c.nilp.parts().iter().copied())
            .collect();
        let qs = self.members().map(|c| c.q).collect();
        (parts, qs)
    }
}

/// Does the tuple satisfy the equation at every point of `S`?
pub fn check_solution(spec: &EquationSpec, sol: &SolutionTuple) -> Result<bool> {
    spec.validate()?;
    if sol.k() != spec.k {
        return Err(Error::LengthMismatch {
            expected: spec.k,
            found: sol.k(),
        });
    }
    if let Some(c) = sol.members().find(|c| c.n() != spec.n) {
        return Err(Error::SizeMismatch {
            expected: spec.n,
            found: c.n(),
        });
    }
    let f = spec.f.table(spec.n)?;
    let g = spec.g.table(spec.n)?;
    let lhs: Vec<RankFunction> = sol.lhs.iter().map(class_rank).collect();
    let rhs = class_rank(&sol.rhs);
    Ok(spec.points().all(|m| {
        let left: u64 = lhs.iter().map(|r| f.eval(r.at(m))).sum();
        left == g.eval(rhs.at(m))
    }))
}

/// `r(m) = Σ f(r_i(m))` for `m = 1..=n`, as index `m − 1`.
fn combined(f: &ConvexTable, ranks: &[RankFunction], n: usize) -> Vec<u64> {
    (1..=n)
        .map(|m| ranks.iter().map(|r| f.eval(r.at(m))).sum())
        .collect()
}

fn assemble(n: usize, r: &[u64]) -> Option<Vec<usize>> {
    // 2r(1) − r(2) ≤ n, kept in unsigned arithmetic
    let (r1, r2) = (r[0], r.get(1).copied().unwrap_or(r[0]));
    if 2 * r1 > n as u64 + r2 {
        return None;
    }
    let mut values = Vec::with_capacity(n + 1);
    values.push(n);
    values.extend(r.iter().map(|&v| v as usize));
    assert!(
        is_valid_rank_function(&values),
        "solvability condition held but {values:?} is not a rank function"
    );
    Some(values)
}

/// The unique nilpotent `B` with `Σ f(r_{A_i}(m)) = r_B(m)` on `1..=n`, if any.
///
/// Accepts any `k ≥ 1`; solution-set enumeration uses `k = 1` as the
/// degenerate base case.
pub fn solve_nilpotent(f: &ConvexTable, lhs: &[Partition]) -> Result<Option<Partition>> {
    let Some(first) = lhs.first() else {
        return Err(Error::TooFewMatrices { k: 0, min: 1 });
    };
    let n = first.n();
    if let Some(p) = lhs.iter().find(|p| p.n() != n) {
        return Err(Error::SizeMismatch {
            expected: n,
            found: p.n(),
        });
    }
    if let Some(index) = lhs.iter().position(|p| !p.is_nontrivial()) {
        return Err(Error::TrivialMember { index });
    }
    f.covers(n)?;
    let ranks: Vec<RankFunction> = lhs.iter().map(partition_to_rank).collect();
    let r = combined(f, &ranks, n);
    Ok(assemble(n, &r).map(|values| {
        RankFunction::new(values)
            .expect("validated by assemble")
            .to_class()
            .nilp
    }))
}

/// Same as [`solve_nilpotent`] for classes with invertible parts. `B` has
/// stable rank `Σ f(q_j)`; only its size is determined, not the invertible
/// block itself.
pub fn solve_with_stable_ranks(
    f: &ConvexTable,
    lhs: &[MatrixClass],
) -> Result<Option<MatrixClass>> {
    if lhs.len() < 2 {
        return Err(Error::TooFewMatrices {
            k: lhs.len(),
            min: 2,
        });
    }
    let n = lhs[0].n();
    if let Some(c) = lhs.iter().find(|c| c.n() != n) {
        return Err(Error::SizeMismatch {
            expected: n,
            found: c.n(),
        });
    }
    if let Some(index) = lhs.iter().position(|c| !c.is_nonzero()) {
        return Err(Error::TrivialMember { index });
    }
    f.covers(n)?;
    let tail: u64 = lhs.iter().map(|c| f.eval(c.q)).sum();
    if tail > n as u64 {
        return Err(Error::StableRankOverflow {
            stable_rank: tail as usize,
            n,
        });
    }
    let ranks: Vec<RankFunction> = lhs.iter().map(class_rank).collect();
    let r = combined(f, &ranks, n);
    debug_assert_eq!(r[n - 1], tail);
    Ok(assemble(n, &r).map(|values| {
        RankFunction::new(values)
            .expect("validated by assemble")
            .to_class()
    }))
}

/// For `f = g = id`: the nontrivial blocks of `B` are exactly the nontrivial
/// blocks of all `A_j` together, and `B`'s invertible part has size `Σ q_j`.
pub fn structure_check_identity(sol: &SolutionTuple) -> bool {
    let mut blocks: Vec<usize> = sol
        .lhs
        .iter()
        .flat_map(|c| nontrivial_blocks(&c.nilp))
        .collect();
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    let q: usize = sol.lhs.iter().map(|c| c.q).sum();
    blocks == nontrivial_blocks(&sol.rhs.nilp) && q == sol.rhs.q
}

pub(crate) fn check_budget(base: usize, exponent: usize, budget: u64) -> Result<()> {
    let required = (base as u128)
        .checked_pow(exponent as u32)
        .unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: budget as u128,
        });
    }
    Ok(())
}

/// Exhaustive search for all-nilpotent nontrivial solutions of an arbitrary
/// `(f, g)` equation, sorted by [`SolutionTuple::sort_key`].
///
/// Refuses to start when `p(n)^(k+1)` exceeds `budget`.
pub fn search_general(spec: &EquationSpec, budget: u64) -> Result<Vec<SolutionTuple>> {
    spec.validate()?;
    let n = spec.n;
    check_budget(partitions(n).len(), spec.k + 1, budget)?;

    let f = spec.f.table(n)?;
    let g = spec.g.table(n)?;
    let candidates: Vec<(Partition, RankFunction)> = nontrivial_partitions(n)
        .into_iter()
        .map(|p| {
            let r = partition_to_rank(&p);
            (p, r)
        })
        .collect();
    let points: Vec<usize> = spec.points().collect();
    let rhs_values: Vec<Vec<u64>> = candidates
        .iter()
        .map(|(_, r)| points.iter().map(|&m| g.eval(r.at(m))).collect())
        .collect();

    let candidates = &candidates;
    let c = candidates.len();
    let total = (c as u128).pow(spec.k as u32) as u64;
    let mut found: Vec<SolutionTuple> = (0..total)
        .into_par_iter()
        .flat_map_iter(|index| {
            let mut rest = index;
            let picks: Vec<usize> = (0..spec.k)
                .map(|_| {
                    let i = (rest % c as u64) as usize;
                    rest /= c as u64;
                    i
                })
                .collect();
            let target: Vec<u64> = points
                .iter()
                .map(|&m| picks.iter().map(|&i| f.eval(candidates[i].1.at(m))).sum())
                .collect();
            let lhs: Vec<Partition> = picks.iter().map(|&i| candidates[i].0.clone()).collect();
            rhs_values
                .iter()
                .enumerate()
                .filter(move |(_, v)| **v == target)
                .map(move |(j, _)| {
                    SolutionTuple::nilpotent(&lhs, &candidates[j].0)
                        .expect("candidates are nontrivial")
                })
                .collect::<Vec<_>>()
        })
        .collect();
    found.sort_by_key(SolutionTuple::sort_key);
    Ok(found)
}
