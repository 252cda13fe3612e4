//! Solution sets of `Σ f(r_{A_i}) = r_B` over nilpotent matrices, seen through
//! their rank matrices.
//!
//! Over ℂ the closure of a product of nilpotent orbits is described by the
//! entrywise order on rank matrices, so irreducible components of the closed
//! solution set correspond to maximal rank matrices. Dimensions come from
//! `dim closure O(A) = n² − Σ_j (r_A(j) − r_A(j+1))²` and the linear capacity
//! of a single orbit closure is half its dimension.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::equations::{solve_nilpotent, ConvexTable, FnSpec, SolutionTuple};
use crate::error::{Error, Result};
use crate::partition::{
    class_rank, conjugate, dominates, nontrivial_partitions, partition_to_rank, partitions,
    rank_to_partition, Partition, RankFunction,
};

/// Largest `n` for which [`hasse_dot`] will build the diagram (627 nodes).
pub const HASSE_MAX_N: usize = 20;

/// One rank function per row, all of the same size `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<RankFunction>", into = "Vec<RankFunction>")]
pub struct RankMatrix {
    rows: Vec<RankFunction>,
}

impl RankMatrix {
    pub fn new(rows: Vec<RankFunction>) -> Result<Self> {
        if let Some(first) = rows.first() {
            if let Some(r) = rows.iter().find(|r| r.n() != first.n()) {
                return Err(Error::SizeMismatch {
                    expected: first.n(),
                    found: r.n(),
                });
            }
        }
        Ok(RankMatrix { rows })
    }

    pub fn rows(&self) -> &[RankFunction] {
        &self.rows
    }

    pub fn n(&self) -> Option<usize> {
        self.rows.first().map(RankFunction::n)
    }
}

impl TryFrom<Vec<RankFunction>> for RankMatrix {
    type Error = Error;

    fn try_from(rows: Vec<RankFunction>) -> Result<Self> {
        RankMatrix::new(rows)
    }
}

impl From<RankMatrix> for Vec<RankFunction> {
    fn from(rm: RankMatrix) -> Self {
        rm.rows
    }
}

pub fn rank_matrix(sol: &SolutionTuple) -> RankMatrix {
    RankMatrix {
        rows: sol.members().map(class_rank).collect(),
    }
}

fn partitions_rank_matrix(ps: &[Partition]) -> Result<RankMatrix> {
    RankMatrix::new(ps.iter().map(partition_to_rank).collect())
}

/// Entrywise `a ≤ b`.
pub fn rm_leq(a: &RankMatrix, b: &RankMatrix) -> Result<bool> {
    if a.rows.len() != b.rows.len() {
        return Err(Error::LengthMismatch {
            expected: a.rows.len(),
            found: b.rows.len(),
        });
    }
    let mut leq = true;
    for (x, y) in a.rows.iter().zip(&b.rows) {
        leq &= dominates(x, y)?;
    }
    Ok(leq)
}

/// Whether `(A_1, …, A_k)` lies in the closure of `O(B_1) × … × O(B_k)`,
/// decided by comparing rank matrices.
pub fn in_product_closure(lhs: &[Partition], rhs: &[Partition]) -> Result<bool> {
    if lhs.len() != rhs.len() {
        return Err(Error::LengthMismatch {
            expected: lhs.len(),
            found: rhs.len(),
        });
    }
    rm_leq(&partitions_rank_matrix(lhs)?, &partitions_rank_matrix(rhs)?)
}

/// Whether two tuples span the same product of orbits.
pub fn same_orbit_tuple(a: &[Partition], b: &[Partition]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| partition_to_rank(x) == partition_to_rank(y))
}

/// All nontrivial nilpotent solutions for a fixed convex `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolSet {
    pub n: usize,
    pub k: usize,
    pub f: FnSpec,
    pub tuples: Vec<SolutionTuple>,
    pub rank_matrices: Vec<RankMatrix>,
}

impl SolSet {
    /// Builds the set from tuples (sorted, rank matrices deduplicated).
    pub fn from_tuples(n: usize, k: usize, f: FnSpec, mut tuples: Vec<SolutionTuple>) -> Self {
        tuples.sort_by_key(SolutionTuple::sort_key);
        tuples.dedup();
        let mut seen = HashSet::new();
        let rank_matrices = tuples
            .iter()
            .map(rank_matrix)
            .filter(|rm| seen.insert(rm.clone()))
            .collect();
        SolSet {
            n,
            k,
            f,
            tuples,
            rank_matrices,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Per-coordinate contribution to `2r(1) − r(2)`; always ≥ f(1) ≥ 1.
fn solvability_cost(f: &ConvexTable, r: &RankFunction) -> u64 {
    2 * f.eval(r.at(1)) - f.eval(r.at(2))
}

/// Number of partial tuples the pruned search below visits.
fn pruned_node_count(costs: &[u64], k: usize, n: u64) -> u128 {
    let Some(&min) = costs.iter().min() else {
        return 0;
    };
    let n_us = n as usize;
    let mut ways = vec![0u128; n_us + 1];
    ways[0] = 1;
    let mut total = 0u128;
    for depth in 0..k {
        let left_after = (k - depth - 1) as u64;
        let mut next = vec![0u128; n_us + 1];
        for (s, &w) in ways.iter().enumerate().filter(|(_, w)| **w > 0) {
            for &c in costs {
                let s2 = s as u64 + c;
                if s2 + left_after * min <= n {
                    next[s2 as usize] += w;
                }
            }
        }
        total += next.iter().sum::<u128>();
        ways = next;
    }
    total
}

/// Enumerates every nontrivial nilpotent solution `(A_1, …, A_k, B)`.
///
/// `2r(1) − r(2)` is a sum of per-coordinate terms, each at least `f(1)`, so
/// left-hand tuples are grown coordinate by coordinate and abandoned as soon
/// as the condition can no longer hold. `budget` caps the number of partial
/// tuples visited; it is checked before any work starts.
pub fn enumerate_sol(n: usize, k: usize, f: &FnSpec, budget: u64) -> Result<SolSet> {
    if k == 0 {
        return Err(Error::TooFewMatrices { k, min: 1 });
    }
    let table = f.convex_table(n)?;
    let candidates: Vec<(Partition, u64)> = nontrivial_partitions(n)
        .into_iter()
        .map(|p| {
            let cost = solvability_cost(&table, &partition_to_rank(&p));
            (p, cost)
        })
        .collect();
    let costs: Vec<u64> = candidates.iter().map(|(_, c)| *c).collect();
    let min = costs.iter().copied().min().unwrap_or(0);
    let required = pruned_node_count(&costs, k, n as u64);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: budget as u128,
        });
    }

    let search = Pruned {
        candidates: &candidates,
        table: &table,
        k,
        n: n as u64,
        min,
    };
    let tuples: Vec<SolutionTuple> = candidates
        .par_iter()
        .flat_map_iter(|(first, cost)| {
            let mut out = Vec::new();
            if cost + (k as u64 - 1) * min <= n as u64 {
                search.grow(&mut vec![first.clone()], *cost, &mut out);
            }
            out
        })
        .collect();
    Ok(SolSet::from_tuples(n, k, f.clone(), tuples))
}

struct Pruned<'a> {
    candidates: &'a [(Partition, u64)],
    table: &'a ConvexTable,
    k: usize,
    n: u64,
    min: u64,
}

impl Pruned<'_> {
    fn grow(&self, prefix: &mut Vec<Partition>, spent: u64, out: &mut Vec<SolutionTuple>) {
        if prefix.len() == self.k {
            let rhs = solve_nilpotent(self.table, prefix)
                .expect("candidates are nontrivial and of size n")
                .expect("pruning keeps only solvable tuples");
            out.push(
                SolutionTuple::nilpotent(prefix, &rhs).expect("nonzero lhs gives nonzero rhs"),
            );
            return;
        }
        let left_after = (self.k - prefix.len() - 1) as u64;
        for (p, cost) in self.candidates {
            if spent + cost + left_after * self.min <= self.n {
                prefix.push(p.clone());
                self.grow(prefix, spent + cost, out);
                prefix.pop();
            }
        }
    }
}

/// Rank matrices of `s` not strictly below any other.
pub fn maximal_elements(s: &SolSet) -> Vec<RankMatrix> {
    let rms = &s.rank_matrices;
    rms.iter()
        .filter(|a| {
            !rms.iter().any(|b| {
                b != *a && rm_leq(a, b).expect("rank matrices of one SolSet share a shape")
            })
        })
        .cloned()
        .collect()
}

/// The rank matrix every other one lies below, if there is one.
pub fn greatest_element(s: &SolSet) -> Option<RankMatrix> {
    let rms = &s.rank_matrices;
    rms.iter()
        .find(|top| rms.iter().all(|b| rm_leq(b, top).expect("same shape")))
        .cloned()
}

/// Non-negative rational serialized as `"p/q"` (or `"p"` when integral).
pub type Capacity = Ratio<u64>;

fn ratio_as_string<S: Serializer>(r: &Capacity, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Irreducible component of the closed solution set, identified by its
/// maximal rank matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub max_rm: RankMatrix,
    pub dimension: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub capacity: Capacity,
}

pub fn irreducible_components(s: &SolSet) -> Result<Vec<Component>> {
    maximal_elements(s)
        .into_iter()
        .map(|max_rm| {
            let dimension = component_dimension(&max_rm)?;
            Ok(Component {
                max_rm,
                dimension,
                capacity: Ratio::new(dimension, 2),
            })
        })
        .collect()
}

/// Exactly one component, checked against the existence of a greatest
/// element.
pub fn is_irreducible(s: &SolSet) -> bool {
    let single = maximal_elements(s).len() == 1;
    let greatest = greatest_element(s).is_some();
    assert_eq!(
        single, greatest,
        "component count disagrees with greatest-element test"
    );
    single
}

/// Dimension of the closure of the nilpotent orbit with Jordan type `p`.
pub fn orbit_dimension(p: &Partition) -> u64 {
    let n = p.n() as u64;
    let r = partition_to_rank(p);
    let jumps: u64 = (0..=p.n())
        .map(|j| {
            let d = (r.at(j) - r.at(j + 1)) as u64;
            d * d
        })
        .sum();
    let columns: u64 = conjugate(p).parts().iter().map(|&c| (c * c) as u64).sum();
    assert_eq!(jumps, columns);
    n * n - jumps
}

/// Sum of orbit dimensions over the rows; every row must be nilpotent.
pub fn component_dimension(rm: &RankMatrix) -> Result<u64> {
    rm.rows
        .iter()
        .map(|r| Ok(orbit_dimension(&rank_to_partition(r)?)))
        .sum()
}

/// Linear capacity of a nilpotent orbit: half its dimension.
pub fn orbit_capacity(p: &Partition) -> Capacity {
    Ratio::new(orbit_dimension(p), 2)
}

/// Linear capacity of a closed solution set, or `-∞` when it is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolCapacity {
    NegInfinity,
    Finite(Capacity),
}

impl fmt::Display for SolCapacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolCapacity::NegInfinity => f.write_str("-inf"),
            SolCapacity::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for SolCapacity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Maximum of the component capacities. For a reducible set this is the
/// largest value any single component attains.
pub fn sol_capacity(s: &SolSet) -> Result<SolCapacity> {
    Ok(irreducible_components(s)?
        .into_iter()
        .map(|c| c.capacity)
        .max()
        .map_or(SolCapacity::NegInfinity, SolCapacity::Finite))
}

/// Least tuple of nilpotent classes dominating every solution coordinatewise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominatingTuple {
    pub tuple: Vec<Partition>,
    /// Coordinates where the bound is the full block `(n)`.
    pub full_block: Vec<bool>,
    /// Half the summed orbit dimensions: an upper bound on the capacity.
    #[serde(serialize_with = "ratio_as_string")]
    pub capacity_bound: Capacity,
}

/// Pointwise maximum of the rank functions in each coordinate. The maximum of
/// convex decreasing sequences is again one, so each coordinate is a valid
/// nilpotent rank function.
pub fn dominating_tuple(s: &SolSet) -> Result<DominatingTuple> {
    let (first, rest) = s.rank_matrices.split_first().ok_or(Error::EmptySolSet)?;
    let mut rows = first.rows.clone();
    for rm in rest {
        for (acc, r) in rows.iter_mut().zip(&rm.rows) {
            *acc = acc.pointwise_max(r)?;
        }
    }
    let tuple = rows
        .iter()
        .map(rank_to_partition)
        .collect::<Result<Vec<_>>>()?;
    let full_block = tuple.iter().map(|p| p.len() == 1).collect();
    let dims: u64 = tuple.iter().map(orbit_dimension).sum();
    Ok(DominatingTuple {
        tuple,
        full_block,
        capacity_bound: Ratio::new(dims, 2),
    })
}

/// Nodes in increasing lexicographic order, and covering pairs as node indices.
pub type Hasse = (Vec<Partition>, Vec<(usize, usize)>);

/// Covering pairs `(lower, upper)` of the dominance order on partitions of `n`.
pub fn hasse_edges(n: usize) -> Result<Hasse> {
    let nodes = partitions(n);
    if n > HASSE_MAX_N {
        return Err(Error::BudgetExceeded {
            required: nodes.len() as u128,
            budget: partitions(HASSE_MAX_N).len() as u128,
        });
    }
    let ranks: Vec<RankFunction> = nodes.iter().map(partition_to_rank).collect();
    let count = nodes.len();
    let words = count.div_ceil(64);

    // above[a] = { b ≠ a : a ≺ b }
    let mut above = vec![vec![0u64; words]; count];
    for (a, ra) in ranks.iter().enumerate() {
        for (b, rb) in ranks.iter().enumerate() {
            if a != b && dominates(ra, rb)? {
                above[a][b / 64] |= 1 << (b % 64);
            }
        }
    }
    let mut edges = Vec::new();
    for a in 0..count {
        let mut covers = above[a].clone();
        for c in 0..count {
            if above[a][c / 64] >> (c % 64) & 1 == 1 {
                for (w, mask) in covers.iter_mut().zip(&above[c]) {
                    *w &= !mask;
                }
            }
        }
        for b in 0..count {
            if covers[b / 64] >> (b % 64) & 1 == 1 {
                edges.push((a, b));
            }
        }
    }
    Ok((nodes, edges))
}

/// Graphviz digraph of the dominance order on partitions of `n`, one edge per
/// covering relation, pointing from the smaller partition to the larger.
pub fn hasse_dot(n: usize) -> Result<String> {
    use std::fmt::Write;

    let (nodes, edges) = hasse_edges(n)?;
    let mut out = String::new();
    writeln!(out, "digraph dominance_{n} {{").unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    for p in &nodes {
        writeln!(out, "  \"{p}\";").unwrap();
    }
    for (a, b) in edges {
        writeln!(out, "  \"{}\" -> \"{}\";", nodes[a], nodes[b]).unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}
