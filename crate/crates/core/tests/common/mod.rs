//! Brute-force oracles shared by the integration tests. None of these call
//! the solver or the rank-function conversions they are used to check.

#![allow(dead_code)]

use rankfn::{FnTable, Partition};

/// p(n) by the standard coin-change recurrence.
pub fn partition_count(n: usize) -> usize {
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

/// All weakly decreasing sequences of positive integers summing to `n`,
/// built as raw vectors without going through `Partition`.
pub fn raw_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max.min(rem)).rev() {
            prefix.push(part);
            go(rem - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Rank of the m-th power from the Young diagram: `n` minus the number of
/// boxes in the first `m` columns.
pub fn rank_by_columns(parts: &[usize], m: usize) -> usize {
    let n: usize = parts.iter().sum();
    let boxes_in_first_columns: usize = parts.iter().map(|&k| k.min(m)).sum();
    n - boxes_in_first_columns
}

pub fn ranks_by_columns(parts: &[usize]) -> Vec<usize> {
    let n: usize = parts.iter().sum();
    (0..=n).map(|m| rank_by_columns(parts, m)).collect()
}

pub fn p(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

pub fn nontrivial(parts: &[usize]) -> bool {
    parts.first().is_some_and(|&k| k >= 2)
}

/// Evaluates `Σ f(r_i(m)) = g(r_B(m))` for `m = 1..=n` directly.
pub fn equation_holds(f: &FnTable, g: &FnTable, lhs: &[&[usize]], rhs: &[usize]) -> bool {
    let n: usize = rhs.iter().sum();
    (1..=n).all(|m| {
        let left: u64 = lhs.iter().map(|a| f.eval(rank_by_columns(a, m))).sum();
        left == g.eval(rank_by_columns(rhs, m))
    })
}

/// Every nontrivial `(A_1, …, A_k, B)` satisfying the equation, found by trying
/// all `(k+1)`-tuples.
pub fn brute_force_solutions(n: usize, k: usize, f: &FnTable, g: &FnTable) -> Vec<Vec<Vec<usize>>> {
    let cands: Vec<Vec<usize>> = raw_partitions(n)
        .into_iter()
        .filter(|p| nontrivial(p))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    if cands.is_empty() {
        return out;
    }
    loop {
        let lhs: Vec<&[usize]> = idx.iter().map(|&i| cands[i].as_slice()).collect();
        for rhs in &cands {
            if equation_holds(f, g, &lhs, rhs) {
                let mut t: Vec<Vec<usize>> = lhs.iter().map(|a| a.to_vec()).collect();
                t.push(rhs.clone());
                out.push(t);
            }
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < cands.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn id_table(n: usize) -> FnTable {
    FnTable::new((0..=n as u64).collect())
}

pub fn square_table(n: usize) -> FnTable {
    FnTable::new((0..=n as u64).map(|x| x * x).collect())
}
