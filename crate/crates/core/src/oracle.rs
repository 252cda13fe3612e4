//! Exact matrix arithmetic used to check the combinatorics against actual
//! matrices.
//!
//! Everything is over the rationals. Ranks are computed by fraction-free
//! (Bareiss) elimination after clearing denominators; powers are taken by
//! repeated multiplication on an integer multiple of the matrix, divided by
//! the content after every step so entries stay small.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::equations::{EquationSpec, SolutionTuple};
use crate::error::{Error, Result};
use crate::partition::{class_rank, partitions, MatrixClass, Partition};

/// Default seed for oracle runs; the CLI lets `RANKFN_SEED` override it.
pub const DEFAULT_SEED: u64 = 0x5eed_2013;

/// Random entries are drawn from `-ENTRY_RANGE..=ENTRY_RANGE`.
pub const ENTRY_RANGE: i64 = 3;

/// Square matrix over ℚ, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        ExactMatrix {
            n,
            entries: vec![BigRational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                row,
                cols: r.len(),
            });
        }
        Ok(ExactMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| BigRational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigRational]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: usize) -> ExactMatrix {
        let mut acc = Self::identity(self.n);
        for _ in 0..exp {
            acc = acc.mul(self).expect("same size");
        }
        acc
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &ExactMatrix) -> ExactMatrix {
        let n = self.n + other.n;
        let mut out = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                out.set(self.n + i, self.n + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Inverse by Gauss–Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<ExactMatrix> {
        let n = self.n;
        let mut a: Vec<Vec<BigRational>> = self.rows().map(<[_]>::to_vec).collect();
        let mut inv: Vec<Vec<BigRational>> = Self::identity(n).rows().map(<[_]>::to_vec).collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let scale = a[col][col].recip();
            for j in 0..n {
                a[col][j] *= &scale;
                inv[col][j] *= &scale;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let da = &factor * &a[col][j];
                    a[r][j] -= da;
                    let di = &factor * &inv[col][j];
                    inv[r][j] -= di;
                }
            }
        }
        Some(ExactMatrix {
            n,
            entries: inv.into_iter().flatten().collect(),
        })
    }

    /// A positive integer multiple of the matrix, as integer rows.
    fn integer_multiple(&self) -> Vec<Vec<BigInt>> {
        let lcm = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        self.rows()
            .map(|row| row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect())
            .collect()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            n: self.n,
            entries: self
                .rows()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let rows = raw
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| {
                        s.parse::<BigRational>()
                            .map_err(|_| Error::MalformedRational(s.clone()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let m = ExactMatrix::from_rows(rows).map_err(D::Error::custom)?;
        if m.n != raw.n {
            return Err(D::Error::custom(Error::SizeMismatch {
                expected: raw.n,
                found: m.n,
            }));
        }
        Ok(m)
    }
}

/// Rank of an integer matrix by Bareiss elimination. Consumes the rows.
fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let (top, below) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in below.iter_mut() {
            let lead = std::mem::take(&mut row[col]);
            for j in col + 1..cols {
                let v = &row[j] * &pivot_row[col] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = pivot_row[col].clone();
        rank += 1;
    }
    rank
}

/// Rank over ℚ.
pub fn exact_rank(m: &ExactMatrix) -> usize {
    bareiss_rank(m.integer_multiple())
}

fn int_matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

fn strip_content(m: &mut [Vec<BigInt>]) {
    let g = m.iter().flatten().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in m.iter_mut().flatten() {
            *x /= &g;
        }
    }
}

/// `(rk M⁰, rk M¹, …, rk Mⁿ)`.
pub fn matrix_rank_function(m: &ExactMatrix) -> Vec<usize> {
    let n = m.n;
    let mut base = m.integer_multiple();
    strip_content(&mut base);
    let mut ranks = Vec::with_capacity(n + 1);
    ranks.push(n);
    let mut power = base.clone();
    for step in 1..=n {
        ranks.push(bareiss_rank(power.clone()));
        if step < n {
            power = int_matmul(&power, &base);
            strip_content(&mut power);
        }
    }
    ranks
}

fn random_nonsingular(n: usize, rng: &mut ChaCha8Rng) -> ExactMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| rng.random_range(-ENTRY_RANGE..=ENTRY_RANGE))
                    .collect()
            })
            .collect();
        let m = ExactMatrix::from_integers(&rows).expect("square by construction");
        if exact_rank(&m) == n {
            return m;
        }
    }
}

/// `N_{k_1} ⊕ … ⊕ N_{k_ℓ} ⊕ D` with `D` a random nonsingular `q × q` integer
/// matrix drawn from `seed`.
pub fn jordan_matrix(p: &Partition, q: usize, seed: u64) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(p.n());
    let mut offset = 0;
    for &k in p.parts() {
        for i in 0..k - 1 {
            m.set(offset + i, offset + i + 1, BigRational::one());
        }
        offset += k;
    }
    if q == 0 {
        return m;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    m.direct_sum(&random_nonsingular(q, &mut rng))
}

/// `U⁻¹ M U` for a random nonsingular integer `U` drawn from `seed`.
pub fn random_conjugate(m: &ExactMatrix, seed: u64) -> ExactMatrix {
    // separate stream from jordan_matrix so equal seeds don't reuse the block
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let u = random_nonsingular(m.n, &mut rng);
    let u_inv = u.inverse().expect("nonsingular by construction");
    u_inv.mul(m).and_then(|x| x.mul(&u)).expect("same size")
}

/// A matrix in the class, hidden by a random change of basis.
pub fn class_matrix(c: &MatrixClass, seed: u64) -> ExactMatrix {
    random_conjugate(&jordan_matrix(&c.nilp, c.q, seed), seed)
}

/// Mismatch found by [`oracle_sweep`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub class: MatrixClass,
    pub seed: u64,
    pub expected: Vec<usize>,
    pub found: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub cases: usize,
    pub seeds_per_case: u64,
    pub base_seed: u64,
    pub discrepancies: Vec<Discrepancy>,
}

/// Compares the rank function of the Jordan matrix and of `seeds` random
/// conjugates against [`class_rank`] for one class.
pub fn check_class(c: &MatrixClass, base_seed: u64, seeds: u64) -> Vec<Discrepancy> {
    let expected = class_rank(c).values().to_vec();
    let plain = jordan_matrix(&c.nilp, c.q, base_seed);
    let mut out = Vec::new();
    let found = matrix_rank_function(&plain);
    if found != expected {
        out.push(Discrepancy {
            class: c.clone(),
            seed: base_seed,
            expected: expected.clone(),
            found,
        });
    }
    for i in 0..seeds {
        let seed = base_seed.wrapping_add(i);
        let found = matrix_rank_function(&random_conjugate(&plain, seed));
        if found != expected {
            out.push(Discrepancy {
                class: c.clone(),
                seed,
                expected: expected.clone(),
                found,
            });
        }
    }
    out
}

/// Every class `(p, q)` with `p ⊢ m`, `m ≤ max_nilp`, `q ∈ stable_ranks`
/// (skipping the empty 0×0 class), each checked with `seeds` conjugates.
pub fn oracle_sweep(
    max_nilp: usize,
    stable_ranks: &[usize],
    seeds: u64,
    base_seed: u64,
) -> OracleReport {
    let classes: Vec<MatrixClass> = (0..=max_nilp)
        .flat_map(partitions)
        .flat_map(|p| {
            stable_ranks
                .iter()
                .map(move |&q| MatrixClass::new(p.clone(), q))
        })
        .filter(|c| c.n() > 0)
        .collect();
    let discrepancies = classes
        .par_iter()
        .flat_map_iter(|c| check_class(c, base_seed, seeds))
        .collect();
    OracleReport {
        cases: classes.len(),
        seeds_per_case: seeds,
        base_seed,
        discrepancies,
    }
}

/// Rebuilds every member of `sol` as an explicit matrix and checks the
/// equation on actual ranks of powers.
pub fn verify_solution(spec: &EquationSpec, sol: &SolutionTuple, seed: u64) -> Result<bool> {
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
    let ranks: Vec<Vec<usize>> = sol
        .members()
        .enumerate()
        .map(|(i, c)| matrix_rank_function(&class_matrix(c, seed.wrapping_add(i as u64))))
        .collect();
    let (rhs, lhs) = ranks.split_last().expect("at least one member");
    Ok(spec.points().all(|m| {
        let left: u64 = lhs.iter().map(|r| f.eval(r[m])).sum();
        left == g.eval(rhs[m])
    }))
}

/// Rank over ℚ by plain Gaussian elimination on rationals; slower than
/// [`exact_rank`] and kept as an independent cross-check.
pub fn rational_rank(m: &ExactMatrix) -> usize {
    let n = m.n;
    let mut a: Vec<Vec<BigRational>> = m.rows().map(<[_]>::to_vec).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let (top, bottom) = a.split_at_mut(r);
            let (pivot_row, row) = (&top[rank], &mut bottom[0]);
            let factor = &row[col] / &pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Largest absolute numerator; handy for checking entry growth in tests.
pub fn max_abs_numerator(m: &ExactMatrix) -> BigInt {
    m.entries
        .iter()
        .map(|x| x.numer().abs())
        .max()
        .unwrap_or_default()
}
