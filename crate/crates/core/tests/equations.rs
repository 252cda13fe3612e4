mod common;

use std::collections::BTreeSet;

use common::{brute_force_solutions, equation_holds, id_table, p, ranks_by_columns, square_table};
use rankfn::{
    check_solution, is_valid_rank_function, nontrivial_partitions, partitions, search_general,
    solve_nilpotent, solve_with_stable_ranks, structure_check_identity, ConvexTable, EquationSpec,
    FnSpec, MatrixClass, Partition, SolutionTuple, DEFAULT_BUDGET,
};

fn spec(n: usize, k: usize, f: FnSpec, g: FnSpec) -> EquationSpec {
    EquationSpec {
        n,
        k,
        f,
        g,
        include_zero: false,
    }
}

fn pairs(n: usize) -> Vec<[Partition; 2]> {
    let cands = nontrivial_partitions(n);
    cands
        .iter()
        .flat_map(|a| cands.iter().map(move |b| [a.clone(), b.clone()]))
        .collect()
}

#[test]
fn solver_is_sound() {
    for n in 2..=9 {
        let f = ConvexTable::identity(n);
        let eq = spec(n, 2, FnSpec::Id, FnSpec::Id);
        for lhs in pairs(n) {
            if let Some(b) = solve_nilpotent(&f, &lhs).unwrap() {
                let sol = SolutionTuple::nilpotent(&lhs, &b).unwrap();
                assert!(check_solution(&eq, &sol).unwrap(), "{sol:?}");
            }
        }
    }
}

#[test]
fn solver_matches_scan_over_every_rhs() {
    for n in 2..=8 {
        for (f, table) in [
            (ConvexTable::identity(n), id_table(n)),
            (ConvexTable::squares(n), square_table(n)),
        ] {
            let g = id_table(n);
            for lhs in pairs(n) {
                let raw: Vec<&[usize]> = lhs.iter().map(Partition::parts).collect();
                let hits: Vec<Vec<usize>> = partitions(n)
                    .into_iter()
                    .map(Vec::from)
                    .filter(|rhs| equation_holds(&table, &g, &raw, rhs))
                    .collect();
                let solved = solve_nilpotent(&f, &lhs).unwrap();
                assert!(hits.len() <= 1, "rhs not unique for {lhs:?}: {hits:?}");
                assert_eq!(solved.map(Vec::from), hits.into_iter().next(), "{lhs:?}");
            }
        }
    }
}

#[test]
fn condition_matches_validity_of_assembled_sequence() {
    for n in 2..=8 {
        for f in [ConvexTable::identity(n), ConvexTable::squares(n)] {
            for lhs in pairs(n) {
                let mut seq = vec![n as u64];
                for m in 1..=n {
                    seq.push(
                        lhs.iter()
                            .map(|a| f.eval(ranks_by_columns(a.parts())[m]))
                            .sum(),
                    );
                }
                let fits = seq.iter().all(|&v| v <= n as u64);
                let valid = fits
                    && is_valid_rank_function(&seq.iter().map(|&v| v as usize).collect::<Vec<_>>());
                let condition = 2 * seq[1] <= n as u64 + seq[2];
                assert_eq!(valid, condition, "{lhs:?}");
                assert_eq!(solve_nilpotent(&f, &lhs).unwrap().is_some(), condition);
            }
        }
    }
}

#[test]
fn k_three_solver_agrees_with_brute_force() {
    for n in 2..=6 {
        let f = ConvexTable::identity(n);
        let brute: BTreeSet<Vec<Vec<usize>>> =
            brute_force_solutions(n, 3, &id_table(n), &id_table(n))
                .into_iter()
                .collect();
        let cands = nontrivial_partitions(n);
        let mut solved = BTreeSet::new();
        for a in &cands {
            for b in &cands {
                for c in &cands {
                    let lhs = [a.clone(), b.clone(), c.clone()];
                    if let Some(rhs) = solve_nilpotent(&f, &lhs).unwrap() {
                        solved.insert(vec![
                            a.parts().to_vec(),
                            b.parts().to_vec(),
                            c.parts().to_vec(),
                            rhs.into(),
                        ]);
                    }
                }
            }
        }
        assert_eq!(solved, brute, "n = {n}");
    }
}

fn nonzero_classes(n: usize, max_q: usize) -> Vec<MatrixClass> {
    (0..=max_q.min(n))
        .flat_map(|q| {
            partitions(n - q)
                .into_iter()
                .map(move |p| MatrixClass::new(p, q))
        })
        .filter(MatrixClass::is_nonzero)
        .collect()
}

#[test]
fn stable_rank_solutions_have_the_identity_structure() {
    let mut solved = 0;
    for n in 2..=6 {
        let f = ConvexTable::identity(n);
        let eq = spec(n, 2, FnSpec::Id, FnSpec::Id);
        let classes = nonzero_classes(n, 2);
        for a in &classes {
            for b in &classes {
                if a.q + b.q > n {
                    continue;
                }
                let lhs = vec![a.clone(), b.clone()];
                if let Some(rhs) = solve_with_stable_ranks(&f, &lhs).unwrap() {
                    let sol = SolutionTuple::new(lhs, rhs).unwrap();
                    assert!(structure_check_identity(&sol), "{sol:?}");
                    assert!(check_solution(&eq, &sol).unwrap(), "{sol:?}");
                    solved += 1;
                }
            }
        }
    }
    assert!(solved > 50);
}

#[test]
fn stable_rank_solver_reduces_to_nilpotent_solver() {
    for n in 2..=8 {
        for f in [ConvexTable::identity(n), ConvexTable::squares(n)] {
            for lhs in pairs(n) {
                let classes: Vec<MatrixClass> =
                    lhs.iter().cloned().map(MatrixClass::nilpotent).collect();
                let stable = solve_with_stable_ranks(&f, &classes).unwrap();
                let nilp = solve_nilpotent(&f, &lhs).unwrap();
                assert_eq!(stable, nilp.map(MatrixClass::nilpotent));
            }
        }
    }
}

#[test]
fn stable_rank_solutions_for_squares_check_out() {
    // g = id, f = square: B's rank function is Σ f(r_{A_j}), stable rank Σ q_j²
    for n in 2..=6 {
        let f = ConvexTable::squares(n);
        let eq = spec(n, 2, FnSpec::Square, FnSpec::Id);
        let classes = nonzero_classes(n, 2);
        for a in &classes {
            for b in &classes {
                let lhs = vec![a.clone(), b.clone()];
                match solve_with_stable_ranks(&f, &lhs) {
                    Ok(Some(rhs)) => {
                        assert_eq!(rhs.q, a.q * a.q + b.q * b.q);
                        let sol = SolutionTuple::new(lhs, rhs).unwrap();
                        assert!(check_solution(&eq, &sol).unwrap());
                    }
                    Ok(None) => {}
                    Err(rankfn::Error::StableRankOverflow { stable_rank, .. }) => {
                        assert!(stable_rank > n)
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

#[test]
fn identity_search_matches_solver() {
    for n in 2..=7 {
        let found = search_general(&spec(n, 2, FnSpec::Id, FnSpec::Id), DEFAULT_BUDGET).unwrap();
        let f = ConvexTable::identity(n);
        let mut expected = Vec::new();
        for lhs in pairs(n) {
            if let Some(b) = solve_nilpotent(&f, &lhs).unwrap() {
                expected.push(SolutionTuple::nilpotent(&lhs, &b).unwrap());
            }
        }
        expected.sort_by_key(SolutionTuple::sort_key);
        assert_eq!(found, expected, "n = {n}");
    }
}

#[test]
fn pythagorean_search_matches_brute_force() {
    for n in 2..=7 {
        let brute: Vec<Vec<Vec<usize>>> =
            brute_force_solutions(n, 2, &square_table(n), &square_table(n));
        let found: Vec<Vec<Vec<usize>>> =
            search_general(&spec(n, 2, FnSpec::Square, FnSpec::Square), DEFAULT_BUDGET)
                .unwrap()
                .iter()
                .map(|t| t.members().map(|c| c.nilp.parts().to_vec()).collect())
                .collect();
        let brute_set: BTreeSet<_> = brute.into_iter().collect();
        let found_set: BTreeSet<_> = found.iter().cloned().collect();
        assert_eq!(found_set, brute_set, "n = {n}");
        if n == 4 {
            assert!(found.is_empty());
        }
    }
}

#[test]
fn pythagorean_tuple_at_ten() {
    // 3² + 4² = 5² at m = 1, everything vanishes from m = 2
    let a = [2, 2, 2, 1, 1, 1, 1];
    let b = [2, 2, 2, 2, 1, 1];
    let c = [2, 2, 2, 2, 2];
    assert!(equation_holds(
        &square_table(10),
        &square_table(10),
        &[&a, &b],
        &c
    ));

    let found =
        search_general(&spec(10, 2, FnSpec::Square, FnSpec::Square), DEFAULT_BUDGET).unwrap();
    let target = SolutionTuple::nilpotent(&[p(&a), p(&b)], &p(&c)).unwrap();
    assert!(found.contains(&target));
    let mirrored = SolutionTuple::nilpotent(&[p(&b), p(&a)], &p(&c)).unwrap();
    assert!(found.contains(&mirrored));
    let keys: Vec<_> = found.iter().map(SolutionTuple::sort_key).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn search_output_is_independent_of_worker_count() {
    let eq = spec(8, 2, FnSpec::Square, FnSpec::Square);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| search_general(&eq, DEFAULT_BUDGET).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn table_functions_behave_like_named_ones() {
    let n = 6;
    let named = search_general(&spec(n, 2, FnSpec::Square, FnSpec::Id), DEFAULT_BUDGET).unwrap();
    let tabled = search_general(
        &spec(
            n,
            2,
            FnSpec::Table {
                values: (0..=n as u64).map(|x| x * x).collect(),
            },
            FnSpec::Table {
                values: (0..=n as u64).collect(),
            },
        ),
        DEFAULT_BUDGET,
    )
    .unwrap();
    assert_eq!(named, tabled);
}
