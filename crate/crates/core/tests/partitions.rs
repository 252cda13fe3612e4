mod common;

use std::collections::HashSet;

use common::{p, partition_count, ranks_by_columns, raw_partitions};
use proptest::prelude::*;
use rankfn::{
    class_rank, conjugate, dominates, is_valid_rank_function, partition_to_rank, partitions,
    rank_to_partition, MatrixClass, Partition, RankFunction,
};

#[test]
fn enumeration_matches_independent_counter() {
    for n in 0..=14 {
        let ps = partitions(n);
        assert_eq!(ps.len(), partition_count(n), "n = {n}");
        let distinct: HashSet<_> = ps.iter().collect();
        assert_eq!(distinct.len(), ps.len());
        assert!(
            ps.windows(2).all(|w| w[0] < w[1]),
            "lexicographic order at n = {n}"
        );
    }
    assert_eq!(partition_count(8), 22);
    assert_eq!(partition_count(10), 42);
}

#[test]
fn rank_matches_column_count() {
    for n in 0..=12 {
        for raw in raw_partitions(n) {
            assert_eq!(partition_to_rank(&p(&raw)).values(), ranks_by_columns(&raw));
        }
    }
}

#[test]
fn round_trip_up_to_twelve() {
    for n in 0..=12 {
        for part in partitions(n) {
            let r = partition_to_rank(&part);
            assert_eq!(rank_to_partition(&r).unwrap(), part);
        }
    }
}

fn decreasing_sequences(n: usize) -> Vec<Vec<usize>> {
    // every weakly decreasing length-(n+1) sequence starting at n
    fn go(len: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=max {
            prefix.push(v);
            go(len, v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n + 1, n, &mut vec![n], &mut out);
    out
}

#[test]
fn characterization_is_complete() {
    // sequences ending in 0 are exactly the partition rank functions; the rest
    // are nilpotent ones shifted by a stable rank
    for n in 0..=8 {
        let expected: HashSet<Vec<usize>> = raw_partitions(n)
            .iter()
            .map(|raw| ranks_by_columns(raw))
            .collect();
        let accepted: Vec<Vec<usize>> = decreasing_sequences(n)
            .into_iter()
            .filter(|s| is_valid_rank_function(s))
            .collect();
        let nilpotent: HashSet<Vec<usize>> = accepted
            .iter()
            .filter(|s| *s.last().unwrap() == 0)
            .cloned()
            .collect();
        assert_eq!(nilpotent, expected, "n = {n}");
        let back: HashSet<Partition> = nilpotent
            .iter()
            .map(|s| rank_to_partition(&RankFunction::new(s.clone()).unwrap()).unwrap())
            .collect();
        assert_eq!(back.len(), partition_count(n));

        let shifted: HashSet<Vec<usize>> = (1..=n)
            .flat_map(|q| {
                raw_partitions(n - q).into_iter().map(move |raw| {
                    let mut r: Vec<usize> = ranks_by_columns(&raw).iter().map(|v| v + q).collect();
                    r.resize(n + 1, q);
                    r
                })
            })
            .collect();
        let general: HashSet<Vec<usize>> = accepted
            .iter()
            .filter(|s| *s.last().unwrap() > 0)
            .cloned()
            .collect();
        assert_eq!(general, shifted, "n = {n}");
        for s in &general {
            let class = RankFunction::new(s.clone()).unwrap().to_class();
            assert_eq!(class_rank(&class).values(), s.as_slice());
        }
    }
}

fn partial_sums(parts: &[usize], len: usize) -> Vec<usize> {
    (0..len).map(|m| parts.iter().take(m).sum()).collect()
}

#[test]
fn dominance_is_reverse_dominance_of_conjugates() {
    for n in 1..=8 {
        let ps = partitions(n);
        for a in &ps {
            for b in &ps {
                let by_rank = dominates(&partition_to_rank(a), &partition_to_rank(b)).unwrap();
                let ca = partial_sums(conjugate(a).parts(), n + 1);
                let cb = partial_sums(conjugate(b).parts(), n + 1);
                let by_columns = ca.iter().zip(&cb).all(|(x, y)| x >= y);
                assert_eq!(by_rank, by_columns, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn once_constant_stays_constant() {
    for n in 0..=10 {
        for part in partitions(n) {
            for q in 0..=2 {
                let r = class_rank(&MatrixClass::new(part.clone(), q));
                let v = r.values();
                if let Some(m0) = v.windows(2).position(|w| w[0] == w[1]) {
                    assert!(v[m0..].iter().all(|&x| x == v[m0]), "{v:?}");
                }
                assert_eq!(r.stable_rank(), q);
                assert_eq!(r.is_nilpotent(), q == 0);
            }
        }
    }
}

#[test]
fn direct_sum_adds_rank_functions() {
    for n1 in 1..=5 {
        for n2 in 1..=5 {
            for a in partitions(n1) {
                for b in partitions(n2) {
                    let ra = class_rank(&MatrixClass::nilpotent(a.clone()));
                    let rb = class_rank(&MatrixClass::nilpotent(b.clone()));
                    let sum = partition_to_rank(&a.union(&b));
                    for m in 0..=n1 + n2 {
                        assert_eq!(sum.at(m), ra.at(m) + rb.at(m));
                    }
                }
            }
        }
    }
}

#[test]
fn invertible_part_shifts_rank_function() {
    let c = MatrixClass::new(p(&[3, 1]), 2);
    let r = class_rank(&c);
    assert_eq!(r.values(), &[6, 4, 3, 2, 2, 2, 2]);
    assert_eq!(r.to_class(), c);
}

fn arb_partition(max_n: usize) -> impl Strategy<Value = Partition> {
    (0..=max_n).prop_flat_map(|n| {
        let all = partitions(n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

proptest! {
    #[test]
    fn conjugate_is_an_involution(part in arb_partition(18)) {
        let c = conjugate(&part);
        prop_assert_eq!(c.n(), part.n());
        prop_assert_eq!(conjugate(&c), part);
    }

    #[test]
    fn class_round_trip(part in arb_partition(12), q in 0usize..4) {
        let c = MatrixClass::new(part, q);
        prop_assert_eq!(class_rank(&c).to_class(), c);
    }

    #[test]
    fn display_parse_round_trip(part in arb_partition(15)) {
        prop_assert_eq!(part.to_string().parse::<Partition>().unwrap(), part.clone());
        let json = serde_json::to_string(&part).unwrap();
        prop_assert_eq!(serde_json::from_str::<Partition>(&json).unwrap(), part);
    }

    #[test]
    fn arbitrary_order_is_sorted(mut parts in prop::collection::vec(1usize..7, 0..8)) {
        let built = Partition::new(parts.clone()).unwrap();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        prop_assert_eq!(built.parts(), parts.as_slice());
    }
}
