//! Independent oracles: each test recomputes a quantity by a route that
//! shares no code with the library implementation.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use trees_core::counting::{counting_series, find_x0};
use trees_core::occurrence::{occurrences, occurrences_containing_root};
use trees_core::series::{
    cycle_index_multiset, eval_lower_bound, multiset_directional_derivative, TruncatedUniSeries,
};
use trees_core::spectral::eigenvalues;
use trees_core::tree::{enumerate_trees, parse_free, FreeTree, TreeKind};

/// Labelled tree from a Prüfer sequence over `0..n`.
fn prufer_decode(seq: &[usize], n: usize) -> FreeTree {
    let mut degree = vec![1; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    FreeTree::new(n, &edges).unwrap()
}

/// Isomorphism classes of trees on `n >= 2` vertices with maximum degree at
/// most `delta`, by running through all `n^(n-2)` Prüfer sequences.
fn prufer_classes(n: usize, delta: usize) -> BTreeSet<Vec<u8>> {
    let mut classes = BTreeSet::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        // a vertex appears deg - 1 times
        let mut counts = vec![0; n];
        seq.iter().for_each(|&v| counts[v] += 1);
        if counts.iter().all(|&c| c < delta) {
            classes.insert(prufer_decode(&seq, n).canonical_code().0);
        }
        let Some(i) = (0..seq.len()).rev().find(|&i| seq[i] + 1 < n) else {
            break;
        };
        seq[i] += 1;
        seq[i + 1..].iter_mut().for_each(|v| *v = 0);
    }
    classes
}

#[test]
fn prufer_enumeration_matches_free_trees() {
    assert_eq!(prufer_classes(7, 4).len(), 9);
    for (n, delta) in [
        (4, 3),
        (5, 3),
        (6, 3),
        (7, 3),
        (8, 3),
        (6, 4),
        (8, 4),
        (8, 7),
    ] {
        let oracle = prufer_classes(n, delta);
        let ours: BTreeSet<Vec<u8>> = enumerate_trees(TreeKind::Free, n, delta)
            .unwrap()
            .iter()
            .map(|t| t.tree.canonical_code().0)
            .collect();
        assert_eq!(ours, oracle, "n={n} delta={delta}");
    }
}

/// Connected vertex subsets of size `|h|` that induce a copy of `h`, by
/// scanning every bitmask.
fn brute_occurrences(h: &FreeTree, t: &FreeTree) -> u64 {
    let n = t.len();
    let target = h.canonical_code();
    let mut count = 0;
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize != h.len() {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let edges: Vec<(usize, usize)> = t
            .edges()
            .into_iter()
            .filter(|&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
            .map(|(a, b)| {
                let ia = verts.iter().position(|&v| v == a).unwrap();
                let ib = verts.iter().position(|&v| v == b).unwrap();
                (ia, ib)
            })
            .collect();
        if edges.len() + 1 != verts.len() {
            continue;
        }
        // |E| = |V| - 1 in an induced forest means connected
        if FreeTree::new(verts.len(), &edges).unwrap().canonical_code() == target {
            count += 1;
        }
    }
    count
}

#[test]
fn occurrences_match_subset_scan() {
    let patterns = ["", "0", "0 1", "0 0 0", "0 1 2", "0 1 1 3", "0 0 0 1 1"];
    for n in 1..=10 {
        for t in enumerate_trees(TreeKind::Free, n, 4).unwrap() {
            for p in patterns {
                let h = parse_free(p).unwrap();
                assert_eq!(
                    occurrences(&h, &t.tree),
                    brute_occurrences(&h, &t.tree),
                    "H={p:?} T={:?}",
                    t.format()
                );
            }
        }
    }
}

#[test]
fn root_occurrences_match_subset_scan() {
    // occurrences through the root = all occurrences minus those avoiding it
    let h = parse_free("0 1").unwrap();
    for t in enumerate_trees(TreeKind::Rooted, 8, 4).unwrap() {
        let keep: Vec<usize> = (0..t.len()).filter(|&v| v != t.root).collect();
        let without_root: u64 = forest_components(&t.tree, &keep)
            .iter()
            .map(|c| brute_occurrences(&h, &t.tree.induced(c)))
            .sum();
        assert_eq!(
            occurrences_containing_root(&h, &t),
            brute_occurrences(&h, &t.tree) - without_root
        );
    }
}

fn forest_components(t: &FreeTree, keep: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; t.len()];
    let allowed: BTreeSet<usize> = keep.iter().copied().collect();
    let mut out = Vec::new();
    for &s in keep {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        let mut comp = Vec::new();
        seen[s] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &u in t.neighbors(v) {
                if allowed.contains(&u) && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn series(c: &[i64]) -> TruncatedUniSeries {
    TruncatedUniSeries::from_coeffs(c.iter().map(|&v| rat(v)).collect())
}

/// `Z(S_m; f)` through the recurrence `m Z_m = sum_k f(x^k) Z_{m-k}`, and its
/// first-slot derivative in direction `g` through the differentiated
/// recurrence `m D_m = g Z_{m-1} + sum_k f(x^k) D_{m-k}`.
fn newton_cycle_index(
    f: &TruncatedUniSeries,
    g: &TruncatedUniSeries,
    m_max: usize,
) -> (Vec<TruncatedUniSeries>, Vec<TruncatedUniSeries>) {
    let order = f.order();
    let mut z = vec![TruncatedUniSeries::one(order)];
    let mut d = vec![TruncatedUniSeries::zero(order)];
    for m in 1..=m_max {
        let mut zm = TruncatedUniSeries::zero(order);
        let mut dm = g.mul(&z[m - 1]);
        for k in 1..=m {
            let fk = f.dilate(k as u32);
            zm = zm.add(&fk.mul(&z[m - k]));
            dm = dm.add(&fk.mul(&d[m - k]));
        }
        let inv = BigRational::new(BigInt::from(1), BigInt::from(m));
        z.push(zm.map(|c| c * &inv));
        d.push(dm.map(|c| c * &inv));
    }
    (z, d)
}

#[test]
fn cycle_index_and_derivative_match_recurrence() {
    let f = series(&[0, 2, -1, 3, 0, 5, 1, -4, 2, 0, 1, 3]);
    let g = series(&[0, 1, 4, 0, -2, 1, 0, 3, -1, 2, 0, 1]);
    let (z, d) = newton_cycle_index(&f, &g, 6);
    for m in 0..=6 {
        assert_eq!(cycle_index_multiset(m, &f).unwrap(), z[m], "Z m={m}");
        if m >= 1 {
            assert_eq!(
                multiset_directional_derivative(m, &f, &g).unwrap(),
                d[m],
                "D m={m}"
            );
        }
    }
}

/// Neville extrapolation of `values[i]` sampled at `h = 1/ns[i]` to `h = 0`.
fn neville_at_zero(ns: &[f64], values: &[f64]) -> f64 {
    let h: Vec<f64> = ns.iter().map(|n| 1.0 / n).collect();
    let mut p = values.to_vec();
    for level in 1..p.len() {
        for i in 0..p.len() - level {
            p[i] = (h[i + level] * p[i] - h[i] * p[i + 1]) / (h[i + level] - h[i]);
        }
    }
    p[0]
}

#[test]
fn delta_three_singularity_matches_coefficient_ratios() {
    let order = 420;
    let b = counting_series(3, order).unwrap();
    let ratio = |n: usize| {
        BigRational::new(b.p.coeff(n).clone(), b.p.coeff(n + 1).clone())
            .to_f64()
            .unwrap()
    };
    let ns: Vec<usize> = (0..6).map(|i| 400 - 20 * i).collect();
    let values: Vec<f64> = ns.iter().map(|&n| ratio(n)).collect();
    let limit = neville_at_zero(&ns.iter().map(|&n| n as f64).collect::<Vec<_>>(), &values);
    let est = find_x0(3, 600, 1e-10).unwrap();
    assert!(
        (limit - est.x0).abs() < 1e-4,
        "ratio limit {limit} vs x0 {}",
        est.x0
    );
}

#[test]
fn lower_bound_evaluation_is_monotone() {
    let b = counting_series(4, 200).unwrap();
    let mut last = 0.0;
    for i in 0..=35 {
        let x = 0.01 * i as f64;
        let v = eval_lower_bound(&b.p, x).unwrap();
        assert!(v >= last, "not increasing in x at {x}");
        last = v;
    }
    let x = 0.35;
    let mut prev = 0.0;
    for order in [10, 50, 100, 200] {
        let v = eval_lower_bound(&b.p.truncate(order), x).unwrap();
        assert!(v >= prev, "not increasing in order at {order}");
        prev = v;
    }
}

#[test]
fn spectral_moments_match_eigenvalue_powers() {
    for n in 1..=10 {
        for t in enumerate_trees(TreeKind::Free, n, 4).unwrap() {
            let ev = eigenvalues(&t.tree).unwrap();
            let m = trees_core::spectral::walk_moments(&t.tree, 12);
            for k in 1..=6 {
                let s: f64 = ev.iter().map(|l| l.powi(2 * k as i32)).sum();
                let exact = m[2 * k].to_f64().unwrap();
                assert!((s - exact).abs() <= 1e-6 * exact.max(1.0), "n={n} k={k}");
            }
        }
    }
}

#[test]
fn pendant_edge_counts_equal_n_minus_one() {
    let k2 = parse_free("0").unwrap();
    for n in 1..=9 {
        for t in enumerate_trees(TreeKind::Free, n, 4).unwrap() {
            assert_eq!(occurrences(&k2, &t.tree), n as u64 - 1);
        }
    }
}
