//! The finite functional system for occurrence counting.
//!
//! Planted trees are split by their depth-`h` truncation, `h` being the
//! diameter of `H`. A class of depth exactly `h` is an unknown series
//! `A_tau(x, u)`; shallower classes contain a single tree and contribute a
//! known monomial. A tree's children are grouped by their depth-`(h-1)`
//! truncation `sigma`, with group series `B_sigma` summing every class that
//! truncates to `sigma`. Each unknown satisfies
//!
//! `A_tau = x u^{k(tau)} prod_sigma Z(S_{l_sigma}; B_sigma)`,
//!
//! where `k(tau)` counts the occurrences of `H` through the root, which only
//! depend on the depth-`h` truncation.

mod mu;
mod solve;

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::occurrence::{OccurrenceMode, SubtreeMatcher};
use crate::tree::{CanonicalCode, FreeTree, RootedTree};

pub use mu::{compute_mu, SingularityReport};
pub use solve::{
    jacobian_column_sum, mean_variance_series, moments_from_bivariate, solve_series,
    solve_series_in, MomentSeries, SolvedSystem,
};

/// Default limit on the number of truncation classes.
pub const DEFAULT_CLASS_CAP: usize = 100_000;

/// A planted shape of bounded depth, described through the shapes one level
/// down: `children` lists `(index in previous level, multiplicity)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelShape {
    pub code: CanonicalCode,
    pub size: usize,
    pub depth: usize,
    pub children: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationClass {
    pub shape: RootedTree,
    pub code: CanonicalCode,
    /// Depth exactly `h`: an unknown of the system.
    pub deep: bool,
    pub size: usize,
    /// Occurrences of `H` inside the shape; the u-exponent of its monomial
    /// when the class is shallow.
    pub occurrences: u64,
    /// Group (depth-`(h-1)` truncation) the class belongs to.
    pub group: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassEquation {
    pub class_id: usize,
    pub k_root: u64,
    /// `(group, multiplicity)` pairs; multiplicities sum to at most `delta - 1`.
    pub children: Vec<(usize, usize)>,
}

/// Classes sharing one depth-`(h-1)` truncation `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    /// The class whose shape is `sigma` itself (always shallow).
    pub shallow: usize,
    pub deep: Vec<usize>,
}

/// Root of a rooted tree with the given child groups, for the assembly of
/// the rooted series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootTerm {
    pub children: Vec<(usize, usize)>,
    pub k_root: u64,
}

#[derive(Clone, Debug)]
pub struct ClassSystem {
    pub delta: usize,
    pub h: usize,
    pub subtree: FreeTree,
    pub subtree_code: CanonicalCode,
    /// `H` cannot occur at all under the degree bound.
    pub degenerate: bool,
    /// `levels[L]`: planted shapes of depth at most `L`, in code order.
    pub levels: Vec<Vec<LevelShape>>,
    /// The classes, i.e. `levels[h]`, in the same order.
    pub classes: Vec<TruncationClass>,
    /// One equation per deep class, in class order.
    pub equations: Vec<ClassEquation>,
    /// One group per shape of `levels[h - 1]`, same order.
    pub groups: Vec<Group>,
    pub rooted_terms: Vec<RootTerm>,
    /// Occurrences meeting both sides when two group shapes are joined.
    pub spanning: Vec<Vec<u64>>,
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of multisets of at most `max` items drawn from `kinds` kinds.
fn multiset_count(kinds: u128, max: usize) -> u128 {
    (0..=max as u128)
        .map(|j| {
            if j == 0 {
                1
            } else {
                binomial_u128(kinds + j - 1, j)
            }
        })
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Multisets of up to `max` indices below `kinds`, as `(index, multiplicity)`.
fn multisets(kinds: usize, max: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        kinds: usize,
        start: usize,
        left: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for i in start..kinds {
            for m in 1..=left {
                cur.push((i, m));
                rec(kinds, i + 1, left - m, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(kinds, 0, max, &mut Vec::new(), &mut out);
    out
}

fn compose(prev: &[LevelShape], children: Vec<(usize, usize)>) -> LevelShape {
    let mut words: Vec<&[u8]> = Vec::new();
    for &(c, m) in &children {
        for _ in 0..m {
            words.push(prev[c].code.as_slice());
        }
    }
    words.sort_unstable_by(|a, b| b.cmp(a));
    let mut code = vec![1u8];
    for w in words {
        code.extend_from_slice(w);
    }
    code.push(0);
    LevelShape {
        code: CanonicalCode(code),
        size: 1 + children
            .iter()
            .map(|&(c, m)| m * prev[c].size)
            .sum::<usize>(),
        depth: children
            .iter()
            .map(|&(c, _)| prev[c].depth + 1)
            .max()
            .unwrap_or(0),
        children,
    }
}

/// Planted shapes of depth at most `L` for `L = 0..=h`, each level in code
/// order.
pub fn build_levels(delta: usize, h: usize, cap: usize) -> Result<Vec<Vec<LevelShape>>> {
    let k1 = LevelShape {
        code: CanonicalCode(vec![1, 0]),
        size: 1,
        depth: 0,
        children: Vec::new(),
    };
    let mut levels = vec![vec![k1]];
    for level in 1..=h {
        let prev = &levels[level - 1];
        let count = multiset_count(prev.len() as u128, delta - 1);
        if count > cap as u128 {
            return Err(Error::ResourceCap {
                delta,
                h,
                count,
                cap,
            });
        }
        let mut shapes: Vec<LevelShape> = multisets(prev.len(), delta - 1)
            .into_iter()
            .map(|ch| compose(prev, ch))
            .collect();
        shapes.sort_by(|a, b| a.code.cmp(&b.code));
        levels.push(shapes);
    }
    Ok(levels)
}

/// All planted shapes with root budget `delta - 1` and depth at most `h`,
/// in code order; `deep` marks depth exactly `h`.
pub fn enumerate_classes(delta: usize, h: usize) -> Result<Vec<TruncationClass>> {
    enumerate_classes_capped(delta, h, DEFAULT_CLASS_CAP)
}

pub fn enumerate_classes_capped(
    delta: usize,
    h: usize,
    cap: usize,
) -> Result<Vec<TruncationClass>> {
    if delta < 3 {
        return invalid("the class system needs delta >= 3");
    }
    if h < 1 {
        return invalid("truncation depth must be at least 1");
    }
    let levels = build_levels(delta, h, cap)?;
    let groups = truncation_map(&levels, h);
    Ok(levels[h]
        .iter()
        .zip(groups)
        .map(|(s, group)| TruncationClass {
            shape: RootedTree::from_code(&s.code).as_planted(),
            code: s.code.clone(),
            deep: s.depth == h,
            size: s.size,
            occurrences: 0,
            group,
        })
        .collect())
}

/// For each shape of `levels[h]`, the index in `levels[h-1]` of its
/// depth-`(h-1)` truncation.
fn truncation_map(levels: &[Vec<LevelShape>], h: usize) -> Vec<usize> {
    // trunc[L][i]: index in levels[L-1] of the truncation of levels[L][i]
    let mut trunc: Vec<Vec<usize>> = vec![Vec::new(), vec![0; levels[1].len()]];
    for level in 2..=h {
        let index: HashMap<&CanonicalCode, usize> = levels[level - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (&s.code, i))
            .collect();
        let below = &levels[level - 2];
        let map = levels[level]
            .iter()
            .map(|s| {
                let children: Vec<(usize, usize)> = s
                    .children
                    .iter()
                    .map(|&(c, m)| (trunc[level - 1][c], m))
                    .collect();
                index[&compose(below, children).code]
            })
            .collect();
        trunc.push(map);
    }
    trunc.swap_remove(h)
}

fn rooted_code(groups: &[LevelShape], children: &[(usize, usize)]) -> CanonicalCode {
    compose(groups, children.to_vec()).code
}

/// Builds the class system for `H` under degree bound `delta`.
pub fn build_system(delta: usize, h_tree: &FreeTree) -> Result<ClassSystem> {
    build_system_capped(delta, h_tree, DEFAULT_CLASS_CAP)
}

pub fn build_system_capped(delta: usize, h_tree: &FreeTree, cap: usize) -> Result<ClassSystem> {
    if delta < 3 {
        return invalid("the class system needs delta >= 3");
    }
    let h = h_tree.diameter().max(1);
    let degenerate = h_tree.max_degree() > delta;
    if degenerate {
        log::warn!(
            "subtree has maximum degree {} > delta {}; it never occurs",
            h_tree.max_degree(),
            delta
        );
    }
    let levels = build_levels(delta, h, cap)?;
    let root_count = multiset_count(levels[h - 1].len() as u128, delta);
    if root_count > cap as u128 {
        return Err(Error::ResourceCap {
            delta,
            h,
            count: root_count,
            cap,
        });
    }
    let matcher = SubtreeMatcher::new(h_tree, OccurrenceMode::default());
    let group_of = truncation_map(&levels, h);
    let top = &levels[h];

    let classes: Vec<TruncationClass> = top
        .par_iter()
        .zip(group_of.par_iter())
        .map(|(s, &group)| {
            let shape = RootedTree::from_code(&s.code).as_planted();
            TruncationClass {
                occurrences: matcher.count(&shape.tree),
                shape,
                code: s.code.clone(),
                deep: s.depth == h,
                size: s.size,
                group,
            }
        })
        .collect();

    let equations: Vec<ClassEquation> = classes
        .par_iter()
        .enumerate()
        .filter(|(_, c)| c.deep)
        .map(|(id, c)| ClassEquation {
            class_id: id,
            k_root: matcher.count_containing(&c.shape.tree, c.shape.root),
            children: top[id].children.clone(),
        })
        .collect();

    let class_index: HashMap<&CanonicalCode, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (&c.code, i))
        .collect();
    let mut groups: Vec<Group> = levels[h - 1]
        .iter()
        .map(|s| Group {
            shallow: class_index[&s.code],
            deep: Vec::new(),
        })
        .collect();
    for (id, c) in classes.iter().enumerate() {
        if c.deep {
            groups[c.group].deep.push(id);
        }
    }

    let group_shapes = &levels[h - 1];
    let rooted_terms: Vec<RootTerm> = multisets(group_shapes.len(), delta)
        .into_par_iter()
        .map(|children| {
            let t = RootedTree::from_code(&rooted_code(group_shapes, &children));
            RootTerm {
                k_root: matcher.count_containing(&t.tree, t.root),
                children,
            }
        })
        .collect();

    let planted: Vec<RootedTree> = group_shapes
        .iter()
        .map(|s| RootedTree::from_code(&s.code).as_planted())
        .collect();
    let spanning: Vec<Vec<u64>> = planted
        .par_iter()
        .map(|a| {
            planted
                .iter()
                .map(|b| matcher.count_spanning(a, b))
                .collect()
        })
        .collect();

    Ok(ClassSystem {
        delta,
        h,
        subtree: h_tree.clone(),
        subtree_code: h_tree.canonical_code(),
        degenerate,
        levels,
        classes,
        equations,
        groups,
        rooted_terms,
        spanning,
    })
}

impl ClassSystem {
    pub fn deep_count(&self) -> usize {
        self.equations.len()
    }

    /// Position of each deep class among the unknowns.
    pub fn deep_index(&self) -> HashMap<usize, usize> {
        self.equations
            .iter()
            .enumerate()
            .map(|(i, e)| (e.class_id, i))
            .collect()
    }
}

/// Outcome of the strong-connectivity check on the dependency digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connectivity {
    pub strongly_connected: bool,
    /// Strongly connected components (deep class ids) when the check fails.
    pub components: Vec<Vec<usize>>,
}

impl std::fmt::Display for Connectivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.strongly_connected {
            return write!(f, "strongly connected");
        }
        let parts: Vec<String> = self.components.iter().map(|c| format!("{c:?}")).collect();
        write!(
            f,
            "{} components: {}",
            self.components.len(),
            parts.join(" ")
        )
    }
}

/// Checks that every unknown depends, directly or not, on every other one
/// (and that a single unknown depends on itself).
///
/// Group nodes are inserted between an equation and the unknowns of each
/// group it uses, which keeps the edge count linear in the system size.
pub fn check_strong_connectivity(sys: &ClassSystem) -> Connectivity {
    let mut g: DiGraph<Option<usize>, ()> = DiGraph::new();
    let deep_nodes: HashMap<usize, _> = sys
        .equations
        .iter()
        .map(|e| (e.class_id, g.add_node(Some(e.class_id))))
        .collect();
    let group_nodes: Vec<_> = (0..sys.groups.len()).map(|_| g.add_node(None)).collect();
    for e in &sys.equations {
        for &(grp, _) in &e.children {
            g.add_edge(deep_nodes[&e.class_id], group_nodes[grp], ());
        }
    }
    for (grp, group) in sys.groups.iter().enumerate() {
        for c in &group.deep {
            g.add_edge(group_nodes[grp], deep_nodes[c], ());
        }
    }
    let sccs = tarjan_scc(&g);
    let mut components: Vec<Vec<usize>> = sccs
        .iter()
        .map(|scc| {
            let mut ids: Vec<usize> = scc.iter().filter_map(|&n| g[n]).collect();
            ids.sort_unstable();
            ids
        })
        .filter(|ids| !ids.is_empty())
        .collect();
    components.sort();
    let cyclic = sccs
        .iter()
        .any(|scc| scc.iter().any(|&n| g[n].is_none()) && scc.iter().any(|&n| g[n].is_some()));
    let strongly_connected = components.len() == 1 && cyclic;
    Connectivity {
        strongly_connected,
        components: if strongly_connected {
            Vec::new()
        } else {
            components
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_free;

    fn free(s: &str) -> FreeTree {
        parse_free(s).unwrap()
    }

    #[test]
    fn class_counts() {
        assert_eq!(enumerate_classes(3, 1).unwrap().len(), 3);
        assert_eq!(enumerate_classes(3, 2).unwrap().len(), 10);
        assert_eq!(enumerate_classes(4, 2).unwrap().len(), 35);
        let deep = enumerate_classes(4, 2)
            .unwrap()
            .iter()
            .filter(|c| c.deep)
            .count();
        assert_eq!(deep, 31);
        assert!(enumerate_classes(2, 2).is_err());
    }

    #[test]
    fn class_cap_is_enforced() {
        match enumerate_classes_capped(4, 3, 1000) {
            Err(Error::ResourceCap { delta: 4, h: 3, .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
        assert!(matches!(
            build_system(4, &FreeTree::path(9)),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn edge_system() {
        let sys = build_system(3, &free("0")).unwrap();
        assert_eq!(sys.h, 1);
        let ks: Vec<u64> = sys.equations.iter().map(|e| e.k_root).collect();
        let sizes: Vec<usize> = sys
            .equations
            .iter()
            .map(|e| sys.classes[e.class_id].size)
            .collect();
        let mut pairs: Vec<(usize, u64)> = sizes.into_iter().zip(ks).collect();
        pairs.sort();
        assert_eq!(pairs, vec![(2, 1), (3, 2)]);
        assert!(check_strong_connectivity(&sys).strongly_connected);
    }

    #[test]
    fn cherry_root_exponents() {
        let sys = build_system(4, &free("0 1")).unwrap();
        let find = |code: &str| {
            let c = RootedTree::parse(code).unwrap().canonical_code();
            let id = sys.classes.iter().position(|k| k.code == c).unwrap();
            match sys.equations.iter().find(|e| e.class_id == id) {
                Some(e) => e.k_root,
                None => sys.classes[id].occurrences,
            }
        };
        assert_eq!(find("0 1"), 1);
        // shallow: its monomial carries the single cherry
        assert_eq!(find("0 0"), 1);
        assert_eq!(find("0 0 0"), 3);
        assert_eq!(find("0 1 1"), 2);
        assert_eq!(find("0 1 1 0"), 3);
        assert!(check_strong_connectivity(&sys).strongly_connected);
    }

    #[test]
    fn detects_missing_dependency() {
        let mut sys = build_system(3, &free("0")).unwrap();
        sys.equations.truncate(1);
        let kept = sys.equations[0].class_id;
        for g in &mut sys.groups {
            g.deep.retain(|&c| c == kept);
        }
        assert!(check_strong_connectivity(&sys).strongly_connected);
        sys.equations[0].children.clear();
        let report = check_strong_connectivity(&sys);
        assert!(!report.strongly_connected);
        assert_eq!(report.components, vec![vec![kept]]);
    }

    #[test]
    fn multiset_helpers() {
        assert_eq!(multisets(4, 3).len(), 35);
        assert_eq!(multiset_count(4, 3), 35);
        assert_eq!(multiset_count(35, 3), 8436);
    }
}
