//! Counting copies of a small tree `H` inside explicit trees.
//!
//! An occurrence is a vertex subset inducing a connected subgraph isomorphic
//! to `H`; automorphisms of `H` do not multiply the count. Connected subsets
//! are enumerated with the ESU extension scheme, which on trees needs no
//! exclusive-neighbourhood bookkeeping: a neighbour of a newly added vertex
//! can never already border the current subset.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::tree::{enumerate_trees, join, CanonicalCode, FreeTree, RootedTree, TreeKind};

/// Counting convention switches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OccurrenceMode {
    /// Internal vertices of `H` must keep their full host degree.
    pub pattern: bool,
}

/// Precomputed data for repeated matching of one subtree.
#[derive(Clone, Debug)]
pub struct SubtreeMatcher {
    size: usize,
    code: CanonicalCode,
    degrees: Vec<usize>,
    max_degree: usize,
    mode: OccurrenceMode,
}

impl SubtreeMatcher {
    pub fn new(h: &FreeTree, mode: OccurrenceMode) -> Self {
        let mut degrees = h.degrees();
        degrees.sort_unstable();
        SubtreeMatcher {
            size: h.len(),
            code: h.canonical_code(),
            max_degree: h.max_degree(),
            degrees,
            mode,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.code
    }

    fn accepts(&self, t: &FreeTree, sub: &[usize], in_sub: &[bool]) -> bool {
        let mut deg: Vec<usize> = sub
            .iter()
            .map(|&v| t.neighbors(v).iter().filter(|&&w| in_sub[w]).count())
            .collect();
        if self.mode.pattern
            && sub
                .iter()
                .zip(&deg)
                .any(|(&v, &d)| d >= 2 && t.degree(v) != d)
        {
            return false;
        }
        deg.sort_unstable();
        if deg != self.degrees {
            return false;
        }
        // trees on at most five vertices are determined by their degrees
        self.size <= 5 || t.induced(sub).canonical_code() == self.code
    }

    fn feasible(&self, t: &FreeTree) -> bool {
        self.size <= t.len() && self.max_degree <= t.max_degree()
    }

    /// All occurrences in `t`.
    pub fn count(&self, t: &FreeTree) -> u64 {
        if !self.feasible(t) {
            return 0;
        }
        let mut total = 0;
        let mut state = Esu::new(t);
        for v in 0..t.len() {
            state.run(v, true, self.size, &mut |sub, in_sub| {
                if self.accepts(t, sub, in_sub) {
                    total += 1;
                }
            });
        }
        total
    }

    /// Occurrences whose vertex set contains `root`.
    pub fn count_containing(&self, t: &FreeTree, root: usize) -> u64 {
        self.count_containing_both(t, root, None)
    }

    fn count_containing_both(&self, t: &FreeTree, a: usize, b: Option<usize>) -> u64 {
        if !self.feasible(t) {
            return 0;
        }
        let mut total = 0;
        let mut state = Esu::new(t);
        state.run(a, false, self.size, &mut |sub, in_sub| {
            if b.is_none_or(|b| in_sub[b]) && self.accepts(t, sub, in_sub) {
                total += 1;
            }
        });
        total
    }

    /// Occurrences in the joined tree that meet both sides of the new edge.
    pub fn count_spanning(&self, a: &RootedTree, b: &RootedTree) -> u64 {
        let (joined, ra, rb) = join(a, b);
        self.count_containing_both(&joined, ra, Some(rb))
    }
}

struct Esu<'a> {
    t: &'a FreeTree,
    sub: Vec<usize>,
    in_sub: Vec<bool>,
}

impl<'a> Esu<'a> {
    fn new(t: &'a FreeTree) -> Self {
        Esu {
            t,
            sub: Vec::new(),
            in_sub: vec![false; t.len()],
        }
    }

    /// Visits every connected `k`-subset containing `v`; with `ordered`, only
    /// those in which `v` is the smallest vertex.
    fn run(&mut self, v: usize, ordered: bool, k: usize, f: &mut dyn FnMut(&[usize], &[bool])) {
        if k == 0 {
            return;
        }
        let ext: Vec<usize> = self
            .t
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| !ordered || u > v)
            .collect();
        self.sub.push(v);
        self.in_sub[v] = true;
        self.extend(v, ordered, k, ext, f);
        self.sub.pop();
        self.in_sub[v] = false;
    }

    fn extend(
        &mut self,
        v: usize,
        ordered: bool,
        k: usize,
        mut ext: Vec<usize>,
        f: &mut dyn FnMut(&[usize], &[bool]),
    ) {
        if self.sub.len() == k {
            f(&self.sub, &self.in_sub);
            return;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            next.extend(
                self.t
                    .neighbors(w)
                    .iter()
                    .copied()
                    .filter(|&u| !self.in_sub[u] && (!ordered || u > v)),
            );
            self.sub.push(w);
            self.in_sub[w] = true;
            self.extend(v, ordered, k, next, f);
            self.sub.pop();
            self.in_sub[w] = false;
        }
    }
}

pub fn occurrences(h: &FreeTree, t: &FreeTree) -> u64 {
    SubtreeMatcher::new(h, OccurrenceMode::default()).count(t)
}

pub fn occurrences_with_mode(h: &FreeTree, t: &FreeTree, mode: OccurrenceMode) -> u64 {
    SubtreeMatcher::new(h, mode).count(t)
}

/// Occurrences that use the root of `t` (the plant, if any, is never used).
pub fn occurrences_containing_root(h: &FreeTree, t: &RootedTree) -> u64 {
    SubtreeMatcher::new(h, OccurrenceMode::default()).count_containing(&t.tree, t.root)
}

/// Occurrences in `a` joined to `b` by a root-to-root edge that meet both
/// sides; every such occurrence contains the new edge.
pub fn occurrences_spanning_join(h: &FreeTree, a: &RootedTree, b: &RootedTree) -> u64 {
    SubtreeMatcher::new(h, OccurrenceMode::default()).count_spanning(a, b)
}

/// Distribution of the occurrence count over one enumeration class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceTable {
    pub kind: TreeKind,
    pub n: usize,
    pub delta: usize,
    pub subtree: CanonicalCode,
    /// `H` in parent-array form.
    pub subtree_text: String,
    pub counts: BTreeMap<u64, BigUint>,
}

impl OccurrenceTable {
    /// Number of trees tabulated.
    pub fn total(&self) -> BigUint {
        self.counts.values().fold(BigUint::zero(), |acc, c| acc + c)
    }

    /// CSV header matching [`OccurrenceTable::rows`].
    pub const HEADER: [&'static str; 5] = ["n", "delta", "subtree", "k", "count"];

    pub fn rows(&self) -> Vec<[String; 5]> {
        self.counts
            .iter()
            .map(|(k, c)| {
                [
                    self.n.to_string(),
                    self.delta.to_string(),
                    self.subtree_text.clone(),
                    k.to_string(),
                    c.to_string(),
                ]
            })
            .collect()
    }
}

/// Parent-array text of a free tree, rooted at its first center.
pub fn free_tree_text(t: &FreeTree) -> String {
    t.rooted_at(t.centers()[0]).format()
}

pub fn occurrence_distribution(
    kind: TreeKind,
    n: usize,
    delta: usize,
    h: &FreeTree,
    mode: OccurrenceMode,
) -> Result<OccurrenceTable> {
    if n == 0 || delta < 2 {
        return invalid("occurrence tables need n >= 1 and delta >= 2");
    }
    if h.max_degree() > delta {
        log::warn!(
            "subtree has maximum degree {} > delta {}; every count is zero",
            h.max_degree(),
            delta
        );
    }
    let trees = enumerate_trees(kind, n, delta)?;
    let matcher = SubtreeMatcher::new(h, mode);
    let merged = trees
        .par_iter()
        .fold(BTreeMap::<u64, u64>::new, |mut acc, t| {
            *acc.entry(matcher.count(&t.tree)).or_default() += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_default() += c;
            }
            a
        });
    Ok(OccurrenceTable {
        kind,
        n,
        delta,
        subtree: matcher.code().clone(),
        subtree_text: free_tree_text(h),
        counts: merged
            .into_iter()
            .map(|(k, c)| (k, BigUint::from(c)))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_free;

    fn free(s: &str) -> FreeTree {
        parse_free(s).unwrap()
    }

    fn rooted(s: &str) -> RootedTree {
        RootedTree::parse(s).unwrap()
    }

    #[test]
    fn basic_counts() {
        let star = free("0 0 0");
        let p4 = free("0 1 2");
        assert_eq!(occurrences(&FreeTree::single(), &p4), 4);
        assert_eq!(occurrences(&free("0 1"), &star), 3);
        assert_eq!(occurrences(&p4, &star), 0);
        assert_eq!(occurrences(&free("0"), &FreeTree::path(9)), 8);
    }

    #[test]
    fn rooted_counts() {
        let p3 = free("0 1");
        assert_eq!(occurrences_containing_root(&p3, &rooted("0 0 0")), 3);
        let star_at_leaf = free("0 0 0").rooted_at(1);
        assert_eq!(occurrences_containing_root(&p3, &star_at_leaf), 2);
        assert_eq!(
            occurrences_containing_root(&free("0"), &rooted("0 0 1 1")),
            2
        );
    }

    #[test]
    fn spanning_counts() {
        let p3 = free("0 1");
        let k1 = RootedTree::single().as_planted();
        let k2 = rooted("0").as_planted();
        assert_eq!(occurrences_spanning_join(&p3, &k1, &k1), 0);
        assert_eq!(occurrences_spanning_join(&p3, &k2, &k1), 1);
        assert_eq!(occurrences_spanning_join(&p3, &k2, &k2), 2);
    }

    #[test]
    fn pattern_mode_is_stricter() {
        // P3 as a pattern in the star: the middle vertex has degree 3 in the host
        let mode = OccurrenceMode { pattern: true };
        assert_eq!(occurrences_with_mode(&free("0 1"), &free("0 0 0"), mode), 0);
        assert_eq!(occurrences_with_mode(&free("0 1"), &free("0 1 2"), mode), 2);
    }

    #[test]
    fn distributions() {
        let p3 = free("0 1");
        let t =
            occurrence_distribution(TreeKind::Free, 4, 4, &p3, OccurrenceMode::default()).unwrap();
        let want: BTreeMap<u64, BigUint> =
            [(2, BigUint::from(1u8)), (3, BigUint::from(1u8))].into();
        assert_eq!(t.counts, want);
        let k14 = free("0 0 0 0");
        let t =
            occurrence_distribution(TreeKind::Free, 5, 3, &k14, OccurrenceMode::default()).unwrap();
        assert_eq!(t.counts, [(0, BigUint::from(2u8))].into());
        assert_eq!(
            t.rows()[0],
            ["5", "3", "0 0 0 0", "0", "2"].map(String::from)
        );
    }
}
