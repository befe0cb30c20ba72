//! Free, rooted and planted unlabeled trees, canonical codes, the parent-array
//! text format, depth truncation and exhaustive degree-bounded generation.

mod enumerate;

use std::collections::VecDeque;
use std::fmt;

use crate::error::{invalid, Error, Result};

pub use enumerate::{enumerate_trees, TreeKind};

/// AHU-style canonical code: a balanced `1 ... 0` word per vertex with child
/// words sorted in non-increasing lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(pub Vec<u8>);

impl CanonicalCode {
    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// Number of vertices encoded.
    pub fn vertex_count(&self) -> usize {
        self.0.len() / 2
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// An undirected tree on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeTree {
    adj: Vec<Vec<usize>>,
}

impl FreeTree {
    /// Builds a tree from an edge list, checking that it is a tree.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return invalid("a tree needs at least one vertex");
        }
        if edges.len() != n - 1 {
            return invalid(format!("{} edges given for {n} vertices", edges.len()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return invalid(format!("bad edge ({a}, {b})"));
            }
            if adj[a].contains(&b) {
                return invalid(format!("duplicate edge ({a}, {b})"));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let t = FreeTree { adj };
        if t.bfs_order(0).len() != n {
            return invalid("edge list is not connected");
        }
        Ok(t)
    }

    /// Vertex `i + 1` hangs below `parents[i]`; requires `parents[i] <= i`.
    pub(crate) fn from_parents(parents: &[usize]) -> Self {
        let n = parents.len() + 1;
        let mut adj = vec![Vec::new(); n];
        for (i, &p) in parents.iter().enumerate() {
            adj[p].push(i + 1);
            adj[i + 1].push(p);
        }
        FreeTree { adj }
    }

    pub fn single() -> Self {
        FreeTree {
            adj: vec![Vec::new()],
        }
    }

    /// Path on `n >= 1` vertices.
    pub fn path(n: usize) -> Self {
        assert!(n >= 1);
        let parents: Vec<usize> = (0..n - 1).collect();
        Self::from_parents(&parents)
    }

    /// Star with one center and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_parents(&vec![0; leaves])
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len().saturating_sub(1));
        for (a, nb) in self.adj.iter().enumerate() {
            for &b in nb {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub(crate) fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Parent of each vertex in the BFS tree from `root` (`root` maps to itself).
    fn parent_map(&self, root: usize, order: &[usize]) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.len()];
        parent[root] = root;
        for &v in order {
            for &w in &self.adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                }
            }
        }
        parent
    }

    /// Distances (in edges) from `root`.
    pub fn distances(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[root] = 0;
        for v in self.bfs_order(root) {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                }
            }
        }
        dist
    }

    /// Longest path length in edges (double breadth-first sweep).
    pub fn diameter(&self) -> usize {
        let d0 = self.distances(0);
        let far = (0..self.len()).max_by_key(|&v| (d0[v], v)).unwrap();
        *self.distances(far).iter().max().unwrap()
    }

    /// The one or two center vertices, found by peeling leaves.
    pub fn centers(&self) -> Vec<usize> {
        let n = self.len();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut deg = self.degrees();
        let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                for &w in &self.adj[v] {
                    if deg[w] > 1 {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            next.push(w);
                        }
                    }
                }
                deg[v] = 0;
            }
            layer = next;
        }
        let mut c = layer;
        c.sort_unstable();
        c
    }

    pub fn rooted_at(&self, root: usize) -> RootedTree {
        RootedTree {
            tree: self.clone(),
            root,
            planted: false,
        }
    }

    /// Rooted canonical code at `root`.
    pub fn rooted_code(&self, root: usize) -> CanonicalCode {
        let order = self.bfs_order(root);
        let parent = self.parent_map(root, &order);
        let mut codes: Vec<Vec<u8>> = vec![Vec::new(); self.len()];
        for &v in order.iter().rev() {
            let mut kids: Vec<Vec<u8>> = self.adj[v]
                .iter()
                .filter(|&&w| w != root && parent[w] == v)
                .map(|&w| std::mem::take(&mut codes[w]))
                .collect();
            kids.sort_unstable_by(|a, b| b.cmp(a));
            let mut code = Vec::with_capacity(2 + kids.iter().map(Vec::len).sum::<usize>());
            code.push(1);
            for k in kids {
                code.extend(k);
            }
            code.push(0);
            codes[v] = code;
        }
        CanonicalCode(std::mem::take(&mut codes[root]))
    }

    /// Free canonical code: the smallest rooted code over the center(s).
    pub fn canonical_code(&self) -> CanonicalCode {
        self.centers()
            .into_iter()
            .map(|c| self.rooted_code(c))
            .min()
            .unwrap()
    }

    /// Subgraph induced by a vertex subset (which must be connected), with
    /// vertices renumbered in the order given.
    pub fn induced(&self, vertices: &[usize]) -> FreeTree {
        let mut index = vec![usize::MAX; self.len()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                if index[w] != usize::MAX {
                    adj[i].push(index[w]);
                }
            }
        }
        FreeTree { adj }
    }

    /// Renames vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> FreeTree {
        let mut adj = vec![Vec::new(); self.len()];
        for (v, nb) in self.adj.iter().enumerate() {
            adj[perm[v]] = nb.iter().map(|&w| perm[w]).collect();
        }
        FreeTree { adj }
    }
}

/// A tree with a distinguished root. A planted tree additionally carries an
/// uncounted plant vertex above the root, which uses up one unit of the
/// root's degree budget; the plant is never materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    pub tree: FreeTree,
    pub root: usize,
    pub planted: bool,
}

impl RootedTree {
    pub fn single() -> Self {
        FreeTree::single().rooted_at(0)
    }

    pub fn as_planted(mut self) -> Self {
        self.planted = true;
        self
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    /// Parent of every vertex (`None` for the root).
    pub fn parents(&self) -> Vec<Option<usize>> {
        let order = self.tree.bfs_order(self.root);
        self.tree
            .parent_map(self.root, &order)
            .into_iter()
            .enumerate()
            .map(|(v, p)| (v != self.root).then_some(p))
            .collect()
    }

    pub fn root_children(&self) -> usize {
        self.tree.degree(self.root)
    }

    /// Largest distance from the root.
    pub fn depth(&self) -> usize {
        *self.tree.distances(self.root).iter().max().unwrap()
    }

    /// Largest number of children at any vertex. For planted trees the plant
    /// edge counts towards the root, so this is the degree needed.
    pub fn degree_need(&self) -> usize {
        let root_need = self.root_children() + usize::from(self.planted);
        (0..self.len())
            .map(|v| {
                if v == self.root {
                    root_need
                } else {
                    self.tree.degree(v)
                }
            })
            .max()
            .unwrap()
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        self.tree.rooted_code(self.root)
    }

    /// Rebuilds a rooted tree from its code; vertex ids follow preorder, root 0.
    pub fn from_code(code: &CanonicalCode) -> Self {
        let mut parents = Vec::with_capacity(code.vertex_count());
        let mut stack: Vec<usize> = Vec::new();
        let mut next = 0usize;
        for &b in code.as_slice() {
            if b == 1 {
                if let Some(&p) = stack.last() {
                    parents.push(p);
                }
                stack.push(next);
                next += 1;
            } else {
                stack.pop();
            }
        }
        FreeTree::from_parents(&parents).rooted_at(0)
    }

    /// Parses the parent-array format: `p_1 ... p_{n-1}` with `p_i < i`;
    /// the empty string is the single vertex.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parents = Vec::new();
        for (idx, tok) in text.split_whitespace().enumerate() {
            let position = idx + 1;
            let p: i64 = tok.parse().map_err(|_| Error::Parse {
                position,
                message: format!("'{tok}' is not an integer"),
            })?;
            if p < 0 {
                return Err(Error::Parse {
                    position,
                    message: format!("negative parent {p}"),
                });
            }
            if p as usize >= position {
                return Err(Error::Parse {
                    position,
                    message: format!(
                        "parent {p} of vertex {position} must be smaller than {position}"
                    ),
                });
            }
            parents.push(p as usize);
        }
        Ok(FreeTree::from_parents(&parents).rooted_at(0))
    }

    /// Parent-array text. Trees already in parent-array labeling print as-is;
    /// others are relabeled in breadth-first order from the root.
    pub fn format(&self) -> String {
        let parents = self.parents();
        let direct = self.root == 0
            && parents
                .iter()
                .enumerate()
                .skip(1)
                .all(|(i, p)| matches!(p, Some(q) if *q < i));
        let list: Vec<usize> = if direct {
            parents.iter().skip(1).map(|p| p.unwrap()).collect()
        } else {
            let order = self.tree.bfs_order(self.root);
            let mut index = vec![0; self.len()];
            for (i, &v) in order.iter().enumerate() {
                index[v] = i;
            }
            order
                .iter()
                .skip(1)
                .map(|&v| index[parents[v].unwrap()])
                .collect()
        };
        list.iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Subtree induced by the vertices within distance `ell` of the root.
    pub fn truncate_depth(&self, ell: usize) -> RootedTree {
        let dist = self.tree.distances(self.root);
        let keep: Vec<usize> = (0..self.len()).filter(|&v| dist[v] <= ell).collect();
        if keep.len() == self.len() {
            return self.clone();
        }
        let root = keep.iter().position(|&v| v == self.root).unwrap();
        RootedTree {
            tree: self.tree.induced(&keep),
            root,
            planted: self.planted,
        }
    }
}

/// Joins two planted trees by an edge between their roots (both plants are
/// discarded). Returns the joined tree and the two former roots.
pub fn join(a: &RootedTree, b: &RootedTree) -> (FreeTree, usize, usize) {
    let offset = a.len();
    let mut edges = a.tree.edges();
    edges.extend(
        b.tree
            .edges()
            .into_iter()
            .map(|(x, y)| (x + offset, y + offset)),
    );
    edges.push((a.root, b.root + offset));
    let t = FreeTree::new(a.len() + b.len(), &edges).expect("joining two trees gives a tree");
    (t, a.root, b.root + offset)
}

/// Convenience: the tree described by a parent-array string, as a free tree.
pub fn parse_free(text: &str) -> Result<FreeTree> {
    Ok(RootedTree::parse(text)?.tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_small_cases() {
        let k1 = RootedTree::parse("").unwrap();
        assert_eq!(k1.len(), 1);
        let star = RootedTree::parse("0 0 0").unwrap();
        assert_eq!(star.root_children(), 3);
        assert_eq!(star.tree.degrees(), vec![3, 1, 1, 1]);
        let p4 = RootedTree::parse("0 1 2").unwrap();
        assert_eq!(p4.depth(), 3);
        assert_eq!(p4.format(), "0 1 2");
    }

    #[test]
    fn parse_errors_carry_position() {
        match RootedTree::parse("0 2") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            RootedTree::parse("0 -1"),
            Err(Error::Parse { position: 2, .. })
        ));
        assert!(matches!(
            RootedTree::parse("0 x"),
            Err(Error::Parse { position: 2, .. })
        ));
    }

    #[test]
    fn format_relabels_foreign_labelings() {
        let t = FreeTree::new(4, &[(3, 1), (1, 0), (1, 2)])
            .unwrap()
            .rooted_at(3);
        let s = t.format();
        let back = RootedTree::parse(&s).unwrap();
        assert_eq!(back.canonical_code(), t.canonical_code());
    }

    #[test]
    fn codes_distinguish_small_trees() {
        let p4 = FreeTree::path(4);
        let relabeled = p4.relabel(&[2, 0, 3, 1]);
        assert_eq!(p4.canonical_code(), relabeled.canonical_code());
        assert_eq!(p4.rooted_code(0), relabeled.rooted_code(2));
        let star = FreeTree::star(3);
        assert_ne!(p4.canonical_code(), star.canonical_code());
        assert_ne!(star.rooted_code(0), star.rooted_code(1));
    }

    #[test]
    fn code_round_trip() {
        let t = RootedTree::parse("0 0 1 1 2 5").unwrap();
        let back = RootedTree::from_code(&t.canonical_code());
        assert_eq!(back.canonical_code(), t.canonical_code());
    }

    #[test]
    fn truncation_examples() {
        let p4 = RootedTree::parse("0 1 2").unwrap();
        let t = p4.truncate_depth(2);
        assert_eq!(
            t.canonical_code(),
            RootedTree::parse("0 1").unwrap().canonical_code()
        );
        let star = RootedTree::parse("0 0 0").unwrap();
        assert_eq!(star.truncate_depth(1), star);
        assert_eq!(p4.truncate_depth(0).len(), 1);
    }

    #[test]
    fn diameters() {
        assert_eq!(FreeTree::single().diameter(), 0);
        assert_eq!(FreeTree::star(3).diameter(), 2);
        assert_eq!(FreeTree::path(4).diameter(), 3);
    }

    #[test]
    fn centers_of_paths() {
        assert_eq!(FreeTree::path(5).centers(), vec![2]);
        assert_eq!(FreeTree::path(4).centers(), vec![1, 2]);
        assert_eq!(FreeTree::path(2).centers(), vec![0, 1]);
    }

    #[test]
    fn planted_degree_need_counts_the_plant() {
        let t = RootedTree::parse("0 0 0").unwrap();
        assert_eq!(t.degree_need(), 3);
        assert_eq!(t.as_planted().degree_need(), 4);
    }

    #[test]
    fn rejects_non_trees() {
        assert!(FreeTree::new(3, &[(0, 1)]).is_err());
        assert!(FreeTree::new(4, &[(0, 1), (1, 0), (2, 3)]).is_err());
        assert!(FreeTree::new(4, &[(0, 1), (2, 3), (3, 2)]).is_err());
    }
}
