//! Exhaustive generation of degree-bounded unlabeled trees.
//!
//! Planted trees are built size by size as multisets of smaller planted
//! trees. Rooted trees are multisets of planted trees under a root with a
//! larger child budget. Free trees are generated at their center: rooted
//! trees whose two tallest branches have equal height (one center), or
//! unordered pairs of equally tall planted trees joined by an edge (two
//! centers).

use super::{CanonicalCode, RootedTree};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Free,
    Rooted,
    Planted,
}

impl std::str::FromStr for TreeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "free" => Ok(TreeKind::Free),
            "rooted" => Ok(TreeKind::Rooted),
            "planted" => Ok(TreeKind::Planted),
            other => Err(format!("unknown tree kind '{other}' (free|rooted|planted)")),
        }
    }
}

#[derive(Clone, Debug)]
struct Entry {
    code: Vec<u8>,
    size: usize,
    height: usize,
}

/// Planted trees (root child budget `children`) of every size up to `max_size`,
/// flattened and ordered by size descending, then code descending.
struct Catalog {
    pool: Vec<Entry>,
}

impl Catalog {
    fn build(max_size: usize, children: usize) -> Self {
        let mut by_size: Vec<Vec<Entry>> = vec![Vec::new(); max_size + 1];
        let mut pool: Vec<Entry> = Vec::new();
        for size in 1..=max_size {
            let mut level = Vec::new();
            multisets(&pool, size - 1, children, &mut |kids| {
                level.push(compose(&pool, kids));
            });
            level.sort_by(|a, b| b.code.cmp(&a.code));
            by_size[size] = level;
            pool = by_size[1..=size]
                .iter()
                .rev()
                .flat_map(|lvl| lvl.iter().cloned())
                .collect();
        }
        Catalog { pool }
    }
}

fn compose(pool: &[Entry], kids: &[usize]) -> Entry {
    let mut words: Vec<&Vec<u8>> = kids.iter().map(|&i| &pool[i].code).collect();
    words.sort_unstable_by(|a, b| b.cmp(a));
    let mut code = vec![1];
    for w in words {
        code.extend_from_slice(w);
    }
    code.push(0);
    Entry {
        code,
        size: 1 + kids.iter().map(|&i| pool[i].size).sum::<usize>(),
        height: kids.iter().map(|&i| pool[i].height + 1).max().unwrap_or(0),
    }
}

/// Calls `emit` with every multiset (as non-decreasing pool indices) of at most
/// `max_count` pool entries whose sizes sum to `total`.
fn multisets(pool: &[Entry], total: usize, max_count: usize, emit: &mut dyn FnMut(&[usize])) {
    fn rec(
        pool: &[Entry],
        start: usize,
        remaining: usize,
        count_left: usize,
        current: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if remaining == 0 {
            emit(current);
            return;
        }
        if count_left == 0 {
            return;
        }
        // pool is sorted by size descending: skip entries that are too large
        let first = start + pool[start..].partition_point(|e| e.size > remaining);
        for i in first..pool.len() {
            // every later entry is at most this size
            if pool[i].size * count_left < remaining {
                break;
            }
            current.push(i);
            rec(
                pool,
                i,
                remaining - pool[i].size,
                count_left - 1,
                current,
                emit,
            );
            current.pop();
        }
    }
    let mut current = Vec::new();
    rec(pool, 0, total, max_count, &mut current, emit);
}

/// One representative per isomorphism class, sorted by canonical code.
///
/// Rooted trees allow `delta` children at the root and `delta - 1` below it;
/// planted trees allow `delta - 1` at the root as well (the plant edge takes
/// the last unit). Free trees are returned rooted at a center.
pub fn enumerate_trees(kind: TreeKind, n: usize, delta: usize) -> Result<Vec<RootedTree>> {
    if n == 0 {
        return invalid("tree order must be at least 1");
    }
    if delta < 2 {
        return invalid("degree bound must be at least 2");
    }
    let catalog = Catalog::build(n - 1, delta - 1);
    let pool = &catalog.pool;
    let mut out: Vec<(CanonicalCode, RootedTree)> = Vec::new();
    match kind {
        TreeKind::Rooted | TreeKind::Planted => {
            let budget = if kind == TreeKind::Rooted {
                delta
            } else {
                delta - 1
            };
            multisets(pool, n - 1, budget, &mut |kids| {
                let code = CanonicalCode(compose(pool, kids).code);
                let mut t = RootedTree::from_code(&code);
                t.planted = kind == TreeKind::Planted;
                out.push((code, t));
            });
        }
        TreeKind::Free => {
            if n == 1 {
                let t = RootedTree::single();
                out.push((t.canonical_code(), t));
            }
            // one center
            multisets(pool, n - 1, delta, &mut |kids| {
                if kids.len() < 2 {
                    return;
                }
                let mut h: Vec<usize> = kids.iter().map(|&i| pool[i].height).collect();
                h.sort_unstable_by(|a, b| b.cmp(a));
                if h[0] != h[1] {
                    return;
                }
                let code = CanonicalCode(compose(pool, kids).code);
                let t = RootedTree::from_code(&code);
                out.push((t.tree.canonical_code(), t));
            });
            // two centers
            {
                for (i, a) in pool.iter().enumerate() {
                    if a.size >= n {
                        continue;
                    }
                    for b in pool.iter().skip(i) {
                        if a.size + b.size != n || a.height != b.height {
                            continue;
                        }
                        let ta = RootedTree::from_code(&CanonicalCode(a.code.clone()));
                        let tb = RootedTree::from_code(&CanonicalCode(b.code.clone()));
                        let (joined, ra, _) = super::join(&ta, &tb);
                        let t = joined.rooted_at(ra);
                        out.push((joined.canonical_code(), t));
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    debug_assert!(out.windows(2).all(|w| w[0].0 < w[1].0), "duplicate class");
    Ok(out.into_iter().map(|(_, t)| t).collect())
}
