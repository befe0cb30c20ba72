use std::collections::HashMap;

use num_bigint::BigInt;

use super::ClassSystem;
use crate::series::online::{Graph, NodeId};
use crate::series::{Coeff, IntSeries, Jet, Series, UPoly};

/// Series solution of a class system over a coefficient ring `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolvedSystem<C> {
    /// One series per deep class, in equation order.
    pub classes: Vec<Series<C>>,
    /// One series per group.
    pub groups: Vec<Series<C>>,
    pub p: Series<C>,
    pub r: Series<C>,
    pub t: Series<C>,
}

pub(crate) struct SystemGraph<C> {
    pub graph: Graph<C>,
    pub unknowns: Vec<NodeId>,
    pub groups: Vec<NodeId>,
    defs: Vec<NodeId>,
    zs: HashMap<(usize, usize), NodeId>,
}

impl<C: Coeff> SystemGraph<C> {
    pub fn new(sys: &ClassSystem, order: usize) -> Self {
        let mut graph: Graph<C> = Graph::new(order);
        let unknowns: Vec<NodeId> = sys
            .equations
            .iter()
            .map(|e| graph.unknown(sys.classes[e.class_id].size))
            .collect();
        let deep_index = sys.deep_index();
        let groups: Vec<NodeId> = sys
            .groups
            .iter()
            .map(|g| {
                let shallow = &sys.classes[g.shallow];
                let mut parts = vec![graph.monomial(shallow.size, shallow.occurrences as u32)];
                parts.extend(g.deep.iter().map(|c| unknowns[deep_index[c]]));
                graph.sum(&parts)
            })
            .collect();
        let mut sg = SystemGraph {
            graph,
            unknowns,
            groups,
            defs: Vec::new(),
            zs: HashMap::new(),
        };
        sg.defs = sys
            .equations
            .iter()
            .map(|e| {
                let body = sg.children_product(&e.children);
                let body = sg.graph.mul_u_pow(body, e.k_root as u32);
                sg.graph.shift_x(body)
            })
            .collect();
        sg
    }

    pub fn z(&mut self, group: usize, m: usize) -> NodeId {
        if let Some(&id) = self.zs.get(&(group, m)) {
            return id;
        }
        let id = self.graph.cycle_index(self.groups[group], m);
        self.zs.insert((group, m), id);
        id
    }

    /// `prod Z(S_l; B_sigma)` over `(sigma, l)` pairs.
    pub fn children_product(&mut self, children: &[(usize, usize)]) -> NodeId {
        let factors: Vec<NodeId> = children.iter().map(|&(g, m)| self.z(g, m)).collect();
        self.graph.product(&factors)
    }

    /// Computes every unknown coefficient up to the graph order.
    pub fn bootstrap(&mut self) {
        for n in 0..=self.graph.order() {
            let values: Vec<C> = self.defs.iter().map(|&d| self.graph.coeff(d, n)).collect();
            for (&u, v) in self.unknowns.iter().zip(values) {
                self.graph.push_unknown(u, n, v);
            }
        }
    }

    pub fn p(&mut self) -> NodeId {
        let groups = self.groups.clone();
        self.graph.sum(&groups)
    }

    pub fn r(&mut self, sys: &ClassSystem) -> NodeId {
        let terms: Vec<NodeId> = sys
            .rooted_terms
            .iter()
            .map(|term| {
                let body = self.children_product(&term.children);
                self.graph.mul_u_pow(body, term.k_root as u32)
            })
            .collect();
        let s = self.graph.sum(&terms);
        self.graph.shift_x(s)
    }

    /// Free trees: rooted trees minus edge-rooted ones plus symmetric
    /// edge-rooted ones, with the join edge's occurrences attached.
    pub fn t(&mut self, sys: &ClassSystem, r: NodeId) -> NodeId {
        let mut terms = vec![(r, 2i64)];
        let n = self.groups.len();
        for a in 0..n {
            for b in a..n {
                let prod = self.graph.prod(self.groups[a], self.groups[b]);
                let marked = self.graph.mul_u_pow(prod, sys.spanning[a][b] as u32);
                terms.push((marked, if a == b { -1 } else { -2 }));
            }
            let dil = self.graph.dilate(self.groups[a], 2);
            let marked = self.graph.mul_u_pow(dil, sys.spanning[a][a] as u32);
            terms.push((marked, 1));
        }
        self.graph.combination(&terms, 2)
    }
}

/// Solves the system over any coefficient ring: `UPoly` for bivariate
/// tables, `BigInt` for the `u = 1` specialization, `Jet` for moments.
pub fn solve_series_in<C: Coeff>(sys: &ClassSystem, order: usize) -> SolvedSystem<C> {
    let mut sg: SystemGraph<C> = SystemGraph::new(sys, order);
    sg.bootstrap();
    let p = sg.p();
    let r = sg.r(sys);
    let t = sg.t(sys, r);
    SolvedSystem {
        classes: sg
            .unknowns
            .clone()
            .into_iter()
            .map(|u| sg.graph.series(u))
            .collect(),
        groups: sg
            .groups
            .clone()
            .into_iter()
            .map(|g| sg.graph.series(g))
            .collect(),
        p: sg.graph.series(p),
        r: sg.graph.series(r),
        t: sg.graph.series(t),
    }
}

/// Bivariate solution: coefficient `x^n u^k` of `t` counts free trees of
/// order `n` with exactly `k` occurrences.
pub fn solve_series(sys: &ClassSystem, order: usize) -> SolvedSystem<UPoly<BigInt>> {
    solve_series_in(sys, order)
}

/// Per-order totals and raw moments of the occurrence count over free trees:
/// `t[n] = t_n`, `m1[n] = sum_k k t_{n,k}`, `m2[n] = sum_k k^2 t_{n,k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSeries {
    pub t: Vec<BigInt>,
    pub m1: Vec<BigInt>,
    pub m2: Vec<BigInt>,
}

/// Moments from the first and second u-derivatives at `u = 1`, solved as
/// jets without materializing the bivariate table.
pub fn mean_variance_series(sys: &ClassSystem, order: usize) -> MomentSeries {
    let solved: SolvedSystem<Jet<BigInt>> = solve_series_in(sys, order);
    let c = solved.t.coeffs();
    MomentSeries {
        t: c.iter().map(|j| j.c0.clone()).collect(),
        m1: c.iter().map(|j| j.c1.clone()).collect(),
        m2: c.iter().map(|j| &j.c2 * 2 + &j.c1).collect(),
    }
}

/// Moments read off a bivariate table.
pub fn moments_from_bivariate(t: &Series<UPoly<BigInt>>) -> MomentSeries {
    MomentSeries {
        t: t.coeffs().iter().map(|c| c.at_one()).collect(),
        m1: t.coeffs().iter().map(|c| c.raw_moment(1)).collect(),
        m2: t.coeffs().iter().map(|c| c.raw_moment(2)).collect(),
    }
}

/// Column sums of the Jacobian of the system with respect to the unknowns,
/// at `u = 1`, one series per deep class (equation order).
///
/// An unknown enters only through its group `B_sigma`, and
/// `d Z(S_l; B) / d B = Z(S_{l-1}; B)`, so every column of a group has the
/// same sum.
pub fn jacobian_column_sum(sys: &ClassSystem, order: usize) -> Vec<IntSeries> {
    let mut sg: SystemGraph<BigInt> = SystemGraph::new(sys, order);
    sg.bootstrap();
    let mut per_group: Vec<Vec<NodeId>> = vec![Vec::new(); sys.groups.len()];
    for e in &sys.equations {
        for (pos, &(g, m)) in e.children.iter().enumerate() {
            let mut factors = vec![sg.z(g, m - 1)];
            for (other, &(g2, m2)) in e.children.iter().enumerate() {
                if other != pos {
                    factors.push(sg.z(g2, m2));
                }
            }
            let body = sg.graph.product(&factors);
            per_group[g].push(sg.graph.shift_x(body));
        }
    }
    let group_series: Vec<Option<IntSeries>> = per_group
        .iter()
        .zip(&sys.groups)
        .map(|(terms, group)| {
            (!group.deep.is_empty()).then(|| {
                let s = sg.graph.sum(terms);
                sg.graph.series(s)
            })
        })
        .collect();
    sys.equations
        .iter()
        .map(|e| {
            group_series[sys.classes[e.class_id].group]
                .clone()
                .expect("a deep class has a group with deep members")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::counting_series;
    use crate::system::build_system;
    use crate::tree::parse_free;

    #[test]
    fn cherry_tables() {
        let sys = build_system(4, &parse_free("0 1").unwrap()).unwrap();
        let solved = solve_series(&sys, 8);
        let big = |k: u32, c: i64| (k, BigInt::from(c));
        assert_eq!(
            solved.p.coeff(4),
            &UPoly::from_terms([big(3, 2), big(2, 2)])
        );
        assert_eq!(
            solved.t.coeff(4),
            &UPoly::from_terms([big(2, 1), big(3, 1)])
        );
        let counts = counting_series(4, 8).unwrap();
        assert_eq!(solved.p.at_u_one(), counts.p);
        assert_eq!(solved.t.at_u_one(), counts.t);
        assert_eq!(solved.r.at_u_one(), counts.r);
    }

    #[test]
    fn two_moment_routes_agree() {
        let sys = build_system(4, &parse_free("0 1").unwrap()).unwrap();
        let jets = mean_variance_series(&sys, 10);
        let table = moments_from_bivariate(&solve_series(&sys, 10).t);
        assert_eq!(jets, table);
        assert_eq!(jets.m1[4], BigInt::from(5));
    }

    #[test]
    fn column_sums_equal_restricted_series() {
        for (delta, h) in [(3, "0 1"), (4, "0 1"), (4, "0")] {
            let sys = build_system(delta, &parse_free(h).unwrap()).unwrap();
            let cols = jacobian_column_sum(&sys, 12);
            let counts = counting_series(delta, 12).unwrap();
            assert!(cols.iter().all(|c| *c == counts.p_restricted));
        }
    }
}
