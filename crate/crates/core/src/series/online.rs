//! Online evaluation of series expressions for implicit systems.
//!
//! A [`Graph`] holds an expression DAG over truncated series. Nodes compute
//! their coefficients lazily and in increasing degree, so an unknown whose
//! defining expression carries a leading factor `x` can be bootstrapped one
//! coefficient at a time: coefficient `n` of the expression only needs
//! coefficients `< n` of the unknowns.
//!
//! Nodes are hash-consed, so shared subexpressions such as `Z(S_2; B)` or
//! `B(x^2, u^2)` are evaluated once.

use std::collections::HashMap;

use super::{cycle_types, factorial, Coeff, Series};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Zero,
    /// `x^size u^uexp`.
    Monomial {
        size: usize,
        uexp: u32,
    },
    /// Coefficients supplied from outside, in order.
    Unknown(usize),
    /// `(sum_i w_i a_i) / div`, the division being exact.
    Combination {
        terms: Vec<(NodeId, i64)>,
        div: u64,
    },
    Prod(NodeId, NodeId),
    Dilate(NodeId, u32),
    ShiftX(NodeId),
    MulUPow(NodeId, u32),
}

pub struct Graph<C> {
    order: usize,
    nodes: Vec<Node>,
    valuation: Vec<usize>,
    cache: Vec<Vec<C>>,
    interned: HashMap<Node, NodeId>,
    unknowns: usize,
}

impl<C: Coeff> Graph<C> {
    pub fn new(order: usize) -> Self {
        let mut g = Graph {
            order,
            nodes: Vec::new(),
            valuation: Vec::new(),
            cache: Vec::new(),
            interned: HashMap::new(),
            unknowns: 0,
        };
        g.intern(Node::Zero, usize::MAX);
        g
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn zero(&self) -> NodeId {
        0
    }

    pub fn is_zero_node(&self, id: NodeId) -> bool {
        id == 0
    }

    /// Lower bound for the index of the first nonzero coefficient.
    pub fn valuation(&self, id: NodeId) -> usize {
        self.valuation[id]
    }

    fn intern(&mut self, node: Node, valuation: usize) -> NodeId {
        if let Some(&id) = self.interned.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.valuation.push(valuation);
        self.cache.push(Vec::new());
        self.interned.insert(node, id);
        id
    }

    fn normalize(&self, id: NodeId, valuation: usize) -> Option<usize> {
        (id != 0 && valuation <= self.order).then_some(valuation)
    }

    /// A fresh unknown series whose coefficients below `valuation` are zero.
    pub fn unknown(&mut self, valuation: usize) -> NodeId {
        if valuation > self.order {
            return 0;
        }
        let tag = self.unknowns;
        self.unknowns += 1;
        self.intern(Node::Unknown(tag), valuation)
    }

    pub fn one(&mut self) -> NodeId {
        self.monomial(0, 0)
    }

    pub fn monomial(&mut self, size: usize, uexp: u32) -> NodeId {
        if size > self.order {
            return 0;
        }
        self.intern(Node::Monomial { size, uexp }, size)
    }

    pub fn combination(&mut self, terms: &[(NodeId, i64)], div: u64) -> NodeId {
        let mut merged: Vec<(NodeId, i64)> = Vec::new();
        for &(id, w) in terms {
            if id == 0 || w == 0 {
                continue;
            }
            match merged.iter_mut().find(|(m, _)| *m == id) {
                Some(entry) => entry.1 += w,
                None => merged.push((id, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0);
        if merged.is_empty() {
            return 0;
        }
        if div == 1 && merged.len() == 1 && merged[0].1 == 1 {
            return merged[0].0;
        }
        merged.sort_unstable();
        let v = merged
            .iter()
            .map(|&(id, _)| self.valuation[id])
            .min()
            .unwrap();
        self.intern(Node::Combination { terms: merged, div }, v)
    }

    pub fn sum(&mut self, ids: &[NodeId]) -> NodeId {
        let terms: Vec<(NodeId, i64)> = ids.iter().map(|&id| (id, 1)).collect();
        self.combination(&terms, 1)
    }

    pub fn prod(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.valuation[a].saturating_add(self.valuation[b]);
        if self.normalize(a, v).is_none() || b == 0 {
            return 0;
        }
        if matches!(self.nodes[a], Node::Monomial { size: 0, uexp: 0 }) {
            return b;
        }
        if matches!(self.nodes[b], Node::Monomial { size: 0, uexp: 0 }) {
            return a;
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.intern(Node::Prod(a, b), v)
    }

    pub fn product(&mut self, ids: &[NodeId]) -> NodeId {
        let mut acc = self.one();
        for &id in ids {
            acc = self.prod(acc, id);
        }
        acc
    }

    pub fn power(&mut self, a: NodeId, k: u32) -> NodeId {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.prod(acc, a);
        }
        acc
    }

    /// `a(x^i, u^i)`.
    pub fn dilate(&mut self, a: NodeId, i: u32) -> NodeId {
        if i == 1 {
            return a;
        }
        let v = self.valuation[a].saturating_mul(i as usize);
        if self.normalize(a, v).is_none() {
            return 0;
        }
        self.intern(Node::Dilate(a, i), v)
    }

    /// `x * a`.
    pub fn shift_x(&mut self, a: NodeId) -> NodeId {
        let v = self.valuation[a].saturating_add(1);
        if self.normalize(a, v).is_none() {
            return 0;
        }
        self.intern(Node::ShiftX(a), v)
    }

    /// `u^k * a`.
    pub fn mul_u_pow(&mut self, a: NodeId, k: u32) -> NodeId {
        if k == 0 || a == 0 {
            return a;
        }
        let v = self.valuation[a];
        self.intern(Node::MulUPow(a, k), v)
    }

    /// `Z(S_m; a)` for a series `a` without constant term.
    pub fn cycle_index(&mut self, a: NodeId, m: usize) -> NodeId {
        if m == 0 {
            return self.one();
        }
        assert!(
            a == 0 || self.valuation[a] >= 1,
            "cycle-index argument must not have a constant term"
        );
        let mut terms = Vec::new();
        for ct in cycle_types(m) {
            let mut factors = Vec::new();
            for (idx, &c) in ct.counts.iter().enumerate() {
                if c > 0 {
                    let d = self.dilate(a, idx as u32 + 1);
                    factors.push(self.power(d, c));
                }
            }
            let term = self.product(&factors);
            terms.push((term, ct.perms as i64));
        }
        self.combination(&terms, factorial(m))
    }

    /// Supplies coefficient `n` of an unknown; `n` must be the next index.
    pub fn push_unknown(&mut self, id: NodeId, n: usize, value: C) {
        if id == 0 {
            debug_assert!(value.is_zero());
            return;
        }
        assert!(
            matches!(self.nodes[id], Node::Unknown(_)),
            "node {id} is not an unknown"
        );
        assert_eq!(
            self.cache[id].len(),
            n,
            "unknown coefficients must be pushed in order"
        );
        self.cache[id].push(value);
    }

    /// Coefficients currently known for `id`.
    pub fn known(&self, id: NodeId) -> usize {
        if id == 0 {
            usize::MAX
        } else {
            self.cache[id].len()
        }
    }

    /// Coefficient `m` of node `id`, computing whatever is missing.
    pub fn coeff(&mut self, id: NodeId, m: usize) -> C {
        if m < self.valuation[id] || m > self.order {
            return C::zero();
        }
        self.ensure(id, m);
        self.cache[id][m].clone()
    }

    pub fn series(&mut self, id: NodeId) -> Series<C> {
        let order = self.order;
        let coeffs = (0..=order).map(|m| self.coeff(id, m)).collect();
        Series::from_coeffs(coeffs)
    }

    fn ensure(&mut self, id: NodeId, m: usize) {
        if id == 0 || self.cache[id].len() > m {
            return;
        }
        match self.nodes[id].clone() {
            Node::Zero | Node::Monomial { .. } => {}
            Node::Unknown(_) => panic!(
                "unknown node {id} needs coefficient {m} but only {} are known",
                self.cache[id].len()
            ),
            Node::Combination { terms, .. } => {
                for (t, _) in terms {
                    self.ensure(t, m);
                }
            }
            Node::Prod(a, b) => {
                let (va, vb) = (self.valuation[a], self.valuation[b]);
                if m >= va + vb {
                    self.ensure(a, m - vb);
                    self.ensure(b, m - va);
                }
            }
            Node::Dilate(a, i) => self.ensure(a, m / i as usize),
            Node::ShiftX(a) => {
                if m >= 1 {
                    self.ensure(a, m - 1)
                }
            }
            Node::MulUPow(a, _) => self.ensure(a, m),
        }
        while self.cache[id].len() <= m {
            let k = self.cache[id].len();
            let value = self.compute(id, k);
            self.cache[id].push(value);
        }
    }

    fn get(&self, id: NodeId, k: usize) -> Option<&C> {
        if id == 0 || k < self.valuation[id] {
            None
        } else {
            Some(&self.cache[id][k])
        }
    }

    fn compute(&self, id: NodeId, k: usize) -> C {
        if k < self.valuation[id] {
            return C::zero();
        }
        match &self.nodes[id] {
            Node::Zero | Node::Unknown(_) => C::zero(),
            Node::Monomial { size, uexp } => {
                if k == *size {
                    C::from_int(1).mul_u_pow(*uexp)
                } else {
                    C::zero()
                }
            }
            Node::Combination { terms, div } => {
                let mut acc = C::zero();
                for &(t, w) in terms {
                    if let Some(c) = self.get(t, k) {
                        if w == 1 {
                            acc.add_assign_ref(c);
                        } else {
                            acc.add_assign_ref(&c.scale(w));
                        }
                    }
                }
                if *div == 1 {
                    acc
                } else {
                    acc.div_exact(*div)
                }
            }
            Node::Prod(a, b) => {
                let (va, vb) = (self.valuation[*a], self.valuation[*b]);
                let mut acc = C::zero();
                for i in va..=k - vb {
                    acc.add_product(&self.cache[*a][i], &self.cache[*b][k - i]);
                }
                acc
            }
            Node::Dilate(a, i) => {
                let i = *i as usize;
                if !k.is_multiple_of(i) {
                    return C::zero();
                }
                self.get(*a, k / i)
                    .map(|c| c.dilate_u(i as u32))
                    .unwrap_or_else(C::zero)
            }
            Node::ShiftX(a) => {
                if k == 0 {
                    return C::zero();
                }
                self.get(*a, k - 1).cloned().unwrap_or_else(C::zero)
            }
            Node::MulUPow(a, e) => self
                .get(*a, k)
                .map(|c| c.mul_u_pow(*e))
                .unwrap_or_else(C::zero),
        }
    }
}
