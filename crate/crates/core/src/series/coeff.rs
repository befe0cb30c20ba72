//! Coefficient rings for truncated power series in `x`.
//!
//! A coefficient of `x^n` is an element of one of these rings:
//!
//! * a plain scalar ([`BigInt`], [`BigRational`], `f64`) when the marking
//!   variable `u` has been specialized to 1,
//! * a sparse polynomial in `u` ([`UPoly`]) for the bivariate tables,
//! * a second-order jet at `u = 1` ([`Jet`]) carrying the value and the first
//!   two Taylor coefficients in `u - 1`, which is all the moment computations
//!   need.
//!
//! Every ring knows how to apply the substitution `u -> u^i` used by the
//! cycle-index operator, and how to multiply by a power of `u`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub trait Coeff: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn from_int(k: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale(&self, k: i64) -> Self;
    /// Division by a positive integer that is known to divide every
    /// coefficient (integer rings assert this in debug builds).
    fn div_exact(&self, d: u64) -> Self;
    /// The substitution `u -> u^i`.
    fn dilate_u(&self, i: u32) -> Self;
    /// Multiplication by `u^k`.
    fn mul_u_pow(&self, k: u32) -> Self;

    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        self.add_assign_ref(&other.scale(-1));
    }
}

/// Scalars that can be read back as floating values.
pub trait RealScalar: Coeff {
    fn is_negative(&self) -> bool;
    /// `log2 |self|`, or `-inf` for zero. Stays finite for values far outside
    /// the `f64` range.
    fn log2_abs(&self) -> f64;

    fn to_f64_lossy(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mag = self.log2_abs().exp2();
        if self.is_negative() {
            -mag
        } else {
            mag
        }
    }
}

fn bigint_log2(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return v.abs().to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top: BigInt = v.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).log2() + shift as f64
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_int(k: i64) -> Self {
        BigInt::from(k)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, k: i64) -> Self {
        self * k
    }
    fn div_exact(&self, d: u64) -> Self {
        let (q, r) = self.div_rem(&BigInt::from(d));
        debug_assert!(Zero::is_zero(&r), "inexact division of {self} by {d}");
        q
    }
    fn dilate_u(&self, _i: u32) -> Self {
        self.clone()
    }
    fn mul_u_pow(&self, _k: u32) -> Self {
        self.clone()
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        if Zero::is_zero(a) || Zero::is_zero(b) {
            return;
        }
        *self += a * b;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
}

impl RealScalar for BigInt {
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn log2_abs(&self) -> f64 {
        bigint_log2(self)
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_int(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, k: i64) -> Self {
        self * BigRational::from_integer(BigInt::from(k))
    }
    fn div_exact(&self, d: u64) -> Self {
        self / BigRational::from_integer(BigInt::from(d))
    }
    fn dilate_u(&self, _i: u32) -> Self {
        self.clone()
    }
    fn mul_u_pow(&self, _k: u32) -> Self {
        self.clone()
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        if Zero::is_zero(a) || Zero::is_zero(b) {
            return;
        }
        *self += a * b;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
}

impl RealScalar for BigRational {
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn log2_abs(&self) -> f64 {
        if Zero::is_zero(self) {
            return f64::NEG_INFINITY;
        }
        bigint_log2(self.numer()) - bigint_log2(self.denom())
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_int(k: i64) -> Self {
        k as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, k: i64) -> Self {
        self * k as f64
    }
    fn div_exact(&self, d: u64) -> Self {
        self / d as f64
    }
    fn dilate_u(&self, _i: u32) -> Self {
        *self
    }
    fn mul_u_pow(&self, _k: u32) -> Self {
        *self
    }
}

impl RealScalar for f64 {
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn log2_abs(&self) -> f64 {
        self.abs().log2()
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

/// Sparse polynomial in the marking variable `u`, keyed by exponent.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly<S> {
    terms: BTreeMap<u32, S>,
}

impl<S: Coeff> UPoly<S> {
    pub fn monomial(k: u32, c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        UPoly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (u32, S)>) -> Self {
        let mut p = UPoly {
            terms: BTreeMap::new(),
        };
        for (k, c) in it {
            p.add_term(k, &c);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<u32, S> {
        &self.terms
    }

    pub fn get(&self, k: u32) -> S {
        self.terms.get(&k).cloned().unwrap_or_else(S::zero)
    }

    fn add_term(&mut self, k: u32, c: &S) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(S::zero);
        entry.add_assign_ref(c);
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    /// Value at `u = 1`.
    pub fn at_one(&self) -> S {
        let mut acc = S::zero();
        for c in self.terms.values() {
            acc.add_assign_ref(c);
        }
        acc
    }

    /// `sum_k k^r c_k`, the r-th raw moment weight of the exponent.
    pub fn raw_moment(&self, r: u32) -> S {
        let mut acc = S::zero();
        for (&k, c) in &self.terms {
            let w = (k as i64).pow(r);
            acc.add_assign_ref(&c.scale(w));
        }
        acc
    }
}

impl<S: Coeff> Coeff for UPoly<S> {
    fn zero() -> Self {
        UPoly {
            terms: BTreeMap::new(),
        }
    }
    fn from_int(k: i64) -> Self {
        UPoly::monomial(0, S::from_int(k))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (&k, c) in &other.terms {
            self.add_term(k, c);
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = UPoly::zero();
        out.add_product(self, other);
        out
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        for (&ka, ca) in &a.terms {
            for (&kb, cb) in &b.terms {
                let entry = self.terms.entry(ka + kb).or_insert_with(S::zero);
                entry.add_product(ca, cb);
            }
        }
        self.terms.retain(|_, c| !c.is_zero());
    }
    fn scale(&self, k: i64) -> Self {
        UPoly::from_terms(self.terms.iter().map(|(&e, c)| (e, c.scale(k))))
    }
    fn div_exact(&self, d: u64) -> Self {
        UPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e, c.div_exact(d)))
                .collect(),
        }
    }
    fn dilate_u(&self, i: u32) -> Self {
        UPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e * i, c.clone()))
                .collect(),
        }
    }
    fn mul_u_pow(&self, k: u32) -> Self {
        UPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e + k, c.clone()))
                .collect(),
        }
    }
}

/// Second-order jet at `u = 1`: `c0 + c1 e + c2 e^2` with `u = 1 + e`.
///
/// For a bivariate series `F(x, u)`, the jet coefficients of `x^n` are
/// `F_n(1)`, `F_n'(1)` and `F_n''(1) / 2`, i.e. `sum_k f_{n,k}`,
/// `sum_k k f_{n,k}` and `sum_k C(k,2) f_{n,k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet<S> {
    pub c0: S,
    pub c1: S,
    pub c2: S,
}

impl<S: Coeff> Jet<S> {
    pub fn new(c0: S, c1: S, c2: S) -> Self {
        Jet { c0, c1, c2 }
    }
}

impl<S: Coeff> Coeff for Jet<S> {
    fn zero() -> Self {
        Jet::new(S::zero(), S::zero(), S::zero())
    }
    fn from_int(k: i64) -> Self {
        Jet::new(S::from_int(k), S::zero(), S::zero())
    }
    fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero() && self.c2.is_zero()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.c0.add_assign_ref(&other.c0);
        self.c1.add_assign_ref(&other.c1);
        self.c2.add_assign_ref(&other.c2);
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Jet::zero();
        out.add_product(self, other);
        out
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        self.c0.add_product(&a.c0, &b.c0);
        self.c1.add_product(&a.c0, &b.c1);
        self.c1.add_product(&a.c1, &b.c0);
        self.c2.add_product(&a.c0, &b.c2);
        self.c2.add_product(&a.c1, &b.c1);
        self.c2.add_product(&a.c2, &b.c0);
    }
    fn scale(&self, k: i64) -> Self {
        Jet::new(self.c0.scale(k), self.c1.scale(k), self.c2.scale(k))
    }
    fn div_exact(&self, d: u64) -> Self {
        Jet::new(
            self.c0.div_exact(d),
            self.c1.div_exact(d),
            self.c2.div_exact(d),
        )
    }
    fn dilate_u(&self, i: u32) -> Self {
        // (1+e)^i = 1 + i e + C(i,2) e^2
        let i = i as i64;
        let mut c2 = self.c1.scale(i * (i - 1) / 2);
        c2.add_assign_ref(&self.c2.scale(i * i));
        Jet::new(self.c0.clone(), self.c1.scale(i), c2)
    }
    fn mul_u_pow(&self, k: u32) -> Self {
        let k = k as i64;
        let factor = Jet::new(S::from_int(1), S::from_int(k), S::from_int(k * (k - 1) / 2));
        self.mul_ref(&factor)
    }
}

pub(crate) fn int_to_rational(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}
