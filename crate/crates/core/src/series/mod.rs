//! Truncated formal power series with exact coefficients, the cycle-index
//! substitution `Z(S_m; f)`, and the two floating-point bridges used near the
//! dominant singularity (positive-series evaluation and square-root
//! extrapolation).

mod coeff;
pub mod online;

use num_bigint::BigInt;
use num_rational::BigRational;

pub(crate) use coeff::int_to_rational;
pub use coeff::{Coeff, Jet, RealScalar, UPoly};

use crate::error::{invalid, Result};
use crate::numeric::least_squares;

/// A power series in `x` truncated after `x^order`.
///
/// All binary operations truncate at the smaller of the two orders; nothing
/// ever extends the order implicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

pub type TruncatedUniSeries = Series<BigRational>;
pub type TruncatedBiSeries = Series<UPoly<BigRational>>;
/// Integer-valued series; used wherever every coefficient counts objects.
pub type IntSeries = Series<BigInt>;

impl<C: Coeff> Series<C> {
    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0, C::from_int(1))
    }

    /// `c x^n`, truncated (to zero if `n > order`).
    pub fn monomial(order: usize, n: usize, c: C) -> Self {
        let mut s = Self::zero(order);
        if n <= order {
            s.coeffs[n] = c;
        }
        s
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        Self::monomial(order, 1, C::from_int(1))
    }

    /// Builds a series of order `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least the constant term"
        );
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Series {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|n| {
                let mut c = self.coeffs[n].clone();
                c.add_assign_ref(&other.coeffs[n]);
                c
            })
            .collect();
        Series { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect(),
        }
    }

    pub fn div_exact(&self, d: u64) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.div_exact(d)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let (va, vb) = match (self.valuation(), other.valuation()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Self::zero(order),
        };
        let mut coeffs = vec![C::zero(); order + 1];
        for (n, slot) in coeffs.iter_mut().enumerate().skip(va + vb) {
            for i in va..=n - vb {
                slot.add_product(&self.coeffs[i], &other.coeffs[n - i]);
            }
        }
        Series { coeffs }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplication by `x`, dropping the coefficient that leaves the window.
    pub fn mul_x(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(C::zero());
        coeffs.extend_from_slice(&self.coeffs[..self.order()]);
        Series { coeffs }
    }

    pub fn mul_u_pow(&self, k: u32) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.mul_u_pow(k)).collect(),
        }
    }

    /// The substitution `f(x, u) -> f(x^i, u^i)`.
    pub fn dilate(&self, i: u32) -> Self {
        assert!(i >= 1);
        let i = i as usize;
        let mut out = Self::zero(self.order());
        for n in 0..=self.order() / i {
            out.coeffs[n * i] = self.coeffs[n].dilate_u(i as u32);
        }
        out
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl<S: Coeff> Series<UPoly<S>> {
    /// Coefficient-wise specialization `u = 1`.
    pub fn at_u_one(&self) -> Series<S> {
        self.map(|c| c.at_one())
    }

    /// Lift a `u`-free series into the bivariate ring (all terms at `u^0`).
    pub fn lift(s: &Series<S>) -> Self {
        s.map(|c| UPoly::monomial(0, c.clone()))
    }
}

impl IntSeries {
    pub fn to_rational(&self) -> TruncatedUniSeries {
        self.map(int_to_rational)
    }
}

/// One conjugacy class of the symmetric group `S_m`: `counts[i-1]` cycles of
/// length `i`, covering `perms` permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleType {
    pub counts: Vec<u32>,
    pub perms: u64,
}

/// All cycle types of `S_m` (`m <= 20`), i.e. the terms of the cycle index
/// `Z(S_m) = (1/m!) sum perms * prod s_i^{counts_i}`.
pub fn cycle_types(m: usize) -> Vec<CycleType> {
    assert!(m <= 20, "cycle index of S_{m} overflows u64");
    let fact = factorial(m);
    let mut out = Vec::new();
    let mut counts = vec![0u32; m];
    fn rec(
        rest: usize,
        max_part: usize,
        counts: &mut Vec<u32>,
        fact: u64,
        out: &mut Vec<CycleType>,
    ) {
        if rest == 0 {
            // z = prod i^{c_i} c_i!
            let mut z: u64 = 1;
            for (idx, &c) in counts.iter().enumerate() {
                let i = (idx + 1) as u64;
                z *= i.pow(c) * factorial(c as usize);
            }
            out.push(CycleType {
                counts: counts.clone(),
                perms: fact / z,
            });
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            counts[part - 1] += 1;
            rec(rest - part, part, counts, fact, out);
            counts[part - 1] -= 1;
        }
    }
    if m == 0 {
        return vec![CycleType {
            counts: vec![],
            perms: 1,
        }];
    }
    rec(m, m, &mut counts, fact, &mut out);
    out
}

pub fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// `Z(S_m; f)`: every cycle-index variable `s_i` is replaced by `f(x^i, u^i)`.
/// The coefficient of `x^n` enumerates multisets of `m` objects of total size
/// `n` drawn from the class counted by `f`.
pub fn cycle_index_multiset<C: Coeff>(m: usize, f: &Series<C>) -> Result<Series<C>> {
    if !f.coeff(0).is_zero() {
        return invalid("cycle-index substitution needs a series without constant term");
    }
    if m > 20 {
        return invalid(format!("cycle index of S_{m} is out of range (m <= 20)"));
    }
    let order = f.order();
    if m == 0 {
        return Ok(Series::one(order));
    }
    let dilations: Vec<Series<C>> = (1..=m as u32).map(|i| f.dilate(i)).collect();
    let mut acc = Series::zero(order);
    for ct in cycle_types(m) {
        let mut term = Series::one(order);
        for (idx, &c) in ct.counts.iter().enumerate() {
            if c > 0 {
                term = term.mul(&dilations[idx].pow(c));
            }
        }
        acc = acc.add(&term.scale(ct.perms as i64));
    }
    Ok(acc.div_exact(factorial(m)))
}

/// First-order coefficient in `e` of `Z(S_m; f + e g)`, where the marker `e`
/// is substituted like any other counting variable (`e -> e^i` in slot `i`).
/// Equals `g * Z(S_{m-1}; f)`.
pub fn multiset_directional_derivative<S: Coeff>(
    m: usize,
    f: &Series<S>,
    g: &Series<S>,
) -> Result<Series<S>> {
    if m == 0 {
        return invalid("the multiset derivative needs m >= 1");
    }
    if !f.coeff(0).is_zero() || !g.coeff(0).is_zero() {
        return invalid("multiset derivative needs series without constant term");
    }
    let order = f.order().min(g.order());
    let marked: Series<UPoly<S>> = Series::from_coeffs(
        (0..=order)
            .map(|n| UPoly::from_terms([(0u32, f.coeff(n).clone()), (1u32, g.coeff(n).clone())]))
            .collect(),
    );
    let z = cycle_index_multiset(m, &marked)?;
    Ok(z.map(|c| c.get(1)))
}

/// `sum_{n <= N} f_n x^n` in floating point. With non-negative coefficients
/// this is a lower bound for the full series that increases with `N`.
pub fn eval_lower_bound<S: RealScalar>(f: &Series<S>, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return invalid(format!("evaluation point {x} outside [0, 1)"));
    }
    if f.coeffs().iter().any(|c| c.is_negative()) {
        return invalid("lower-bound evaluation needs non-negative coefficients");
    }
    Ok(eval_nonneg(f, x))
}

pub(crate) fn eval_nonneg<S: RealScalar>(f: &Series<S>, x: f64) -> f64 {
    let mut acc = f.coeff(0).to_f64_lossy();
    if x == 0.0 {
        return acc;
    }
    let lx = x.log2();
    for (n, c) in f.coeffs().iter().enumerate().skip(1) {
        if c.is_zero() {
            continue;
        }
        acc += (c.log2_abs() + n as f64 * lx).exp2();
    }
    acc
}

/// Value and first derivative of a non-negative series at `0 <= x < 1`.
pub(crate) fn eval_nonneg_with_derivative<S: RealScalar>(f: &Series<S>, x: f64) -> (f64, f64) {
    let value = eval_nonneg(f, x);
    if x == 0.0 {
        let d = f.coeffs().get(1).map_or(0.0, |c| c.to_f64_lossy());
        return (value, d);
    }
    let lx = x.log2();
    let mut d = 0.0;
    for (n, c) in f.coeffs().iter().enumerate().skip(1) {
        if !c.is_zero() {
            d += (c.log2_abs() + (n as f64).log2() + (n - 1) as f64 * lx).exp2();
        }
    }
    (value, d)
}

/// Result of fitting `value ~ g - h sqrt(x0 - x) + c2 (x0 - x) + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtrapolationFit {
    pub g: f64,
    pub h: f64,
    pub x0: f64,
    /// RMS deviation of the fitted model over the samples.
    pub residual: f64,
    /// Coefficients of `(x0 - x)^{k/2}` for `k >= 2`, when the sample count
    /// allows them.
    pub higher: Vec<f64>,
}

impl ExtrapolationFit {
    pub fn predict(&self, x: f64) -> f64 {
        let s = (self.x0 - x).max(0.0).sqrt();
        let mut v = self.g - self.h * s;
        let mut sp = s;
        for c in &self.higher {
            sp *= s;
            v += c * sp;
        }
        v
    }
}

/// Least-squares fit of the local square-root expansion around `x0`; the
/// limit at `x0` is `g`.
///
/// The model uses powers `s^0 .. s^d` of `s = sqrt(x0 - x)` with
/// `d = min(3, samples - 2)`, so at least one degree of freedom is left for
/// the residual.
pub fn sqrt_extrapolate(samples: &[(f64, f64)], x0: f64) -> Result<ExtrapolationFit> {
    if samples.len() < 3 {
        return invalid("square-root extrapolation needs at least 3 samples");
    }
    if samples.iter().any(|&(x, v)| x.is_nan() || x >= x0 || !v.is_finite()) {
        return invalid("extrapolation samples must lie strictly below x0");
    }
    let mut xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return invalid("extrapolation samples must be distinct");
    }
    let degree = (samples.len() - 2).min(3);
    let s_max = samples
        .iter()
        .map(|&(x, _)| (x0 - x).sqrt())
        .fold(0.0, f64::max);
    let design: Vec<Vec<f64>> = samples
        .iter()
        .map(|&(x, _)| {
            let t = (x0 - x).sqrt() / s_max;
            (0..=degree).map(|k| t.powi(k as i32)).collect()
        })
        .collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let scaled = least_squares(&design, &ys);
    let coef: Vec<f64> = scaled
        .iter()
        .enumerate()
        .map(|(k, c)| c / s_max.powi(k as i32))
        .collect();
    let fit = ExtrapolationFit {
        g: coef[0],
        h: -coef[1],
        x0,
        residual: 0.0,
        higher: coef[2..].to_vec(),
    };
    let ss: f64 = samples
        .iter()
        .map(|&(x, v)| (fit.predict(x) - v).powi(2))
        .sum();
    Ok(ExtrapolationFit {
        residual: (ss / samples.len() as f64).sqrt(),
        ..fit
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> IntSeries {
        Series::from_coeffs(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn cycle_type_counts_sum_to_factorial() {
        for m in 0..=8 {
            let total: u64 = cycle_types(m).iter().map(|c| c.perms).sum();
            assert_eq!(total, factorial(m));
        }
        assert_eq!(cycle_types(3).len(), 3);
    }

    #[test]
    fn two_multisets_of_a_single_atom() {
        let f = ints(&[0, 1, 0, 0]);
        assert_eq!(cycle_index_multiset(2, &f).unwrap(), ints(&[0, 0, 1, 0]));
    }

    #[test]
    fn three_multisets_over_sizes_one_and_two() {
        let f = ints(&[0, 1, 1, 0, 0, 0, 0, 0]);
        assert_eq!(
            cycle_index_multiset(3, &f).unwrap(),
            ints(&[0, 0, 0, 1, 1, 1, 1, 0])
        );
    }

    #[test]
    fn marked_atom_pairs_double_the_exponent() {
        let f: Series<UPoly<BigInt>> = Series::from_coeffs(vec![
            UPoly::zero(),
            UPoly::monomial(1, BigInt::from(1)),
            UPoly::zero(),
            UPoly::zero(),
        ]);
        let z = cycle_index_multiset(2, &f).unwrap();
        assert_eq!(z.coeff(2), &UPoly::monomial(2, BigInt::from(1)));
        assert!(z.coeff(1).is_zero() && z.coeff(3).is_zero());
    }

    #[test]
    fn empty_multiset_is_one_and_constant_terms_are_rejected() {
        let f = ints(&[0, 3, 1]);
        assert_eq!(cycle_index_multiset(0, &f).unwrap(), ints(&[1, 0, 0]));
        assert!(cycle_index_multiset(2, &ints(&[1, 1, 0])).is_err());
    }

    #[test]
    fn derivative_small_cases() {
        let f = ints(&[0, 1, 1, 0, 0, 0]);
        let g = ints(&[0, 0, 0, 1, 0, 0]);
        assert_eq!(multiset_directional_derivative(1, &f, &g).unwrap(), g);
        let x = ints(&[0, 1, 0, 0, 0]);
        assert_eq!(
            multiset_directional_derivative(3, &x, &x).unwrap(),
            ints(&[0, 0, 0, 1, 0])
        );
        assert!(multiset_directional_derivative(0, &x, &x).is_err());
    }

    #[test]
    fn lower_bound_evaluation() {
        assert_eq!(eval_lower_bound(&IntSeries::zero(5), 0.3).unwrap(), 0.0);
        let geo = ints(&[1; 21]);
        let v = eval_lower_bound(&geo, 0.5).unwrap();
        assert!((v - (2.0 - 0.5f64.powi(20))).abs() < 1e-14);
        assert!(eval_lower_bound(&ints(&[0, -1]), 0.5).is_err());
        assert!(eval_lower_bound(&geo, 1.0).is_err());
    }

    #[test]
    fn extrapolation_recovers_synthetic_square_root() {
        let samples: Vec<(f64, f64)> = (1..8)
            .map(|j| {
                let x = 0.25 - 0.25 * 0.5f64.powi(j);
                (x, 2.0 - (0.25 - x).sqrt())
            })
            .collect();
        let fit = sqrt_extrapolate(&samples, 0.25).unwrap();
        assert!((fit.g - 2.0).abs() < 1e-12);
        assert!((fit.h - 1.0).abs() < 1e-10);
        assert!(fit.residual < 1e-12);

        let flat: Vec<(f64, f64)> = [0.1, 0.2, 0.3].iter().map(|&x| (x, 4.5)).collect();
        let fit = sqrt_extrapolate(&flat, 0.4).unwrap();
        assert!((fit.g - 4.5).abs() < 1e-12 && fit.h.abs() < 1e-10);
    }

    #[test]
    fn extrapolation_rejects_bad_samples() {
        assert!(sqrt_extrapolate(&[(0.1, 1.0), (0.2, 1.0)], 0.3).is_err());
        assert!(sqrt_extrapolate(&[(0.1, 1.0), (0.2, 1.0), (0.3, 1.0)], 0.3).is_err());
        assert!(sqrt_extrapolate(&[(0.1, 1.0), (0.1, 1.0), (0.2, 1.0)], 0.3).is_err());
    }
}
