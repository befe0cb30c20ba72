//! Small dense floating-point helpers.

use std::ops::{Add, Mul};

use crate::series::cycle_types;

/// Least-squares solution of `design * beta ~ ys` by Householder QR.
///
/// `design` is row-major with at least as many rows as columns and full
/// column rank.
#[allow(clippy::needless_range_loop)]
pub(crate) fn least_squares(design: &[Vec<f64>], ys: &[f64]) -> Vec<f64> {
    let rows = design.len();
    let cols = design[0].len();
    assert!(rows >= cols && ys.len() == rows);
    let mut a: Vec<Vec<f64>> = design.to_vec();
    let mut b = ys.to_vec();
    for k in 0..cols {
        let norm = (k..rows).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            let dot: f64 = (k..rows).map(|i| v[i - k] * a[i][j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..rows {
                a[i][j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..rows).map(|i| v[i - k] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..rows {
            b[i] -= f * v[i - k];
        }
    }
    let mut beta = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = ((k + 1)..cols).map(|j| a[k][j] * beta[j]).sum();
        beta[k] = (b[k] - s) / a[k][k];
    }
    beta
}

/// Scalars that cycle-index polynomials can be evaluated over.
pub(crate) trait Scalar: Copy + Add<Output = Self> + Mul<Output = Self> {
    fn constant(c: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
}

/// First-order forward-mode number with partials in `x` and `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dual {
    pub v: f64,
    pub dx: f64,
    pub du: f64,
}

impl Dual {
    pub fn new(v: f64, dx: f64, du: f64) -> Self {
        Dual { v, dx, du }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.v + o.v, self.dx + o.dx, self.du + o.du)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(
            self.v * o.v,
            self.v * o.dx + self.dx * o.v,
            self.v * o.du + self.du * o.v,
        )
    }
}

impl Scalar for Dual {
    fn constant(c: f64) -> Self {
        Dual::new(c, 0.0, 0.0)
    }
}

/// `Z(S_m)` with variable `s_i` set to `slots[i - 1]`.
pub(crate) fn cycle_index_value<T: Scalar>(m: usize, slots: &[T]) -> T {
    let mut acc = T::constant(0.0);
    let mf: f64 = (1..=m).map(|k| k as f64).product();
    for ct in cycle_types(m) {
        let mut term = T::constant(ct.perms as f64 / mf);
        for (idx, &c) in ct.counts.iter().enumerate() {
            for _ in 0..c {
                term = term * slots[idx];
            }
        }
        acc = acc + term;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_quadratic() {
        let design: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let t = i as f64 / 5.0;
                vec![1.0, t, t * t]
            })
            .collect();
        let ys: Vec<f64> = design
            .iter()
            .map(|r| 2.0 - 3.0 * r[1] + 0.5 * r[2])
            .collect();
        let beta = least_squares(&design, &ys);
        assert!((beta[0] - 2.0).abs() < 1e-12);
        assert!((beta[1] + 3.0).abs() < 1e-12);
        assert!((beta[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cycle_index_counts_multisets() {
        // all slots 3: multisets of size 2 from 3 colours
        assert!((cycle_index_value(2, &[3.0, 3.0]) - 6.0).abs() < 1e-12);
        assert_eq!(cycle_index_value(0, &[] as &[f64]), 1.0);
        // d/ds1 Z(S_3) = Z(S_2)
        let z = cycle_index_value(
            3,
            &[
                Dual::new(2.0, 1.0, 0.0),
                Dual::constant(5.0),
                Dual::constant(7.0),
            ],
        );
        assert!((z.dx - cycle_index_value(2, &[2.0, 5.0])).abs() < 1e-12);
    }
}
