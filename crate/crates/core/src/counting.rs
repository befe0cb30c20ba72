//! Counting series of planted, rooted and free trees with bounded degree, and
//! the dominant singularity of the planted series.

use num_bigint::BigInt;

use crate::error::{invalid, Error, Result};
use crate::numeric::cycle_index_value;
use crate::series::online::Graph;
use crate::series::{eval_lower_bound, eval_nonneg, sqrt_extrapolate, ExtrapolationFit, IntSeries};

/// Univariate counting series for one degree bound. All coefficients are
/// non-negative integers.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingBundle {
    pub delta: usize,
    pub order: usize,
    /// Planted trees: `p = x sum_{j < delta} Z(S_j; p)`.
    pub p: IntSeries,
    /// Planted trees whose root has at most `delta - 2` children; this is
    /// the derivative of the right-hand side above with respect to `p`.
    pub p_restricted: IntSeries,
    /// Rooted trees (root has up to `delta` children).
    pub r: IntSeries,
    /// Free trees.
    pub t: IntSeries,
}

pub fn counting_series(delta: usize, order: usize) -> Result<CountingBundle> {
    if delta < 2 {
        return invalid("degree bound must be at least 2");
    }
    if delta > 20 {
        return invalid("degree bound above 20 is not supported");
    }
    if order < 1 {
        return invalid("truncation order must be at least 1");
    }
    let mut g: Graph<BigInt> = Graph::new(order);
    let p = g.unknown(1);
    let z: Vec<_> = (0..=delta).map(|j| g.cycle_index(p, j)).collect();
    let head = |g: &mut Graph<BigInt>, top: usize| {
        let s = g.sum(&z[..=top]);
        g.shift_x(s)
    };
    let p_def = head(&mut g, delta - 1);
    let p_res = head(&mut g, delta - 2);
    let r = head(&mut g, delta);
    for n in 0..=order {
        let c = g.coeff(p_def, n);
        g.push_unknown(p, n, c);
    }
    let p_series = g.series(p);
    let r_series = g.series(r);
    let pairs = p_series
        .mul(&p_series)
        .sub(&p_series.dilate(2))
        .div_exact(2);
    Ok(CountingBundle {
        delta,
        order,
        p_restricted: g.series(p_res),
        t: r_series.sub(&pairs),
        r: r_series,
        p: p_series,
    })
}

/// Location of the dominant singularity of `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityEstimate {
    pub x0: f64,
    pub p_at_x0: f64,
    pub truncation: usize,
    pub bracket_width: f64,
    /// Square-root extrapolation of the truncated `p_restricted` towards `x0`;
    /// its limit `g` should be 1. Absent when the order is too small for a
    /// usable sample grid.
    pub check: Option<ExtrapolationFit>,
}

/// Evaluates the planted-tree equation `y = Phi(x, y)`, where the first
/// cycle-index slot holds `y` and slots `i >= 2` hold `p(x^i)` from the
/// truncated series. Those arguments satisfy `x^i <= 1/4`, far inside the
/// radius, so truncation error is negligible there.
pub(crate) struct PlantedEquation<'a> {
    delta: usize,
    p: &'a IntSeries,
}

impl<'a> PlantedEquation<'a> {
    pub fn new(bundle: &'a CountingBundle) -> Self {
        PlantedEquation {
            delta: bundle.delta,
            p: &bundle.p,
        }
    }

    fn slots(&self, x: f64, y: f64) -> Vec<f64> {
        let mut s = vec![y];
        s.extend((2..=self.delta as i32).map(|i| eval_nonneg(self.p, x.powi(i))));
        s
    }

    /// `(Phi(x, y), dPhi/dy)`.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let s = self.slots(x, y);
        let z: Vec<f64> = (0..self.delta).map(|j| cycle_index_value(j, &s)).collect();
        let phi = x * z.iter().sum::<f64>();
        let dphi = x * z[..self.delta - 1].iter().sum::<f64>();
        (phi, dphi)
    }

    /// The `y` at which `dPhi/dy = 1`.
    pub fn critical_y(&self, x: f64) -> f64 {
        let mut hi = 1.0;
        while self.eval(x, hi).1 < 1.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(x, mid).1 < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `min_y (Phi(x, y) - y)`: non-positive exactly when the equation has a
    /// solution, i.e. when `x <= x0`.
    pub fn gap(&self, x: f64) -> f64 {
        let y = self.critical_y(x);
        if !y.is_finite() {
            return f64::INFINITY;
        }
        self.eval(x, y).0 - y
    }
}

/// Finds `x0` with `p^{(delta-1)}(x0) = 1`.
///
/// The bracket is validated on the truncated series, then refined by
/// bisecting on the sign of `min_y (Phi(x, y) - y)`, which does not suffer
/// from the slow convergence of the truncated series near `x0`.
pub fn find_x0(delta: usize, order: usize, tol: f64) -> Result<SingularityEstimate> {
    if delta < 3 {
        return invalid("singularity analysis needs delta >= 3");
    }
    if tol.is_nan() || tol <= 0.0 {
        return invalid("tolerance must be positive");
    }
    let bundle = counting_series(delta, order)?;
    find_x0_with(&bundle, tol)
}

pub fn find_x0_with(bundle: &CountingBundle, tol: f64) -> Result<SingularityEstimate> {
    if bundle.delta < 3 {
        return invalid("singularity analysis needs delta >= 3");
    }
    if eval_lower_bound(&bundle.p_restricted, 0.5)? < 1.0 {
        return Err(Error::IncreaseOrder {
            order: bundle.order,
        });
    }
    let eq = PlantedEquation::new(bundle);
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if eq.gap(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x0 = 0.5 * (lo + hi);
    let p_at_x0 = eq.critical_y(x0);
    let check = restricted_extrapolation(&bundle.p_restricted, x0, bundle.order);
    Ok(SingularityEstimate {
        x0,
        p_at_x0,
        truncation: bundle.order,
        bracket_width: hi - lo,
        check,
    })
}

/// Sample points `x0 (1 - 2^-j)` for `j` from 3 up to the largest `j <= 10`
/// with `2^j <= order / 4`; closer to `x0` the truncation bias dominates.
pub fn sample_grid(x0: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 3;
    while (1usize << j) * 4 <= order && j <= 10 {
        out.push(x0 * (1.0 - (-(j as f64)).exp2()));
        j += 1;
    }
    out
}

/// Square-root extrapolation of a truncated non-negative series to `x0`.
pub fn restricted_extrapolation(f: &IntSeries, x0: f64, order: usize) -> Option<ExtrapolationFit> {
    let grid = sample_grid(x0, order);
    if grid.len() < 4 {
        return None;
    }
    let samples: Vec<(f64, f64)> = grid.iter().map(|&x| (x, eval_nonneg(f, x))).collect();
    sqrt_extrapolate(&samples, x0).ok()
}
