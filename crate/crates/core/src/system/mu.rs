//! The mean constant `mu_H` from the system at its singularity.
//!
//! With `v` the all-ones vector (a left null vector of `I - F_A` at `x0`,
//! since every Jacobian column sums to `p^{(delta-1)}(x0) = 1`),
//! `mu = v^T F_u / (x0 v^T F_x)`.
//!
//! Partial derivatives are taken with the unknowns held fixed. An unknown
//! only enters through the first cycle-index slot `B_sigma(x, u)`, whose
//! explicit dependence on `x` and `u` is the monomial of the shallow class
//! `sigma`. Slots `i >= 2` hold `B_sigma(x^i, u^i)` as given functions;
//! their arguments `x0^i` are well inside the radius, so truncated series
//! are accurate there. The values `B_sigma(x0, 1)` are obtained exactly
//! from the planted-tree equation at `x0` by peeling truncation levels.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::{check_strong_connectivity, ClassSystem};
use crate::counting::{counting_series, restricted_extrapolation, PlantedEquation};
use crate::error::{invalid, Error, Result};
use crate::numeric::{cycle_index_value, Dual};
use crate::series::{eval_nonneg, eval_nonneg_with_derivative, IntSeries, Jet};

#[derive(Clone, Debug, PartialEq)]
pub struct SingularityReport {
    pub x0: f64,
    pub p_at_x0: f64,
    pub mu: f64,
    /// Largest deviation of a Jacobian column sum from 1 at `x0`.
    pub column_sum_residual: f64,
    /// RMS residual of the square-root fit of `p^{(delta-1)}` towards `x0`.
    pub extrapolation_residual: f64,
    /// Limit of that fit; should be 1.
    pub extrapolated_column_sum: f64,
    pub warnings: Vec<String>,
}

impl SingularityReport {
    /// Flat `key,value` records.
    pub fn records(&self) -> Vec<(&'static str, String)> {
        vec![
            ("x0", format!("{:.10}", self.x0)),
            ("p_at_x0", format!("{:.10}", self.p_at_x0)),
            ("mu", format!("{:.10}", self.mu)),
            (
                "column_sum_residual",
                format!("{:.3e}", self.column_sum_residual),
            ),
            (
                "extrapolation_residual",
                format!("{:.3e}", self.extrapolation_residual),
            ),
            (
                "extrapolated_column_sum",
                format!("{:.10}", self.extrapolated_column_sum),
            ),
        ]
    }
}

/// Order for series evaluated at `x0^2` and beyond: enough terms for
/// `x0^n < 1e-20`.
fn inner_order(x0: f64, order: usize) -> usize {
    let need = (20.0 / -x0.log10()).ceil() as usize + 10;
    need.min(order).max(8)
}

struct LevelValues<'a> {
    sys: &'a ClassSystem,
    x0: f64,
    p_at_x0: f64,
    p: &'a IntSeries,
    memo: HashMap<(usize, usize, i32), f64>,
}

impl LevelValues<'_> {
    /// Generating function at `u = 1` and `x = x0^e` of planted trees whose
    /// depth-`level` truncation is shape `idx` of that level.
    fn value(&mut self, level: usize, idx: usize, e: i32) -> f64 {
        if let Some(&v) = self.memo.get(&(level, idx, e)) {
            return v;
        }
        let x = self.x0.powi(e);
        let shape = &self.sys.levels[level][idx];
        let v = if shape.depth < level {
            x.powi(shape.size as i32)
        } else if level == 0 {
            if e == 1 {
                self.p_at_x0
            } else {
                eval_nonneg(self.p, x)
            }
        } else {
            let children = shape.children.clone();
            let mut acc = x;
            for (c, m) in children {
                let slots: Vec<f64> = (1..=m as i32)
                    .map(|i| self.value(level - 1, c, e * i))
                    .collect();
                acc *= cycle_index_value(m, &slots);
            }
            acc
        };
        self.memo.insert((level, idx, e), v);
        v
    }
}

/// Computes `mu_H` at the singularity `x0` (from `find_x0`). `order` is the
/// truncation of the counting series used for `p(x^i)`, `i >= 2`, and for
/// the extrapolation diagnostic.
pub fn compute_mu(sys: &ClassSystem, x0: f64, order: usize) -> Result<SingularityReport> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return invalid(format!("singularity {x0} outside (0, 1)"));
    }
    let bundle = counting_series(sys.delta, order)?;
    let p_at_x0 = PlantedEquation::new(&bundle).critical_y(x0);
    let mut warnings = Vec::new();
    let (extrapolation_residual, extrapolated_column_sum) =
        match restricted_extrapolation(&bundle.p_restricted, x0, order) {
            Some(fit) => {
                if (fit.g - 1.0).abs() > 1e-3 {
                    warnings.push(format!(
                        "extrapolated column sum {:.6} differs from 1",
                        fit.g
                    ));
                }
                (fit.residual, fit.g)
            }
            None => {
                warnings.push(format!(
                    "order {order} too small for the extrapolation check"
                ));
                (f64::NAN, f64::NAN)
            }
        };
    let base = SingularityReport {
        x0,
        p_at_x0,
        mu: 1.0,
        column_sum_residual: 0.0,
        extrapolation_residual,
        extrapolated_column_sum,
        warnings,
    };
    if sys.subtree.len() == 1 {
        // X_n = n
        return Ok(base);
    }
    if sys.degenerate {
        let mut report = SingularityReport { mu: 0.0, ..base };
        report
            .warnings
            .push("subtree exceeds the degree bound and never occurs".into());
        return Ok(report);
    }
    let conn = check_strong_connectivity(sys);
    if !conn.strongly_connected {
        return Err(Error::NotStronglyConnected(conn.to_string()));
    }

    let h = sys.h;
    let mut levels = LevelValues {
        sys,
        x0,
        p_at_x0,
        p: &bundle.p,
        memo: HashMap::new(),
    };
    let inner = super::solve_series_in::<Jet<BigInt>>(sys, inner_order(x0, order));
    let max_mult = sys.delta - 1;
    let slots: Vec<Vec<Dual>> = sys
        .groups
        .iter()
        .enumerate()
        .map(|(g, group)| {
            let shallow = &sys.classes[group.shallow];
            let s = shallow.size as i32;
            let o = shallow.occurrences as f64;
            let mut out = vec![Dual::new(
                levels.value(h - 1, g, 1),
                s as f64 * x0.powi(s - 1),
                o * x0.powi(s),
            )];
            let value: IntSeries = inner.groups[g].map(|j| j.c0.clone());
            let du: IntSeries = inner.groups[g].map(|j| j.c1.clone());
            for i in 2..=max_mult as i32 {
                let xi = x0.powi(i);
                let (v, d) = eval_nonneg_with_derivative(&value, xi);
                out.push(Dual::new(
                    v,
                    i as f64 * x0.powi(i - 1) * d,
                    i as f64 * eval_nonneg(&du, xi),
                ));
            }
            out
        })
        .collect();

    let mut f_x = 0.0;
    let mut f_u = 0.0;
    let mut column = vec![0.0; sys.groups.len()];
    for e in &sys.equations {
        let zs: Vec<Dual> = e
            .children
            .iter()
            .map(|&(g, m)| cycle_index_value(m, &slots[g][..m]))
            .collect();
        let mut f = Dual::new(x0, 1.0, 0.0) * Dual::new(1.0, 0.0, e.k_root as f64);
        for &z in &zs {
            f = f * z;
        }
        f_x += f.dx;
        f_u += f.du;
        for (pos, &(g, m)) in e.children.iter().enumerate() {
            let values: Vec<f64> = slots[g][..m - 1].iter().map(|d| d.v).collect();
            let mut term = x0 * cycle_index_value(m - 1, &values);
            for (other, z) in zs.iter().enumerate() {
                if other != pos {
                    term *= z.v;
                }
            }
            column[g] += term;
        }
    }
    let column_sum_residual = sys
        .groups
        .iter()
        .zip(&column)
        .filter(|(g, _)| !g.deep.is_empty())
        .map(|(_, c)| (c - 1.0).abs())
        .fold(0.0, f64::max);
    let mut report = SingularityReport {
        mu: f_u / (x0 * f_x),
        column_sum_residual,
        ..base
    };
    if column_sum_residual > 1e-3 {
        report.warnings.push(format!(
            "Jacobian column sums deviate from 1 by {column_sum_residual:.3e}; is x0 accurate?"
        ));
    }
    Ok(report)
}
