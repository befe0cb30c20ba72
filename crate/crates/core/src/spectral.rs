//! Adjacency spectra, the Estrada index, closed-walk moments and the first
//! Zagreb index of trees.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::tree::FreeTree;

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 50;

fn off_norm(a: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// descending.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = a.len();
    let mut sweeps = 0;
    while off_norm(&a) >= OFF_DIAGONAL_TOL {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

pub fn adjacency(t: &FreeTree) -> Vec<Vec<f64>> {
    let n = t.len();
    let mut a = vec![vec![0.0; n]; n];
    for (u, v) in t.edges() {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    a
}

pub fn eigenvalues(t: &FreeTree) -> Result<Vec<f64>> {
    symmetric_eigenvalues(adjacency(t))
}

/// Closed-walk counts `M_0 ..= M_k_max`, exact.
pub fn walk_moments(t: &FreeTree, k_max: usize) -> Vec<BigUint> {
    let n = t.len();
    let mut moments = vec![BigUint::zero(); k_max + 1];
    for start in 0..n {
        let mut walks = vec![BigUint::zero(); n];
        walks[start] = BigUint::one();
        moments[0] += 1u32;
        for m in moments.iter_mut().skip(1) {
            let mut next = vec![BigUint::zero(); n];
            for (v, w) in walks.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                for &u in t.neighbors(v) {
                    next[u] += w;
                }
            }
            walks = next;
            *m += &walks[start];
        }
    }
    moments
}

pub fn zagreb(t: &FreeTree) -> u64 {
    t.degrees().iter().map(|&d| (d * d) as u64).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstradaMode {
    Eigen,
    Moments,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstradaValue {
    pub value: f64,
    /// Upper bound on the omitted terms (moment mode only).
    pub tail_bound: Option<f64>,
}

/// `sum_{k > k_terms} delta^{2k} n / (2k)!`, the bound on the omitted part of
/// the moment series implied by `M_{2k} <= sum_i d_i^{2k} <= delta^{2k} n`.
pub fn moment_tail_bound(n: usize, delta: usize, k_terms: usize) -> f64 {
    let d2 = (delta * delta) as f64;
    // term for k = k_terms + 1, built in log space to avoid overflow
    let k0 = k_terms + 1;
    let mut log_term =
        (n as f64).ln() + k0 as f64 * d2.ln() - (1..=2 * k0).map(|i| (i as f64).ln()).sum::<f64>();
    let mut total = 0.0;
    let mut k = k0;
    loop {
        let term = log_term.exp();
        total += term;
        if term < total * 1e-17 || (term == 0.0 && k > k0 + 10) {
            break;
        }
        let kk = k as f64;
        log_term += d2.ln() - ((2.0 * kk + 1.0) * (2.0 * kk + 2.0)).ln();
        k += 1;
        if k > k0 + 10_000 {
            break;
        }
    }
    total
}

/// Smallest number of terms whose tail bound is below `1e-9 n`.
pub fn default_moment_terms(n: usize, delta: usize) -> usize {
    (1..)
        .find(|&k| moment_tail_bound(n, delta, k) < 1e-9 * n as f64)
        .unwrap()
}

fn factorial_big(m: usize) -> BigUint {
    (1..=m as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// Estrada index. In moment mode the sum `sum_{k <= k_terms} M_{2k}/(2k)!`
/// is accumulated exactly and the tail bound uses the degree bound `delta`.
pub fn estrada(
    t: &FreeTree,
    mode: EstradaMode,
    k_terms: usize,
    delta: usize,
) -> Result<EstradaValue> {
    match mode {
        EstradaMode::Eigen => Ok(EstradaValue {
            value: eigenvalues(t)?.iter().map(|l| l.exp()).sum(),
            tail_bound: None,
        }),
        EstradaMode::Moments => {
            if k_terms == 0 {
                return crate::error::invalid("moment-mode Estrada index needs K >= 1");
            }
            let m = walk_moments(t, 2 * k_terms);
            let mut acc = BigRational::zero();
            for k in 0..=k_terms {
                acc += BigRational::new(
                    BigInt::from(m[2 * k].clone()),
                    BigInt::from(factorial_big(2 * k)),
                );
            }
            Ok(EstradaValue {
                value: acc.to_f64().unwrap_or(f64::NAN),
                tail_bound: Some(moment_tail_bound(t.len(), delta, k_terms)),
            })
        }
    }
}

/// Outcome of checking `M_{2k} <= sum_i d_i^{2k}` for `k = 1..=K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentCheck {
    pub holds: bool,
    /// First violating `k`, with both sides.
    pub violation: Option<(usize, BigUint, BigUint)>,
}

pub fn moment_degree_check(t: &FreeTree, k_max: usize) -> MomentCheck {
    let m = walk_moments(t, 2 * k_max);
    let degrees = t.degrees();
    for k in 1..=k_max {
        let rhs: BigUint = degrees
            .iter()
            .map(|&d| BigUint::from(d).pow(2 * k as u32))
            .sum();
        if m[2 * k] > rhs {
            return MomentCheck {
                holds: false,
                violation: Some((k, m[2 * k].clone(), rhs)),
            };
        }
    }
    MomentCheck {
        holds: true,
        violation: None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub ee: f64,
    /// `M_0 ..= M_k_max`.
    pub moments: Vec<BigUint>,
    pub zagreb: u64,
}

pub fn spectral_summary(t: &FreeTree, k_max: usize) -> Result<SpectralSummary> {
    let eigenvalues = eigenvalues(t)?;
    Ok(SpectralSummary {
        n: t.len(),
        ee: eigenvalues.iter().map(|l| l.exp()).sum(),
        eigenvalues,
        moments: walk_moments(t, k_max),
        zagreb: zagreb(t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_free;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-10)
    }

    #[test]
    fn small_spectra() {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        assert!(close(
            &eigenvalues(&FreeTree::path(2)).unwrap(),
            &[1.0, -1.0]
        ));
        assert!(close(
            &eigenvalues(&FreeTree::path(3)).unwrap(),
            &[s2, 0.0, -s2]
        ));
        assert!(close(
            &eigenvalues(&FreeTree::star(3)).unwrap(),
            &[s3, 0.0, 0.0, -s3]
        ));
        assert!(close(&eigenvalues(&FreeTree::single()).unwrap(), &[0.0]));
    }

    #[test]
    fn estrada_values() {
        let ee = |t: &FreeTree| estrada(t, EstradaMode::Eigen, 0, 4).unwrap().value;
        assert!((ee(&FreeTree::single()) - 1.0).abs() < 1e-12);
        assert!((ee(&FreeTree::path(2)) - 3.08616).abs() < 1e-5);
        assert!((ee(&FreeTree::path(3)) - 5.35637).abs() < 1e-5);
        let m = estrada(&FreeTree::path(3), EstradaMode::Moments, 30, 2).unwrap();
        assert!((m.value - ee(&FreeTree::path(3))).abs() <= m.tail_bound.unwrap() + 1e-12);
    }

    #[test]
    fn walks_and_zagreb() {
        let star = FreeTree::star(3);
        let m = walk_moments(&star, 4);
        assert_eq!(m[2], BigUint::from(6u8));
        assert_eq!(m[3], BigUint::zero());
        assert_eq!(m[4], BigUint::from(18u8));
        assert_eq!(zagreb(&parse_free("0 1 2").unwrap()), 10);
        assert_eq!(zagreb(&star), 12);
        assert_eq!(zagreb(&FreeTree::single()), 0);
    }

    #[test]
    fn walks_are_bounded_by_degree_powers() {
        let star = FreeTree::star(3);
        assert!(moment_degree_check(&star, 2).holds);
        assert_eq!(walk_moments(&star, 4)[4], BigUint::from(18u8));
        assert!(moment_degree_check(&FreeTree::path(4), 1).holds);
    }

    #[test]
    fn default_terms_meet_tolerance() {
        let k = default_moment_terms(10, 4);
        assert!(moment_tail_bound(10, 4, k) < 1e-8);
        assert!(moment_tail_bound(10, 4, k - 1) >= 1e-8);
    }
}
