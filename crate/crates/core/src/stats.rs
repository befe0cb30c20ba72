//! Moments of occurrence tables, least-squares fits and the finite-size
//! surveys built on them.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::occurrence::{free_tree_text, occurrence_distribution, OccurrenceMode, OccurrenceTable};
use crate::spectral::{eigenvalues, walk_moments, zagreb};
use crate::tree::{enumerate_trees, FreeTree, TreeKind};

#[derive(Clone, Debug, PartialEq)]
pub struct MomentsReport {
    pub n: usize,
    pub mean: BigRational,
    pub variance: BigRational,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

fn ratio(num: &BigInt, den: &BigInt) -> BigRational {
    BigRational::new(num.clone(), den.clone())
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact mean and variance, plus standardized third and fourth moments.
/// A distribution concentrated at one value reports skewness and excess
/// kurtosis 0.
pub fn count_moments(n: usize, counts: &BTreeMap<u64, BigUint>) -> Result<MomentsReport> {
    let total: BigInt = counts.values().map(|c| BigInt::from(c.clone())).sum();
    if total.is_zero() {
        return invalid("moments of an empty table");
    }
    let mut raw = [
        BigInt::zero(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::zero(),
    ];
    for (&k, c) in counts {
        let c = BigInt::from(c.clone());
        let mut w = BigInt::from(k);
        for r in raw.iter_mut() {
            *r += &w * &c;
            w *= k;
        }
    }
    let [s1, s2, s3, s4] = raw.map(|s| ratio(&s, &total));
    let mean = s1;
    let m2 = &s2 - &mean * &mean;
    let three = BigRational::from_integer(3.into());
    let m3 = &s3 - &three * &mean * &s2 + BigRational::from_integer(2.into()) * mean.pow(3);
    let m4 = &s4 - BigRational::from_integer(4.into()) * &mean * &s3
        + BigRational::from_integer(6.into()) * mean.pow(2) * &s2
        - &three * mean.pow(4);
    let (skewness, excess_kurtosis) = if m2.is_zero() {
        (0.0, 0.0)
    } else {
        let v = to_f64(&m2);
        (
            to_f64(&m3) / v.powf(1.5),
            to_f64(&(&m4 / (&m2 * &m2))) - 3.0,
        )
    };
    Ok(MomentsReport {
        n,
        mean,
        variance: m2,
        skewness,
        excess_kurtosis,
    })
}

pub fn table_moments(t: &OccurrenceTable) -> Result<MomentsReport> {
    count_moments(t.n, &t.counts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub count: usize,
}

/// Ordinary least squares; a perfect fit (including constant `y`) has
/// `r_squared = 1`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<RegressionResult> {
    if points.len() < 2 {
        return invalid("a linear fit needs at least 2 points");
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("a linear fit needs non-constant x");
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(RegressionResult {
        slope,
        intercept,
        r_squared,
        count: points.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurveyRow {
    /// Parent-array text, rooted at a center.
    pub tree: String,
    pub n: usize,
    pub zagreb: u64,
    pub ee: f64,
    /// `M_2, M_4, ..., M_{2K}`.
    pub even_moments: Vec<BigUint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstradaSurvey {
    pub n: usize,
    pub delta: usize,
    pub rows: Vec<SurveyRow>,
    pub mean_ee_per_n: f64,
    /// Population standard deviation of `EE / n`.
    pub std_ee_per_n: f64,
    /// `EE ~ D` over all trees; absent when `D` is constant.
    pub fit: Option<RegressionResult>,
}

impl SurveyRow {
    pub fn header(k_terms: usize) -> Vec<String> {
        let mut h: Vec<String> = ["tree", "n", "D", "EE"].map(String::from).to_vec();
        h.extend((1..=k_terms).map(|k| format!("M_{}", 2 * k)));
        h
    }

    pub fn record(&self) -> Vec<String> {
        let mut r = vec![
            self.tree.clone(),
            self.n.to_string(),
            self.zagreb.to_string(),
            format!("{:.12}", self.ee),
        ];
        r.extend(self.even_moments.iter().map(|m| m.to_string()));
        r
    }
}

fn survey_row(t: &FreeTree, k_terms: usize) -> Result<SurveyRow> {
    let m = walk_moments(t, 2 * k_terms);
    Ok(SurveyRow {
        tree: free_tree_text(t),
        n: t.len(),
        zagreb: zagreb(t),
        ee: eigenvalues(t)?.iter().map(|l| l.exp()).sum(),
        even_moments: (1..=k_terms).map(|k| m[2 * k].clone()).collect(),
    })
}

/// Estrada index and Zagreb index of every free tree of order `n` with
/// maximum degree at most `delta`.
pub fn estrada_survey(n: usize, delta: usize, k_terms: usize) -> Result<EstradaSurvey> {
    let trees = enumerate_trees(TreeKind::Free, n, delta)?;
    let rows: Vec<SurveyRow> = trees
        .par_iter()
        .map(|t| survey_row(&t.tree, k_terms))
        .collect::<Result<_>>()?;
    let per_n: Vec<f64> = rows.iter().map(|r| r.ee / n as f64).collect();
    let count = per_n.len() as f64;
    let mean = per_n.iter().sum::<f64>() / count;
    let var = per_n.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.zagreb as f64, r.ee)).collect();
    Ok(EstradaSurvey {
        n,
        delta,
        fit: linear_fit(&points).ok(),
        rows,
        mean_ee_per_n: mean,
        std_ee_per_n: var.sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticRow {
    pub n: usize,
    pub trees: BigUint,
    pub mean: BigRational,
    pub variance: BigRational,
    pub mean_over_n: f64,
    pub variance_over_n: f64,
    /// Fraction of free trees with `|X_n - E X_n| > n^{3/4}`.
    pub far_fraction: f64,
    /// `Var(X_n) / n^{3/2}`, the Chebyshev bound on that fraction.
    pub chebyshev_bound: f64,
    pub rooted_skewness: f64,
    pub planted_skewness: f64,
}

impl AsymptoticRow {
    pub const HEADER: [&'static str; 9] = [
        "n",
        "trees",
        "mean_over_n",
        "variance_over_n",
        "far_fraction",
        "chebyshev_bound",
        "rooted_skewness",
        "planted_skewness",
        "mean",
    ];

    pub fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.trees.to_string(),
            format!("{:.12}", self.mean_over_n),
            format!("{:.12}", self.variance_over_n),
            format!("{:.12}", self.far_fraction),
            format!("{:.12}", self.chebyshev_bound),
            format!("{:.12}", self.rooted_skewness),
            format!("{:.12}", self.planted_skewness),
            self.mean.to_string(),
        ]
    }
}

/// Finite-size concentration and shape diagnostics for the occurrence count
/// of `h` over exhaustive tables.
pub fn asymptotic_checks(
    h: &FreeTree,
    delta: usize,
    n_range: RangeInclusive<usize>,
) -> Result<Vec<AsymptoticRow>> {
    let mode = OccurrenceMode::default();
    n_range
        .map(|n| {
            let free = occurrence_distribution(TreeKind::Free, n, delta, h, mode)?;
            let rooted = occurrence_distribution(TreeKind::Rooted, n, delta, h, mode)?;
            let planted = occurrence_distribution(TreeKind::Planted, n, delta, h, mode)?;
            let m = table_moments(&free)?;
            let threshold = (n as f64).powf(0.75);
            let mean = to_f64(&m.mean);
            let far: BigUint = free
                .counts
                .iter()
                .filter(|(&k, _)| (k as f64 - mean).abs() > threshold)
                .map(|(_, c)| c.clone())
                .sum();
            let total = free.total();
            let var = to_f64(&m.variance);
            Ok(AsymptoticRow {
                n,
                far_fraction: ratio(&far.into(), &total.clone().into())
                    .to_f64()
                    .unwrap_or(f64::NAN),
                trees: total,
                mean_over_n: mean / n as f64,
                variance_over_n: var / n as f64,
                chebyshev_bound: var / (n as f64).powf(1.5),
                rooted_skewness: table_moments(&rooted)?.skewness,
                planted_skewness: table_moments(&planted)?.skewness,
                mean: m.mean,
                variance: m.variance,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_free;

    fn table(pairs: &[(u64, u32)]) -> BTreeMap<u64, BigUint> {
        pairs.iter().map(|&(k, c)| (k, BigUint::from(c))).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_tables() {
        let m = count_moments(0, &table(&[(0, 1), (2, 1)])).unwrap();
        assert_eq!((m.mean, m.variance), (q(1, 1), q(1, 1)));
        let m = count_moments(0, &table(&[(5, 7)])).unwrap();
        assert_eq!((m.mean, m.variance), (q(5, 1), q(0, 1)));
        assert_eq!((m.skewness, m.excess_kurtosis), (0.0, 0.0));
        assert!(count_moments(0, &BTreeMap::new()).is_err());
        let p3 = parse_free("0 1").unwrap();
        let t =
            occurrence_distribution(TreeKind::Free, 4, 4, &p3, OccurrenceMode::default()).unwrap();
        let m = table_moments(&t).unwrap();
        assert_eq!((m.mean, m.variance), (q(5, 2), q(1, 4)));
    }

    #[test]
    fn fits() {
        let line: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 * i as f64 + 1.0)).collect();
        let f = linear_fit(&line).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
        let flat = linear_fit(&[(0.0, 2.0), (1.0, 2.0)]).unwrap();
        assert_eq!((flat.slope, flat.r_squared), (0.0, 1.0));
        let f = linear_fit(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12 && (f.intercept - 1.0 / 6.0).abs() < 1e-12);
        assert!(linear_fit(&[(1.0, 0.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn small_surveys() {
        let s = estrada_survey(4, 4, 3).unwrap();
        assert_eq!(s.rows.len(), 2);
        let mut by_d: Vec<(u64, f64)> = s.rows.iter().map(|r| (r.zagreb, r.ee)).collect();
        by_d.sort_by_key(|a| a.0);
        assert_eq!(by_d[0].0, 10);
        assert!((by_d[0].1 - 7.6352).abs() < 1e-3);
        assert_eq!(by_d[1].0, 12);
        assert!((by_d[1].1 - 7.8290).abs() < 1e-3);
        assert!((s.mean_ee_per_n - (by_d[0].1 + by_d[1].1) / 8.0).abs() < 1e-12);
        let two = estrada_survey(2, 4, 3).unwrap();
        assert_eq!(two.rows.len(), 1);
        assert!(two.fit.is_none());
    }

    #[test]
    fn edge_counts_are_concentrated() {
        let rows = asymptotic_checks(&parse_free("0").unwrap(), 4, 3..=6).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.far_fraction == 0.0 && r.variance.is_zero()));
    }
}
