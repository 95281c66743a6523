use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Largest accepted ratio `max|R_kk| / min|R_kk|` after column scaling.
pub const DEFAULT_MAX_CONDITION: f64 = 1e13;

#[derive(Debug, Clone, PartialEq)]
pub struct LsqFit {
    pub coefficients: Vec<f64>,
    /// Maximum absolute residual on the fitting points.
    pub residual: f64,
    /// Condition estimate of the column-scaled design.
    pub condition: f64,
}

impl LsqFit {
    /// Evaluates the fitted combination of `basis` at `x`.
    pub fn predict(&self, basis: &[&dyn Fn(f64) -> f64], x: f64) -> f64 {
        basis
            .iter()
            .zip(&self.coefficients)
            .map(|(b, c)| c * b(x))
            .sum()
    }
}

/// Least-squares coefficients of `ys ≈ Σ c_k basis_k(xs)`.
pub fn lsq_fit(basis: &[&dyn Fn(f64) -> f64], xs: &[f64], ys: &[f64]) -> Result<LsqFit> {
    lsq_fit_with(basis, xs, ys, DEFAULT_MAX_CONDITION)
}

pub fn lsq_fit_with(
    basis: &[&dyn Fn(f64) -> f64],
    xs: &[f64],
    ys: &[f64],
    max_condition: f64,
) -> Result<LsqFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(
            "sample abscissae and ordinates differ in length",
        ));
    }
    if basis.is_empty() || xs.len() < 2 * basis.len() {
        return Err(Error::InvalidArgument(
            "need at least twice as many samples as basis functions",
        ));
    }
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| basis.iter().map(|b| b(x)).collect())
        .collect();
    lsq_solve(&rows, ys, max_condition)
}

/// Solves the over- or exactly-determined system `rows · c ≈ rhs` with
/// Householder QR on the column-scaled matrix.
pub fn lsq_solve(rows: &[Vec<f64>], rhs: &[f64], max_condition: f64) -> Result<LsqFit> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || m < n || rhs.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("malformed least-squares system"));
    }

    // Column-major copy, each column scaled to unit 2-norm.
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|c| rows.iter().map(|r| r[c]).collect())
        .collect();
    let mut col_scale = vec![0.0; n];
    for (c, col) in a.iter_mut().enumerate() {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::RankDeficient {
                condition: f64::INFINITY,
            });
        }
        col.iter_mut().for_each(|v| *v /= norm);
        col_scale[c] = norm;
    }
    let mut b = rhs.to_vec();

    let mut diag = vec![0.0; n];
    for k in 0..n {
        let alpha_norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = if a[k][k] > 0.0 {
            -alpha_norm
        } else {
            alpha_norm
        };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(k) {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(p, q)| p * q).sum();
            let s = 2.0 * dot / vnorm2;
            col[k..].iter_mut().zip(&v).for_each(|(x, vi)| *x -= s * vi);
        }
        let dot: f64 = v.iter().zip(&b[k..]).map(|(p, q)| p * q).sum();
        let s = 2.0 * dot / vnorm2;
        b[k..].iter_mut().zip(&v).for_each(|(x, vi)| *x -= s * vi);
    }

    let max_d = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    let min_d = diag.iter().fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
    let condition = if min_d == 0.0 {
        f64::INFINITY
    } else {
        max_d / min_d
    };
    if condition.is_nan() || condition > max_condition {
        return Err(Error::RankDeficient { condition });
    }

    let mut coeffs = vec![0.0; n];
    for k in (0..n).rev() {
        let tail: f64 = ((k + 1)..n).map(|c| a[c][k] * coeffs[c]).sum();
        coeffs[k] = (b[k] - tail) / a[k][k];
    }
    for (c, s) in coeffs.iter_mut().zip(&col_scale) {
        *c /= s;
    }

    let residual = rows
        .iter()
        .zip(rhs)
        .map(|(r, y)| (r.iter().zip(&coeffs).map(|(p, q)| p * q).sum::<f64>() - y).abs())
        .fold(0.0f64, f64::max);

    Ok(LsqFit {
        coefficients: coeffs,
        residual,
        condition,
    })
}
