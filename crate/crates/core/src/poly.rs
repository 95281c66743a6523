//! Sparse real polynomials in two variables.

use alloc::collections::BTreeMap;
use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

/// Highest degree for which evaluation uses stack power tables.
const POW_TABLE: usize = 32;

/// A polynomial `Σ c_{i,j} x^i y^j` stored sparsely.
///
/// No stored coefficient is ever exactly zero, so two polynomials are equal
/// as values iff their term maps are equal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BivariatePoly {
    terms: BTreeMap<(usize, usize), f64>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(i: usize, j: usize, coeff: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, coeff);
        p
    }

    /// Builds a polynomial from `(i, j, coeff)` triples; repeated exponents add up.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// Adds `coeff · x^i y^j`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, i: usize, j: usize, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Terms in lexicographic `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let Some(deg) = self.degree() else {
            return 0.0;
        };
        if deg <= POW_TABLE {
            let mut xp = [1.0; POW_TABLE + 1];
            let mut yp = [1.0; POW_TABLE + 1];
            for k in 1..=deg {
                xp[k] = xp[k - 1] * x;
                yp[k] = yp[k - 1] * y;
            }
            self.terms
                .iter()
                .map(|(&(i, j), &c)| c * xp[i] * yp[j])
                .sum()
        } else {
            self.terms
                .iter()
                .map(|(&(i, j), &c)| c * x.powi(i as i32) * y.powi(j as i32))
                .sum()
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_terms(self.terms().map(|(i, j, c)| (i, j, c * factor)))
    }

    pub fn d_dx(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(i, _, _)| i > 0)
                .map(|(i, j, c)| (i - 1, j, c * i as f64)),
        )
    }

    pub fn d_dy(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(_, j, _)| j > 0)
                .map(|(i, j, c)| (i, j - 1, c * j as f64)),
        )
    }

    /// Keeps only the terms whose total degree satisfies `keep`.
    pub fn filter_degree(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        Self::from_terms(self.terms().filter(|&(i, j, _)| keep(i + j)))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, c);
        }
        out
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        self.scale(-1.0)
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (i, j, a) in self.terms() {
            for (k, l, b) in rhs.terms() {
                out.add_term(i + k, j + l, a * b);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BivariatePoly {
            type Output = BivariatePoly;
            fn $m(self, rhs: BivariatePoly) -> BivariatePoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_polynomial_evaluates_to_zero() {
        let p = BivariatePoly::zero();
        assert_eq!(p.eval(0.3, -7.0), 0.0);
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn identity_monomial() {
        let p = BivariatePoly::monomial(1, 0, 1.0);
        assert_eq!(p.eval(0.5, 0.7), 0.5);
    }

    #[test]
    fn cubic_vanishes_on_diagonal_point() {
        let p = BivariatePoly::from_terms([(3, 0, 1.0), (1, 2, -1.0)]);
        assert_eq!(p.eval(1.0, 1.0), 0.0);
        assert_eq!(p.degree(), Some(3));
    }

    #[test]
    fn cancellation_keeps_canonical_form() {
        let mut p = BivariatePoly::monomial(2, 1, 3.0);
        p.add_term(2, 1, -3.0);
        assert!(p.is_zero());
        p.add_term(0, 0, 0.0);
        assert!(p.is_zero());
    }

    #[test]
    fn product_and_derivatives() {
        // (x + y)^2 = x^2 + 2xy + y^2
        let s = BivariatePoly::from_terms([(1, 0, 1.0), (0, 1, 1.0)]);
        let sq = &s * &s;
        assert_eq!(sq.coeff(1, 1), 2.0);
        assert_eq!(
            sq.d_dx(),
            BivariatePoly::from_terms([(1, 0, 2.0), (0, 1, 2.0)])
        );
        assert_eq!(sq.d_dy(), sq.d_dx());
    }

    #[test]
    fn high_degree_eval_uses_powi_path() {
        let p = BivariatePoly::monomial(40, 1, 1.0);
        let v = p.eval(1.01, 2.0);
        assert!((v - 2.0 * 1.01f64.powi(40)).abs() < 1e-12 * v);
    }
}
