//! Sparse multivariate polynomials over a [`Scalar`] ring.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `Σ c_e · v^e` with exponent vectors `e` of length `nvars`.
///
/// Zero coefficients are never stored; the `BTreeMap` keeps keys in
/// canonical (lexicographic) order, so structural equality is equality of
/// polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePoly<S> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, S>,
}

impl<S: Scalar> SparsePoly<S> {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Vec<u32>, c: S) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, S::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, S)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension { expected: nvars, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> S {
        self.terms.get(exps).cloned().unwrap_or_else(S::zero)
    }

    /// Adds `c · v^exps`, dropping the entry if it cancels.
    pub fn add_term(&mut self, exps: Vec<u32>, c: S) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.nvars, S::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `∂^k / ∂v_var^k`.
    pub fn partial(&self, var: usize, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] < k {
                continue;
            }
            let falling: BigInt = (0..k).map(|i| BigInt::from(e[var] - i)).product();
            let mut ne = e.clone();
            ne[var] -= k;
            out.add_term(ne, c.clone() * S::from_rational(&falling.into()));
        }
        out
    }

    /// Applies `∂^{orders[i]}` in every variable.
    pub fn partial_multi(&self, orders: &[u32]) -> Self {
        debug_assert_eq!(orders.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        'terms: for (e, c) in &self.terms {
            let mut factor = BigInt::from(1);
            let mut ne = e.clone();
            for (i, &k) in orders.iter().enumerate() {
                if e[i] < k {
                    continue 'terms;
                }
                for j in 0..k {
                    factor *= BigInt::from(e[i] - j);
                }
                ne[i] -= k;
            }
            out.add_term(ne, c.clone() * S::from_rational(&factor.into()));
        }
        out
    }

    /// Total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent per variable.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0; self.nvars];
        for e in self.terms.keys() {
            for (mi, &ei) in m.iter_mut().zip(e) {
                *mi = (*mi).max(ei);
            }
        }
        m
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparsePoly<T> {
        let mut out = SparsePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Reorders or regroups variables: the new exponent vector of each term is
    /// `f(old)`; terms landing on the same key are summed.
    pub fn remap(&self, nvars: usize, f: impl Fn(&[u32]) -> Vec<u32>) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        debug_assert_eq!(point.len(), self.nvars);
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = c.to_c64();
            for (&x, &k) in point.iter().zip(e) {
                if k > 0 {
                    term *= x.powu(k);
                }
            }
            sum += term;
        }
        sum
    }

    pub fn eval_real(&self, point: &[f64]) -> Complex64 {
        let pt: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.eval(&pt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use num_traits::{One, Zero};

    fn c(n: i64) -> Exact {
        Exact::from_int(n)
    }

    #[test]
    fn arithmetic_cancels_to_zero() {
        let x = SparsePoly::<Exact>::var(2, 0);
        let y = SparsePoly::<Exact>::var(2, 1);
        let xy = x.mul(&y);
        assert!(xy.add(&xy.neg()).is_zero());
        assert_eq!(xy.coeff(&[1, 1]), Exact::one());
        assert_eq!(xy.degree(), 2);
    }

    #[test]
    fn partial_derivatives() {
        // p = 3 x^2 y^3
        let p = SparsePoly::monomial(vec![2, 3], c(3));
        let dx = p.partial(0, 1);
        assert_eq!(dx.coeff(&[1, 3]), c(6));
        let dxdy2 = p.partial_multi(&[1, 2]);
        assert_eq!(dxdy2.coeff(&[1, 1]), c(36));
        assert!(p.partial(0, 3).is_zero());
        assert_eq!(p.partial_multi(&[0, 0]), p);
    }

    #[test]
    fn evaluation() {
        let p = SparsePoly::from_terms(2, [(vec![1, 0], c(2)), (vec![0, 2], c(-1)), (vec![0, 0], c(5))]).unwrap();
        let v = p.eval_real(&[1.5, 2.0]);
        assert!((v.re - (3.0 - 4.0 + 5.0)).abs() < 1e-15);
        assert!(v.im.is_zero());
    }
}
