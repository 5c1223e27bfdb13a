//! Truncated multivariate Taylor arithmetic.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::PointSymbol;
use crate::error::{Error, Result};

/// Largest jet order accepted by [`jet_eval`].
pub const MAX_JET_ORDER: u32 = 12;

/// Monomial indexing and multiplication table for jets in `nvars`
/// variables truncated at total degree `order`.
#[derive(Debug)]
pub struct JetLayout {
    nvars: usize,
    order: u32,
    monomials: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
    factorials: Vec<f64>,
    pairs: Vec<(u32, u32, u32)>,
}

impl JetLayout {
    pub fn new(nvars: usize, order: u32) -> Arc<Self> {
        let mut monomials = Vec::new();
        for k in 0..=order {
            monomials.extend(crate::multiindex::exact_order(nvars, k).into_iter().map(|m| m.0));
        }
        let index: BTreeMap<Vec<u32>, usize> = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let degrees: Vec<u32> = monomials.iter().map(|m| m.iter().sum()).collect();
        let factorials =
            monomials.iter().map(|m| m.iter().map(|&e| (1..=e).map(f64::from).product::<f64>()).product()).collect();
        let mut pairs = Vec::new();
        let mut sum = vec![0u32; nvars];
        for (i, mi) in monomials.iter().enumerate() {
            for (j, mj) in monomials.iter().enumerate() {
                // monomials are sorted by degree
                if degrees[i] + degrees[j] > order {
                    break;
                }
                for v in 0..nvars {
                    sum[v] = mi[v] + mj[v];
                }
                pairs.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        Arc::new(JetLayout { nvars, order, monomials, index, factorials, pairs })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

/// A truncated Taylor series around a fixed point.
#[derive(Clone, Debug)]
pub struct Jet {
    layout: Arc<JetLayout>,
    c: Vec<Complex64>,
}

impl Jet {
    pub fn constant(layout: &Arc<JetLayout>, v: Complex64) -> Self {
        let mut c = vec![Complex64::zero(); layout.len()];
        c[0] = v;
        Jet { layout: layout.clone(), c }
    }

    /// The coordinate function `t_var` expanded around `x0`.
    pub fn variable(layout: &Arc<JetLayout>, var: usize, x0: f64) -> Self {
        let mut j = Self::constant(layout, Complex64::new(x0, 0.0));
        if layout.order > 0 {
            let mut e = vec![0u32; layout.nvars];
            e[var] = 1;
            j.c[layout.index[&e]] = Complex64::one();
        }
        j
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.c
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet { layout: self.layout.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Jet { layout: self.layout.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        Jet { layout: self.layout.clone(), c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Jet { layout: self.layout.clone(), c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn add_const(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![Complex64::zero(); self.c.len()];
        for &(i, j, k) in &self.layout.pairs {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Jet { layout: self.layout.clone(), c }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut result = Self::constant(&self.layout, Complex64::one());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `Σ_k f[k] (self − self(0))^k`, given the Taylor coefficients `f` of a
    /// univariate function at `self(0)`.
    pub fn compose_series(&self, f: &[Complex64]) -> Self {
        let mut delta = self.clone();
        delta.c[0] = Complex64::zero();
        let k = (self.layout.order as usize).min(f.len().saturating_sub(1));
        let mut r = Self::constant(&self.layout, f[k]);
        for i in (0..k).rev() {
            r = r.mul(&delta);
            r.c[0] += f[i];
        }
        r
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        let mut f = Vec::with_capacity(self.layout.order as usize + 1);
        let mut fact = 1.0;
        for k in 0..=self.layout.order {
            if k > 0 {
                fact *= f64::from(k);
            }
            f.push(e / fact);
        }
        self.compose_series(&f)
    }

    pub fn ln(&self) -> Result<Self> {
        let u0 = self.nonzero_value("ln")?;
        let mut f = vec![u0.ln()];
        let mut p = Complex64::one();
        for k in 1..=self.layout.order {
            p *= u0;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            f.push(Complex64::new(sign / f64::from(k), 0.0) / p);
        }
        Ok(self.compose_series(&f))
    }

    /// `self^r` for real or complex `r` via the principal branch.
    pub fn powc(&self, r: Complex64) -> Result<Self> {
        let u0 = self.nonzero_value("pow")?;
        let mut f = Vec::with_capacity(self.layout.order as usize + 1);
        let mut coef = Complex64::one();
        for k in 0..=self.layout.order {
            if k > 0 {
                coef = coef * (r - f64::from(k - 1)) / f64::from(k);
            }
            f.push(coef * u0.powc(r - f64::from(k)));
        }
        Ok(self.compose_series(&f))
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.powc(Complex64::new(0.5, 0.0))
    }

    pub fn recip(&self) -> Result<Self> {
        let u0 = self.nonzero_value("reciprocal")?;
        let inv = u0.inv();
        let mut f = Vec::with_capacity(self.layout.order as usize + 1);
        let mut p = inv;
        for k in 0..=self.layout.order {
            f.push(if k % 2 == 0 { p } else { -p });
            p *= inv;
        }
        Ok(self.compose_series(&f))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    fn nonzero_value(&self, _op: &'static str) -> Result<Complex64> {
        let u0 = self.c[0];
        if u0.norm() == 0.0 {
            return Err(Error::Vanishing { point: Vec::new() });
        }
        Ok(u0)
    }

    pub fn into_table(self) -> JetTable {
        JetTable { layout: self.layout, c: self.c }
    }
}

/// All mixed partials of a symbol at one point.
#[derive(Clone, Debug)]
pub struct JetTable {
    layout: Arc<JetLayout>,
    c: Vec<Complex64>,
}

impl JetTable {
    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn into_jet(self) -> Jet {
        Jet { layout: self.layout, c: self.c }
    }

    /// `∂^e f` at the expansion point, or `None` beyond the jet order.
    pub fn partial(&self, exps: &[u32]) -> Option<Complex64> {
        self.layout.index_of(exps).map(|i| self.c[i] * self.layout.factorials[i])
    }

    /// Iterates `(exponents, ∂^exponents f)` over the whole table.
    pub fn partials(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.layout.monomials.iter().zip(&self.c).zip(&self.layout.factorials).map(|((m, c), f)| (m.as_slice(), c * f))
    }
}

/// All partials `∂^α_x ∂^β_ξ a`, `|α+β| ≤ order`, at `point`.
pub fn jet_eval<P: PointSymbol + ?Sized>(a: &P, point: &[f64], order: u32) -> Result<JetTable> {
    if order > MAX_JET_ORDER {
        return Err(Error::pre("jet_eval", alloc::format!("order {order} exceeds {MAX_JET_ORDER}")));
    }
    if point.len() != 2 * a.dim() {
        return Err(Error::Dimension { expected: 2 * a.dim(), found: point.len() });
    }
    let layout = JetLayout::new(point.len(), order);
    a.jets(&layout, point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn exp_at_zero_has_unit_derivatives() {
        let l = JetLayout::new(1, 3);
        let e = Jet::variable(&l, 0, 0.0).exp().into_table();
        for k in 0..=3 {
            assert_relative_eq!(e.partial(&[k]).unwrap().re, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn product_rule_matches() {
        let l = JetLayout::new(2, 2);
        let x = Jet::variable(&l, 0, 1.0);
        let xi = Jet::variable(&l, 1, 2.0);
        let t = x.mul(&xi).into_table();
        assert_eq!(t.partial(&[1, 1]).unwrap(), c(1.0));
        assert_eq!(t.partial(&[2, 0]).unwrap(), c(0.0));
        assert_eq!(t.partial(&[1, 0]).unwrap(), c(2.0));
        assert!(t.partial(&[2, 1]).is_none());
    }

    #[test]
    fn reciprocal_and_log_series() {
        let l = JetLayout::new(1, 5);
        let x = Jet::variable(&l, 0, 2.0);
        let r = x.recip().unwrap().into_table();
        // d^k/dx^k 1/x = (-1)^k k! / x^{k+1}
        let mut fact = 1.0;
        for k in 0..=5u32 {
            if k > 0 {
                fact *= f64::from(k);
            }
            let expect = (-1f64).powi(k as i32) * fact / 2f64.powi(k as i32 + 1);
            assert_relative_eq!(r.partial(&[k]).unwrap().re, expect, max_relative = 1e-13);
        }
        let lg = x.ln().unwrap().into_table();
        assert_relative_eq!(lg.partial(&[1]).unwrap().re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(lg.partial(&[2]).unwrap().re, -0.25, max_relative = 1e-14);
        let s = x.sqrt().unwrap().into_table();
        assert_relative_eq!(s.partial(&[1]).unwrap().re, 0.5 / 2f64.sqrt(), max_relative = 1e-14);
        assert!(Jet::constant(&l, c(0.0)).recip().is_err());
    }
}
