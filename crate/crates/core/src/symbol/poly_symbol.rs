use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::jet::{Jet, JetLayout, JetTable};
use super::{PointSymbol, SymbolAlgebra};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::SparsePoly;
use crate::scalar::{Exact, Float, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivKind {
    /// Plain partial derivatives `∂`.
    Partial,
    /// `D = -i ∂` in every differentiated variable.
    D,
}

/// Polynomial symbol `a(x, ξ) = Σ c_{αβ} x^α ξ^β` in `d` dimensions.
///
/// Variables are laid out as `(x₁ … x_d, ξ₁ … ξ_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySymbol<S> {
    d: usize,
    poly: SparsePoly<S>,
}

impl<S: Scalar> PolySymbol<S> {
    pub fn zero(d: usize) -> Self {
        PolySymbol { d, poly: SparsePoly::zero(2 * d) }
    }

    pub fn constant(d: usize, c: S) -> Self {
        PolySymbol { d, poly: SparsePoly::constant(2 * d, c) }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, S::one())
    }

    /// `c · x^α ξ^β`.
    pub fn monomial(alpha: &MultiIndex, beta: &MultiIndex, c: S) -> Self {
        let d = alpha.dim();
        let exps = alpha.0.iter().chain(&beta.0).copied().collect();
        PolySymbol { d, poly: SparsePoly::monomial(exps, c) }
    }

    pub fn x(d: usize, i: usize) -> Self {
        PolySymbol { d, poly: SparsePoly::var(2 * d, i) }
    }

    pub fn xi(d: usize, i: usize) -> Self {
        PolySymbol { d, poly: SparsePoly::var(2 * d, d + i) }
    }

    pub fn from_poly(d: usize, poly: SparsePoly<S>) -> Result<Self> {
        if poly.nvars() != 2 * d {
            return Err(Error::Dimension { expected: 2 * d, found: poly.nvars() });
        }
        Ok(PolySymbol { d, poly })
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Vec<u32>, Vec<u32>, S)>) -> Result<Self> {
        let mut out = Self::zero(d);
        for (a, b, c) in terms {
            if a.len() != d || b.len() != d {
                return Err(Error::Dimension { expected: d, found: if a.len() != d { a.len() } else { b.len() } });
            }
            out.poly.add_term(a.into_iter().chain(b).collect(), c);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn poly(&self) -> &SparsePoly<S> {
        &self.poly
    }

    /// Iterates `(α, β, c)` for the terms `c x^α ξ^β`.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, MultiIndex, &S)> {
        let d = self.d;
        self.poly.terms().map(move |(e, c)| (MultiIndex(e[..d].to_vec()), MultiIndex(e[d..].to_vec()), c))
    }

    pub fn coeff(&self, alpha: &MultiIndex, beta: &MultiIndex) -> S {
        let e: Vec<u32> = alpha.0.iter().chain(&beta.0).copied().collect();
        self.poly.coeff(&e)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn add(&self, other: &Self) -> Self {
        PolySymbol { d: self.d, poly: self.poly.add(&other.poly) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        PolySymbol { d: self.d, poly: self.poly.sub(&other.poly) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        PolySymbol { d: self.d, poly: self.poly.mul(&other.poly) }
    }

    pub fn neg(&self) -> Self {
        PolySymbol { d: self.d, poly: self.poly.neg() }
    }

    pub fn scale(&self, c: &S) -> Self {
        PolySymbol { d: self.d, poly: self.poly.scale(c) }
    }

    pub fn pow(&self, n: u32) -> Self {
        PolySymbol { d: self.d, poly: self.poly.pow(n) }
    }

    /// `∂^{dx}_x ∂^{dxi}_ξ a`, times `(-i)^{|dx|+|dxi|}` for [`DerivKind::D`].
    pub fn derive(&self, dx: &MultiIndex, dxi: &MultiIndex, kind: DerivKind) -> Self {
        let orders: Vec<u32> = dx.0.iter().chain(&dxi.0).copied().collect();
        let p = self.poly.partial_multi(&orders);
        let p = match kind {
            DerivKind::Partial => p,
            DerivKind::D => p.scale(&S::minus_i_pow(dx.order() + dxi.order())),
        };
        PolySymbol { d: self.d, poly: p }
    }

    /// `D^α_x ∂^β_ξ a`, the combination every expansion formula uses.
    pub fn d_x_partial_xi(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Self {
        let orders: Vec<u32> = alpha.0.iter().chain(&beta.0).copied().collect();
        let p = self.poly.partial_multi(&orders);
        PolySymbol { d: self.d, poly: p.scale(&S::minus_i_pow(alpha.order())) }
    }

    /// `a(x, -ξ)`.
    pub fn reflect_xi(&self) -> Self {
        let d = self.d;
        let mut poly = SparsePoly::zero(2 * d);
        for (e, c) in self.poly.terms() {
            let odd = e[d..].iter().sum::<u32>() % 2 == 1;
            poly.add_term(e.clone(), if odd { -c.clone() } else { c.clone() });
        }
        PolySymbol { d, poly }
    }

    /// Per-coordinate maximal `x` and `ξ` exponents.
    pub fn max_degrees(&self) -> (MultiIndex, MultiIndex) {
        let m = self.poly.max_exponents();
        (MultiIndex(m[..self.d].to_vec()), MultiIndex(m[self.d..].to_vec()))
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolySymbol<T> {
        PolySymbol { d: self.d, poly: self.poly.map_coeffs(f) }
    }

    pub fn to_float(&self) -> PolySymbol<Float> {
        self.map_coeffs(|c| c.to_c64())
    }

    /// Coefficientwise comparison at a relative tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = self.sub(other);
        let scale = self.poly.terms().map(|(_, c)| c.to_c64().norm()).fold(1.0, f64::max);
        let ok = diff.poly.terms().all(|(_, c)| c.to_c64().norm() <= tol * scale);
        ok
    }
}

impl PolySymbol<Exact> {
    /// The same symbol with floating point coefficients.
    pub fn demote(&self) -> PolySymbol<Float> {
        self.to_float()
    }
}

impl<S: Scalar> SymbolAlgebra<S> for PolySymbol<S> {
    fn dim(&self) -> usize {
        self.d
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.d)
    }
    fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
    fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        Ok(PolySymbol::add(self, other))
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        Ok(PolySymbol::mul(self, other))
    }
    fn scale(&self, c: &S) -> Self {
        PolySymbol::scale(self, c)
    }
    fn dx_dxi(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Self {
        self.d_x_partial_xi(alpha, beta)
    }
    fn derivative_bounds(&self) -> Option<(MultiIndex, MultiIndex)> {
        Some(self.max_degrees())
    }
}

pub(crate) fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension { expected: a, found: b });
    }
    Ok(())
}

impl<S: Scalar> PointSymbol for PolySymbol<S> {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, point: &[f64]) -> Complex64 {
        self.poly.eval_real(point)
    }

    fn jets(&self, layout: &Arc<JetLayout>, point: &[f64]) -> Result<JetTable> {
        Ok(poly_jet(&self.poly, layout, point)?.into_table())
    }
}

/// Evaluates a polynomial in jet arithmetic around `point`.
pub(crate) fn poly_jet<S: Scalar>(poly: &SparsePoly<S>, layout: &Arc<JetLayout>, point: &[f64]) -> Result<Jet> {
    let n = poly.nvars();
    if layout.nvars() != n || point.len() != n {
        return Err(Error::Dimension { expected: n, found: point.len().min(layout.nvars()) });
    }
    let maxe = poly.max_exponents();
    // powers[v][k] = (point_v + t_v)^k
    let mut powers: Vec<Vec<Jet>> = Vec::with_capacity(n);
    for v in 0..n {
        let var = Jet::variable(layout, v, point[v]);
        let mut list = alloc::vec![Jet::constant(layout, Complex64::new(1.0, 0.0))];
        for k in 1..=maxe[v] {
            let next = list[k as usize - 1].mul(&var);
            list.push(next);
        }
        powers.push(list);
    }
    let mut acc = Jet::constant(layout, Complex64::new(0.0, 0.0));
    for (e, c) in poly.terms() {
        let mut term = Jet::constant(layout, c.to_c64());
        for (v, &k) in e.iter().enumerate() {
            if k > 0 {
                term = term.mul(&powers[v][k as usize]);
            }
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use alloc::vec;
    use num_traits::Zero;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn d_x_of_x_is_minus_i() {
        let a = PolySymbol::<Exact>::x(1, 0);
        let da = a.derive(&mi(&[1]), &mi(&[0]), DerivKind::D);
        assert_eq!(da, PolySymbol::constant(1, -Exact::imag_unit()));
    }

    #[test]
    fn partial_xi_of_x_xi_squared() {
        // a = x ξ²  ->  2 x ξ
        let a = PolySymbol::monomial(&mi(&[1]), &mi(&[2]), Exact::from_int(1));
        let da = a.derive(&mi(&[0]), &mi(&[1]), DerivKind::Partial);
        assert_eq!(da, PolySymbol::monomial(&mi(&[1]), &mi(&[1]), Exact::from_int(2)));
    }

    #[test]
    fn arithmetic_examples() {
        let x = PolySymbol::<Exact>::x(1, 0);
        let xi = PolySymbol::<Exact>::xi(1, 0);
        let xxi = x.mul(&xi);
        assert!(xxi.add(&xxi.neg()).is_zero());
        assert_eq!(xxi.coeff(&mi(&[1]), &mi(&[1])), Exact::from_int(1));
        let half = Exact::from_rational(&rational(1, 2));
        assert_eq!(xxi.scale(&half).coeff(&mi(&[1]), &mi(&[1])), half);
    }

    #[test]
    fn reflection_flips_odd_xi_terms() {
        let a = PolySymbol::<Exact>::from_terms(
            1,
            [(vec![1], vec![1], Exact::from_int(1)), (vec![0], vec![2], Exact::from_int(3))],
        )
        .unwrap();
        let r = a.reflect_xi();
        assert_eq!(r.coeff(&mi(&[1]), &mi(&[1])), Exact::from_int(-1));
        assert_eq!(r.coeff(&mi(&[0]), &mi(&[2])), Exact::from_int(3));
        assert!(r.reflect_xi().sub(&a).is_zero());
        assert!(r.coeff(&mi(&[0]), &mi(&[0])).is_zero());
    }
}
