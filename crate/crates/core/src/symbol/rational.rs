use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::jet::{JetLayout, JetTable};
use super::poly_symbol::{check_dim, poly_jet, PolySymbol};
use super::{PointSymbol, SymbolAlgebra};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;

/// `numerator / base^power` with a base shared among related symbols.
#[derive(Clone, Debug)]
pub struct RationalSymbol<S> {
    numerator: PolySymbol<S>,
    base: Arc<PolySymbol<S>>,
    power: u32,
}

impl<S: Scalar> RationalSymbol<S> {
    pub fn new(numerator: PolySymbol<S>, base: Arc<PolySymbol<S>>, power: u32) -> Result<Self> {
        if base.is_zero() {
            return Err(Error::pre("rational symbol", "base is the zero polynomial"));
        }
        check_dim(base.dim(), numerator.dim())?;
        Ok(RationalSymbol { numerator, base, power })
    }

    pub fn from_poly(numerator: PolySymbol<S>, base: Arc<PolySymbol<S>>) -> Result<Self> {
        Self::new(numerator, base, 0)
    }

    /// `1 / base`.
    pub fn recip_base(base: Arc<PolySymbol<S>>) -> Result<Self> {
        let d = base.dim();
        Self::new(PolySymbol::one(d), base, 1)
    }

    pub fn numerator(&self) -> &PolySymbol<S> {
        &self.numerator
    }

    pub fn base(&self) -> &Arc<PolySymbol<S>> {
        &self.base
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base {
            Ok(())
        } else {
            Err(Error::MixedBases)
        }
    }

    /// The numerator rewritten over `base^k`, `k ≥ power`.
    pub fn numerator_over(&self, k: u32) -> PolySymbol<S> {
        let mut n = self.numerator.clone();
        for _ in self.power..k {
            n = n.mul(&self.base);
        }
        n
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let k = self.power.max(other.power);
        let n = self.numerator_over(k).add(&other.numerator_over(k));
        Ok(RationalSymbol { numerator: n, base: self.base.clone(), power: k })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalSymbol { numerator: self.numerator.neg(), base: self.base.clone(), power: self.power }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        Ok(RationalSymbol {
            numerator: self.numerator.mul(&other.numerator),
            base: self.base.clone(),
            power: self.power + other.power,
        })
    }

    pub fn mul_poly(&self, p: &PolySymbol<S>) -> Self {
        RationalSymbol { numerator: self.numerator.mul(p), base: self.base.clone(), power: self.power }
    }

    pub fn scale(&self, c: &S) -> Self {
        RationalSymbol { numerator: self.numerator.scale(c), base: self.base.clone(), power: self.power }
    }

    /// Exact equality of the represented functions.
    pub fn value_eq(&self, other: &Self) -> Result<bool> {
        self.same_base(other)?;
        let k = self.power.max(other.power);
        Ok(self.numerator_over(k) == other.numerator_over(k))
    }

    /// One plain partial derivative in variable `v` of `(x, ξ)`:
    /// `(∂N·p − k N ∂p) / p^{k+1}`.
    fn partial_once(&self, v: usize) -> Self {
        let n = 2 * self.dim();
        let mut e = alloc::vec![0u32; n];
        e[v] = 1;
        let dn = PolySymbol::from_poly(self.dim(), self.numerator.poly().partial_multi(&e)).expect("dim");
        if self.power == 0 {
            return RationalSymbol { numerator: dn, base: self.base.clone(), power: 0 };
        }
        let dp = PolySymbol::from_poly(self.dim(), self.base.poly().partial_multi(&e)).expect("dim");
        let k = S::from_int(i64::from(self.power));
        let numerator = dn.mul(&self.base).sub(&self.numerator.mul(&dp).scale(&k));
        RationalSymbol { numerator, base: self.base.clone(), power: self.power + 1 }
    }

    fn partial(&self, dx: &MultiIndex, dxi: &MultiIndex) -> Self {
        let d = self.dim();
        let mut out = self.clone();
        for (v, &k) in dx.0.iter().chain(&dxi.0).enumerate() {
            for _ in 0..k {
                if out.is_zero() {
                    return RationalSymbol { numerator: PolySymbol::zero(d), base: self.base.clone(), power: 0 };
                }
                out = out.partial_once(v);
            }
        }
        out
    }

    pub fn derive(&self, dx: &MultiIndex, dxi: &MultiIndex, kind: super::DerivKind) -> Self {
        let out = self.partial(dx, dxi);
        match kind {
            super::DerivKind::Partial => out,
            super::DerivKind::D => out.scale(&S::minus_i_pow(dx.order() + dxi.order())),
        }
    }

    pub fn dim(&self) -> usize {
        self.numerator.dim()
    }

    pub fn to_float(&self) -> RationalSymbol<crate::scalar::Float> {
        RationalSymbol { numerator: self.numerator.to_float(), base: Arc::new(self.base.to_float()), power: self.power }
    }
}

impl<S: Scalar> SymbolAlgebra<S> for RationalSymbol<S> {
    fn dim(&self) -> usize {
        self.numerator.dim()
    }
    fn zero_like(&self) -> Self {
        RationalSymbol { numerator: PolySymbol::zero(self.dim()), base: self.base.clone(), power: 0 }
    }
    fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
    fn add(&self, other: &Self) -> Result<Self> {
        RationalSymbol::add(self, other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        RationalSymbol::mul(self, other)
    }
    fn scale(&self, c: &S) -> Self {
        RationalSymbol::scale(self, c)
    }
    fn dx_dxi(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Self {
        self.partial(alpha, beta).scale(&S::minus_i_pow(alpha.order()))
    }
    fn derivative_bounds(&self) -> Option<(MultiIndex, MultiIndex)> {
        if self.power == 0 {
            Some(self.numerator.max_degrees())
        } else {
            None
        }
    }
}

impl<S: Scalar> PointSymbol for RationalSymbol<S> {
    fn dim(&self) -> usize {
        self.numerator.dim()
    }

    fn eval(&self, point: &[f64]) -> Complex64 {
        let n = self.numerator.eval(point);
        let p = self.base.eval(point);
        n / p.powu(self.power)
    }

    fn jets(&self, layout: &Arc<JetLayout>, point: &[f64]) -> Result<JetTable> {
        let n = poly_jet(self.numerator.poly(), layout, point)?;
        if self.power == 0 {
            return Ok(n.into_table());
        }
        let p = poly_jet(self.base.poly(), layout, point)?;
        let inv = p.recip().map_err(|_| Error::Vanishing { point: Vec::from(point) })?;
        Ok(n.mul(&inv.powi(self.power)).into_table())
    }
}
