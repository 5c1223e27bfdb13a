//! Exact operator oracle: normal-ordered differential operators acting on
//! Hermite expansions through the ladder relations.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float as _;
use num_traits::Zero;

use crate::calculus::change_quantization;
use crate::error::{Error, Result};
use crate::multiindex::{binomial, factorial, MultiIndex};
use crate::scalar::{Rational, Scalar};
use crate::symbol::{Amplitude, PolySymbol};

/// Largest dimension of the tensor Hermite basis.
pub const MAX_HERMITE_DIM: usize = 3;

/// Finite expansion `Σ c_k h_k` in normalized Hermite functions
/// `h_k(x) = Π_i h_{k_i}(x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteExpansion {
    d: usize,
    coeffs: BTreeMap<Vec<u32>, Complex64>,
}

impl HermiteExpansion {
    pub fn zero(d: usize) -> Self {
        HermiteExpansion { d, coeffs: BTreeMap::new() }
    }

    /// The single mode `h_k`.
    pub fn mode(k: &[u32]) -> Self {
        let mut out = Self::zero(k.len());
        out.coeffs.insert(k.to_vec(), Complex64::new(1.0, 0.0));
        out
    }

    pub fn from_coeffs(d: usize, coeffs: impl IntoIterator<Item = (Vec<u32>, Complex64)>) -> Result<Self> {
        if d > MAX_HERMITE_DIM {
            return Err(Error::pre("hermite expansion", "dimension above 3"));
        }
        let mut out = Self::zero(d);
        for (k, c) in coeffs {
            if k.len() != d {
                return Err(Error::Dimension { expected: d, found: k.len() });
            }
            out.add_to(k, c);
        }
        Ok(out)
    }

    /// One-dimensional expansion from a coefficient vector `c_0, c_1, …`.
    pub fn from_vec(c: &[Complex64]) -> Self {
        let mut out = Self::zero(1);
        for (k, &v) in c.iter().enumerate() {
            out.add_to(alloc::vec![k as u32], v);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn coeff(&self, k: &[u32]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    fn add_to(&mut self, k: Vec<u32>, c: Complex64) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_default();
        *e += c;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_to(k.clone(), *v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.d);
        for (k, v) in &self.coeffs {
            out.add_to(k.clone(), v * s);
        }
        out
    }

    /// `(Σ |c_k|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The bilinear pairing `∫ u v = Σ_k u_k v_k`; the `h_k` are real.
    pub fn pairing(&self, other: &Self) -> Complex64 {
        self.coeffs.iter().filter_map(|(k, u)| other.coeffs.get(k).map(|v| u * v)).sum()
    }

    /// Largest mode index in any coordinate.
    pub fn max_mode(&self) -> u32 {
        self.coeffs.keys().flat_map(|k| k.iter().copied()).max().unwrap_or(0)
    }

    /// Multiplication by `x_i`:
    /// `x h_k = √(k/2) h_{k−1} + √((k+1)/2) h_{k+1}`.
    pub fn mul_x(&self, i: usize) -> Self {
        self.ladder(i, 1.0)
    }

    /// `∂_{x_i}`: `h_k′ = √(k/2) h_{k−1} − √((k+1)/2) h_{k+1}`.
    pub fn deriv(&self, i: usize) -> Self {
        self.ladder(i, -1.0)
    }

    /// `D_{x_i} = −i ∂_{x_i}`.
    pub fn d(&self, i: usize) -> Self {
        self.deriv(i).scale(Complex64::new(0.0, -1.0))
    }

    fn ladder(&self, i: usize, up_sign: f64) -> Self {
        let mut out = Self::zero(self.d);
        for (k, &c) in &self.coeffs {
            let ki = k[i];
            if ki > 0 {
                let mut lo = k.clone();
                lo[i] -= 1;
                out.add_to(lo, c * (f64::from(ki) / 2.0).sqrt());
            }
            let mut hi = k.clone();
            hi[i] += 1;
            out.add_to(hi, c * (up_sign * (f64::from(ki + 1) / 2.0).sqrt()));
        }
        out
    }

    /// Drops coefficients with `|c| ≤ tol`.
    pub fn prune(&self, tol: f64) -> Self {
        HermiteExpansion {
            d: self.d,
            coeffs: self.coeffs.iter().filter(|(_, v)| v.norm() > tol).map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }

    /// Point value of a one-dimensional expansion.
    pub fn eval_1d(&self, x: f64) -> Complex64 {
        let h = hermite_values(self.max_mode() as usize, x);
        self.coeffs.iter().map(|(k, c)| c * h[k[0] as usize]).sum()
    }
}

/// `h_0(x), …, h_kmax(x)` by
/// `h_{k+1} = √(2/(k+1)) x h_k − √(k/(k+1)) h_{k−1}`.
pub fn hermite_values(kmax: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(kmax + 1);
    h.push(core::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp());
    if kmax >= 1 {
        h.push(2f64.sqrt() * x * h[0]);
    }
    for k in 1..kmax {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Hermite coefficients of `exp(−(x−c)²/(2w²))` until they fall below `tol`
/// relative to the largest one (at most `kmax + 1` modes).
///
/// Exact recurrence
/// `(1+1/w²)√(k+1) g_{k+1} = (√2 c/w²) g_k + (1−1/w²)√k g_{k−1}`,
/// `g_0 = π^{−1/4} √(2π/(1+1/w²)) e^{−c²/(2(1+w²))}`.
pub fn gaussian_expansion(center: f64, width: f64, tol: f64, kmax: usize) -> Result<HermiteExpansion> {
    if !(width > 0.0) {
        return Err(Error::pre("gaussian", "width must be positive"));
    }
    let iw2 = 1.0 / (width * width);
    let a = 1.0 + iw2;
    let mut g = alloc::vec![
        core::f64::consts::PI.powf(-0.25)
            * (2.0 * core::f64::consts::PI / a).sqrt()
            * (-center * center / (2.0 * (1.0 + width * width))).exp()
    ];
    let mut peak = g[0].abs();
    let mut small_run = 0;
    for k in 0..kmax {
        let kf = k as f64;
        let prev = if k > 0 { g[k - 1] } else { 0.0 };
        let next = (2f64.sqrt() * center * iw2 * g[k] + (1.0 - iw2) * kf.sqrt() * prev) / (a * (kf + 1.0).sqrt());
        g.push(next);
        peak = peak.max(next.abs());
        // Odd or even modes may vanish identically; require a run of small terms.
        if next.abs() <= tol * peak {
            small_run += 1;
            if small_run >= 4 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    let c: Vec<Complex64> = g.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    Ok(HermiteExpansion::from_vec(&c).prune(tol * peak))
}

/// Differential operator `Σ c x^α D^β` in normal order (multiplications
/// left of derivatives).
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOperator<S> {
    d: usize,
    terms: BTreeMap<(Vec<u32>, Vec<u32>), S>,
}

impl<S: Scalar> DiffOperator<S> {
    pub fn zero(d: usize) -> Self {
        DiffOperator { d, terms: BTreeMap::new() }
    }

    pub fn identity(d: usize) -> Self {
        Self::monomial(&MultiIndex::zero(d), &MultiIndex::zero(d), S::one())
    }

    /// `c x^α D^β`.
    pub fn monomial(alpha: &MultiIndex, beta: &MultiIndex, c: S) -> Self {
        let mut out = Self::zero(alpha.dim());
        out.add_term(alpha.0.clone(), beta.0.clone(), c);
        out
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[u32], &S)> {
        self.terms.iter().map(|((a, b), c)| (a.as_slice(), b.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, a: Vec<u32>, b: Vec<u32>, c: S) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let v = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(-S::one())))
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.d);
        for ((a, b), c) in &self.terms {
            out.add_term(a.clone(), b.clone(), c.clone() * s.clone());
        }
        out
    }

    /// Left quantization in the normalized convention:
    /// `x^α ξ^β ↦ x^α D^β`.
    pub fn from_left_symbol(a: &PolySymbol<S>) -> Self {
        let mut out = Self::zero(a.dim());
        for (alpha, beta, c) in a.terms() {
            out.add_term(alpha.0, beta.0, c.clone());
        }
        out
    }

    /// Inverse of [`DiffOperator::from_left_symbol`].
    pub fn to_left_symbol(&self) -> PolySymbol<S> {
        PolySymbol::from_terms(self.d, self.terms.iter().map(|((a, b), c)| (a.clone(), b.clone(), c.clone())))
            .expect("consistent dimensions")
    }

    /// `x^a D^b x^c` in normal order, using per coordinate
    /// `D^b x^c = Σ_k C(b,k) (−i)^k c!/(c−k)! x^{c−k} D^{b−k}`.
    pub fn x_d_x(a: &[u32], b: &[u32], c: &[u32], coef: S) -> Self {
        let d = a.len();
        let mut acc: Vec<(Vec<u32>, Vec<u32>, S)> = alloc::vec![(a.to_vec(), alloc::vec![0; d], coef)];
        for i in 0..d {
            let mut next = Vec::new();
            for (xa, db, s) in &acc {
                for k in 0..=b[i].min(c[i]) {
                    let falling: BigInt = factorial(c[i]) / factorial(c[i] - k);
                    let w = S::from_rational(&Rational::from_integer(binomial(b[i], k) * falling));
                    let mut xa = xa.clone();
                    let mut db = db.clone();
                    xa[i] += c[i] - k;
                    db[i] = b[i] - k;
                    next.push((xa, db, s.clone() * w * S::minus_i_pow(k)));
                }
            }
            acc = next;
        }
        let mut out = Self::zero(d);
        for (xa, db, s) in acc {
            out.add_term(xa, db, s);
        }
        out
    }

    /// `self ∘ other`, re-normal-ordered.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::Dimension { expected: self.d, found: other.d });
        }
        let mut out = Self::zero(self.d);
        for ((a, b), s) in &self.terms {
            for ((c, e), t) in &other.terms {
                let mid = Self::x_d_x(a, b, c, s.clone() * t.clone());
                for ((xa, db), v) in mid.terms {
                    let de: Vec<u32> = db.iter().zip(e).map(|(p, q)| p + q).collect();
                    out.add_term(xa, de, v);
                }
            }
        }
        Ok(out)
    }

    /// Exact action on a Hermite expansion through the ladder relations.
    pub fn apply(&self, u: &HermiteExpansion) -> Result<HermiteExpansion> {
        if u.dim() != self.d {
            return Err(Error::Dimension { expected: self.d, found: u.dim() });
        }
        let mut out = HermiteExpansion::zero(self.d);
        // Group by derivative part so each D^β u is computed once.
        let mut by_beta: BTreeMap<&Vec<u32>, Vec<(&Vec<u32>, &S)>> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            by_beta.entry(b).or_default().push((a, c));
        }
        for (beta, group) in by_beta {
            let mut du = u.clone();
            for (i, &k) in beta.iter().enumerate() {
                for _ in 0..k {
                    du = du.d(i);
                }
            }
            for (alpha, c) in group {
                let mut v = du.clone();
                for (i, &k) in alpha.iter().enumerate() {
                    for _ in 0..k {
                        v = v.mul_x(i);
                    }
                }
                out = out.add(&v.scale(c.to_c64()));
            }
        }
        Ok(out)
    }
}

/// The operator of the `τ`-symbol `a`, expanded from the amplitude
/// `((1−τ)x + τy)^α ξ^β`:
/// `u ↦ Σ_{k≤α} C(α,k)(1−τ)^{|α−k|} τ^{|k|} x^{α−k} D^β (x^k u)`.
pub fn quantize_to_operator<S: Scalar>(a: &PolySymbol<S>, tau: &Rational) -> DiffOperator<S> {
    let t = S::from_rational(tau);
    let s = S::one() - t.clone();
    let mut out = DiffOperator::zero(a.dim());
    for (alpha, beta, c) in a.terms() {
        for k in alpha.below() {
            let rest = &alpha - &k;
            let coef = c.clone()
                * S::from_rational(&Rational::from_integer(alpha.binomial(&k).expect("k ≤ α")))
                * s.pow(rest.order())
                * t.pow(k.order());
            if coef.is_zero() {
                continue;
            }
            out = out.add(&DiffOperator::x_d_x(&rest.0, &beta.0, &k.0, coef));
        }
    }
    out
}

/// The same operator by first changing to the left symbol.
pub fn quantize_via_left<S: Scalar>(a: &PolySymbol<S>, tau: &Rational) -> DiffOperator<S> {
    DiffOperator::from_left_symbol(&change_quantization(a, tau, &Rational::zero()))
}

/// Operator of a polynomial amplitude: `x^α y^β ξ^γ ↦ (u ↦ x^α D^γ (x^β u))`.
pub fn amplitude_operator<S: Scalar>(amp: &Amplitude<S>) -> DiffOperator<S> {
    let mut out = DiffOperator::zero(amp.dim());
    for (a, b, g, c) in amp.terms() {
        out = out.add(&DiffOperator::x_d_x(&a.0, &g.0, &b.0, c.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::compose_tau;
    use crate::scalar::{rational, Exact};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x1() -> PolySymbol<Exact> {
        PolySymbol::x(1, 0)
    }

    fn xi1() -> PolySymbol<Exact> {
        PolySymbol::xi(1, 0)
    }

    #[test]
    fn oscillator_eigenfunctions() {
        let t = DiffOperator::from_left_symbol(&x1().mul(&x1()).add(&xi1().mul(&xi1())));
        for k in 0..6u32 {
            let out = t.apply(&HermiteExpansion::mode(&[k])).unwrap();
            let expect = HermiteExpansion::mode(&[k]).scale(c(f64::from(2 * k + 1), 0.0));
            assert!(out.sub(&expect).norm() < 1e-13);
        }
    }

    #[test]
    fn weyl_symbol_of_x_d() {
        let half = Exact::from_rational(&rational(1, 2));
        let a = x1().mul(&xi1()).add(&PolySymbol::constant(1, Exact::imag_unit() * half));
        let op = quantize_to_operator(&a, &rational(1, 2));
        assert_eq!(op, DiffOperator::from_left_symbol(&x1().mul(&xi1())));
        assert_eq!(op, quantize_via_left(&a, &rational(1, 2)));
        assert_eq!(quantize_to_operator(&xi1(), &rational(1, 3)), DiffOperator::from_left_symbol(&xi1()));
        assert_eq!(quantize_to_operator(&x1(), &rational(1, 1)), DiffOperator::from_left_symbol(&x1()));
    }

    #[test]
    fn d_x_normal_order() {
        // D x = x D − i
        let d = DiffOperator::<Exact>::from_left_symbol(&xi1());
        let x = DiffOperator::from_left_symbol(&x1());
        let dx = d.compose(&x).unwrap();
        let expect = x1().mul(&xi1()).sub(&PolySymbol::constant(1, Exact::imag_unit()));
        assert_eq!(dx.to_left_symbol(), expect);
        assert_eq!(dx.to_left_symbol(), compose_tau(&xi1(), &x1(), &rational(0, 1)).unwrap());
    }

    #[test]
    fn pairing_basics_and_transpose_of_x_d() {
        let h0 = HermiteExpansion::mode(&[0]);
        let h1 = HermiteExpansion::mode(&[1]);
        assert_eq!(h0.pairing(&h0), c(1.0, 0.0));
        assert_eq!(h0.pairing(&h1), c(0.0, 0.0));
        let u = HermiteExpansion::from_vec(&[c(0.3, 1.0), c(-0.2, 0.5), c(1.5, 0.0), c(0.0, -0.7)]);
        let v = HermiteExpansion::from_vec(&[c(1.0, 0.0), c(0.25, -1.0), c(0.0, 0.0), c(0.4, 0.4), c(-1.0, 0.1)]);
        let xd = DiffOperator::from_left_symbol(&x1().mul(&xi1()));
        let lhs = xd.apply(&u).unwrap().pairing(&v) + u.pairing(&xd.apply(&v).unwrap()) - c(0.0, 1.0) * u.pairing(&v);
        assert!(lhs.norm() < 1e-12);
        assert_eq!(u.pairing(&v), v.pairing(&u));
    }

    #[test]
    fn gaussian_coefficients_by_quadrature() {
        for &(center, width) in &[(0.0, 1.0), (0.7, 1.0), (-1.3, 0.6), (2.0, 1.8)] {
            let g = gaussian_expansion(center, width, 1e-14, 400).unwrap();
            for &x in &[-2.5, -0.4, 0.0, 1.1, 3.0] {
                let expect = (-(x - center) * (x - center) / (2.0 * width * width)).exp();
                assert!((g.eval_1d(x) - c(expect, 0.0)).norm() < 1e-10, "{center} {width} {x}");
            }
        }
    }

    #[test]
    fn ladder_matches_values() {
        // x h_3 from values versus the ladder image.
        let x = 0.83;
        let h = hermite_values(8, x);
        let v = HermiteExpansion::mode(&[3]).mul_x(0).eval_1d(x);
        assert!((v.re - x * h[3]).abs() < 1e-14);
        let two_d = HermiteExpansion::mode(&[1, 2]).mul_x(1);
        assert!((two_d.coeff(&[1, 3]) - c(1.5f64.sqrt(), 0.0)).norm() < 1e-15);
    }
}
