//! Change of quantization, transposition and composition of τ-quantized
//! polynomial symbols.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiindex::{binomial, MultiIndex};
use crate::scalar::{Rational, Scalar};
use crate::symbol::{PolySymbol, TauParams};

fn one() -> Rational {
    Rational::one()
}

/// `Σ_α (1/α!) c^{|α|} ∂^α_ξ D^α_x a`, the common shape of the change of
/// quantization and the transpose.
fn diagonal_expansion<S: Scalar>(a: &PolySymbol<S>, c: &Rational) -> PolySymbol<S> {
    let (dx, dxi) = a.max_degrees();
    let c = S::from_rational(c);
    let mut out = PolySymbol::zero(a.dim());
    for alpha in dx.componentwise_min(&dxi).below() {
        let k = alpha.order();
        if k > 0 && c.is_zero() {
            continue;
        }
        let term = a.d_x_partial_xi(&alpha, &alpha);
        if term.is_zero() {
            continue;
        }
        let coef = c.pow(k) * S::recip_int(&alpha.factorial());
        out = out.add(&term.scale(&coef));
    }
    out
}

/// The `τ₂`-symbol of the operator whose `τ₁`-symbol is `a`.
pub fn change_quantization<S: Scalar>(a: &PolySymbol<S>, tau1: &Rational, tau2: &Rational) -> PolySymbol<S> {
    if tau1 == tau2 {
        return a.clone();
    }
    diagonal_expansion(a, &(tau1 - tau2))
}

/// The τ-symbol of the transpose: `Σ_α (1/α!)(1−2τ)^{|α|} ∂^α_ξ D^α_x a(x,−ξ)`.
pub fn transpose<S: Scalar>(a: &PolySymbol<S>, tau: &Rational) -> PolySymbol<S> {
    let two = Rational::from_integer(2.into());
    diagonal_expansion(&a.reflect_xi(), &(one() - two * tau))
}

/// Graded same-τ composition: entry `j` collects the `|β+γ| = j` terms of
/// `Σ ((−1)^{|β|}/(β!γ!)) τ^{|β|}(1−τ)^{|γ|} (∂^γ_ξ D^β_x a)(∂^β_ξ D^γ_x b)`.
pub fn compose_tau_graded<S: Scalar>(
    a: &PolySymbol<S>,
    b: &PolySymbol<S>,
    tau: &Rational,
) -> Result<Vec<PolySymbol<S>>> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    let d = a.dim();
    let (ax, axi) = a.max_degrees();
    let (bx, bxi) = b.max_degrees();
    let t = S::from_rational(tau);
    let u = S::from_rational(&(one() - tau));
    let beta_box = ax.componentwise_min(&bxi);
    let gamma_box = axi.componentwise_min(&bx);
    let top = (beta_box.order() + gamma_box.order()) as usize;
    let mut out: Vec<PolySymbol<S>> = (0..=top).map(|_| PolySymbol::zero(d)).collect();
    for beta in beta_box.below() {
        let nb = beta.order();
        if nb > 0 && t.is_zero() {
            continue;
        }
        for gamma in gamma_box.below() {
            let ng = gamma.order();
            if ng > 0 && u.is_zero() {
                continue;
            }
            let da = a.d_x_partial_xi(&beta, &gamma);
            if da.is_zero() {
                continue;
            }
            let db = b.d_x_partial_xi(&gamma, &beta);
            if db.is_zero() {
                continue;
            }
            let sign = if nb % 2 == 1 { -S::one() } else { S::one() };
            let coef = sign * t.pow(nb) * u.pow(ng) * S::recip_int(&(beta.factorial() * gamma.factorial()));
            let j = (nb + ng) as usize;
            out[j] = out[j].add(&da.mul(&db).scale(&coef));
        }
    }
    while out.len() > 1 && out.last().is_some_and(|p| p.is_zero()) {
        out.pop();
    }
    Ok(out)
}

/// Same-τ composition in the normalized convention.
pub fn compose_tau<S: Scalar>(a: &PolySymbol<S>, b: &PolySymbol<S>, tau: &Rational) -> Result<PolySymbol<S>> {
    Ok(compose_tau_graded(a, b, tau)?.iter().fold(PolySymbol::zero(a.dim()), |acc, p| acc.add(p)))
}

/// Weyl composition: the same-τ expansion with weights `2^{−|β+γ|}`.
pub fn weyl_compose<S: Scalar>(a: &PolySymbol<S>, b: &PolySymbol<S>) -> Result<PolySymbol<S>> {
    compose_tau(a, b, &Rational::new(1.into(), 2.into()))
}

fn mi_binomial(n: &MultiIndex, k: &MultiIndex) -> BigInt {
    n.0.iter().zip(&k.0).map(|(&n, &k)| binomial(n, k)).product()
}

/// Composition of a `τ₁`-symbol `a` with a `τ₂`-symbol `b`, producing the
/// `τ`-symbol through the general coefficients
/// `(1/(γ!δ!)) (−1)^{|α−α₁+α₂|} C(α+β−α₁−α₂, α−α₁) C(γ,α₁) C(δ,α₂)
/// τ^{|α−α₁|}(1−τ)^{|β−α₂|} τ₁^{|α₁|}(1−τ₂)^{|α₂|}` of
/// `∂^γ_ξ D^α_x a · ∂^δ_ξ D^β_x b`, summed over `α+β = γ+δ`.
pub fn compose_general<S: Scalar>(
    a: &PolySymbol<S>,
    tau1: &Rational,
    b: &PolySymbol<S>,
    tau2: &Rational,
    tau: &Rational,
) -> Result<PolySymbol<S>> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    let d = a.dim();
    let (ax, axi) = a.max_degrees();
    let (bx, bxi) = b.max_degrees();
    let t = S::from_rational(tau);
    let u = S::from_rational(&(one() - tau));
    let t1 = S::from_rational(tau1);
    let u2 = S::from_rational(&(one() - tau2));
    let mut out = PolySymbol::zero(d);
    for alpha in ax.below() {
        for gamma in axi.below() {
            let da = a.d_x_partial_xi(&alpha, &gamma);
            if da.is_zero() {
                continue;
            }
            for beta in bx.below() {
                let sum = &alpha + &beta;
                let Some(delta) = sum.checked_sub(&gamma) else { continue };
                if !delta.le(&bxi) {
                    continue;
                }
                let db = b.d_x_partial_xi(&beta, &delta);
                if db.is_zero() {
                    continue;
                }
                let mut coef = S::zero();
                for a1 in alpha.componentwise_min(&gamma).below() {
                    let am = &alpha - &a1;
                    for a2 in beta.componentwise_min(&delta).below() {
                        let bm = &beta - &a2;
                        let top = &am + &bm;
                        let int = mi_binomial(&top, &am) * mi_binomial(&gamma, &a1) * mi_binomial(&delta, &a2);
                        let sign_exp = am.order() + a2.order();
                        let mut c = S::from_rational(&Rational::from_integer(int))
                            * t.pow(am.order())
                            * u.pow(bm.order())
                            * t1.pow(a1.order())
                            * u2.pow(a2.order());
                        if sign_exp % 2 == 1 {
                            c = -c;
                        }
                        coef = coef + c;
                    }
                }
                if coef.is_zero() {
                    continue;
                }
                let coef = coef * S::recip_int(&(gamma.factorial() * delta.factorial()));
                out = out.add(&da.mul(&db).scale(&coef));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `Op₀(x^α ξ^β) = x^α D^β`; composition carries no prefactor.
    Normalized,
    /// Operators without the `(2π)^{−d}` factor; composition picks up `(2π)^d`.
    Paper,
}

impl core::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(Convention::Normalized),
            "paper" => Ok(Convention::Paper),
            _ => Err(Error::Parse { pos: 0, msg: format!("unknown convention {s:?}") }),
        }
    }
}

/// A polynomial symbol with its quantization.
///
/// In the paper convention the represented symbol is
/// `(2π)^{two_pi_power} · symbol`, keeping the coefficients exact.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedSymbol<S> {
    pub symbol: PolySymbol<S>,
    pub tau: TauParams,
    pub convention: Convention,
    pub two_pi_power: u32,
}

impl<S: Scalar> QuantizedSymbol<S> {
    pub fn new(symbol: PolySymbol<S>, tau: TauParams, convention: Convention) -> Self {
        QuantizedSymbol { symbol, tau, convention, two_pi_power: 0 }
    }

    fn with(&self, symbol: PolySymbol<S>, tau: TauParams) -> Self {
        QuantizedSymbol { symbol, tau, convention: self.convention, two_pi_power: self.two_pi_power }
    }

    fn check_pair(&self, other: &Self) -> Result<()> {
        if self.convention != other.convention {
            return Err(Error::MixedConventions);
        }
        if self.symbol.dim() != other.symbol.dim() {
            return Err(Error::Dimension { expected: self.symbol.dim(), found: other.symbol.dim() });
        }
        Ok(())
    }

    fn product_power(&self, other: &Self) -> u32 {
        match self.convention {
            Convention::Normalized => 0,
            Convention::Paper => self.two_pi_power + other.two_pi_power + self.symbol.dim() as u32,
        }
    }

    pub fn change_quantization(&self, tau2: &TauParams) -> Self {
        self.with(change_quantization(&self.symbol, self.tau.tau(), tau2.tau()), tau2.clone())
    }

    pub fn transpose(&self) -> Self {
        self.with(transpose(&self.symbol, self.tau.tau()), self.tau.clone())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_pair(other)?;
        if self.tau != other.tau {
            return Err(Error::pre("compose_tau", "both symbols must use the same tau"));
        }
        let c = compose_tau(&self.symbol, &other.symbol, self.tau.tau())?;
        Ok(QuantizedSymbol { two_pi_power: self.product_power(other), ..self.with(c, self.tau.clone()) })
    }

    pub fn compose_general(&self, other: &Self, target: &TauParams) -> Result<Self> {
        self.check_pair(other)?;
        let c = compose_general(&self.symbol, self.tau.tau(), &other.symbol, other.tau.tau(), target.tau())?;
        Ok(QuantizedSymbol { two_pi_power: self.product_power(other), ..self.with(c, target.clone()) })
    }

    pub fn weyl_compose(&self, other: &Self) -> Result<Self> {
        let half = Rational::new(1.into(), 2.into());
        if *self.tau.tau() != half || *other.tau.tau() != half {
            return Err(Error::pre("weyl_compose", "both symbols must be Weyl symbols"));
        }
        self.compose(other)
    }
}

/// Outcome of the exhaustive identity sweeps.
#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub vandermonde_checked: usize,
    pub vandermonde_violations: usize,
    pub bbr_checked: usize,
    pub bbr_violations: usize,
    pub first_counterexample: Option<String>,
}

impl IdentityReport {
    pub fn passes(&self) -> bool {
        self.vandermonde_violations == 0 && self.bbr_violations == 0
    }
}

/// `Σ_k C(m,k) C(n,r−k) = C(m+n,r)` for all `m, n, r ≤ max`.
pub fn check_vandermonde(max: u32, report: &mut IdentityReport) {
    for m in 0..=max {
        for n in 0..=max {
            for r in 0..=max {
                let lhs: BigInt = (0..=r).map(|k| binomial(m, k) * binomial(n, r - k)).sum();
                report.vandermonde_checked += 1;
                if lhs != binomial(m + n, r) {
                    report.vandermonde_violations += 1;
                    report.first_counterexample.get_or_insert_with(|| format!("vandermonde m={m} n={n} r={r}"));
                }
            }
        }
    }
}

fn inv_fact(m: &MultiIndex) -> Rational {
    Rational::new(BigInt::one(), m.factorial())
}

/// `(β+γ)!/((β+γ−ε)! ε! β! γ!) = Σ_δ 1/((β−δ)!(β−ε+γ−δ)! δ! (δ−β+ε)!)` over
/// `0 ≤ δ ≤ β`, `β−ε ≤ δ ≤ β−ε+γ`, for all `ε ≤ β+γ`, `|β+γ| ≤ max_order`.
pub fn check_bbr(d: usize, max_order: u32, report: &mut IdentityReport) {
    for total in 0..=max_order {
        for bg in crate::multiindex::exact_order(2 * d, total) {
            let beta = MultiIndex(bg.0[..d].to_vec());
            let gamma = MultiIndex(bg.0[d..].to_vec());
            let sum = &beta + &gamma;
            for eps in sum.below() {
                let rest = sum.checked_sub(&eps).expect("eps below sum");
                let lhs = Rational::new(sum.factorial(), rest.factorial() * eps.factorial())
                    * inv_fact(&beta)
                    * inv_fact(&gamma);
                // per coordinate, δ_i ranges over max(0, β_i−ε_i) ..= min(β_i, β_i−ε_i+γ_i)
                let lo: Vec<u32> = (0..d).map(|i| beta.0[i].saturating_sub(eps.0[i])).collect();
                let hi: Vec<i64> = (0..d)
                    .map(|i| {
                        i64::from(beta.0[i]).min(i64::from(beta.0[i]) - i64::from(eps.0[i]) + i64::from(gamma.0[i]))
                    })
                    .collect();
                let mut rhs = Rational::zero();
                if (0..d).all(|i| i64::from(lo[i]) <= hi[i]) {
                    let span = MultiIndex((0..d).map(|i| (hi[i] - i64::from(lo[i])) as u32).collect());
                    for off in span.below() {
                        let delta = &MultiIndex(lo.clone()) + &off;
                        let f = |v: Vec<i64>| MultiIndex(v.into_iter().map(|x| x as u32).collect());
                        let b_d = f((0..d).map(|i| i64::from(beta.0[i]) - i64::from(delta.0[i])).collect());
                        let nu = f((0..d)
                            .map(|i| {
                                i64::from(beta.0[i]) - i64::from(eps.0[i]) + i64::from(gamma.0[i])
                                    - i64::from(delta.0[i])
                            })
                            .collect());
                        let theta = f((0..d)
                            .map(|i| i64::from(delta.0[i]) - i64::from(beta.0[i]) + i64::from(eps.0[i]))
                            .collect());
                        rhs += inv_fact(&b_d) * inv_fact(&nu) * inv_fact(&delta) * inv_fact(&theta);
                    }
                }
                report.bbr_checked += 1;
                if lhs != rhs {
                    report.bbr_violations += 1;
                    report.first_counterexample.get_or_insert_with(|| {
                        format!("bbr beta={beta:?} gamma={gamma:?} eps={eps:?}: {lhs} != {rhs}")
                    });
                }
            }
        }
    }
}

/// Runs both sweeps with the given bounds.
pub fn combinatorial_identity_check(vandermonde_max: u32, bbr_dim: usize, bbr_order: u32) -> IdentityReport {
    let mut r = IdentityReport::default();
    check_vandermonde(vandermonde_max, &mut r);
    for d in 1..=bbr_dim {
        check_bbr(d, bbr_order, &mut r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Exact};

    fn x() -> PolySymbol<Exact> {
        PolySymbol::x(1, 0)
    }
    fn xi() -> PolySymbol<Exact> {
        PolySymbol::xi(1, 0)
    }
    fn c(re: i64, re_d: i64, im: i64, im_d: i64) -> PolySymbol<Exact> {
        PolySymbol::constant(1, Exact::new(rational(re, re_d), rational(im, im_d)))
    }

    #[test]
    fn change_to_weyl_adds_half_i() {
        let a = x().mul(&xi());
        let w = change_quantization(&a, &rational(0, 1), &rational(1, 2));
        assert_eq!(w, a.add(&c(0, 1, 1, 2)));
        assert_eq!(change_quantization(&a, &rational(1, 3), &rational(1, 3)), a);
        let x_free = xi().mul(&xi());
        assert_eq!(change_quantization(&x_free, &rational(-1, 1), &rational(2, 1)), x_free);
    }

    #[test]
    fn transpose_examples() {
        let a = x().mul(&xi());
        assert_eq!(transpose(&a, &rational(1, 2)), a.neg());
        assert_eq!(transpose(&a, &rational(0, 1)), a.neg().add(&c(0, 1, 1, 1)));
        let k = c(3, 2, -1, 5);
        assert_eq!(transpose(&k, &rational(1, 3)), k);
    }

    #[test]
    fn composition_examples() {
        let z = rational(0, 1);
        assert_eq!(compose_tau(&xi(), &x(), &z).unwrap(), x().mul(&xi()).add(&c(0, 1, -1, 1)));
        assert_eq!(compose_tau(&x(), &xi(), &z).unwrap(), x().mul(&xi()));
        assert_eq!(compose_tau(&x(), &xi(), &rational(1, 2)).unwrap(), x().mul(&xi()).add(&c(0, 1, 1, 2)));
        assert_eq!(weyl_compose(&xi(), &x()).unwrap(), x().mul(&xi()).add(&c(0, 1, -1, 2)));
        let sym = weyl_compose(&x(), &xi()).unwrap().add(&weyl_compose(&xi(), &x()).unwrap());
        assert_eq!(sym.scale(&Exact::from_rational(&rational(1, 2))), x().mul(&xi()));
    }

    #[test]
    fn general_composition_examples() {
        let r = compose_general(&xi(), &rational(0, 1), &x(), &rational(1, 1), &rational(0, 1)).unwrap();
        assert_eq!(r, x().mul(&xi()).add(&c(0, 1, -1, 1)));
        let k = c(2, 1, 0, 1);
        let a = x().mul(&xi()).mul(&xi());
        let r = compose_general(&k, &rational(1, 3), &a, &rational(2, 1), &rational(2, 1)).unwrap();
        assert_eq!(r, a.scale(&Exact::from_int(2)));
        // a target other than τ₂ re-quantizes b as well
        let r = compose_general(&k, &rational(1, 3), &a, &rational(2, 1), &rational(1, 2)).unwrap();
        let moved = change_quantization(&a, &rational(2, 1), &rational(1, 2));
        assert_eq!(r, moved.scale(&Exact::from_int(2)));
        assert_ne!(moved, a);
    }

    #[test]
    fn conventions() {
        let t0 = TauParams::parse("0").unwrap();
        let a = QuantizedSymbol::new(xi(), t0.clone(), Convention::Paper);
        let b = QuantizedSymbol::new(x(), t0.clone(), Convention::Paper);
        let c = a.compose(&b).unwrap();
        assert_eq!(c.two_pi_power, 1);
        let n = QuantizedSymbol::new(x(), t0, Convention::Normalized);
        assert_eq!(a.compose(&n).unwrap_err(), Error::MixedConventions);
        assert!("weyl".parse::<Convention>().is_err());
    }

    #[test]
    fn identity_examples() {
        let lhs: BigInt = (0..=2).map(|k| binomial(2, k) * binomial(3, 2 - k)).sum();
        assert_eq!(lhs, BigInt::from(10));
        let r = combinatorial_identity_check(6, 2, 4);
        assert!(r.passes(), "{:?}", r.first_counterexample);
        assert!(r.bbr_checked > 0);
    }
}
