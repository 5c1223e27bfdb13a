use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::SparsePoly;
use crate::scalar::{Rational, Scalar};

use super::PolySymbol;

/// Polynomial amplitude `a(x, y, ξ)`; variables laid out as `(x, y, ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Amplitude<S> {
    d: usize,
    poly: SparsePoly<S>,
}

impl<S: Scalar> Amplitude<S> {
    pub fn new(d: usize, poly: SparsePoly<S>) -> Result<Self> {
        if poly.nvars() != 3 * d {
            return Err(Error::Dimension { expected: 3 * d, found: poly.nvars() });
        }
        Ok(Amplitude { d, poly })
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Vec<u32>, Vec<u32>, Vec<u32>, S)>) -> Result<Self> {
        let mut poly = SparsePoly::zero(3 * d);
        for (x, y, xi, c) in terms {
            for v in [&x, &y, &xi] {
                if v.len() != d {
                    return Err(Error::Dimension { expected: d, found: v.len() });
                }
            }
            poly.add_term(x.into_iter().chain(y).chain(xi).collect(), c);
        }
        Ok(Amplitude { d, poly })
    }

    /// The amplitude `a(x, ξ)` not depending on `y`.
    pub fn from_symbol(a: &PolySymbol<S>) -> Self {
        let d = a.dim();
        let poly = a.poly().remap(3 * d, |e| {
            e[..d].iter().copied().chain(core::iter::repeat_n(0, d)).chain(e[d..].iter().copied()).collect()
        });
        Amplitude { d, poly }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn poly(&self) -> &SparsePoly<S> {
        &self.poly
    }

    /// Iterates `(α, β, γ, c)` for the terms `c x^α y^β ξ^γ`.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, MultiIndex, MultiIndex, &S)> {
        let d = self.d;
        self.poly.terms().map(move |(e, c)| {
            (MultiIndex(e[..d].to_vec()), MultiIndex(e[d..2 * d].to_vec()), MultiIndex(e[2 * d..].to_vec()), c)
        })
    }

    /// Restriction to the diagonal `y = x`.
    pub fn diagonal(&self) -> PolySymbol<S> {
        let d = self.d;
        let poly =
            self.poly.remap(2 * d, |e| (0..d).map(|i| e[i] + e[d + i]).chain(e[2 * d..].iter().copied()).collect());
        PolySymbol::from_poly(d, poly).expect("dimension")
    }
}

/// Terms `p_j(x, ξ) = Σ_{|β+γ|=j} (1/(β!γ!)) τ^{|β|}(1−τ)^{|γ|}
/// ∂^{β+γ}_ξ (−D_x)^β D^γ_y a |_{y=x}` of the reduction of an amplitude to
/// its τ-symbol. The list ends at the last nonzero term.
pub fn amplitude_reduce<S: Scalar>(amp: &Amplitude<S>, tau: &Rational) -> Vec<PolySymbol<S>> {
    let d = amp.d;
    let maxe = amp.poly.max_exponents();
    let bx = MultiIndex(maxe[..d].to_vec());
    let by = MultiIndex(maxe[d..2 * d].to_vec());
    let bxi = MultiIndex(maxe[2 * d..].to_vec());
    let t = S::from_rational(tau);
    let u = S::from_rational(&(Rational::from_integer(1.into()) - tau));
    let top = bxi.order();
    let mut out: Vec<PolySymbol<S>> = (0..=top).map(|_| PolySymbol::zero(d)).collect();
    for beta in bx.componentwise_min(&bxi).below() {
        for gamma in by.below() {
            let sum = &beta + &gamma;
            if !sum.le(&bxi) {
                continue;
            }
            let mut orders = Vec::with_capacity(3 * d);
            orders.extend_from_slice(&beta.0);
            orders.extend_from_slice(&gamma.0);
            orders.extend_from_slice(&sum.0);
            let deriv = amp.poly.partial_multi(&orders);
            if deriv.is_zero() {
                continue;
            }
            // (−D)^β D^γ = i^{|β|} (−i)^{|γ|} ∂^β ∂^γ
            let (nb, ng) = (beta.order(), gamma.order());
            let phase = S::minus_i_pow((3 * nb + ng) % 4);
            let denom = beta.factorial() * gamma.factorial();
            let c = phase * t.pow(nb) * u.pow(ng) * S::recip_int(&denom);
            let restricted = Amplitude { d, poly: deriv.scale(&c) }.diagonal();
            let j = sum.order() as usize;
            out[j] = out[j].add(&restricted);
        }
    }
    while out.len() > 1 && out.last().is_some_and(|p| p.is_zero()) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Exact};
    use alloc::vec;
    use num_traits::Zero;

    fn one() -> Exact {
        Exact::from_int(1)
    }

    fn total(ps: &[PolySymbol<Exact>]) -> PolySymbol<Exact> {
        ps.iter().fold(PolySymbol::zero(1), |a, b| a.add(b))
    }

    #[test]
    fn y_reduces_to_x() {
        let amp = Amplitude::from_terms(1, [(vec![0], vec![1], vec![0], one())]).unwrap();
        let ps = amplitude_reduce(&amp, &rational(0, 1));
        assert_eq!(total(&ps), PolySymbol::x(1, 0));
    }

    #[test]
    fn y_xi_picks_up_minus_i() {
        let amp = Amplitude::from_terms(1, [(vec![0], vec![1], vec![1], one())]).unwrap();
        let ps = amplitude_reduce(&amp, &rational(0, 1));
        let expect = PolySymbol::x(1, 0).mul(&PolySymbol::xi(1, 0)).add(&PolySymbol::constant(1, -Exact::imag_unit()));
        assert_eq!(total(&ps), expect);
        assert_eq!(ps.len(), 2);
    }

    #[test]
    fn y_independent_amplitude_is_its_own_left_symbol() {
        let a = PolySymbol::<Exact>::from_terms(1, [(vec![2], vec![1], one()), (vec![1], vec![3], one())]).unwrap();
        let ps = amplitude_reduce(&Amplitude::from_symbol(&a), &rational(0, 1));
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0], a);
        assert!(ps[0].coeff(&MultiIndex(vec![0]), &MultiIndex(vec![0])).is_zero());
    }
}
