use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;
use psdo_core::calculus::{change_quantization, compose_general, compose_tau, transpose};
use psdo_core::hermite::{amplitude_operator, hermite_values, quantize_to_operator, DiffOperator, HermiteExpansion};
use psdo_core::multiindex::MultiIndex;
use psdo_core::scalar::{exact, rational, Exact, Rational};
use psdo_core::symbol::{
    amplitude_reduce, jet_eval, Amplitude, DerivKind, JetLayout, PointSymbol, PolySymbol, RationalSymbol,
};

const TAUS: [(i64, i64); 6] = [(-1, 1), (0, 1), (1, 3), (1, 2), (1, 1), (2, 1)];

type Term = (Vec<u32>, Vec<u32>, (i64, i64, i64));

fn coeff(c: (i64, i64, i64)) -> Exact {
    exact(rational(c.0, c.2), rational(c.1, c.2))
}

fn terms(d: usize, max_exp: u32, max_deg: u32, n: usize) -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(
        (
            prop::collection::vec(0..=max_exp, d),
            prop::collection::vec(0..=max_exp, d),
            (-6i64..=6, -6i64..=6, 1i64..=5),
        ),
        1..=n,
    )
    .prop_map(move |ts| ts.into_iter().filter(|(a, b, _)| a.iter().chain(b).sum::<u32>() <= max_deg).collect())
}

fn symbol(d: usize, ts: Vec<Term>) -> PolySymbol<Exact> {
    PolySymbol::from_terms(d, ts.into_iter().map(|(a, b, c)| (a, b, coeff(c)))).unwrap()
}

fn sym(max_exp: u32, max_deg: u32, n: usize) -> impl Strategy<Value = PolySymbol<Exact>> {
    (1usize..=3).prop_flat_map(move |d| terms(d, max_exp, max_deg, n).prop_map(move |ts| symbol(d, ts)))
}

fn sym1(max_exp: u32, max_deg: u32, n: usize) -> impl Strategy<Value = PolySymbol<Exact>> {
    terms(1, max_exp, max_deg, n).prop_map(|ts| symbol(1, ts))
}

fn tau() -> impl Strategy<Value = Rational> {
    (0..TAUS.len()).prop_map(|i| rational(TAUS[i].0, TAUS[i].1))
}

fn expansion(max_mode: u32) -> impl Strategy<Value = HermiteExpansion> {
    prop::collection::vec((0..=max_mode, -1.0f64..1.0, -1.0f64..1.0), 1..8).prop_map(|v| {
        HermiteExpansion::from_coeffs(1, v.into_iter().map(|(k, re, im)| (vec![k], Complex64::new(re, im)))).unwrap()
    })
}

fn rel_err(a: &HermiteExpansion, b: &HermiteExpansion) -> f64 {
    a.sub(b).norm() / a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn change_round_trip_and_cocycle(a in sym(3, 6, 6), t1 in tau(), t2 in tau(), t3 in tau()) {
        let b = change_quantization(&a, &t1, &t2);
        prop_assert_eq!(change_quantization(&b, &t2, &t1), a.clone());
        prop_assert_eq!(change_quantization(&b, &t2, &t3), change_quantization(&a, &t1, &t3));
    }

    #[test]
    fn transpose_is_an_involution(a in sym(3, 6, 6), t in tau()) {
        prop_assert_eq!(transpose(&transpose(&a, &t), &t), a);
    }

    #[test]
    fn weyl_transpose_is_reflection(a in sym(3, 6, 6)) {
        prop_assert_eq!(transpose(&a, &rational(1, 2)), a.reflect_xi());
    }

    #[test]
    fn composition_is_associative(a in sym1(2, 3, 4), b in sym1(2, 3, 4), c in sym1(2, 3, 4), t in tau()) {
        let left = compose_tau(&compose_tau(&a, &b, &t).unwrap(), &c, &t).unwrap();
        let right = compose_tau(&a, &compose_tau(&b, &c, &t).unwrap(), &t).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn general_composition_routes_agree(a in sym1(2, 3, 4), b in sym1(2, 3, 4), t1 in tau(), t2 in tau(), t in tau()) {
        let direct = compose_general(&a, &t1, &b, &t2, &t).unwrap();
        let route = compose_tau(&change_quantization(&a, &t1, &t), &change_quantization(&b, &t2, &t), &t).unwrap();
        prop_assert_eq!(direct, route);
    }

    #[test]
    fn operator_is_quantization_independent(a in sym(3, 5, 5), t1 in tau(), t2 in tau()) {
        let b = change_quantization(&a, &t1, &t2);
        prop_assert_eq!(quantize_to_operator(&a, &t1), quantize_to_operator(&b, &t2));
    }

    #[test]
    fn normal_order_is_a_ring_map(a in sym1(2, 3, 4), b in sym1(2, 3, 4)) {
        let s = DiffOperator::from_left_symbol(&a);
        let t = DiffOperator::from_left_symbol(&b);
        prop_assert_eq!(s.compose(&t).unwrap().to_left_symbol(), compose_tau(&a, &b, &rational(0, 1)).unwrap());
    }

    #[test]
    fn operator_composition_is_associative(a in sym1(2, 3, 3), b in sym1(2, 3, 3), c in sym1(2, 3, 3)) {
        let (s, t, u) = (DiffOperator::from_left_symbol(&a), DiffOperator::from_left_symbol(&b), DiffOperator::from_left_symbol(&c));
        prop_assert_eq!(s.compose(&t).unwrap().compose(&u).unwrap(), s.compose(&t.compose(&u).unwrap()).unwrap());
    }

    #[test]
    fn transpose_of_composition(a in sym1(2, 3, 3), b in sym1(2, 3, 3), t in tau(), u in expansion(8), v in expansion(8)) {
        let ab = compose_tau(&a, &b, &t).unwrap();
        let lhs = quantize_to_operator(&transpose(&ab, &t), &t).apply(&u).unwrap();
        let tb = quantize_to_operator(&transpose(&b, &t), &t);
        let ta = quantize_to_operator(&transpose(&a, &t), &t);
        let rhs = tb.apply(&ta.apply(&u).unwrap()).unwrap();
        prop_assert!(rel_err(&lhs, &rhs) < 1e-10);
        // Bilinear transpose relation for the composition itself.
        let op = quantize_to_operator(&ab, &t);
        let defect = op.apply(&u).unwrap().pairing(&v) - u.pairing(&lhs_apply(&ab, &t, &v));
        prop_assert!(defect.norm() < 1e-10 * (1.0 + op.apply(&u).unwrap().norm() * v.norm()));
    }

    #[test]
    fn amplitude_reduction_matches_operator(
        ts in prop::collection::vec(((0u32..=2), (0u32..=2), (0u32..=2), (-6i64..=6, -6i64..=6, 1i64..=5)), 1..5),
        t in tau(),
        u in expansion(10),
    ) {
        let amp = Amplitude::from_terms(1, ts.into_iter()
            .filter(|(a, b, g, _)| a + b + g <= 4)
            .map(|(a, b, g, c)| (vec![a], vec![b], vec![g], coeff(c)))).unwrap();
        let reduced = amplitude_reduce(&amp, &t).into_iter().fold(PolySymbol::zero(1), |acc, p| acc.add(&p));
        let lhs = quantize_to_operator(&reduced, &t).apply(&u).unwrap();
        let rhs = amplitude_operator(&amp).apply(&u).unwrap();
        prop_assert!(rel_err(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn derivatives_commute(a in sym1(3, 6, 5), b in sym1(2, 4, 4)) {
        let (ex, exi, z) = (MultiIndex(vec![1]), MultiIndex(vec![1]), MultiIndex(vec![0]));
        let xy = a.derive(&ex, &z, DerivKind::Partial).derive(&z, &exi, DerivKind::Partial);
        let yx = a.derive(&z, &exi, DerivKind::Partial).derive(&ex, &z, DerivKind::Partial);
        prop_assert_eq!(xy, yx);
        let base = Arc::new(PolySymbol::one(1).add(&PolySymbol::x(1, 0).pow(2)).add(&PolySymbol::xi(1, 0).pow(2)));
        let r = RationalSymbol::new(b, base, 2).unwrap();
        let xy = r.derive(&ex, &z, DerivKind::D).derive(&z, &exi, DerivKind::D);
        let yx = r.derive(&z, &exi, DerivKind::D).derive(&ex, &z, DerivKind::D);
        prop_assert!(xy.value_eq(&yx).unwrap());
    }

    #[test]
    fn jets_match_symbolic_derivatives(a in sym1(3, 6, 5), x in -2.0f64..2.0, xi in -2.0f64..2.0) {
        let f = a.to_float();
        let table = jet_eval(&f, &[x, xi], 4).unwrap();
        for (e, v) in table.partials() {
            let dx = MultiIndex(vec![e[0]]);
            let dxi = MultiIndex(vec![e[1]]);
            let sym = a.derive(&dx, &dxi, DerivKind::Partial).to_float().eval(&[x, xi]);
            prop_assert!((v - sym).norm() <= 1e-12 * sym.norm().max(1.0), "{:?}: {} vs {}", e, v, sym);
        }
    }

    #[test]
    fn pairing_is_symmetric(u in expansion(12), v in expansion(12)) {
        prop_assert_eq!(u.pairing(&v), v.pairing(&u));
    }
}

fn lhs_apply(a: &PolySymbol<Exact>, t: &Rational, v: &HermiteExpansion) -> HermiteExpansion {
    quantize_to_operator(&transpose(a, t), t).apply(v).unwrap()
}

#[test]
fn ladder_derivative_matches_numeric_differentiation() {
    // Fourth-order central differences, Richardson-extrapolated.
    let kmax = 25;
    let mut worst = 0.0f64;
    let mut x = -12.0;
    while x <= 12.0 {
        let fd = |h: f64| -> Vec<f64> {
            let v = |s: f64| hermite_values(kmax, x + s * h);
            let (p1, m1, p2, m2) = (v(1.0), v(-1.0), v(2.0), v(-2.0));
            (0..=kmax).map(|k| (8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12.0 * h)).collect()
        };
        let (a, b) = (fd(1e-3), fd(5e-4));
        for k in 0..=kmax {
            let numeric = (16.0 * b[k] - a[k]) / 15.0;
            let ladder = HermiteExpansion::mode(&[k as u32]).deriv(0).eval_1d(x).re;
            worst = worst.max((numeric - ladder).abs());
        }
        x += 0.05;
    }
    assert!(worst <= 1e-8, "worst {worst}");
}

#[test]
fn rational_derivative_at_random_points() {
    let base = Arc::new(PolySymbol::<Exact>::one(1).add(&PolySymbol::x(1, 0).pow(2)).add(&PolySymbol::xi(1, 0).pow(2)));
    let q = RationalSymbol::recip_base(base).unwrap();
    let dq = q.derive(&MultiIndex(vec![0]), &MultiIndex(vec![1]), DerivKind::Partial);
    let layout = JetLayout::new(2, 1);
    for (x, xi) in [(0.1, 0.7), (-1.5, 2.0), (3.0, -0.2), (0.0, 0.0), (5.5, 4.5)] {
        let jet = q.jets(&layout, &[x, xi]).unwrap();
        let got = dq.eval(&[x, xi]);
        let expect = jet.partial(&[0, 1]).unwrap();
        assert!((got - expect).norm() < 1e-14);
        let p = 1.0 + x * x + xi * xi;
        assert!((got.re + 2.0 * xi / (p * p)).abs() < 1e-14 && got.im.is_zero());
    }
}
