use num_complex::Complex64;
use psdo::grid::{grid_apply_op_tau, GridError, GridFunction};
use psdo::specs::GridSpec;
use psdo_core::hermite::{quantize_to_operator, HermiteExpansion};
use psdo_core::scalar::{rational, Exact};
use psdo_core::symbol::{ExprSymbol, PolySymbol};

fn gaussian(spec: &GridSpec) -> GridFunction {
    GridFunction::from_fn(spec, |x| Complex64::new((-x * x / 2.0).exp(), 0.0))
}

#[test]
fn x_xi_on_a_hermite_mode_at_every_tau() {
    let spec = GridSpec { n: 512, xmax: 12.0 };
    let a = PolySymbol::<Exact>::x(1, 0).mul(&PolySymbol::xi(1, 0));
    let u = HermiteExpansion::mode(&[2]);
    for tau in [rational(0, 1), rational(1, 2), rational(1, 1), rational(-1, 1), rational(2, 3)] {
        let out = grid_apply_op_tau(&a.to_float(), &tau, &GridFunction::from_expansion(&spec, &u)).unwrap();
        let oracle = GridFunction::from_expansion(&spec, &quantize_to_operator(&a, &tau).apply(&u).unwrap());
        assert!(out.max_diff(&oracle) < 1e-9, "tau {tau}: {}", out.max_diff(&oracle));
    }
}

#[test]
fn expression_symbols_on_the_grid() {
    // exp(−ξ²/2)·g: the Gaussian filter multiplies the transform by e^{−ξ²/2},
    // so e^{−x²/2} becomes e^{−x²/4}/√2.
    let spec = GridSpec::default();
    let a = ExprSymbol::parse("exp(-xi^2/2)", 1).unwrap();
    let out = grid_apply_op_tau(&a, &rational(0, 1), &gaussian(&spec)).unwrap();
    let expect = GridFunction::from_fn(&spec, |x| Complex64::new((-x * x / 4.0).exp() / 2f64.sqrt(), 0.0));
    assert!(out.max_diff(&expect) < 1e-10, "{}", out.max_diff(&expect));
}

#[test]
fn preconditions() {
    let spec = GridSpec { n: 64, xmax: 2.0 };
    let one = PolySymbol::<Exact>::one(1).to_float();
    let wide = gaussian(&spec);
    assert!(matches!(grid_apply_op_tau(&one, &rational(0, 1), &wide), Err(GridError::EdgeDecay(_))));
    let spec = GridSpec { n: 64, xmax: 12.0 };
    let u = gaussian(&spec);
    assert!(matches!(grid_apply_op_tau(&one, &rational(1, 97), &u), Err(GridError::Tau(_))));
    let two = PolySymbol::<Exact>::one(2).to_float();
    assert!(matches!(grid_apply_op_tau(&two, &rational(0, 1), &u), Err(GridError::Dimension(2))));
}

#[test]
fn result_does_not_depend_on_thread_count() {
    let spec = GridSpec { n: 256, xmax: 12.0 };
    let a = PolySymbol::<Exact>::x(1, 0).pow(2).mul(&PolySymbol::xi(1, 0)).to_float();
    let u = gaussian(&spec);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| grid_apply_op_tau(&a, &rational(1, 3), &u).unwrap())
    };
    assert_eq!(run(1), run(4));
}
