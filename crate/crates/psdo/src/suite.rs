//! The acceptance battery: eleven criteria, each with its own seeded test
//! set, tolerance and time budget.

use std::time::Instant;

use num_complex::Complex64;
use psdo_core::calculus::{change_quantization, combinatorial_identity_check, compose_general, compose_tau, transpose};
use psdo_core::hermite::{quantize_to_operator, quantize_via_left, HermiteExpansion};
use psdo_core::parametrix::{
    check_hypoelliptic, hypo_invariance_check, parametrix_terms, parametrix_verify, residual_decay, HypoParams,
};
use psdo_core::region::RegionSpec;
use psdo_core::scalar::{exact, rational, Exact, Rational, Scalar};
use psdo_core::symbol::PolySymbol;
use psdo_core::weights::{
    verify_conjugate_inequalities, ConjugateGrid, ConjugateMethod, WeightFunction, YoungConjugate,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::grid::{grid_apply_op_tau, GridFunction};
use crate::specs::GridSpec;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: f64,
    /// Time budget in seconds, if any.
    pub budget: Option<f64>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let budget = self.budget.map(|b| format!(" / {b:.0}s")).unwrap_or_default();
        format!("[{tag}] {:>2} {}: {} ({:.2}s{budget})", self.id, self.name, self.detail, self.elapsed)
    }
}

pub const NAMES: [&str; 11] = [
    "quantization round-trip",
    "operator quantization equivalence",
    "weyl benchmark",
    "composition",
    "transpose",
    "combinatorial identities",
    "parametrix exactness",
    "residual decay",
    "hypoellipticity",
    "weight subsystem",
    "grid quadrature",
];

const BUDGETS: [Option<f64>; 11] =
    [Some(10.0), Some(30.0), None, Some(60.0), None, Some(10.0), Some(60.0), Some(60.0), None, None, Some(120.0)];

const TAUS: [(i64, i64); 6] = [(-1, 1), (0, 1), (1, 3), (1, 2), (1, 1), (2, 1)];

/// Runs criterion `id` (1..=11).
pub fn run_criterion(id: u8, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(u64::from(id)));
    let outcome = match id {
        1 => round_trip(&mut rng),
        2 => operator_equivalence(&mut rng),
        3 => weyl_benchmark(),
        4 => composition(&mut rng),
        5 => transposition(&mut rng),
        6 => identities(),
        7 => parametrix_exactness(),
        8 => decay(seed),
        9 => hypoellipticity(seed),
        10 => weight_subsystem(seed),
        11 => grid_quadrature(&mut rng),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let idx = usize::from(id.clamp(1, 11) - 1);
    let budget = BUDGETS[idx];
    let (mut passed, mut detail) = match outcome {
        Ok((p, d)) => (p, d),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = budget {
        if elapsed >= b {
            passed = false;
            detail.push_str(&format!("; over time budget {b}s"));
        }
    }
    CriterionResult { id, name: NAMES[idx], passed, detail, elapsed, budget }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=11).map(|id| run_criterion(id, seed)).collect()
}

type Outcome = Result<(bool, String), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    rational(rng.random_range(-6..=6), rng.random_range(1..=5))
}

/// Random exact symbol of total degree ≤ `max_deg` with up to `terms`
/// monomials.
pub fn random_symbol(rng: &mut impl Rng, d: usize, max_deg: u32, terms: usize) -> PolySymbol<Exact> {
    let n = rng.random_range(1..=terms);
    let mut out = PolySymbol::zero(d);
    for _ in 0..n {
        let deg = rng.random_range(0..=max_deg);
        let mut alpha = vec![0u32; d];
        let mut beta = vec![0u32; d];
        for _ in 0..deg {
            let slot = rng.random_range(0..2 * d);
            if slot < d {
                alpha[slot] += 1;
            } else {
                beta[slot - d] += 1;
            }
        }
        let c = exact(random_rational(rng), random_rational(rng));
        out = out.add(&PolySymbol::from_terms(d, [(alpha, beta, c)]).expect("valid multi-index"));
    }
    out
}

fn random_tau(rng: &mut impl Rng, pool: &[(i64, i64)]) -> Rational {
    let (p, q) = pool[rng.random_range(0..pool.len())];
    rational(p, q)
}

/// Random one-dimensional expansion over modes `≤ kmax`.
pub fn random_expansion(rng: &mut impl Rng, kmax: u32) -> HermiteExpansion {
    let n = rng.random_range(1..=8);
    let coeffs: Vec<(Vec<u32>, Complex64)> = (0..n)
        .map(|_| {
            (vec![rng.random_range(0..=kmax)], Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect();
    HermiteExpansion::from_coeffs(1, coeffs).expect("one-dimensional modes")
}

/// Modes `0..=20` followed by 20 random expansions.
fn test_set(rng: &mut impl Rng) -> Vec<HermiteExpansion> {
    let mut v: Vec<HermiteExpansion> = (0..=20).map(|k| HermiteExpansion::mode(&[k])).collect();
    v.extend((0..20).map(|_| random_expansion(rng, 20)));
    v
}

fn rel_err(a: &HermiteExpansion, b: &HermiteExpansion) -> f64 {
    a.sub(b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn round_trip(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut rt, mut cocycle) = (0, 0);
    for _ in 0..100 {
        let d = rng.random_range(1..=3);
        let a = random_symbol(rng, d, 6, 6);
        let t1 = random_tau(rng, &TAUS);
        let t2 = random_tau(rng, &TAUS);
        let t3 = random_tau(rng, &TAUS);
        let b = change_quantization(&a, &t1, &t2);
        if change_quantization(&b, &t2, &t1) != a {
            rt += 1;
        }
        if change_quantization(&b, &t2, &t3) != change_quantization(&a, &t1, &t3) {
            cocycle += 1;
        }
    }
    Ok((rt == 0 && cocycle == 0, format!("100 symbols, {rt} round-trip and {cocycle} cocycle mismatches")))
}

fn operator_equivalence(rng: &mut ChaCha8Rng) -> Outcome {
    let tests = test_set(rng);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = random_symbol(rng, 1, 6, 6);
        let t1 = random_tau(rng, &TAUS);
        let t2 = random_tau(rng, &TAUS);
        let b = change_quantization(&a, &t1, &t2);
        let op_a = quantize_to_operator(&a, &t1);
        let op_b = quantize_via_left(&b, &t2);
        for u in &tests {
            let e = rel_err(&op_a.apply(u).map_err(err)?, &op_b.apply(u).map_err(err)?);
            worst = worst.max(e);
        }
    }
    Ok((worst <= 1e-10, format!("50 symbols x {} inputs, max error {worst:.2e}", tests.len())))
}

fn weyl_benchmark() -> Outcome {
    let xxi = PolySymbol::<Exact>::x(1, 0).mul(&PolySymbol::xi(1, 0));
    let half = rational(1, 2);
    let changed = change_quantization(&xxi, &rational(0, 1), &half);
    let expected = xxi.add(&PolySymbol::constant(1, exact(rational(0, 1), half.clone())));
    let exact_ok = changed == expected;
    // x·D against (xD + Dx)/2 + i/2, built from ladder moves alone.
    let op = quantize_to_operator(&changed, &half);
    let mut worst = 0.0f64;
    for k in 0..=20 {
        let u = HermiteExpansion::mode(&[k]);
        let left = u.d(0).mul_x(0);
        let weyl = left.add(&u.mul_x(0).d(0)).scale(Complex64::new(0.5, 0.0)).add(&u.scale(Complex64::new(0.0, 0.5)));
        worst = worst.max(left.sub(&weyl).norm()).max(op.apply(&u).map_err(err)?.sub(&left).norm());
    }
    Ok((exact_ok && worst <= 1e-12, format!("xi x -> xi x + i/2 exact: {exact_ok}, ladder error {worst:.2e}")))
}

fn composition(rng: &mut ChaCha8Rng) -> Outcome {
    let tests = test_set(rng);
    let pool = [(0, 1), (1, 2), (1, 1)];
    let (mut worst, mut route, mut assoc) = (0.0f64, 0, 0);
    for _ in 0..50 {
        let a = random_symbol(rng, 1, 3, 4);
        let b = random_symbol(rng, 1, 3, 4);
        let c = random_symbol(rng, 1, 3, 4);
        let t = random_tau(rng, &pool);
        let ab = compose_tau(&a, &b, &t).map_err(err)?;
        let (oa, ob, oab) = (quantize_to_operator(&a, &t), quantize_to_operator(&b, &t), quantize_to_operator(&ab, &t));
        for u in &tests {
            let lhs = oab.apply(u).map_err(err)?;
            let rhs = oa.apply(&ob.apply(u).map_err(err)?).map_err(err)?;
            worst = worst.max(rel_err(&lhs, &rhs));
        }
        let t1 = random_tau(rng, &TAUS);
        let t2 = random_tau(rng, &TAUS);
        let direct = compose_general(&a, &t1, &b, &t2, &t).map_err(err)?;
        let via = compose_tau(&change_quantization(&a, &t1, &t), &change_quantization(&b, &t2, &t), &t).map_err(err)?;
        if direct != via {
            route += 1;
        }
        let left = compose_tau(&ab, &c, &t).map_err(err)?;
        let right = compose_tau(&a, &compose_tau(&b, &c, &t).map_err(err)?, &t).map_err(err)?;
        if left != right {
            assoc += 1;
        }
    }
    Ok((
        worst <= 1e-10 && route == 0 && assoc == 0,
        format!("50 pairs, oracle error {worst:.2e}, {route} route and {assoc} associativity mismatches"),
    ))
}

fn transposition(rng: &mut ChaCha8Rng) -> Outcome {
    let tests = test_set(rng);
    let (mut worst, mut weyl, mut double) = (0.0f64, 0, 0);
    for _ in 0..50 {
        let a = random_symbol(rng, 1, 4, 5);
        let t = random_tau(rng, &TAUS);
        let at = transpose(&a, &t);
        let (op, opt) = (quantize_to_operator(&a, &t), quantize_to_operator(&at, &t));
        for (i, u) in tests.iter().enumerate() {
            let v = &tests[(i * 7 + 3) % tests.len()];
            let au = op.apply(u).map_err(err)?;
            let tv = opt.apply(v).map_err(err)?;
            let defect = (au.pairing(v) - u.pairing(&tv)).norm();
            worst = worst.max(defect / (1.0 + au.norm() * v.norm() + u.norm() * tv.norm()));
        }
        if transpose(&a, &rational(1, 2)) != a.reflect_xi() {
            weyl += 1;
        }
        if transpose(&at, &t) != a {
            double += 1;
        }
    }
    Ok((
        worst <= 1e-10 && weyl == 0 && double == 0,
        format!("pairing defect {worst:.2e}, {weyl} weyl-reflection and {double} involution mismatches"),
    ))
}

fn identities() -> Outcome {
    let r = combinatorial_identity_check(12, 3, 6);
    let mut detail = format!(
        "vandermonde {}/{} ok, bbr {}/{} ok",
        r.vandermonde_checked - r.vandermonde_violations,
        r.vandermonde_checked,
        r.bbr_checked - r.bbr_violations,
        r.bbr_checked
    );
    if let Some(c) = &r.first_counterexample {
        detail.push_str(&format!("; {c}"));
    }
    Ok((r.passes(), detail))
}

pub fn oscillator() -> PolySymbol<Exact> {
    let x = PolySymbol::x(1, 0);
    let xi = PolySymbol::xi(1, 0);
    PolySymbol::one(1).add(&x.mul(&x)).add(&xi.mul(&xi))
}

/// Weyl symbol of the twisted Laplacian on ℝ².
pub fn twisted_laplacian() -> PolySymbol<Exact> {
    let half = Exact::from_rational(&rational(1, 2));
    let a = PolySymbol::xi(2, 0).sub(&PolySymbol::x(2, 1).scale(&half));
    let b = PolySymbol::xi(2, 1).sub(&PolySymbol::x(2, 0).scale(&half));
    a.mul(&a).add(&b.mul(&b))
}

fn parametrix_exactness() -> Outcome {
    let p = oscillator();
    let mut parts = Vec::new();
    let mut ok = true;
    for tau in [rational(0, 1), rational(1, 2)] {
        let res = parametrix_terms(&p, &tau, 6).map_err(err)?;
        let v = parametrix_verify(&res, &p).map_err(err)?;
        ok &= v.passes;
        let bad: Vec<String> = v.nonzero.iter().map(|(j, _)| j.to_string()).collect();
        parts.push(format!("tau={tau}: r_0=1 {}, nonzero r_j: [{}]", v.r0_is_one, bad.join(",")));
    }
    Ok((ok, parts.join("; ")))
}

fn decay(seed: u64) -> Outcome {
    let p = oscillator();
    let mut slopes = Vec::new();
    let mut ok = true;
    for n in 0..=4 {
        let res = parametrix_terms(&p, &rational(0, 1), n).map_err(err)?;
        let r = residual_decay(&res, &p, 1.0, 4..=9, 16, seed).map_err(err)?;
        ok &= r.passes;
        slopes.push(r.slope);
    }
    let monotone = slopes.windows(2).all(|w| w[1] < w[0]);
    let s: Vec<String> = slopes.iter().map(|v| format!("{v:.3}")).collect();
    Ok((ok && monotone, format!("slopes N=0..4: [{}], monotone {monotone}", s.join(", "))))
}

fn hypoellipticity(seed: u64) -> Outcome {
    let w = WeightFunction::gevrey(0.5).map_err(err)?;
    let sigma = HypoParams::default_sigma(&w, 1.0).map_err(err)?;
    let hp = HypoParams::new(0.0, 0.0, 1.0, 2.0, sigma, 3).map_err(err)?;
    let region = RegionSpec::new(2.0, 100.0, 8, 24, seed).map_err(err)?;
    let osc = check_hypoelliptic(&oscillator().to_float(), &w, &hp, &region, 3).map_err(err)?;
    let tw = check_hypoelliptic(&twisted_laplacian().to_float(), &w, &hp, &region, 2).map_err(err)?;
    let witness = tw.witness.as_ref().map(|wt| {
        let p = &wt.point;
        // Zero set: ξ₁ = x₂/2, ξ₂ = x₁/2.
        let off = (p[2] - p[1] / 2.0).abs().max((p[3] - p[0] / 2.0).abs());
        (psdo_core::symbol::japanese_bracket(p), off)
    });
    let tw_ok = !tw.lower_bounded && witness.is_some_and(|(r, off)| r > 50.0 && off < 1e-6 * r);
    let inv =
        hypo_invariance_check(&oscillator(), &rational(0, 1), &rational(1, 2), &w, &hp, &region, 3).map_err(err)?;
    let detail = format!(
        "oscillator passes {} (C1 {:.3}, C {:.3}); twisted laplacian lower bound {} witness {}; invariance {} (ratio {:.3})",
        osc.passes,
        osc.c1,
        osc.best.1,
        tw.lower_bounded,
        witness.map_or("none".to_string(), |(r, off)| format!("at <z>={r:.1}, off zero set {off:.1e}")),
        inv.passes,
        inv.lower_ratio
    );
    Ok((osc.passes && tw_ok && inv.passes, detail))
}

fn weight_subsystem(seed: u64) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.3, 0.5, 0.7] {
        let w = WeightFunction::gevrey(a).map_err(err)?;
        let conj = w.conjugate();
        let numeric = YoungConjugate::new(w.clone(), ConjugateMethod::NumericMax);
        let zero = conj.eval(0.0) == 0.0 && numeric.eval(0.0) == 0.0;
        let grid = ConjugateGrid { seed, ..ConjugateGrid::default() };
        let mut worst = 0.0f64;
        for &y in &grid.values {
            let cf = conj.closed_form(y).ok_or("gevrey conjugate has a closed form")?;
            worst = worst.max((numeric.eval(y) - cf).abs() / cf.abs().max(1.0));
        }
        let rep = verify_conjugate_inequalities(&w, &grid);
        let lemmas = rep.lemma1_violations == 0 && rep.lemma2_violations == 0;
        let nota = rep.nota1_violations == 0 && rep.nota2_violations == 0;
        let stable = rep.prop.iter().all(|p| p.stabilized);
        let peak = rep.prop.iter().map(|p| p.argmax).max().unwrap_or(0);
        ok &= zero && worst <= 1e-8 && lemmas && nota && stable;
        parts.push(format!(
            "a={a}: phi*(0)=0 {zero}, conj err {worst:.1e}, lemmas {}/{} ok, nota ok {nota}, prop stable {stable} (argmax {peak})",
            rep.lemma1_checked + rep.lemma2_checked - rep.lemma1_violations - rep.lemma2_violations,
            rep.lemma1_checked + rep.lemma2_checked,
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn grid_quadrature(rng: &mut ChaCha8Rng) -> Outcome {
    let spec = GridSpec::default();
    let zero = rational(0, 1);
    let gauss = |x: f64| Complex64::new((-x * x / 2.0).exp(), 0.0);
    let u = GridFunction::from_fn(&spec, gauss);

    let id = grid_apply_op_tau(&PolySymbol::<Exact>::one(1).to_float(), &zero, &u).map_err(err)?;
    let id_err = id.max_diff(&u);

    let xi = grid_apply_op_tau(&PolySymbol::<Exact>::xi(1, 0).to_float(), &zero, &u).map_err(err)?;
    // −i u′ = i x e^{−x²/2}
    let expect = GridFunction::from_fn(&spec, |x| Complex64::new(0.0, x) * gauss(x));
    let xi_err = xi.max_diff(&expect);

    let mut ladder = 0.0f64;
    for tau in [rational(0, 1), rational(1, 2), rational(1, 1), rational(1, 3)] {
        let a = random_symbol(rng, 1, 3, 4);
        let v = random_expansion(rng, 6);
        let grid_in = GridFunction::from_expansion(&spec, &v);
        let out = grid_apply_op_tau(&a.to_float(), &tau, &grid_in).map_err(err)?;
        let oracle = GridFunction::from_expansion(&spec, &quantize_to_operator(&a, &tau).apply(&v).map_err(err)?);
        ladder = ladder.max(out.max_diff(&oracle) / oracle.max_abs().max(1.0));
    }
    Ok((
        id_err <= 1e-8 && xi_err <= 1e-6 && ladder <= 1e-6,
        format!("N={}: identity {id_err:.1e}, xi on gaussian {xi_err:.1e}, ladder agreement {ladder:.1e}", spec.n),
    ))
}
