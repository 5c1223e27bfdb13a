//! Hypoellipticity checks and the recursive parametrix `q ∘ p ~ 1`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float as _;
use num_traits::{One, Signed, Zero};

use crate::calculus::change_quantization;
use crate::error::{Error, Result};
use crate::multiindex::{exact_order, MultiIndex};
use crate::region::RegionSpec;
use crate::scalar::{rational_to_f64, Exact, Float, Rational, Scalar};
use crate::symbol::{
    assemble_formal_sum, japanese_bracket, smooth_step_jet, DerivKind, FormalSum, Jet, JetLayout, JetTable,
    PointSymbol, PolySymbol, RationalSymbol, SymbolAlgebra,
};
use crate::weights::{smooth_step, CutoffFamily, WeightFamily, WeightFunction};

/// Largest truncation order accepted by the exact recursion.
pub const MAX_PARAMETRIX_ORDER: usize = 12;

/// Parameters of the hypoelliptic class: bounds `C₁e^{m₀ω} ≤ |a| ≤ C₂e^{mω}`
/// beyond `⟨z⟩ ≥ R` and derivative gains `⟨z⟩^{−ρ|α+β|}` weighted by the
/// conjugate of `σ`.
#[derive(Clone, Debug)]
pub struct HypoParams {
    pub m: f64,
    pub m0: f64,
    pub rho: f64,
    pub r: f64,
    pub sigma: WeightFunction,
    /// Largest `n` tried when fitting condition (ii).
    pub n: u32,
    /// Optional a-priori bound on the fitted `C`.
    pub c: Option<f64>,
}

impl HypoParams {
    pub fn new(m: f64, m0: f64, rho: f64, r: f64, sigma: WeightFunction, n: u32) -> Result<Self> {
        if !(m0 <= m) {
            return Err(Error::pre("hypo params", "need m0 ≤ m"));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::pre("hypo params", "rho must lie in (0, 1]"));
        }
        if !(r >= 1.0) {
            return Err(Error::pre("hypo params", "R must be at least 1"));
        }
        if !matches!(sigma.family(), WeightFamily::Gevrey { .. }) {
            return Err(Error::pre("hypo params", "sigma must be a Gevrey weight"));
        }
        if n == 0 {
            return Err(Error::pre("hypo params", "n must be positive"));
        }
        Ok(HypoParams { m, m0, rho, r, sigma, n, c: None })
    }

    pub fn with_bound(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    /// A Gevrey `σ` with `ω(t^{1/ρ}) = o(σ(t))`: exponent halfway between
    /// `a/ρ` and 1 for `ω = t^a`, and `1/2` for logarithmic weights.
    pub fn default_sigma(omega: &WeightFunction, rho: f64) -> Result<WeightFunction> {
        match omega.family() {
            WeightFamily::Gevrey { a } => {
                let e = a / rho;
                if e >= 1.0 {
                    return Err(Error::pre("hypo params", "no Gevrey sigma dominates omega(t^(1/rho))"));
                }
                WeightFunction::gevrey((e + 1.0) / 2.0)
            }
            _ => WeightFunction::gevrey(0.5),
        }
    }

    /// Checks `ω(t^{1/ρ})/σ(t)` decreases along `t = 2^k`, `k = 8..60`, and
    /// ends below its starting value.
    pub fn o_relation(&self, omega: &WeightFunction) -> bool {
        let ratio = |k: i32| {
            let t = 2f64.powi(k);
            omega.omega(t.powf(1.0 / self.rho)) / self.sigma.omega(t)
        };
        let v: Vec<f64> = (8..=60).map(ratio).collect();
        let tail = &v[v.len() / 2..];
        v.iter().all(|x| x.is_finite())
            && tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
            && v[v.len() - 1] < v[0]
    }
}

/// A point where `|a|` is smallest relative to `e^{m₀ω}` on the outer shell,
/// with the per-shell minima that lead there.
#[derive(Clone, Debug)]
pub struct HypoWitness {
    pub point: Vec<f64>,
    pub value: f64,
    /// `(⟨z⟩, min |a| e^{−m₀ω})` per shell.
    pub profile: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct HypoReport {
    /// Fitted `C₁ = min |a| e^{−m₀ω}`.
    pub c1: f64,
    /// Fitted `C₂ = max |a| e^{−mω}`; reported, not part of the verdict.
    pub c2: f64,
    pub lower_per_shell: Vec<f64>,
    pub upper_per_shell: Vec<f64>,
    pub lower_bounded: bool,
    pub upper_bounded: bool,
    /// `(n, C)` for each `n ≤ HypoParams::n`.
    pub derivative_fits: Vec<(u32, f64)>,
    /// The `(n, C)` pair with smallest `C`.
    pub best: (u32, f64),
    pub derivative_per_shell: Vec<f64>,
    pub derivative_bounded: bool,
    pub sigma_ok: bool,
    pub passes: bool,
    pub witness: Option<HypoWitness>,
}

/// Relative size below which a shell minimum counts as a zero of `a`.
const VANISHING: f64 = 1e-8;

/// Fits the constants of the hypoelliptic class on the shells of `region`
/// with `⟨z⟩ ≥ R`.
///
/// The verdict requires the lower bound in (i) and condition (ii). The
/// upper bound is fitted and reported: for symbols already in the class it
/// holds by assumption, and hypoellipticity reduces to the lower bound.
pub fn check_hypoelliptic<P: PointSymbol + ?Sized>(
    p: &P,
    omega: &WeightFunction,
    hp: &HypoParams,
    region: &RegionSpec,
    max_order: u32,
) -> Result<HypoReport> {
    let nv = 2 * p.dim();
    let radii = region.radii();
    let shells: Vec<usize> = (0..radii.len()).filter(|&s| radii[s] >= hp.r * (1.0 - 1e-12)).collect();
    if shells.is_empty() {
        return Err(Error::pre("check_hypoelliptic", "no sample shell lies beyond R"));
    }
    let layout = JetLayout::new(nv, max_order.max(1));
    let conj = hp.sigma.conjugate();
    let samples = region.samples(nv);

    let ns = shells.len();
    let mut lower = alloc::vec![f64::INFINITY; ns];
    let mut upper = alloc::vec![0.0f64; ns];
    let mut typical = alloc::vec![0.0f64; ns];
    let mut deriv = alloc::vec![alloc::vec![0.0f64; ns]; hp.n as usize];
    let mut starts: Vec<Vec<(f64, Vec<f64>)>> = alloc::vec![Vec::new(); ns];

    for s in &samples {
        let Some(si) = shells.iter().position(|&k| k == s.shell) else { continue };
        let table = p.jets(&layout, &s.point)?;
        let abs = table.value().norm();
        let w = omega.omega_vec(&s.point);
        let lo = abs * (-hp.m0 * w).exp();
        lower[si] = lower[si].min(lo);
        upper[si] = upper[si].max(abs * (-hp.m * w).exp());
        typical[si] = typical[si].max(abs);
        starts[si].push((lo, s.point.clone()));
        for n in 1..=hp.n {
            let c = derivative_constant(&table, p.dim(), abs, s.bracket, hp.rho, n, &conj);
            let slot = &mut deriv[n as usize - 1][si];
            *slot = slot.max(c);
        }
    }

    // Refine each shell minimum by descending |a|² along the sphere.
    let mut witness_pt: Vec<Option<Vec<f64>>> = alloc::vec![None; ns];
    for si in 0..ns {
        let radius = (radii[shells[si]].powi(2) - 1.0).max(0.0).sqrt();
        starts[si].sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = starts[si].first().cloned();
        for (_, z0) in starts[si].iter().take(3) {
            let z = sphere_descent(p, &layout, z0, radius)?;
            let lo = p.eval(&z).norm() * (-hp.m0 * omega.omega_vec(&z)).exp();
            if best.as_ref().is_none_or(|b| lo < b.0) {
                best = Some((lo, z));
            }
        }
        if let Some((lo, z)) = best {
            lower[si] = lower[si].min(lo);
            witness_pt[si] = Some(z);
        }
    }

    let vanishing = lower.iter().zip(&typical).any(|(&lo, &t)| !(lo > VANISHING * t.max(f64::MIN_POSITIVE)));
    let recips: Vec<f64> = lower.iter().map(|&v| 1.0 / v).collect();
    let lower_bounded = !vanishing && !crate::symbol::grows_at_edge(&recips);
    let upper_bounded = !crate::symbol::grows_at_edge(&upper);
    let c1 = lower.iter().copied().fold(f64::INFINITY, f64::min);
    let c2 = upper.iter().copied().fold(0.0, f64::max);

    let derivative_fits: Vec<(u32, f64)> =
        (1..=hp.n).map(|n| (n, deriv[n as usize - 1].iter().copied().fold(0.0, f64::max))).collect();
    let best_i =
        (0..derivative_fits.len()).min_by(|&a, &b| derivative_fits[a].1.total_cmp(&derivative_fits[b].1)).unwrap_or(0);
    let best = derivative_fits[best_i];
    let derivative_per_shell = deriv[best_i].clone();
    let derivative_bounded =
        best.1.is_finite() && !crate::symbol::grows_at_edge(&derivative_per_shell) && hp.c.is_none_or(|c| best.1 <= c);

    let sigma_ok = hp.o_relation(omega);
    let passes = sigma_ok && lower_bounded && derivative_bounded;
    let witness = if lower_bounded {
        None
    } else {
        witness_pt[ns - 1].clone().map(|point| HypoWitness {
            value: p.eval(&point).norm(),
            point,
            profile: shells.iter().zip(&lower).map(|(&s, &v)| (radii[s], v)).collect(),
        })
    };
    Ok(HypoReport {
        c1,
        c2,
        lower_per_shell: lower,
        upper_per_shell: upper,
        lower_bounded,
        upper_bounded,
        derivative_fits,
        best,
        derivative_per_shell,
        derivative_bounded,
        sigma_ok,
        passes,
        witness,
    })
}

/// `max_{α,β} (|∂^α_x∂^β_ξ a| ⟨z⟩^{ρk} e^{−φ*(n|α|)/n − φ*(n|β|)/n} / |a|)^{1/k}`
/// over the jet's orders `k = |α+β| ≥ 1`.
fn derivative_constant(
    table: &JetTable,
    d: usize,
    abs: f64,
    bracket: f64,
    rho: f64,
    n: u32,
    conj: &crate::weights::YoungConjugate,
) -> f64 {
    let nf = f64::from(n);
    let mut c = 0.0f64;
    for (e, v) in table.partials() {
        let ka: u32 = e[..d].iter().sum();
        let kb: u32 = e[d..].iter().sum();
        let k = ka + kb;
        if k == 0 {
            continue;
        }
        let g = v.norm();
        if g == 0.0 {
            continue;
        }
        let log = g.ln() + rho * f64::from(k) * bracket.ln()
            - conj.eval(nf * f64::from(ka)) / nf
            - conj.eval(nf * f64::from(kb)) / nf
            - abs.ln();
        let ck = (log / f64::from(k)).exp();
        c = c.max(if ck.is_nan() { f64::INFINITY } else { ck });
    }
    c
}

/// Minimizes `|a|²` on the sphere `|z| = radius` from `z0` by projected
/// gradient steps with an adaptive step length.
fn sphere_descent<P: PointSymbol + ?Sized>(
    p: &P,
    layout: &Arc<JetLayout>,
    z0: &[f64],
    radius: f64,
) -> Result<Vec<f64>> {
    let nv = z0.len();
    let project = |z: &mut Vec<f64>| {
        let n = crate::symbol::euclidean_norm(z);
        if n > 0.0 {
            z.iter_mut().for_each(|v| *v *= radius / n);
        }
    };
    let f = |z: &[f64]| p.eval(z).norm_sqr();
    let mut z = z0.to_vec();
    project(&mut z);
    let mut fz = f(&z);
    let mut step = 0.25 * radius.max(1.0);
    let mut unit = alloc::vec![0u32; nv];
    for _ in 0..2000 {
        if fz == 0.0 || step < 1e-14 * radius.max(1.0) {
            break;
        }
        let table = p.jets(layout, &z)?;
        let a = table.value();
        let mut g: Vec<f64> = (0..nv)
            .map(|i| {
                unit[i] = 1;
                let di = table.partial(&unit).unwrap_or_default();
                unit[i] = 0;
                2.0 * (a.conj() * di).re
            })
            .collect();
        // Tangential component only.
        let r2 = z.iter().map(|v| v * v).sum::<f64>();
        if r2 > 0.0 {
            let dot = g.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() / r2;
            g.iter_mut().zip(&z).for_each(|(gi, zi)| *gi -= dot * zi);
        }
        let gn = crate::symbol::euclidean_norm(&g);
        if !(gn > 0.0) {
            break;
        }
        let mut cand: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi - step * gi / gn).collect();
        project(&mut cand);
        let fc = f(&cand);
        if fc < fz {
            z = cand;
            fz = fc;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    Ok(z)
}

/// How the nonvanishing of `p` was established.
#[derive(Clone, Debug, PartialEq)]
pub enum Certification {
    /// Positive constant plus even monomials with positive real coefficients.
    Structural,
    /// Smallest `|p|` seen on a sample of the working region.
    Sampled { min_abs: f64 },
}

/// Terms `q_0, …, q_N` of the parametrix of `p` at quantization `τ`.
#[derive(Clone, Debug)]
pub struct ParametrixResult {
    pub terms: Vec<RationalSymbol<Exact>>,
    pub tau: Rational,
    pub base: Arc<PolySymbol<Exact>>,
    pub certification: Certification,
}

impl ParametrixResult {
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// `Σ_{j≤N} q_j(z)`.
    pub fn partial_sum(&self, z: &[f64]) -> Complex64 {
        self.terms.iter().map(|q| q.eval(z)).sum()
    }
}

fn structurally_positive(p: &PolySymbol<Exact>) -> bool {
    let mut has_constant = false;
    for (a, b, c) in p.terms() {
        if !c.im.is_zero() || !c.re.is_positive() {
            return false;
        }
        if a.0.iter().chain(&b.0).any(|e| e % 2 == 1) {
            return false;
        }
        has_constant |= a.is_zero() && b.is_zero();
    }
    has_constant
}

/// Samples `|p|` on the origin and on `⟨z⟩ ∈ [1, 10³]`; fails at the first
/// point where `|p|` is negligible against its largest sampled value.
fn sample_nonvanishing(p: &PolySymbol<Exact>) -> Result<f64> {
    let f = p.to_float();
    let nv = 2 * p.dim();
    let region = RegionSpec::new(1.0, 1e3, 16, 64, 0x5eed)?;
    let mut pts: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; nv]];
    for r in [0.25, 0.5] {
        for d in region.unit_directions(nv) {
            pts.push(d.iter().map(|v| v * r).collect());
        }
    }
    pts.extend(region.samples(nv).into_iter().map(|s| s.point));
    let vals: Vec<f64> = pts.iter().map(|z| f.eval(z).norm()).collect();
    let scale = vals.iter().copied().fold(0.0, f64::max);
    let mut min = f64::INFINITY;
    for (z, &v) in pts.iter().zip(&vals) {
        if !(v > 1e-9 * scale.max(1.0)) {
            return Err(Error::Vanishing { point: z.clone() });
        }
        min = min.min(v);
    }
    Ok(min)
}

/// The exact recursion `q_0 = 1/p`,
/// `q_j = −q_0 Σ_{0<|ε+γ|≤j} ((−1)^{|ε|}/(ε!γ!)) τ^{|ε|}(1−τ)^{|γ|}
/// (∂^γ_ξ D^ε_x q_{j−|ε+γ|})(∂^ε_ξ D^γ_x p)`.
///
/// Each `q_j` is returned over `p^{2j+1}`.
pub fn parametrix_terms(p: &PolySymbol<Exact>, tau: &Rational, n: usize) -> Result<ParametrixResult> {
    let d = p.dim();
    if n > MAX_PARAMETRIX_ORDER {
        return Err(Error::pre("parametrix", alloc::format!("order {n} exceeds {MAX_PARAMETRIX_ORDER}")));
    }
    if d > 2 {
        return Err(Error::pre("parametrix", "exact recursion supports d ≤ 2"));
    }
    if p.is_zero() {
        return Err(Error::Vanishing { point: alloc::vec![0.0; 2 * d] });
    }
    let certification = if structurally_positive(p) {
        Certification::Structural
    } else {
        Certification::Sampled { min_abs: sample_nonvanishing(p)? }
    };
    let base = Arc::new(p.clone());
    let (deg_x, deg_xi) = p.max_degrees();
    let t = Exact::from_rational(tau);
    let s = Exact::one() - t.clone();
    let q0 = RationalSymbol::recip_base(base.clone())?;
    let mut terms = alloc::vec![q0.clone()];
    for j in 1..=n {
        let mut acc = RationalSymbol::new(PolySymbol::zero(d), base.clone(), 0)?;
        for k in 1..=j as u32 {
            let prev = &terms[j - k as usize];
            for ke in 0..=k {
                for eps in exact_order(d, ke).into_iter().filter(|e| e.le(&deg_xi)) {
                    for gam in exact_order(d, k - ke).into_iter().filter(|g| g.le(&deg_x)) {
                        let mut coef =
                            t.pow(ke) * s.pow(k - ke) * Exact::recip_int(&(eps.factorial() * gam.factorial()));
                        if coef.is_zero() {
                            continue;
                        }
                        if ke % 2 == 1 {
                            coef = -coef;
                        }
                        let dp = p.derive(&gam, &eps, DerivKind::Partial).scale(&Exact::minus_i_pow(k - ke));
                        if dp.is_zero() {
                            continue;
                        }
                        let dq = prev.derive(&eps, &gam, DerivKind::Partial).scale(&Exact::minus_i_pow(ke));
                        acc = acc.add(&dq.mul_poly(&dp).scale(&coef))?;
                    }
                }
            }
        }
        let qj = acc.mul(&q0)?.neg();
        let pw = 2 * j as u32 + 1;
        terms.push(RationalSymbol::new(qj.numerator_over(pw), base.clone(), pw)?);
    }
    Ok(ParametrixResult { terms, tau: tau.clone(), base, certification })
}

/// Graded terms of `(Σ_l a_l) ∘ b`: entry `g` collects
/// `((−1)^{|β|}/(β!γ!)) τ^{|β|}(1−τ)^{|γ|} (∂^γ_ξ D^β_x a_l)(∂^β_ξ D^γ_x b)`
/// with `l + |β+γ| = g`, for `g ≤ max_grade`.
pub fn graded_composition<S: Scalar, T: SymbolAlgebra<S>>(
    a: &[T],
    b: &T,
    tau: &Rational,
    max_grade: usize,
) -> Result<Vec<T>> {
    let (bx, bxi) =
        b.derivative_bounds().ok_or_else(|| Error::pre("graded composition", "right factor must be polynomial"))?;
    let t = S::from_rational(tau);
    let s = S::one() - t.clone();
    let mut out: Vec<T> = (0..=max_grade).map(|_| b.zero_like()).collect();
    // Both derivative orders range over the box of b's degrees.
    let boxes: Vec<(MultiIndex, MultiIndex)> =
        bxi.below().flat_map(|beta| bx.below().map(move |gamma| (beta.clone(), gamma))).collect();
    for (l, al) in a.iter().enumerate() {
        for (beta, gamma) in &boxes {
            let (kb, kg) = (beta.order(), gamma.order());
            let g = l + (kb + kg) as usize;
            if g > max_grade {
                continue;
            }
            let mut coef = t.pow(kb) * s.pow(kg) * S::recip_int(&(beta.factorial() * gamma.factorial()));
            if coef.is_zero() {
                continue;
            }
            if kb % 2 == 1 {
                coef = -coef;
            }
            let right = b.dx_dxi(gamma, beta);
            if right.is_zero() {
                continue;
            }
            let left = al.dx_dxi(beta, gamma);
            out[g] = out[g].add(&left.mul(&right)?.scale(&coef))?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// `r_0, …, r_N`.
    pub grades: Vec<RationalSymbol<Exact>>,
    pub r0_is_one: bool,
    /// `(j, numerator over p^{power})` for every nonzero `r_j`, `j ≥ 1`.
    pub nonzero: Vec<(usize, PolySymbol<Exact>)>,
    pub passes: bool,
}

/// Recomputes the graded composition of `Σ q_j` with `p` and checks
/// `r_0 = 1`, `r_j = 0` for `1 ≤ j ≤ N`, exactly.
pub fn parametrix_verify(res: &ParametrixResult, p: &PolySymbol<Exact>) -> Result<VerifyReport> {
    let lifted = RationalSymbol::new(p.clone(), res.base.clone(), 0)?;
    let grades = graded_composition(&res.terms, &lifted, &res.tau, res.order())?;
    let one = RationalSymbol::new(PolySymbol::one(p.dim()), res.base.clone(), 0)?;
    let r0_is_one = grades[0].value_eq(&one)?;
    let nonzero: Vec<(usize, PolySymbol<Exact>)> = grades
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, r)| !r.is_zero())
        .map(|(j, r)| (j, r.numerator().clone()))
        .collect();
    let passes = r0_is_one && nonzero.is_empty();
    Ok(VerifyReport { grades, r0_is_one, nonzero, passes })
}

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub order: usize,
    /// Shell brackets `⟨z⟩ = 2^k`.
    pub brackets: Vec<f64>,
    /// Largest `|r_{N+1}|` per shell.
    pub maxima: Vec<f64>,
    /// Least-squares slope of `log max |r_{N+1}|` against `log ⟨z⟩`;
    /// `−∞` when the remainder vanishes identically.
    pub slope: f64,
    /// `−ρ(N+1) + 0.2`.
    pub threshold: f64,
    pub identically_zero: bool,
    pub passes: bool,
}

/// Samples the leading remainder `r_{N+1}` of `(Σ_{j≤N} q_j) ∘ p` on the
/// shells `⟨z⟩ = 2^k`, `k ∈ ks`, and fits its decay rate.
pub fn residual_decay(
    res: &ParametrixResult,
    p: &PolySymbol<Exact>,
    rho: f64,
    ks: core::ops::RangeInclusive<i32>,
    directions: usize,
    seed: u64,
) -> Result<DecayReport> {
    let n = res.order();
    let lifted = RationalSymbol::new(p.clone(), res.base.clone(), 0)?;
    let grades = graded_composition(&res.terms, &lifted, &res.tau, n + 1)?;
    let r = &grades[n + 1];
    let threshold = -rho * (n as f64 + 1.0) + 0.2;
    let brackets: Vec<f64> = ks.map(|k| 2f64.powi(k)).collect();
    if r.is_zero() {
        return Ok(DecayReport {
            order: n,
            maxima: alloc::vec![0.0; brackets.len()],
            brackets,
            slope: f64::NEG_INFINITY,
            threshold,
            identically_zero: true,
            passes: true,
        });
    }
    let rf = r.to_float();
    let nv = 2 * p.dim();
    let dirs = RegionSpec::new(1.0, 1.0, 1, directions, seed)?.unit_directions(nv);
    let maxima: Vec<f64> = brackets
        .iter()
        .map(|&b| {
            let norm = (b * b - 1.0).sqrt();
            dirs.iter()
                .map(|u| {
                    let z: Vec<f64> = u.iter().map(|v| v * norm).collect();
                    rf.eval(&z).norm()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let slope = fit_slope(&brackets, &maxima);
    Ok(DecayReport {
        order: n,
        brackets,
        maxima,
        slope,
        threshold,
        identically_zero: false,
        passes: slope <= threshold,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `q = χ Σ_j φ_j q_j`, with `χ` vanishing on `⟨z⟩ ≤ R` and equal to 1
/// beyond `⟨z⟩ ≥ 2R`.
#[derive(Clone, Debug)]
pub struct AssembledParametrix {
    sum: FormalSum<RationalSymbol<Float>>,
    cutoffs: CutoffFamily,
    inner: f64,
}

/// Assembles the parametrix with the cutoffs' `R` as inner excision radius.
pub fn assemble_parametrix(res: &ParametrixResult, cutoffs: CutoffFamily) -> Result<AssembledParametrix> {
    let inner = cutoffs.r;
    let terms = res.terms.iter().map(|q| q.to_float()).collect();
    let sum = FormalSum::new(terms, 0.0, 1.0, cutoffs.r)?;
    Ok(AssembledParametrix { sum, cutoffs, inner })
}

impl AssembledParametrix {
    pub fn inner_radius(&self) -> f64 {
        self.inner
    }

    fn excision(&self, z: &[f64]) -> f64 {
        smooth_step((japanese_bracket(z) - self.inner) / self.inner)
    }
}

impl PointSymbol for AssembledParametrix {
    fn dim(&self) -> usize {
        self.sum.terms.first().map_or(0, |t| t.dim())
    }

    fn eval(&self, point: &[f64]) -> Complex64 {
        let chi = self.excision(point);
        if chi == 0.0 {
            return Complex64::zero();
        }
        assemble_formal_sum(&self.sum, self.cutoffs.clone()).eval(point) * chi
    }

    fn jets(&self, layout: &Arc<JetLayout>, point: &[f64]) -> Result<JetTable> {
        let inner = assemble_formal_sum(&self.sum, self.cutoffs.clone()).jets(layout, point)?.into_jet();
        let mut b2 = Jet::constant(layout, Complex64::one());
        for (i, &zi) in point.iter().enumerate() {
            let v = Jet::variable(layout, i, zi);
            b2 = b2.add(&v.mul(&v));
        }
        let u = b2.sqrt()?.add_const(Complex64::new(-self.inner, 0.0)).scale(Complex64::new(1.0 / self.inner, 0.0));
        Ok(smooth_step_jet(&u).mul(&inner).into_table())
    }
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub before: HypoReport,
    pub after: HypoReport,
    /// `a_{τ₂} − a_{τ₁}`.
    pub correction: PolySymbol<Exact>,
    /// `C₁` after the change over `C₁` before.
    pub lower_ratio: f64,
    pub passes: bool,
}

/// Changes the quantization of `a` from `τ₁` to `τ₂` and refits. For
/// `m₀ = m` only the lower bound of the changed symbol decides.
#[allow(clippy::too_many_arguments)]
pub fn hypo_invariance_check(
    a: &PolySymbol<Exact>,
    tau1: &Rational,
    tau2: &Rational,
    omega: &WeightFunction,
    hp: &HypoParams,
    region: &RegionSpec,
    max_order: u32,
) -> Result<InvarianceReport> {
    if hp.m0 != hp.m {
        return Err(Error::pre("hypo invariance", "requires m0 = m"));
    }
    let changed = change_quantization(a, tau1, tau2);
    let before = check_hypoelliptic(&a.to_float(), omega, hp, region, max_order)?;
    let after = check_hypoelliptic(&changed.to_float(), omega, hp, region, max_order)?;
    let lower_ratio = after.c1 / before.c1;
    let passes = before.passes && after.lower_bounded;
    Ok(InvarianceReport { before, after, correction: changed.sub(a), lower_ratio, passes })
}

/// `τ` as a float, for reports.
pub fn tau_f64(res: &ParametrixResult) -> f64 {
    rational_to_f64(&res.tau)
}
