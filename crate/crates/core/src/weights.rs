//! Weight functions, Young conjugates, cutoff families and numeric
//! verifiers of the standard conjugate inequalities.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum WeightFamily {
    /// `ω(t) = max(0, t^a − 1)`, `0 < a < 1`.
    Gevrey { a: f64 },
    /// `ω(t) = max(0, log(1+t)^s − log(2)^s)`, `s > 1`.
    LogPower { s: f64 },
    /// Piecewise linear interpolation of `(t, ω)` pairs, constant past the
    /// last node. Only meant for testing the verifiers.
    Table { nodes: Vec<(f64, f64)> },
}

/// A weight function with its doubling constant.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction {
    family: WeightFamily,
    l: f64,
}

/// Fitting grid in `log₂ t`: `t = 2^{k/64}`, `0 ≤ k ≤ 2560`.
const FIT_STEPS_PER_OCTAVE: f64 = 64.0;
const FIT_OCTAVES: f64 = 40.0;

impl WeightFunction {
    pub fn new(family: WeightFamily) -> Result<Self> {
        match &family {
            WeightFamily::Gevrey { a } if !(*a > 0.0 && *a < 1.0) => {
                return Err(Error::pre("weight", format!("gevrey exponent {a} outside (0,1)")))
            }
            WeightFamily::LogPower { s } if !(*s > 1.0 && s.is_finite()) => {
                return Err(Error::pre("weight", format!("logpower exponent {s} must exceed 1")))
            }
            WeightFamily::Table { nodes } if (nodes.len() < 2 || nodes.windows(2).any(|w| !(w[1].0 > w[0].0))) => {
                return Err(Error::pre("weight", "table needs at least two strictly increasing nodes"));
            }
            _ => {}
        }
        let mut w = WeightFunction { family, l: 1.0 };
        w.l = match w.closed_form_l() {
            Some(l) => l,
            None => w.fitted_l(2.0),
        };
        Ok(w)
    }

    pub fn gevrey(a: f64) -> Result<Self> {
        Self::new(WeightFamily::Gevrey { a })
    }

    pub fn logpower(s: f64) -> Result<Self> {
        Self::new(WeightFamily::LogPower { s })
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    /// The doubling constant `L` of `ω(2t) ≤ L(ω(t) + 1)`.
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn closed_form_l(&self) -> Option<f64> {
        match self.family {
            WeightFamily::Gevrey { a } => Some(Float::powf(2.0, a)),
            _ => None,
        }
    }

    /// `sup_t ω(ct) / (ω(t) + 1)` for `1 ≤ t ≤ 2^40`, plus `1e-9`: a grid
    /// scan in `log t` refined by golden-section search around the best node.
    pub fn fitted_l(&self, c: f64) -> f64 {
        let f = |u: f64| {
            let t = Float::exp2(u);
            self.omega(c * t) / (self.omega(t) + 1.0)
        };
        let n = (FIT_STEPS_PER_OCTAVE * FIT_OCTAVES) as usize;
        let h = 1.0 / FIT_STEPS_PER_OCTAVE;
        let (best, mut val) =
            (0..=n).map(|k| (k, f(k as f64 * h))).fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        let (mut lo, mut hi) = ((best as f64 - 1.0).max(0.0) * h, (best as f64 + 1.0).min(n as f64) * h);
        for _ in 0..80 {
            let m1 = hi - GOLDEN * (hi - lo);
            let m2 = lo + GOLDEN * (hi - lo);
            if f(m1) < f(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        val = val.max(f(0.5 * (lo + hi)));
        val.max(1.0) + 1e-9
    }

    /// A constant valid both for doubling and for `ω(et) ≤ L(ω(t)+1)`, as
    /// the conjugate inequalities require.
    pub fn lemma_constant(&self) -> f64 {
        let le = match self.family {
            WeightFamily::Gevrey { a } => Float::exp(a),
            _ => self.fitted_l(core::f64::consts::E),
        };
        self.l.max(le)
    }

    pub fn omega(&self, t: f64) -> f64 {
        if t <= 1.0 {
            return 0.0;
        }
        match &self.family {
            WeightFamily::Gevrey { a } => Float::exp_m1(a * Float::ln(t)).max(0.0),
            WeightFamily::LogPower { s } => {
                let v = Float::powf(Float::ln_1p(t), *s) - Float::powf(core::f64::consts::LN_2, *s);
                v.max(0.0)
            }
            WeightFamily::Table { nodes } => table_eval(nodes, t),
        }
    }

    /// `ω(|z|)` for a point of `ℝ^n`.
    pub fn omega_vec(&self, z: &[f64]) -> f64 {
        self.omega(crate::symbol::euclidean_norm(z))
    }

    /// `φ(s) = ω(e^s)`.
    pub fn phi(&self, s: f64) -> f64 {
        match &self.family {
            WeightFamily::Gevrey { a } if s > 0.0 => Float::exp_m1(a * s),
            WeightFamily::Gevrey { .. } => 0.0,
            _ => self.omega(Float::exp(s)),
        }
    }

    pub fn conjugate(&self) -> YoungConjugate {
        YoungConjugate::new(self.clone(), ConjugateMethod::Auto)
    }
}

fn table_eval(nodes: &[(f64, f64)], t: f64) -> f64 {
    if t <= nodes[0].0 {
        return nodes[0].1;
    }
    for w in nodes.windows(2) {
        let ((t0, v0), (t1, v1)) = (w[0], w[1]);
        if t <= t1 {
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    nodes[nodes.len() - 1].1
}

impl FromStr for WeightFunction {
    type Err = Error;

    /// `gevrey:a=0.5`, `logpower:s=2`, `table:1=0,2=1,3=0.5`.
    fn from_str(spec: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { pos: 0, msg };
        let (kind, rest) = spec.split_once(':').ok_or_else(|| bad(format!("weight spec {spec:?} lacks ':'")))?;
        let pairs: Vec<(&str, f64)> = rest
            .split(',')
            .map(|kv| {
                let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {kv:?}")))?;
                let v: f64 = v.trim().parse().map_err(|_| bad(format!("invalid number {v:?}")))?;
                Ok((k.trim(), v))
            })
            .collect::<Result<_>>()?;
        let single = |key: &str| -> Result<f64> {
            match pairs.as_slice() {
                [(k, v)] if *k == key => Ok(*v),
                _ => Err(bad(format!("{kind} expects exactly `{key}=<value>`"))),
            }
        };
        match kind.trim() {
            "gevrey" => Self::gevrey(single("a")?),
            "logpower" => Self::logpower(single("s")?),
            "table" => {
                let nodes = pairs
                    .iter()
                    .map(|(k, v)| k.parse::<f64>().map(|t| (t, *v)).map_err(|_| bad(format!("invalid node {k:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Self::new(WeightFamily::Table { nodes })
            }
            other => Err(bad(format!("unknown weight family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugateMethod {
    /// Closed form where one exists, numeric otherwise.
    Auto,
    ClosedForm,
    NumericMax,
}

/// `φ*(y) = sup_{s ≥ 0} (s y − φ(s))`.
#[derive(Clone, Debug)]
pub struct YoungConjugate {
    weight: WeightFunction,
    method: ConjugateMethod,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

impl YoungConjugate {
    pub fn new(weight: WeightFunction, method: ConjugateMethod) -> Self {
        YoungConjugate { weight, method }
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self.method {
            ConjugateMethod::NumericMax => self.numeric(y),
            _ => self.closed_form(y).unwrap_or_else(|| self.numeric(y)),
        }
    }

    pub fn closed_form(&self, y: f64) -> Option<f64> {
        match self.weight.family {
            WeightFamily::Gevrey { a } => {
                if y <= a {
                    Some(0.0)
                } else {
                    let r = y / a;
                    Some(r * (Float::ln(r) - 1.0) + 1.0)
                }
            }
            _ => None,
        }
    }

    /// Golden-section search of the concave objective on `[0, s_max(y)]`.
    pub fn numeric(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let g = |s: f64| s * y - self.weight.phi(s);
        let hi = match self.weight.family {
            WeightFamily::Gevrey { a } => Float::ln((y + 1.0) / a) / a + 10.0,
            _ => {
                let mut hi = 1.0;
                while hi < 1e18 && g(2.0 * hi) > g(hi) {
                    hi *= 2.0;
                }
                2.0 * hi
            }
        };
        let (mut lo, mut hi) = (0.0f64, hi);
        let mut c = hi - GOLDEN * (hi - lo);
        let mut d = lo + GOLDEN * (hi - lo);
        let (mut gc, mut gd) = (g(c), g(d));
        for _ in 0..200 {
            if hi - lo <= 1e-13 * (1.0 + hi) {
                break;
            }
            if gc < gd {
                lo = c;
                c = d;
                gc = gd;
                d = lo + GOLDEN * (hi - lo);
                gd = g(d);
            } else {
                hi = d;
                d = c;
                gd = gc;
                c = hi - GOLDEN * (hi - lo);
                gc = g(c);
            }
        }
        [g(0.0), gc, gd, g(lo), g(hi)].into_iter().fold(0.0, f64::max)
    }
}

/// How `j_n` grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JnSequence {
    /// `j_n = n^p`, `p ≥ 2`.
    Power(u32),
}

impl JnSequence {
    pub fn jn(&self, n: u64) -> u64 {
        match *self {
            JnSequence::Power(p) => n.pow(p),
        }
    }

    /// The block index `n ≥ 1` with `j_n ≤ j < j_{n+1}`.
    pub fn block_of(&self, j: u64) -> u64 {
        let mut n = match *self {
            JnSequence::Power(p) => Float::powf(j as f64, 1.0 / f64::from(p)).floor() as u64,
        }
        .max(1);
        while n > 1 && self.jn(n) > j {
            n -= 1;
        }
        while self.jn(n + 1) <= j {
            n += 1;
        }
        n
    }
}

/// The smooth radial transition: 1 on `[0, 2]`, 0 on `[3, ∞)`.
pub fn excision(t: f64) -> f64 {
    smooth_step(3.0 - t.abs())
}

/// `0` for `u ≤ 0`, `1` for `u ≥ 1`, `C^∞` in between.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let f = |v: f64| Float::exp(-1.0 / v);
    let (a, b) = (f(u), f(1.0 - u));
    a / (a + b)
}

/// Cutoffs `φ_j = 1 − Φ(·/A_{n,j})` attached to a weight.
#[derive(Clone, Debug)]
pub struct CutoffFamily {
    pub r: f64,
    pub jn: JnSequence,
    conj: YoungConjugate,
}

impl CutoffFamily {
    pub fn new(r: f64, jn: JnSequence, conj: YoungConjugate) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(Error::pre("cutoff family", format!("R = {r} must be at least 1")));
        }
        let JnSequence::Power(p) = jn;
        if p < 2 {
            return Err(Error::pre("cutoff family", "j_n = n^p needs p ≥ 2 so that j_n/n → ∞"));
        }
        Ok(CutoffFamily { r, jn, conj })
    }

    pub fn conjugate(&self) -> &YoungConjugate {
        &self.conj
    }

    /// `A_{n,j} = R exp((n/j) φ*(j/n))`.
    pub fn radius(&self, n: u64, j: u64) -> f64 {
        let (n, j) = (n as f64, j as f64);
        self.r * Float::exp(n / j * self.conj.eval(j / n))
    }

    /// `φ_j(z)`, with `φ_0 = 1`.
    pub fn phi_j(&self, j: u64, z: &[f64]) -> f64 {
        if j == 0 {
            return 1.0;
        }
        let n = self.jn.block_of(j);
        let a = self.radius(n, j);
        1.0 - excision(crate::symbol::euclidean_norm(z) / a)
    }

    /// Smallest radius over block `n`: `R exp(φ*(n)/n)`.
    pub fn block_min_radius(&self, n: u64) -> f64 {
        let n = n as f64;
        self.r * Float::exp(self.conj.eval(n) / n)
    }

    /// An index past which every `φ_j` vanishes at `z`, capped at `cap`.
    pub fn last_active(&self, z: &[f64], cap: u64) -> u64 {
        let norm = crate::symbol::euclidean_norm(z);
        let mut n = 1;
        while self.jn.jn(n) <= cap {
            if 2.0 * self.block_min_radius(n) >= norm {
                return self.jn.jn(n).saturating_sub(1).min(cap);
            }
            n += 1;
        }
        cap
    }
}

/// Outcome of [`verify_weight_axioms`].
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub l_fit: f64,
    pub l_closed: Option<f64>,
    pub monotone_violations: usize,
    pub convexity_violations: usize,
    /// `(k, ∫_1^{2^k} ω(t)/t² dt)`.
    pub beta_partials: Vec<(u32, f64)>,
    /// `(k, ω(2^k)/log 2^k)`.
    pub gamma_ratios: Vec<(u32, f64)>,
    pub alpha_ok: bool,
    pub beta_ok: bool,
    pub gamma_ok: bool,
    pub first_violation: Option<String>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.monotone_violations == 0
            && self.convexity_violations == 0
            && self.alpha_ok
            && self.beta_ok
            && self.gamma_ok
    }
}

/// Numeric sweep of conditions (α)–(δ) on geometric grids.
pub fn verify_weight_axioms(w: &WeightFunction, samples: usize) -> Result<AxiomReport> {
    if samples < 100 {
        return Err(Error::pre("verify_weight_axioms", format!("samples = {samples} < 100")));
    }
    let mut first: Option<String> = None;
    let mut note = |s: String| {
        if first.is_none() {
            first = Some(s);
        }
    };

    // monotonicity on [0, 2^40], dense near the origin
    let mut monotone_violations = 0;
    let ts: Vec<f64> = (0..=samples)
        .map(|i| {
            let u = i as f64 / samples as f64;
            Float::powf(2.0, 40.0 * u) - 1.0
        })
        .collect();
    for win in ts.windows(2) {
        let (a, b) = (w.omega(win[0]), w.omega(win[1]));
        if b < a - 1e-12 * a.abs().max(1.0) {
            monotone_violations += 1;
            note(format!("omega decreases between t = {} and t = {}", win[0], win[1]));
        }
    }
    if ts.iter().any(|&t| t <= 1.0 && w.omega(t) != 0.0) {
        monotone_violations += 1;
        note(String::from("omega does not vanish on [0, 1]"));
    }

    // (α)
    let l_fit = w.fitted_l(2.0);
    let l_closed = w.closed_form_l();
    let alpha_ok = l_fit.is_finite() && l_closed.is_none_or(|l| l_fit <= l + 1e-9);
    if !alpha_ok {
        note(format!("doubling fit {l_fit} exceeds the closed-form constant"));
    }

    // (δ): midpoint convexity of φ on [0, 40 ln 2]
    let smax = 40.0 * core::f64::consts::LN_2;
    let mut convexity_violations = 0;
    for i in 0..samples {
        for step in [1usize, 7, 31] {
            let j = i + step;
            if j > samples {
                continue;
            }
            let s1 = smax * i as f64 / samples as f64;
            let s2 = smax * j as f64 / samples as f64;
            let mid = w.phi(0.5 * (s1 + s2));
            let chord = 0.5 * (w.phi(s1) + w.phi(s2));
            if mid > chord + 1e-10 * chord.abs().max(1.0) {
                convexity_violations += 1;
                note(format!("phi not midpoint convex on [{s1}, {s2}]"));
            }
        }
    }

    // (β): partial integrals in u = log t, Simpson per unit interval
    let mut beta_partials = Vec::new();
    let mut acc = 0.0;
    let f = |u: f64| w.omega(Float::exp(u)) * Float::exp(-u);
    for k in 1..=40u32 {
        let (a, b) = (f64::from(k - 1) * core::f64::consts::LN_2, f64::from(k) * core::f64::consts::LN_2);
        let m = 64;
        let h = (b - a) / f64::from(m);
        let mut s = f(a) + f(b);
        for i in 1..m {
            s += f(a + h * f64::from(i)) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc += s * h / 3.0;
        beta_partials.push((k, acc));
    }
    let incs: Vec<f64> = beta_partials.windows(2).map(|p| p[1].1 - p[0].1).collect();
    let tail = &incs[incs.len() / 2..];
    let beta_ok = tail.windows(2).all(|p| p[1] <= p[0] + 1e-15) && tail[tail.len() - 1] <= 1e-3 * (1.0 + acc);
    if !beta_ok {
        note(String::from("integral of omega(t)/t^2 does not settle"));
    }

    // (γ)
    let gamma_ratios: Vec<(u32, f64)> = (1..=40u32)
        .map(|k| (k, w.omega(Float::powi(2.0, k as i32)) / (f64::from(k) * core::f64::consts::LN_2)))
        .collect();
    let half = &gamma_ratios[gamma_ratios.len() / 2..];
    let gamma_ok = half.windows(2).all(|p| p[1].1 > p[0].1) && half[half.len() - 1].1 > gamma_ratios[0].1;
    if !gamma_ok {
        note(String::from("omega(t)/log t is not eventually increasing"));
    }

    Ok(AxiomReport {
        l_fit,
        l_closed,
        monotone_violations,
        convexity_violations,
        beta_partials,
        gamma_ratios,
        alpha_ok,
        beta_ok,
        gamma_ok,
        first_violation: first,
    })
}

/// Sample grid for [`verify_conjugate_inequalities`].
#[derive(Clone, Debug)]
pub struct ConjugateGrid {
    pub values: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub max_n: u32,
    pub prop_b: Vec<f64>,
    pub prop_max_n: u32,
    pub random_tuples: usize,
    pub seed: u64,
}

impl Default for ConjugateGrid {
    fn default() -> Self {
        let values = (1..=200).map(|i| 0.5 * f64::from(i)).chain([1e-3, 0.01, 0.1, 0.25]).collect();
        ConjugateGrid {
            values,
            lambdas: alloc::vec![0.5, 1.0, 2.0, 5.0],
            max_n: 6,
            prop_b: alloc::vec![1.0, 2.0, 4.0],
            prop_max_n: 30,
            random_tuples: 1000,
            seed: 0x5eed,
        }
    }
}

/// Fitted constant of `B^n n! ≤ C e^{aλφ*(n/λ)}` for one `B`.
#[derive(Clone, Debug)]
pub struct PropFit {
    pub b: f64,
    pub lambda: f64,
    pub exponent: f64,
    /// `log(B^n n! e^{−aλφ*(n/λ)})` for `n = 0..=prop_max_n`.
    pub log_ratios: Vec<f64>,
    pub c: f64,
    pub argmax: u32,
    pub stabilized: bool,
}

#[derive(Clone, Debug)]
pub struct ConjugateReport {
    pub lemma_l: f64,
    pub lemma1_checked: usize,
    pub lemma1_violations: usize,
    pub lemma2_checked: usize,
    pub lemma2_violations: usize,
    pub prop: Vec<PropFit>,
    pub nota1_violations: usize,
    pub nota2_violations: usize,
    pub first_violation: Option<String>,
}

impl ConjugateReport {
    pub fn passes(&self) -> bool {
        self.lemma1_violations == 0
            && self.lemma2_violations == 0
            && self.nota1_violations == 0
            && self.nota2_violations == 0
            && self.prop.iter().all(|p| p.stabilized)
    }
}

fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + 1e-10 * rhs.abs().max(1.0)
}

/// Minimal `k` with `|τ| + |1 − τ| ≤ 2^k`.
pub fn tau_k(tau: f64) -> u32 {
    let s = tau.abs() + (1.0 - tau).abs();
    let mut k = 0;
    while Float::powi(2.0, k as i32) < s - 1e-15 {
        k += 1;
    }
    k
}

/// Checks the conjugate inequalities, the factorial bound and the two
/// auxiliary inequalities on a sample grid.
///
/// The factorial bound uses `a = 1`: Gevrey weights of exponent `a₀ < 1`
/// are `o(t)`.
pub fn verify_conjugate_inequalities(w: &WeightFunction, grid: &ConjugateGrid) -> ConjugateReport {
    let conj = w.conjugate();
    let l = w.lemma_constant();
    let mut first: Option<String> = None;
    let mut note = |s: String| {
        if first.is_none() {
            first = Some(s);
        }
    };

    let (mut l1c, mut l1v) = (0, 0);
    for &lam in &grid.lambdas {
        for n in 1..=grid.max_n {
            let ln = Float::powi(l, n as i32);
            let sum: f64 = (1..=n).map(|j| Float::powi(l, j as i32)).sum();
            for &y in &grid.values {
                let lhs = lam * ln * conj.eval(y / (lam * ln)) + f64::from(n) * y;
                let rhs = lam * conj.eval(y / lam) + lam * sum;
                l1c += 1;
                if !leq(lhs, rhs) {
                    l1v += 1;
                    note(format!("conjugate inequality (1) fails at lambda={lam}, n={n}, y={y}: {lhs} > {rhs}"));
                }
            }
        }
    }

    let (mut l2c, mut l2v) = (0, 0);
    let coarse: Vec<f64> = grid.values.iter().copied().step_by(4).collect();
    for &lam in &grid.lambdas {
        for &s in &coarse {
            for &t in &coarse {
                let a = 2.0 * lam * conj.eval((s + t) / (2.0 * lam));
                let b = lam * conj.eval(s / lam) + lam * conj.eval(t / lam);
                let c = lam * conj.eval((s + t) / lam);
                l2c += 1;
                if !leq(a, b) || !leq(b, c) {
                    l2v += 1;
                    note(format!("conjugate inequality (2) fails at lambda={lam}, s={s}, t={t}"));
                }
            }
        }
    }

    let prop = grid.prop_b.iter().map(|&b| prop_fit(&conj, b, 1.0, 1.0, grid.prop_max_n)).collect::<Vec<_>>();
    for p in &prop {
        if !p.stabilized {
            note(format!("factorial bound constant does not stabilize for B = {}", p.b));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut nota1 = 0;
    let mut nota2 = 0;
    for _ in 0..grid.random_tuples {
        let d = rng.random_range(1..=3usize);
        let tau: f64 = rng.random_range(-3.0..3.0);
        let scale = Float::powf(10.0, rng.random_range(0.0..4.0));
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
        let k = tau_k(tau);
        let xy: Vec<f64> = x.iter().chain(&y).copied().collect();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (1.0 - tau) * a + tau * b).collect();
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - a).collect();
        let lhs = w.omega_vec(&xy);
        let rhs = l * l * w.omega_vec(&mid)
            + Float::powi(l, k as i32 + 2) * w.omega_vec(&diff)
            + (1..=k + 2).map(|j| Float::powi(l, j as i32)).sum::<f64>();
        if !leq(lhs, rhs) {
            nota1 += 1;
            note(format!("weight splitting inequality fails at x={x:?}, y={y:?}, tau={tau}"));
        }

        let t: f64 = rng.random_range(0.0..=1.0);
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
        let wv: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
        let c = 2.0 * ((1.0 - tau) * (1.0 - tau)).max(tau * tau);
        let n2 = |u: &[f64]| u.iter().map(|a| a * a).sum::<f64>();
        let p: Vec<f64> = v.iter().zip(&wv).map(|(a, b)| a + t * tau * b).collect();
        let q: Vec<f64> = v.iter().zip(&wv).map(|(a, b)| a - t * (1.0 - tau) * b).collect();
        if !leq(n2(&v), c * (n2(&p) + n2(&q))) {
            nota2 += 1;
            note(format!("quadratic splitting inequality fails at v={v:?}, w={wv:?}, t={t}, tau={tau}"));
        }
    }

    ConjugateReport {
        lemma_l: l,
        lemma1_checked: l1c,
        lemma1_violations: l1v,
        lemma2_checked: l2c,
        lemma2_violations: l2v,
        prop,
        nota1_violations: nota1,
        nota2_violations: nota2,
        first_violation: first,
    }
}

/// Fits `C` in `B^n n! ≤ C e^{aλφ*(n/λ)}` for `n ≤ max_n`; the fit counts
/// as stable when the maximum is reached in the first two thirds of the
/// range and the tail is decreasing.
pub fn prop_fit(conj: &YoungConjugate, b: f64, lambda: f64, a: f64, max_n: u32) -> PropFit {
    let mut log_fact = 0.0;
    let log_ratios: Vec<f64> = (0..=max_n)
        .map(|n| {
            if n > 0 {
                log_fact += Float::ln(f64::from(n));
            }
            f64::from(n) * Float::ln(b) + log_fact - a * lambda * conj.eval(f64::from(n) / lambda)
        })
        .collect();
    let (argmax, &max) = log_ratios
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(core::cmp::Ordering::Equal))
        .expect("nonempty");
    let tail = &log_ratios[(2 * log_ratios.len()) / 3..];
    let stabilized = max.is_finite() && argmax < (2 * log_ratios.len()) / 3 && tail.windows(2).all(|p| p[1] < p[0]);
    PropFit { b, lambda, exponent: a, log_ratios, c: Float::exp(max), argmax: argmax as u32, stabilized }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gevrey_values() {
        let w = WeightFunction::gevrey(0.5).unwrap();
        assert_eq!(w.omega(1.0), 0.0);
        assert_eq!(w.omega(0.3), 0.0);
        assert_relative_eq!(w.omega(4.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(w.omega(100.0), 9.0, epsilon = 1e-14);
        assert_relative_eq!(w.l(), 2f64.sqrt());
    }

    #[test]
    fn logpower_vanishes_at_one() {
        let w = WeightFunction::logpower(2.0).unwrap();
        assert_eq!(w.omega(1.0), 0.0);
        assert!(w.omega(1.0 + 1e-9) >= 0.0);
        assert!(w.omega(10.0) > 0.0);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(WeightFunction::gevrey(1.0).is_err());
        assert!(WeightFunction::gevrey(0.0).is_err());
        assert!(WeightFunction::logpower(1.0).is_err());
        assert!("gevrey:b=0.5".parse::<WeightFunction>().is_err());
        assert!("cauchy:a=0.5".parse::<WeightFunction>().is_err());
        assert!("gevrey".parse::<WeightFunction>().is_err());
    }

    #[test]
    fn parses_specs() {
        let w: WeightFunction = "gevrey:a=0.5".parse().unwrap();
        assert_eq!(w.family(), &WeightFamily::Gevrey { a: 0.5 });
        let w: WeightFunction = "logpower:s=2".parse().unwrap();
        assert_eq!(w.family(), &WeightFamily::LogPower { s: 2.0 });
        let w: WeightFunction = "table:1=0,2=1,3=0.5".parse().unwrap();
        assert_relative_eq!(w.omega(2.5), 0.75);
    }

    #[test]
    fn conjugate_examples() {
        let c = WeightFunction::gevrey(0.5).unwrap().conjugate();
        assert_eq!(c.eval(0.0), 0.0);
        assert_eq!(c.eval(0.4), 0.0);
        assert_relative_eq!(c.eval(1.0), 2.0 * core::f64::consts::LN_2 - 1.0, max_relative = 1e-14);
        assert_relative_eq!(c.eval(2.0), 4.0 * 4f64.ln() - 3.0, max_relative = 1e-14);
        for &y in &[0.6, 1.0, 2.0, 7.5, 40.0, 100.0] {
            let closed = c.closed_form(y).unwrap();
            assert_relative_eq!(c.numeric(y), closed, max_relative = 1e-8);
        }
        let mut prev = 0.0;
        for i in 1..200 {
            let y = 0.25 * f64::from(i);
            let r = c.eval(y) / y;
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn cutoff_radius_is_monotone_in_j() {
        let w = WeightFunction::gevrey(0.5).unwrap();
        let cf = CutoffFamily::new(1.0, JnSequence::Power(2), w.conjugate()).unwrap();
        let expect = (0.5 * (4.0 * 4f64.ln() - 3.0)).exp();
        assert_relative_eq!(cf.radius(1, 2), expect, max_relative = 1e-13);
        let mut prev = 0.0;
        for j in 1..=50 {
            let a = cf.radius(1, j);
            assert!(a >= prev);
            prev = a;
        }
        // φ*(j/n) = 0 for j/n ≤ a
        let cf3 =
            CutoffFamily::new(3.0, JnSequence::Power(2), WeightFunction::gevrey(0.9).unwrap().conjugate()).unwrap();
        assert_eq!(cf3.radius(2, 1), 3.0);
    }

    #[test]
    fn cutoff_values() {
        let w = WeightFunction::gevrey(0.5).unwrap();
        let cf = CutoffFamily::new(1.0, JnSequence::Power(2), w.conjugate()).unwrap();
        assert_eq!(cf.phi_j(0, &[0.0, 0.0]), 1.0);
        let a = cf.radius(1, 1);
        assert_eq!(cf.phi_j(1, &[1.9 * a, 0.0]), 0.0);
        assert_eq!(cf.phi_j(1, &[0.0, 3.1 * a]), 1.0);
        let mid = cf.phi_j(1, &[2.5 * a, 0.0]);
        assert!(mid > 0.0 && mid < 1.0);
        assert_eq!(JnSequence::Power(2).block_of(1), 1);
        assert_eq!(JnSequence::Power(2).block_of(3), 1);
        assert_eq!(JnSequence::Power(2).block_of(4), 2);
        assert_eq!(JnSequence::Power(2).block_of(99), 9);
        assert_eq!(JnSequence::Power(2).block_of(100), 10);
    }

    #[test]
    fn excision_profile() {
        assert_eq!(excision(2.0), 1.0);
        assert_eq!(excision(3.0), 0.0);
        assert_eq!(excision(-1.0), 1.0);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = excision(2.0 + f64::from(i) / 100.0);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn axioms_hold_for_standard_weights() {
        let g = verify_weight_axioms(&WeightFunction::gevrey(0.5).unwrap(), 400).unwrap();
        assert!(g.passes(), "{:?}", g.first_violation);
        assert!((g.l_fit - 2f64.sqrt()).abs() <= 1e-6);
        let l = verify_weight_axioms(&WeightFunction::logpower(2.0).unwrap(), 400).unwrap();
        assert!(l.passes(), "{:?}", l.first_violation);
        let bad: WeightFunction = "table:1=0,2=3,3=1,1e13=40".parse().unwrap();
        let r = verify_weight_axioms(&bad, 400).unwrap();
        assert!(r.monotone_violations > 0);
        assert!(!r.passes());
    }

    #[test]
    fn tau_k_examples() {
        assert_eq!(tau_k(0.0), 0);
        assert_eq!(tau_k(0.5), 0);
        assert_eq!(tau_k(1.0), 0);
        assert_eq!(tau_k(2.0), 2);
        assert_eq!(tau_k(-1.0), 2);
        assert_eq!(tau_k(1.5), 1);
    }

    #[test]
    fn conjugate_inequalities_hold() {
        for a in [0.3, 0.5] {
            let w = WeightFunction::gevrey(a).unwrap();
            let r = verify_conjugate_inequalities(&w, &ConjugateGrid::default());
            assert!(r.passes(), "a = {a}: {:?}", r.first_violation);
        }
        let w = WeightFunction::logpower(2.0).unwrap();
        let r = verify_conjugate_inequalities(&w, &ConjugateGrid { prop_b: Vec::new(), ..ConjugateGrid::default() });
        assert!(r.passes(), "{:?}", r.first_violation);
    }
}
