//! Formal sums, their cutoff assembly and empirical equivalence.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use super::classfit::grows_at_edge;
use super::jet::{Jet, JetLayout, JetTable};
use super::PointSymbol;
use crate::error::{Error, Result};
use crate::region::RegionSpec;
use crate::weights::{CutoffFamily, WeightFunction};

/// A graded sequence `(a_j)` with class parameters `(m, ρ, R)`.
#[derive(Clone, Debug)]
pub struct FormalSum<T> {
    pub terms: Vec<T>,
    pub m: f64,
    pub rho: f64,
    pub r: f64,
}

impl<T: PointSymbol> FormalSum<T> {
    pub fn new(terms: Vec<T>, m: f64, rho: f64, r: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::pre("formal sum", "rho must lie in (0, 1]"));
        }
        if !(r >= 1.0) {
            return Err(Error::pre("formal sum", "R must be at least 1"));
        }
        if let Some(d) = terms.first().map(|t| t.dim()) {
            if let Some(t) = terms.iter().find(|t| t.dim() != d) {
                return Err(Error::Dimension { expected: d, found: t.dim() });
            }
        }
        Ok(FormalSum { terms, m, rho, r })
    }

    /// `Σ_{j<n} a_j(z)`.
    pub fn partial_sum(&self, n: usize, z: &[f64]) -> Complex64 {
        self.terms.iter().take(n).map(|t| t.eval(z)).sum()
    }
}

/// `a = Σ_j φ_j a_j`, a finite sum at each point.
pub struct AssembledSymbol<'a, T> {
    sum: &'a FormalSum<T>,
    cutoffs: CutoffFamily,
}

/// Assembles a formal sum with the given cutoffs.
pub fn assemble_formal_sum<T: PointSymbol>(fs: &FormalSum<T>, cutoffs: CutoffFamily) -> AssembledSymbol<'_, T> {
    AssembledSymbol { sum: fs, cutoffs }
}

impl<T: PointSymbol> AssembledSymbol<'_, T> {
    /// Indices `j` with `φ_j(z) ≠ 0` that the evaluation visits.
    pub fn active_terms(&self, z: &[f64]) -> usize {
        let cap = self.sum.terms.len().saturating_sub(1) as u64;
        self.cutoffs.last_active(z, cap) as usize + 1
    }

    fn cutoff_jet(&self, layout: &Arc<JetLayout>, j: u64, z: &[f64]) -> Jet {
        if j == 0 {
            return Jet::constant(layout, Complex64::new(1.0, 0.0));
        }
        let n = self.cutoffs.jn.block_of(j);
        let a = self.cutoffs.radius(n, j);
        let t = super::euclidean_norm(z) / a;
        if t <= 2.0 || t >= 3.0 {
            return Jet::constant(layout, Complex64::new(self.cutoffs.phi_j(j, z), 0.0));
        }
        let one = Complex64::new(1.0, 0.0);
        // φ_j = 1 − S(3 − |z|/A)
        let u = norm_jet(layout, z).scale(Complex64::new(-1.0 / a, 0.0)).add_const(Complex64::new(3.0, 0.0));
        smooth_step_jet(&u).neg().add_const(one)
    }
}

/// `|z|` as a jet around a point away from the origin.
pub(crate) fn norm_jet(layout: &Arc<JetLayout>, z: &[f64]) -> Jet {
    let mut norm2 = Jet::constant(layout, Complex64::zero());
    for (i, &zi) in z.iter().enumerate() {
        let v = Jet::variable(layout, i, zi);
        norm2 = norm2.add(&v.mul(&v));
    }
    norm2.sqrt().expect("away from the origin")
}

/// [`smooth_step`](crate::weights::smooth_step) in jet arithmetic.
pub(crate) fn smooth_step_jet(u: &Jet) -> Jet {
    let layout = u.layout().clone();
    let v = u.value().re;
    if v <= 0.0 || v >= 1.0 {
        return Jet::constant(&layout, Complex64::new(crate::weights::smooth_step(v), 0.0));
    }
    let f = |w: &Jet| w.recip().expect("interior").neg().exp();
    let fu = f(u);
    let fv = f(&u.neg().add_const(Complex64::new(1.0, 0.0)));
    fu.div(&fu.add(&fv)).expect("positive")
}

impl<T: PointSymbol> PointSymbol for AssembledSymbol<'_, T> {
    fn dim(&self) -> usize {
        self.sum.terms.first().map_or(0, |t| t.dim())
    }

    fn eval(&self, z: &[f64]) -> Complex64 {
        let k = self.active_terms(z).min(self.sum.terms.len());
        (0..k)
            .map(|j| {
                let c = self.cutoffs.phi_j(j as u64, z);
                if c == 0.0 {
                    Complex64::zero()
                } else {
                    self.sum.terms[j].eval(z) * c
                }
            })
            .sum()
    }

    fn jets(&self, layout: &Arc<JetLayout>, z: &[f64]) -> Result<JetTable> {
        let k = self.active_terms(z).min(self.sum.terms.len());
        let mut acc = Jet::constant(layout, Complex64::zero());
        for j in 0..k {
            let c = self.cutoff_jet(layout, j as u64, z);
            if c.coeffs().iter().all(|v| v.is_zero()) {
                continue;
            }
            let t = self.sum.terms[j].jets(layout, z)?;
            acc = acc.add(&c.mul(&t.into_jet()));
        }
        Ok(acc.into_table())
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceOptions {
    pub ns: Vec<u32>,
    pub n_max: u32,
    pub region: RegionSpec,
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub ns: Vec<u32>,
    /// `[n][N−1]`: supremum of the normalized partial-sum difference.
    pub suprema: Vec<Vec<f64>>,
    /// `[n][N−1][shell]`.
    pub per_shell: Vec<Vec<Vec<f64>>>,
    pub equivalent: bool,
}

/// Samples `|Σ_{j<N}(a_j − b_j)| ⟨z⟩^{ρN} e^{−nρφ*(N/n)} e^{−mω(z)}` on
/// `⟨z⟩ ≥ R e^{(n/N)φ*(N/n)}` and flags growth at the outer edge.
pub fn verify_equivalence<A: PointSymbol, B: PointSymbol>(
    a: &FormalSum<A>,
    b: &FormalSum<B>,
    w: &WeightFunction,
    opts: &EquivalenceOptions,
) -> Result<EquivalenceReport> {
    if a.m != b.m || a.rho != b.rho || a.r != b.r {
        return Err(Error::pre("verify_equivalence", "formal sums must share (m, rho, R)"));
    }
    let conj = w.conjugate();
    let dim = a.terms.first().or(None).map(|t| t.dim()).or_else(|| b.terms.first().map(|t| t.dim())).unwrap_or(1);
    let samples = opts.region.samples(2 * dim);
    let shells = opts.region.shells;
    let mut suprema = Vec::new();
    let mut per_shell = Vec::new();
    let mut equivalent = true;
    for &n in &opts.ns {
        let nf = f64::from(n);
        let mut sup_n = Vec::new();
        let mut shell_n = Vec::new();
        for big_n in 1..=opts.n_max {
            let nn = f64::from(big_n);
            let threshold = a.r * Float::exp(nf / nn * conj.eval(nn / nf));
            let norm = Float::exp(-nf * a.rho * conj.eval(nn / nf));
            let mut shells_v = alloc::vec![0.0f64; shells];
            for s in &samples {
                if s.bracket < threshold {
                    continue;
                }
                let diff = a.partial_sum(big_n as usize, &s.point) - b.partial_sum(big_n as usize, &s.point);
                let v =
                    diff.norm() * Float::powf(s.bracket, a.rho * nn) * norm * Float::exp(-a.m * w.omega_vec(&s.point));
                let v = if v.is_nan() { f64::INFINITY } else { v };
                shells_v[s.shell] = shells_v[s.shell].max(v);
            }
            let sup = shells_v.iter().copied().fold(0.0, f64::max);
            let active: Vec<f64> = shells_v.iter().copied().filter(|v| *v > 0.0).collect();
            if sup > 1e-12 && grows_at_edge(&active) {
                equivalent = false;
            }
            sup_n.push(sup);
            shell_n.push(shells_v);
        }
        suprema.push(sup_n);
        per_shell.push(shell_n);
    }
    Ok(EquivalenceReport { ns: opts.ns.clone(), suprema, per_shell, equivalent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Scalar};
    use crate::symbol::{jet_eval, ExprSymbol, PolySymbol};
    use crate::weights::JnSequence;

    fn cutoffs(r: f64) -> CutoffFamily {
        CutoffFamily::new(r, JnSequence::Power(2), WeightFunction::gevrey(0.5).unwrap().conjugate()).unwrap()
    }

    fn consts(v: &[i64]) -> Vec<PolySymbol<Exact>> {
        v.iter().map(|&c| PolySymbol::constant(1, Exact::from_int(c))).collect()
    }

    #[test]
    fn only_the_leading_term_survives_near_the_origin() {
        let fs = FormalSum::new(consts(&[1, 2, 3, 4]), 0.0, 1.0, 1.0).unwrap();
        let cf = cutoffs(1.0);
        let a11 = cf.radius(1, 1);
        let asm = assemble_formal_sum(&fs, cf);
        assert_eq!(asm.eval(&[a11, a11]).re, 1.0);
        let one = FormalSum::new(consts(&[1, 0, 0]), 0.0, 1.0, 1.0).unwrap();
        let asm1 = assemble_formal_sum(&one, cutoffs(1.0));
        for z in [[0.0, 0.0], [10.0, -3.0], [1e4, 1e4]] {
            assert_eq!(asm1.eval(&z).re, 1.0);
        }
    }

    #[test]
    fn far_away_all_cutoffs_are_one() {
        let fs = FormalSum::new(consts(&[1, 2, 3, 4]), 0.0, 1.0, 1.0).unwrap();
        let asm = assemble_formal_sum(&fs, cutoffs(1.0));
        assert_eq!(asm.eval(&[1e6, 0.0]).re, 10.0);
    }

    #[test]
    fn cutoff_jets_match_finite_differences() {
        let fs = FormalSum::new(consts(&[0, 1]), 0.0, 1.0, 1.0).unwrap();
        let cf = cutoffs(1.0);
        let a = cf.radius(1, 1);
        let asm = assemble_formal_sum(&fs, cf);
        let z = [2.5 * a * 0.6, 2.5 * a * 0.8];
        let t = jet_eval(&asm, &z, 2).unwrap();
        let h = 1e-5;
        let fd = (asm.eval(&[z[0] + h, z[1]]).re - asm.eval(&[z[0] - h, z[1]]).re) / (2.0 * h);
        assert!((t.partial(&[1, 0]).unwrap().re - fd).abs() < 1e-6);
        assert!((t.value().re - asm.eval(&z).re).abs() < 1e-14);
    }

    #[test]
    fn equivalence_examples() {
        let w = WeightFunction::gevrey(0.5).unwrap();
        let opts = EquivalenceOptions {
            ns: alloc::vec![1, 2],
            n_max: 10,
            region: RegionSpec::new(1.0, 1e4, 16, 8, 5).unwrap(),
        };
        let base = FormalSum::new(
            alloc::vec![ExprSymbol::parse("1", 1).unwrap(), ExprSymbol::parse("0", 1).unwrap()],
            0.0,
            1.0,
            1.0,
        )
        .unwrap();
        let same = verify_equivalence(&base, &base, &w, &opts).unwrap();
        assert!(same.equivalent);
        assert!(same.suprema.iter().flatten().all(|&v| v == 0.0));

        let near =
            FormalSum::new(alloc::vec![ExprSymbol::parse("1 + (1 + x^2 + xi^2)^(-5)", 1).unwrap()], 0.0, 1.0, 1.0)
                .unwrap();
        assert!(verify_equivalence(&base, &near, &w, &opts).unwrap().equivalent);

        let shifted = FormalSum::new(alloc::vec![ExprSymbol::parse("2", 1).unwrap()], 0.0, 1.0, 1.0).unwrap();
        assert!(!verify_equivalence(&base, &shifted, &w, &opts).unwrap().equivalent);
    }
}
