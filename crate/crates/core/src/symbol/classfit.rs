//! Empirical constants of the global symbol estimates.

use alloc::vec::Vec;

use num_traits::Float;

use super::jet::JetLayout;
use super::PointSymbol;
use crate::error::Result;
use crate::region::RegionSpec;
use crate::weights::WeightFunction;

#[derive(Clone, Debug)]
pub struct ClassFitOptions {
    pub m: f64,
    pub rho: f64,
    pub ns: Vec<u32>,
    pub max_order: u32,
    pub region: RegionSpec,
}

#[derive(Clone, Debug)]
pub struct ClassFit {
    pub ns: Vec<u32>,
    /// Fitted `C_n`, one per entry of `ns`.
    pub c_n: Vec<f64>,
    /// `[n][k]`: the fit restricted to derivatives of order `k`.
    pub per_order: Vec<Vec<f64>>,
    /// `[n][shell]`: the fit restricted to one shell.
    pub per_shell: Vec<Vec<f64>>,
    pub diverging: bool,
    /// Point of the largest normalized derivative on the outer shell.
    pub witness: Option<Vec<f64>>,
}

/// Largest `|∂^γ a(z)|` per order `|γ| = k` from a jet table.
pub(crate) fn max_by_order(table: &super::JetTable, order: u32) -> Vec<f64> {
    let mut m = alloc::vec![0.0f64; order as usize + 1];
    for (e, v) in table.partials() {
        let k = e.iter().sum::<u32>() as usize;
        let a = v.norm();
        if a.is_nan() || a > m[k] {
            m[k] = if a.is_nan() { f64::INFINITY } else { a };
        }
    }
    m
}

/// Fits `C_n` in `|∂^γ a| ≤ C_n ⟨z⟩^{−ρ|γ|} e^{nρφ*(|γ|/n)} e^{mω(z)}` over
/// sampled shells and `|γ| ≤ K`.
///
/// Derivatives are taken as plain partials; `D` only changes phases.
pub fn estimate_class_constants<P: PointSymbol + ?Sized>(
    a: &P,
    w: &WeightFunction,
    opts: &ClassFitOptions,
) -> Result<ClassFit> {
    let conj = w.conjugate();
    let n_dim = 2 * a.dim();
    let layout = JetLayout::new(n_dim, opts.max_order);
    let shells = opts.region.shells;
    let kk = opts.max_order as usize;
    let nn = opts.ns.len();
    let mut per_order = alloc::vec![alloc::vec![0.0f64; kk + 1]; nn];
    let mut per_shell = alloc::vec![alloc::vec![0.0f64; shells]; nn];
    let mut witness: Option<(f64, Vec<f64>)> = None;
    for s in opts.region.samples(n_dim) {
        let table = a.jets(&layout, &s.point)?;
        let m = max_by_order(&table, opts.max_order);
        let e_m = Float::exp(-opts.m * w.omega_vec(&s.point));
        for (ni, &n) in opts.ns.iter().enumerate() {
            let n = f64::from(n);
            for (k, &mk) in m.iter().enumerate() {
                let kf = k as f64;
                let ratio =
                    mk * Float::powf(s.bracket, opts.rho * kf) * Float::exp(-n * opts.rho * conj.eval(kf / n)) * e_m;
                let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
                per_order[ni][k] = per_order[ni][k].max(ratio);
                per_shell[ni][s.shell] = per_shell[ni][s.shell].max(ratio);
                if s.shell + 1 == shells && witness.as_ref().is_none_or(|(v, _)| ratio > *v) {
                    witness = Some((ratio, s.point.clone()));
                }
            }
        }
    }
    let c_n: Vec<f64> = per_order.iter().map(|v| v.iter().copied().fold(0.0, f64::max)).collect();
    let diverging = per_shell.iter().any(|v| grows_at_edge(v));
    Ok(ClassFit { ns: opts.ns.clone(), c_n, per_order, per_shell, diverging, witness: witness.map(|w| w.1) })
}

/// Whether a per-shell sequence of suprema keeps growing at the outer edge.
pub(crate) fn grows_at_edge(v: &[f64]) -> bool {
    if v.iter().any(|x| !x.is_finite()) {
        return true;
    }
    if v.len() < 3 {
        return false;
    }
    let inner = v[..v.len() / 2].iter().copied().fold(0.0, f64::max);
    let last = v[v.len() - 1];
    last > 10.0 * inner.max(1e-300) && last >= v[v.len() - 2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use crate::symbol::{ExprSymbol, PolySymbol};

    fn opts(m: f64) -> ClassFitOptions {
        ClassFitOptions {
            m,
            rho: 1.0,
            ns: alloc::vec![1, 2, 4],
            max_order: 4,
            region: RegionSpec::new(1.0, 100.0, 12, 16, 3).unwrap(),
        }
    }

    #[test]
    fn constant_symbol_has_unit_constants() {
        let w = WeightFunction::gevrey(0.5).unwrap();
        let fit = estimate_class_constants(&PolySymbol::<Exact>::one(1), &w, &opts(0.0)).unwrap();
        assert!(fit.c_n.iter().all(|&c| (c - 1.0).abs() < 1e-15));
        assert!(!fit.diverging);
    }

    #[test]
    fn product_symbol_is_in_class_with_large_m() {
        let w = WeightFunction::gevrey(0.5).unwrap();
        let a = PolySymbol::<Exact>::x(1, 0).mul(&PolySymbol::xi(1, 0));
        let fit = estimate_class_constants(&a, &w, &opts(3.0)).unwrap();
        assert!(fit.c_n.iter().all(|c| c.is_finite()));
        assert!(!fit.diverging);
    }

    #[test]
    fn gaussian_growth_is_flagged() {
        let w = WeightFunction::gevrey(0.5).unwrap();
        let a = ExprSymbol::parse("exp(x^2)", 1).unwrap();
        let fit = estimate_class_constants(&a, &w, &opts(1.0)).unwrap();
        assert!(fit.diverging);
        let wit = fit.witness.unwrap();
        assert!(wit[0].abs() > wit[1].abs());
    }
}
