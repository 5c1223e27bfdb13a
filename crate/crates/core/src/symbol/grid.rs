use alloc::vec::Vec;

use num_complex::Complex64;

use super::jet::JetLayout;
use super::PointSymbol;
use crate::error::{Error, Result};

/// A uniform axis `start + i·step`, `0 ≤ i < len`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl GridAxis {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || len == 0 {
            return Err(Error::pre("grid axis", "step must be positive and the axis nonempty"));
        }
        Ok(GridAxis { start, step, len })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }
}

/// Samples of a symbol, and optionally its partials, on a tensor grid over
/// `(x, ξ)`. Row-major with the last axis fastest.
#[derive(Clone, Debug)]
pub struct GridSymbol {
    axes: Vec<GridAxis>,
    values: Vec<Complex64>,
    /// Per point, partials in the order of the layout's monomials.
    partials: Option<(u32, Vec<Vec<Complex64>>)>,
}

impl GridSymbol {
    pub fn sample<P: PointSymbol + ?Sized>(a: &P, axes: Vec<GridAxis>, order: Option<u32>) -> Result<Self> {
        if axes.len() != 2 * a.dim() {
            return Err(Error::Dimension { expected: 2 * a.dim(), found: axes.len() });
        }
        let total: usize = axes.iter().map(|a| a.len).product();
        let layout = order.map(|k| JetLayout::new(axes.len(), k));
        let mut values = Vec::with_capacity(total);
        let mut partials = Vec::new();
        for flat in 0..total {
            let p = point_of(&axes, flat);
            match &layout {
                Some(l) => {
                    let t = a.jets(l, &p)?;
                    values.push(t.value());
                    partials.push(t.partials().map(|(_, v)| v).collect());
                }
                None => values.push(a.eval(&p)),
            }
        }
        Ok(GridSymbol { axes, values, partials: order.map(|k| (k, partials)) })
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, a)| acc * a.len + i)
    }

    pub fn value(&self, idx: &[usize]) -> Complex64 {
        self.values[self.flat_index(idx)]
    }

    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(&i, a)| a.point(i)).collect()
    }

    /// `∂^e a` at a grid node if partials were sampled to that order.
    pub fn partial(&self, idx: &[usize], exps: &[u32]) -> Option<Complex64> {
        let (k, parts) = self.partials.as_ref()?;
        let layout = JetLayout::new(self.axes.len(), *k);
        let i = layout.index_of(exps)?;
        Some(parts[self.flat_index(idx)][i])
    }
}

fn point_of(axes: &[GridAxis], mut flat: usize) -> Vec<f64> {
    let mut p = alloc::vec![0.0; axes.len()];
    for (i, a) in axes.iter().enumerate().rev() {
        p[i] = a.point(flat % a.len);
        flat /= a.len;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use crate::symbol::PolySymbol;

    #[test]
    fn samples_values_and_partials() {
        let a = PolySymbol::<Exact>::x(1, 0).mul(&PolySymbol::xi(1, 0));
        let axes = alloc::vec![GridAxis::new(-1.0, 0.5, 5).unwrap(), GridAxis::new(0.0, 1.0, 3).unwrap()];
        let g = GridSymbol::sample(&a, axes, Some(2)).unwrap();
        assert_eq!(g.values().len(), 15);
        assert_eq!(g.point(&[4, 2]), alloc::vec![1.0, 2.0]);
        assert_eq!(g.value(&[4, 2]).re, 2.0);
        assert_eq!(g.partial(&[4, 2], &[1, 1]).unwrap().re, 1.0);
        assert_eq!(g.partial(&[4, 2], &[0, 1]).unwrap().re, 1.0);
        assert!(g.partial(&[0, 0], &[3, 0]).is_none());
        assert!(GridAxis::new(0.0, 0.0, 3).is_err());
    }
}
