//! Symbol representations and the numeric machinery around them.

mod amplitude;
mod classfit;
mod expr;
mod formal;
mod grid;
mod jet;
mod poly_symbol;
mod rational;
mod tau;

use alloc::sync::Arc;

use num_complex::Complex64;

pub use amplitude::{amplitude_reduce, Amplitude};
pub(crate) use classfit::grows_at_edge;
pub use classfit::{estimate_class_constants, ClassFit, ClassFitOptions};
pub use expr::{Expr, ExprSymbol};
pub(crate) use formal::smooth_step_jet;
pub use formal::{
    assemble_formal_sum, verify_equivalence, AssembledSymbol, EquivalenceOptions, EquivalenceReport, FormalSum,
};
pub use grid::{GridAxis, GridSymbol};
pub use jet::{jet_eval, Jet, JetLayout, JetTable};
pub use poly_symbol::{DerivKind, PolySymbol};
pub use rational::RationalSymbol;
pub use tau::TauParams;

use crate::error::Result;
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;

/// Exact algebra shared by polynomial and rational symbols: what the
/// composition expansions need.
pub trait SymbolAlgebra<S: Scalar>: Clone {
    fn dim(&self) -> usize;
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn scale(&self, c: &S) -> Self;
    /// `D^α_x ∂^β_ξ`.
    fn dx_dxi(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Self;
    /// Per-coordinate `(x, ξ)` exponent bounds beyond which derivatives
    /// vanish, or `None` if they never do.
    fn derivative_bounds(&self) -> Option<(MultiIndex, MultiIndex)>;
}

/// Anything that can be evaluated, with derivatives, at a real point
/// `(x, ξ) ∈ ℝ^{2d}`.
pub trait PointSymbol {
    fn dim(&self) -> usize;
    fn eval(&self, point: &[f64]) -> Complex64;
    /// Taylor jet of the symbol at `point` using the layout's order.
    fn jets(&self, layout: &Arc<JetLayout>, point: &[f64]) -> Result<JetTable>;
}

impl<T: PointSymbol + ?Sized> PointSymbol for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, point: &[f64]) -> Complex64 {
        (**self).eval(point)
    }
    fn jets(&self, layout: &Arc<JetLayout>, point: &[f64]) -> Result<JetTable> {
        (**self).jets(layout, point)
    }
}

/// `⟨z⟩ = (1 + |z|²)^{1/2}`.
pub fn japanese_bracket(z: &[f64]) -> f64 {
    use num_traits::Float;
    Float::sqrt(1.0 + z.iter().map(|v| v * v).sum::<f64>())
}

pub fn euclidean_norm(z: &[f64]) -> f64 {
    use num_traits::Float;
    Float::sqrt(z.iter().map(|v| v * v).sum::<f64>())
}
