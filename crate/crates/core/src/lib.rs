//! Symbolic calculus for global pseudodifferential operators of infinite
//! order.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! * [`weights`]: weight functions, their Young conjugates, cutoff radii and
//!   numeric verifiers of the standard conjugate inequalities.
//! * [`symbol`]: exact polynomial and rational symbols, jet-evaluated
//!   expression symbols, class-constant fits, formal sums and amplitude
//!   reduction.
//! * [`calculus`]: change of quantization, transposition and composition of
//!   τ-quantized polynomial symbols.
//! * [`parametrix`]: hypoellipticity checks and the exact parametrix
//!   recursion.
//! * [`hermite`]: the normal-ordered operator oracle acting on Hermite
//!   expansions.
//!
//! All operators use the normalized Fourier convention: at τ = 0 the symbol
//! `x^α ξ^β` quantizes to `x^α D^β` with `D = -i ∂`.
#![no_std]

extern crate alloc;

pub mod calculus;
pub mod error;
pub mod hermite;
pub mod multiindex;
pub mod parametrix;
pub mod poly;
pub mod region;
pub mod scalar;
pub mod symbol;
pub mod weights;

pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use scalar::{Exact, Float, Rational, Scalar};
