use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("binomial({alpha:?}, {beta:?}) requires beta <= alpha componentwise")]
    Binomial { alpha: Vec<u32>, beta: Vec<u32> },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("rational symbols with different bases cannot be combined")]
    MixedBases,
    #[error("quantized symbols with different conventions cannot be combined")]
    MixedConventions,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{op}: {msg}")]
    Precondition { op: &'static str, msg: String },
    #[error("symbol vanishes at {point:?}")]
    Vanishing { point: Vec<f64> },
}

impl Error {
    pub(crate) fn pre(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition { op, msg: msg.into() }
    }
}
