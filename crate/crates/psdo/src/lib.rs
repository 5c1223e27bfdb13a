//! File formats, grid quadrature, reports and the command line for
//! `psdo-core`.

pub mod cli;
pub mod format;
pub mod grid;
pub mod report;
pub mod specs;
pub mod suite;
