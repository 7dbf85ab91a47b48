//! Spectral symbols, Toeplitz and Galerkin matrix families, and diagnostics
//! that compare sorted symbol samples with computed eigenvalues.

pub mod bspline;
pub mod catalog;
pub mod closed_form;
pub mod domain;
pub mod eig;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod galerkin;
pub mod grid;
pub mod matching;
pub mod quadrature;
pub mod rearrange;
pub mod split;
pub mod toeplitz;

pub use domain::{IntervalUnion, MatrixSymbol, RealMultiset, Rect, ScalarSymbol};
pub use eig::Spectrum;
pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::AUGrid;
