//! Eigenvalue counting for diagonal operators under locally subordinate
//! perturbations, on finite truncations.

// `!(x < y)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod gallery;
pub mod lacuna;
pub mod linalg;
pub mod operator;
pub mod quadrature;
pub mod resolvent;
pub mod scenario;
pub mod spectrum;
pub mod theorem;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use operator::{DiagonalOperator, PerturbationMatrix, SubordinationProfile};
pub use spectrum::Spectrum;
