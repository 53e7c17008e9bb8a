//! Point spectrum and eigenfunctions of truncated Toeplitz operators
//! `A_Φ f = P_θ(Φ f)` on model spaces `K_θ = H² ⊖ θH²`, for inner functions
//! θ built from finite Blaschke products and atomic singular factors and
//! Laurent-polynomial symbols `Φ(z) = Σ_{k=1}^N a_k z̄^k + Σ_{l=0}^M c_l z^l`.
//!
//! The main entry points are [`scan_eigenvalues`] for general symbols,
//! [`three_term`] for `Φ = a z̄ + b + c z`, and [`oracle`] for dense
//! ground truth on finite-dimensional model spaces.

// `!(x < y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigensolver;
pub mod error;
pub mod fourier;
pub mod inner;
pub mod linalg;
pub mod oracle;
pub mod parallel;
pub mod poly;
pub mod symbol;
pub mod three_term;
pub mod tolerances;

pub use eigensolver::{
    build_criterion, construct_eigenfunction, scan_eigenvalues, verify_observation, CriterionSystem, Eigenpair, Region,
    ScanOptions, ScanReport,
};
pub use error::{Result, TtoError};
pub use fourier::{apply_tto, FourierSeries};
pub use inner::{BlaschkeFactor, InnerFunction, InnerFunctionSpec, SingularAtom};
pub use symbol::{spe_test, LaurentSymbol, LaurentSymbolSpec, RootConfiguration, SpeReport};
pub use tolerances::Tolerances;

pub use num_complex::Complex64;
