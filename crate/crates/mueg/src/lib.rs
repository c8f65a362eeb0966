//! Numerical laboratory for magnetic current-density functional theory.
//!
//! The crate builds explicit one-particle density matrices (Fermi-sphere
//! kernels, orbital sets, the density/current representability constructor),
//! evaluates their observables on uniform grids, and checks identities,
//! inequalities and scaling laws against independent numerics.

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod constructor;
pub mod error;
pub mod fields;
pub mod kernels;
pub mod linalg;
pub mod rdm;
pub mod report;
pub mod tiling;
pub mod ueg;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Points are stored padded to three components; unused axes are zero.
pub type Point = [f64; 3];
