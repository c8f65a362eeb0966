//! Uniform-grid fields, finite-difference operators, quadrature and field files.

pub mod field;
pub mod grid;
pub mod io;
pub mod ops;
pub mod quad;

pub use field::{FieldValue, ScalarField, TensorField, VectorField};
pub use grid::GridSpec;
pub use ops::{
    derivative_axis,
    antisymmetric_part, curl, gradient, integrate, integrate_values, integrate_weighted, jacobian,
    symmetric_part,
};
pub use quad::{gauss_hermite, gauss_legendre, pairwise_sum, GaussRule};
