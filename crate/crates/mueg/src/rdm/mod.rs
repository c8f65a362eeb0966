//! One-particle density matrices: kernels, orbital sets, observables, transforms, Coulomb terms.

pub mod bounds;
pub mod corpus;
pub mod coulomb;
pub mod functions;
pub mod kernel;
pub mod lowrank;
pub mod observables;
pub mod transforms;

pub use bounds::{check_integrated_bound, check_pointwise_bounds, integrated_terms, IntegratedTerms};
pub use corpus::{corpus_grid, random_slater_set, CorpusSpec};
pub use coulomb::{coulomb_direct, coulomb_exchange, coulomb_exchange_kernel, quasi_free_coulomb, QuasiFreeCoulomb};
pub use functions::{
    GaussianDensity, GradientOf, Interpolator, LinearVector, Quadratic, SampledScalar, SampledVector, ScalarFunction,
    VectorFunction,
};
pub use kernel::{
    fd_first, fd_mixed, hermiticity_defect, kernel_observables, sample_matrix_spectrum, FdOptions, Kernel, KineticMode,
};
pub use lowrank::{GaussianOrbital, GaussianPrimitive, Jet, LowRankRdm, Orbital};
pub use observables::{hermitian_min_eigenvalue, RdmObservables, RHO_FLOOR};
pub use transforms::{affine_transform_pair, AffineKernel, AffineMap, GaugeFunction, GaugedKernel};
