//! Cube tilings by congruent tetrahedra, mollified indicators and partitions of unity.

pub mod geometry;
pub mod mollifier;
pub mod smeared;

pub use geometry::{Plane, Polyhedron};
pub use mollifier::{Mollifier, RadialProfile};
pub use smeared::{Region, SmearedIndicator};
pub mod decomposition;

pub use decomposition::{CoverageReport, IndicatorSum, TetraDecomposition};
pub mod pou;

pub use pou::{cutoff_scaling_residual, pou_regularized_average, PouAverage, Sampling};
pub mod classify;

pub use classify::{boundary_constant_sweep, classify_indices, CellIndex, IndexClassification};
