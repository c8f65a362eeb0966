//! Closed-form kernels of the free Fermi gas and the constructor weight profiles.

pub mod consts;
pub mod eta;
pub mod fermi;
pub mod theta;

pub use consts::{fermi_radius, strain_constant, thomas_fermi_constant, unit_ball_volume};
pub use eta::{EtaConstants, EtaProfile};
pub use fermi::{FermiKernel, ShiftedFermiKernel};
pub use theta::{ThetaMoments, ThetaProfile};
