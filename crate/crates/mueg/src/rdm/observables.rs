//! Diagonal observables of a one-particle density matrix on a grid.

use num_complex::Complex64;

use crate::fields::{curl, GridSpec, ScalarField, TensorField, VectorField};
use crate::Result;

/// Relative density floor below which quotients by rho are not evaluated.
pub const RHO_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct RdmObservables {
    pub grid: GridSpec,
    pub rho: ScalarField<f64>,
    /// `zeta_a = d_{x_a} gamma(x, y)` at `y = x`.
    pub zeta: VectorField<Complex64>,
    pub jp: VectorField<f64>,
    pub tau: ScalarField<f64>,
    /// `tau_ab = d_{x_a} d_{y_b} gamma(x, y)` at `y = x`.
    pub tau_tensor: TensorField<Complex64>,
    /// `tau_ab - zeta_a conj(zeta_b) / rho` where rho is above the floor.
    pub omega: TensorField<Complex64>,
    /// `D(j^p / rho)` where rho is above the floor, zero elsewhere.
    pub velocity_jacobian: TensorField<f64>,
    /// `curl(j^p / rho)` for d = 3.
    pub vorticity: Option<VectorField<f64>>,
    /// Points with rho above the floor.
    pub mask: Vec<bool>,
}

impl RdmObservables {
    /// Assemble derived quantities; `velocity_jacobian` is computed from the grid when absent.
    pub fn assemble(
        rho: ScalarField<f64>,
        zeta: VectorField<Complex64>,
        tau_tensor: TensorField<Complex64>,
        velocity_jacobian: Option<TensorField<f64>>,
    ) -> Result<Self> {
        let grid = rho.grid.clone();
        rho.check_finite("density")?;
        zeta.check_finite("complex current")?;
        tau_tensor.check_finite("kinetic tensor")?;
        let rmax = rho.values.iter().copied().fold(0.0, f64::max);
        let mask: Vec<bool> = rho.values.iter().map(|&r| r > RHO_FLOOR * rmax && r > 0.0).collect();
        let d = grid.dim;
        let jp = VectorField {
            grid: grid.clone(),
            values: zeta.values.iter().map(|z| [z[0].im, z[1].im, z[2].im]).collect(),
        };
        let tau = ScalarField {
            grid: grid.clone(),
            values: tau_tensor.values.iter().map(|t| (0..d).map(|a| t[a][a].re).sum()).collect(),
        };
        let mut omega = TensorField::zeros(&grid);
        for i in 0..grid.len() {
            if !mask[i] {
                continue;
            }
            let z = zeta.values[i];
            for a in 0..3 {
                for b in 0..3 {
                    omega.values[i][a][b] = tau_tensor.values[i][a][b] - z[a] * z[b].conj() / rho.values[i];
                }
            }
        }
        let velocity_jacobian = match velocity_jacobian {
            Some(v) => v,
            None => {
                let u = VectorField {
                    grid: grid.clone(),
                    values: (0..grid.len())
                        .map(|i| if mask[i] { jp.values[i].map(|c| c / rho.values[i]) } else { [0.0; 3] })
                        .collect(),
                };
                let mut jac = crate::fields::jacobian(&u)?;
                for (i, m) in mask.iter().enumerate() {
                    if !m {
                        jac.values[i] = [[0.0; 3]; 3];
                    }
                }
                jac
            }
        };
        let vorticity = if d == 3 {
            let mut w = VectorField::zeros(&grid);
            for (i, j) in velocity_jacobian.values.iter().enumerate() {
                w.values[i] = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
            }
            Some(w)
        } else {
            None
        };
        Ok(RdmObservables { grid, rho, zeta, jp, tau, tau_tensor, omega, velocity_jacobian, vorticity, mask })
    }

    /// Vorticity by the grid curl of `j^p / rho` (independent of the stored Jacobian).
    pub fn grid_vorticity(&self) -> Result<VectorField<f64>> {
        let u = VectorField {
            grid: self.grid.clone(),
            values: (0..self.grid.len())
                .map(|i| if self.mask[i] { self.jp.values[i].map(|c| c / self.rho.values[i]) } else { [0.0; 3] })
                .collect(),
        };
        curl(&u)
    }

    /// `|grad sqrt(rho)|^2 = |Re zeta|^2 / rho`.
    pub fn weizsacker_density(&self, i: usize) -> f64 {
        if !self.mask[i] {
            return 0.0;
        }
        let z = self.zeta.values[i];
        (z[0].re * z[0].re + z[1].re * z[1].re + z[2].re * z[2].re) / self.rho.values[i]
    }

    /// `|j^p|^2 / rho`.
    pub fn gauge_density(&self, i: usize) -> f64 {
        if !self.mask[i] {
            return 0.0;
        }
        let j = self.jp.values[i];
        (j[0] * j[0] + j[1] * j[1] + j[2] * j[2]) / self.rho.values[i]
    }

    /// Frobenius norm of the antisymmetric part of `D(j^p/rho)`.
    pub fn antisym_velocity_norm(&self, i: usize) -> f64 {
        let m = self.velocity_jacobian.values[i];
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let x = 0.5 * (m[a][b] - m[b][a]);
                s += x * x;
            }
        }
        s.sqrt()
    }

    /// Norm of the complex current.
    pub fn zeta_norm(&self, i: usize) -> f64 {
        self.zeta.values[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Smallest eigenvalue of the Hermitian matrix `omega` at point `i`.
    pub fn omega_min_eigenvalue(&self, i: usize) -> f64 {
        hermitian_min_eigenvalue(&self.omega.values[i], self.grid.dim)
    }
}

/// Smallest eigenvalue of a Hermitian matrix (leading `d x d` block), via the
/// real symmetric embedding `[[Re, -Im], [Im, Re]]`.
pub fn hermitian_min_eigenvalue(m: &[[Complex64; 3]; 3], d: usize) -> f64 {
    let n = 2 * d;
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let h = 0.5 * (m[i][j] + m[j][i].conj());
            a[(i, j)] = h.re;
            a[(i + d, j + d)] = h.re;
            a[(i, j + d)] = -h.im;
            a[(i + d, j)] = h.im;
        }
    }
    a.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}
