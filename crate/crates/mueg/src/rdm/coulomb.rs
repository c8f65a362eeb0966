//! Coulomb direct and exchange energies by grid double sums.

use rayon::prelude::*;

use super::kernel::Kernel;
use super::lowrank::LowRankRdm;
use crate::fields::{pairwise_sum, GridSpec, ScalarField};
use crate::{Error, Result};

/// Table of `1/|x_i - x_j|` indexed by the offset; the coincident cell uses the
/// average of `1/r` over a ball of the cell's volume, `3/(2a)`.
struct InverseDistance {
    n: [usize; 3],
    table: Vec<f64>,
}

impl InverseDistance {
    fn new(grid: &GridSpec) -> Result<Self> {
        if grid.dim != 3 {
            return Err(Error::UnsupportedDimension(grid.dim));
        }
        let n = grid.counts;
        let h = grid.spacing;
        let mut table = vec![0.0; n[0] * n[1] * n[2]];
        let a = (3.0 * grid.cell_volume() / (4.0 * std::f64::consts::PI)).cbrt();
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let r = ((i as f64 * h[0]).powi(2) + (j as f64 * h[1]).powi(2) + (k as f64 * h[2]).powi(2)).sqrt();
                    table[i + n[0] * (j + n[1] * k)] = if r == 0.0 { 1.5 / a } else { 1.0 / r };
                }
            }
        }
        Ok(InverseDistance { n, table })
    }

    fn get(&self, a: [usize; 3], b: [usize; 3]) -> f64 {
        let d = [a[0].abs_diff(b[0]), a[1].abs_diff(b[1]), a[2].abs_diff(b[2])];
        self.table[d[0] + self.n[0] * (d[1] + self.n[1] * d[2])]
    }
}

/// `1/2 sum_{i,j} w^2 f(i, j) / |x_i - x_j|` with the singular cell corrected.
fn pair_sum(grid: &GridSpec, f: impl Fn(usize, usize) -> f64 + Sync) -> Result<f64> {
    let inv = InverseDistance::new(grid)?;
    let w = grid.cell_volume();
    let coords: Vec<[usize; 3]> = (0..grid.len()).map(|i| grid.coords(i)).collect();
    let rows: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let terms: Vec<f64> = (0..grid.len()).map(|j| f(i, j) * inv.get(coords[i], coords[j])).collect();
            pairwise_sum(&terms)
        })
        .collect();
    let s = 0.5 * w * w * pairwise_sum(&rows);
    if !s.is_finite() {
        return Err(Error::NonFinite("Coulomb double sum".into()));
    }
    Ok(s)
}

/// `D(mu1, mu2) = 1/2 int int mu1(x) mu2(y) / |x - y|`.
pub fn coulomb_direct(mu1: &ScalarField<f64>, mu2: &ScalarField<f64>) -> Result<f64> {
    if mu1.grid != mu2.grid {
        return Err(Error::GridMismatch("Coulomb arguments on different grids".into()));
    }
    mu1.check_finite("first Coulomb argument")?;
    mu2.check_finite("second Coulomb argument")?;
    pair_sum(&mu1.grid, |i, j| mu1.values[i] * mu2.values[j])
}

/// `1/2 int int |gamma(x, y)|^2 / |x - y|` for a finite-rank density matrix.
pub fn coulomb_exchange(rdm: &LowRankRdm) -> Result<f64> {
    pair_sum(&rdm.grid, |i, j| rdm.kernel_at(i, j).norm_sqr())
}

/// Exchange energy of a general kernel sampled on `grid`.
pub fn coulomb_exchange_kernel(k: &dyn Kernel, grid: &GridSpec) -> Result<f64> {
    let pts = grid.points();
    pair_sum(grid, |i, j| k.eval(pts[i], pts[j]).norm_sqr())
}

/// Coulomb energies of the quasi-free state with a finite-rank density matrix.
#[derive(Clone, Copy, Debug)]
pub struct QuasiFreeCoulomb {
    pub direct: f64,
    pub exchange: f64,
    /// `1/2 int int (rho(x) rho(y) - |gamma(x,y)|^2)/|x - y|` from the pair density.
    pub pair: f64,
}

impl QuasiFreeCoulomb {
    /// Interaction minus direct term; equals minus the exchange energy.
    pub fn indirect(&self) -> f64 {
        self.pair - self.direct
    }
}

pub fn quasi_free_coulomb(rdm: &LowRankRdm) -> Result<QuasiFreeCoulomb> {
    let rho: Vec<f64> = (0..rdm.grid.len()).map(|i| rdm.kernel_at(i, i).re).collect();
    let rho_f = ScalarField { grid: rdm.grid.clone(), values: rho.clone() };
    let direct = coulomb_direct(&rho_f, &rho_f)?;
    let exchange = coulomb_exchange(rdm)?;
    let pair = pair_sum(&rdm.grid, |i, j| rho[i] * rho[j] - rdm.kernel_at(i, j).norm_sqr())?;
    Ok(QuasiFreeCoulomb { direct, exchange, pair })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdm::functions::{GaussianDensity, ScalarFunction};

    #[test]
    fn gaussian_self_energy() {
        let sigma = 0.6;
        let g = GridSpec::cube(3, -3.6, 3.6, 25).unwrap();
        let rho = GaussianDensity { dim: 3, mass: 1.0, center: [0.0; 3], sigma }.sample(&g);
        let d = coulomb_direct(&rho, &rho).unwrap();
        let exact = 1.0 / (2.0 * sigma * std::f64::consts::PI.sqrt());
        assert!((d - exact).abs() / exact < 2e-2, "{d} {exact}");
    }

    #[test]
    fn zero_argument() {
        let g = GridSpec::cube(3, -1.0, 1.0, 6).unwrap();
        let z = ScalarField::zeros(&g);
        let o = ScalarField::from_fn(&g, |_| 1.0);
        assert_eq!(coulomb_direct(&o, &z).unwrap(), 0.0);
    }
}
