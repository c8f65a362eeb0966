//! Evaluable one-particle kernels and their observables by finite differences.

use num_complex::Complex64;
use rayon::prelude::*;

use super::observables::RdmObservables;
use crate::fields::{GridSpec, ScalarField, TensorField, VectorField};
use crate::kernels::{FermiKernel, ShiftedFermiKernel};
use crate::linalg::sub;
use crate::{Error, Point, Result};

/// Hermitian kernel `gamma(x, y)`.
pub trait Kernel: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: Point, y: Point) -> Complex64;
    /// Length on which the kernel varies; scales finite-difference steps.
    fn length_scale(&self) -> f64 {
        1.0
    }
}

impl Kernel for FermiKernel {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: Point, y: Point) -> Complex64 {
        Complex64::new(self.value(sub(x, y)), 0.0)
    }
    fn length_scale(&self) -> f64 {
        if self.kf > 0.0 {
            1.0 / self.kf
        } else {
            1.0
        }
    }
}

impl Kernel for ShiftedFermiKernel {
    fn dim(&self) -> usize {
        self.base.dim
    }
    fn eval(&self, x: Point, y: Point) -> Complex64 {
        self.value(sub(x, y))
    }
    fn length_scale(&self) -> f64 {
        let u = crate::linalg::norm(self.u);
        1.0 / self.base.kf.max(u).max(1e-300)
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: Point, y: Point) -> Complex64 {
        (**self).eval(x, y)
    }
    fn length_scale(&self) -> f64 {
        (**self).length_scale()
    }
}

impl<K: Kernel + ?Sized> Kernel for std::sync::Arc<K> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: Point, y: Point) -> Complex64 {
        (**self).eval(x, y)
    }
    fn length_scale(&self) -> f64 {
        (**self).length_scale()
    }
}

/// Which parts of the kinetic tensor the finite-difference path computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KineticMode {
    /// Density and complex current only.
    None,
    /// Diagonal of the kinetic tensor.
    Trace,
    /// Full tensor (Hermitian completion of the upper triangle).
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct FdOptions {
    pub kinetic: KineticMode,
    /// Step relative to the kernel length scale.
    pub relative_step: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { kinetic: KineticMode::Full, relative_step: 1e-3 }
    }
}

fn shifted(x: Point, a: usize, h: f64) -> Point {
    let mut y = x;
    y[a] += h;
    y
}

/// `d_{x_a} gamma(x, y)` at `y = x`, fourth-order central difference.
pub fn fd_first(k: &dyn Kernel, x: Point, a: usize, h: f64) -> Complex64 {
    let f = |s: f64| k.eval(shifted(x, a, s * h), x);
    (f(-2.0) - f(2.0) + (f(1.0) - f(-1.0)) * 8.0) / (12.0 * h)
}

/// `d_{x_a} d_{y_b} gamma(x, y)` at `y = x`, central mixed stencil with one Richardson step.
pub fn fd_mixed(k: &dyn Kernel, x: Point, a: usize, b: usize, h: f64) -> Complex64 {
    let m = |h: f64| {
        let e = |sa: f64, sb: f64| k.eval(shifted(x, a, sa * h), shifted(x, b, sb * h));
        (e(1.0, 1.0) - e(1.0, -1.0) - e(-1.0, 1.0) + e(-1.0, -1.0)) / (4.0 * h * h)
    };
    (m(h) * 4.0 - m(2.0 * h)) / 3.0
}

/// Observables of a general kernel on a grid by finite differences in (x, y).
pub fn kernel_observables(k: &dyn Kernel, grid: &GridSpec, opts: FdOptions) -> Result<RdmObservables> {
    let d = grid.dim;
    if k.dim() != d {
        return Err(Error::GridMismatch(format!("kernel dimension {} on a {}-dimensional grid", k.dim(), d)));
    }
    let h = opts.relative_step * k.length_scale();
    let pts = grid.points();
    let per_point: Vec<(f64, [Complex64; 3], [[Complex64; 3]; 3])> = pts
        .par_iter()
        .map(|&x| {
            let rho = k.eval(x, x).re;
            let mut zeta = [Complex64::new(0.0, 0.0); 3];
            for (a, z) in zeta.iter_mut().enumerate().take(d) {
                *z = fd_first(k, x, a, h);
            }
            let mut t = [[Complex64::new(0.0, 0.0); 3]; 3];
            match opts.kinetic {
                KineticMode::None => {}
                KineticMode::Trace => {
                    for a in 0..d {
                        t[a][a] = fd_mixed(k, x, a, a, h);
                    }
                }
                KineticMode::Full => {
                    for a in 0..d {
                        for b in a..d {
                            t[a][b] = fd_mixed(k, x, a, b, h);
                            t[b][a] = t[a][b].conj();
                        }
                        t[a][a].im = 0.0;
                    }
                }
            }
            (rho, zeta, t)
        })
        .collect();
    let rho = ScalarField { grid: grid.clone(), values: per_point.iter().map(|p| p.0).collect() };
    let zeta = VectorField { grid: grid.clone(), values: per_point.iter().map(|p| p.1).collect() };
    let tau = TensorField { grid: grid.clone(), values: per_point.iter().map(|p| p.2).collect() };
    RdmObservables::assemble(rho, zeta, tau, None)
}

/// Weighted sample matrix `sqrt(w_i) gamma(x_i, x_j) sqrt(w_j)` and its eigenvalue range.
pub fn sample_matrix_spectrum(k: &dyn Kernel, points: &[Point], weight: f64) -> Result<(f64, f64)> {
    let n = points.len();
    let rows: Vec<Vec<Complex64>> =
        (0..n).into_par_iter().map(|i| (0..n).map(|j| k.eval(points[i], points[j]) * weight).collect()).collect();
    // Hermitian part through the real symmetric embedding.
    let mut a = nalgebra::DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = 0.5 * (rows[i][j] + rows[j][i].conj());
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite("kernel sample matrix".into()));
            }
            a[(i, j)] = v.re;
            a[(i + n, j + n)] = v.re;
            a[(i, j + n)] = -v.im;
            a[(i + n, j)] = v.im;
        }
    }
    let ev = a.symmetric_eigenvalues();
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Largest Hermiticity defect `|gamma(y, x) - conj gamma(x, y)|` over point pairs.
pub fn hermiticity_defect(k: &dyn Kernel, pairs: &[(Point, Point)]) -> f64 {
    pairs.iter().map(|&(x, y)| (k.eval(y, x) - k.eval(x, y).conj()).norm()).fold(0.0, f64::max)
}
