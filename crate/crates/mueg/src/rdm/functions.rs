//! Scalar and vector functions evaluable at arbitrary points, with derivatives.

use std::f64::consts::PI;

use crate::fields::{GridSpec, ScalarField, VectorField};
use crate::linalg::{dot, mat_vec, Mat3};
use crate::Point;

pub trait ScalarFunction: Send + Sync {
    fn value(&self, x: Point) -> f64;
    fn gradient(&self, x: Point) -> Point;
    fn hessian(&self, x: Point) -> Mat3;

    fn sample(&self, grid: &GridSpec) -> ScalarField<f64> {
        ScalarField::from_fn(grid, |p| self.value(p))
    }
}

pub trait VectorFunction: Send + Sync {
    fn value(&self, x: Point) -> Point;
    /// `J[a][b] = d v_a / d x_b`.
    fn jacobian(&self, x: Point) -> Mat3;

    fn sample(&self, grid: &GridSpec) -> VectorField<f64> {
        VectorField::from_fn(grid, |p| self.value(p))
    }
}

/// `c + b.x + x^T A x / 2` with symmetric `A`.
#[derive(Clone, Copy, Debug)]
pub struct Quadratic {
    pub c: f64,
    pub b: Point,
    pub a: Mat3,
}

impl Quadratic {
    pub fn zero() -> Self {
        Quadratic { c: 0.0, b: [0.0; 3], a: [[0.0; 3]; 3] }
    }

    /// `s * x_i * x_j` for `i != j`.
    pub fn product(i: usize, j: usize, s: f64) -> Self {
        let mut q = Self::zero();
        q.a[i][j] += s;
        q.a[j][i] += s;
        q
    }

    pub fn linear(b: Point) -> Self {
        Quadratic { b, ..Self::zero() }
    }
}

impl ScalarFunction for Quadratic {
    fn value(&self, x: Point) -> f64 {
        self.c + dot(self.b, x) + 0.5 * dot(x, mat_vec(&self.a, x))
    }
    fn gradient(&self, x: Point) -> Point {
        let ax = mat_vec(&self.a, x);
        [self.b[0] + ax[0], self.b[1] + ax[1], self.b[2] + ax[2]]
    }
    fn hessian(&self, _x: Point) -> Mat3 {
        self.a
    }
}

/// Isotropic Gaussian density of given mass in dimension `dim`.
#[derive(Clone, Copy, Debug)]
pub struct GaussianDensity {
    pub dim: usize,
    pub mass: f64,
    pub center: Point,
    pub sigma: f64,
}

impl ScalarFunction for GaussianDensity {
    fn value(&self, x: Point) -> f64 {
        let mut r2 = 0.0;
        for a in 0..self.dim {
            r2 += (x[a] - self.center[a]).powi(2);
        }
        let s2 = self.sigma * self.sigma;
        self.mass * (2.0 * PI * s2).powf(-(self.dim as f64) / 2.0) * (-r2 / (2.0 * s2)).exp()
    }
    fn gradient(&self, x: Point) -> Point {
        let v = self.value(x);
        let s2 = self.sigma * self.sigma;
        let mut g = [0.0; 3];
        for a in 0..self.dim {
            g[a] = -v * (x[a] - self.center[a]) / s2;
        }
        g
    }
    fn hessian(&self, x: Point) -> Mat3 {
        let v = self.value(x);
        let s2 = self.sigma * self.sigma;
        let mut h = [[0.0; 3]; 3];
        for a in 0..self.dim {
            for b in 0..self.dim {
                let d = (x[a] - self.center[a]) * (x[b] - self.center[b]) / (s2 * s2);
                h[a][b] = v * (d - if a == b { 1.0 / s2 } else { 0.0 });
            }
        }
        h
    }
}

/// Affine vector field `M x + c`.
#[derive(Clone, Copy, Debug)]
pub struct LinearVector {
    pub m: Mat3,
    pub c: Point,
}

impl LinearVector {
    pub fn constant(c: Point) -> Self {
        LinearVector { m: [[0.0; 3]; 3], c }
    }

    /// Symmetric-gauge field `nu x x / 2`.
    pub fn symmetric_gauge(nu: Point) -> Self {
        let h = 0.5;
        LinearVector {
            m: [[0.0, -h * nu[2], h * nu[1]], [h * nu[2], 0.0, -h * nu[0]], [-h * nu[1], h * nu[0], 0.0]],
            c: [0.0; 3],
        }
    }
}

impl VectorFunction for LinearVector {
    fn value(&self, x: Point) -> Point {
        let mx = mat_vec(&self.m, x);
        [mx[0] + self.c[0], mx[1] + self.c[1], mx[2] + self.c[2]]
    }
    fn jacobian(&self, _x: Point) -> Mat3 {
        self.m
    }
}

/// Gradient field of a scalar function.
pub struct GradientOf<F: ScalarFunction>(pub F);

impl<F: ScalarFunction> VectorFunction for GradientOf<F> {
    fn value(&self, x: Point) -> Point {
        self.0.gradient(x)
    }
    fn jacobian(&self, x: Point) -> Mat3 {
        self.0.hessian(x)
    }
}

/// Catmull-Rom weights (value, first, second derivative) for local coordinate `u`.
fn cr_weights(u: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let (u2, u3) = (u * u, u * u * u);
    (
        [0.5 * (-u3 + 2.0 * u2 - u), 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0), 0.5 * (-3.0 * u3 + 4.0 * u2 + u), 0.5 * (u3 - u2)],
        [0.5 * (-3.0 * u2 + 4.0 * u - 1.0), 0.5 * (9.0 * u2 - 10.0 * u), 0.5 * (-9.0 * u2 + 8.0 * u + 1.0), 0.5 * (3.0 * u2 - 2.0 * u)],
        [0.5 * (-6.0 * u + 4.0), 0.5 * (18.0 * u - 10.0), 0.5 * (-18.0 * u + 8.0), 0.5 * (6.0 * u - 2.0)],
    )
}

/// Tensor-product Catmull-Rom interpolation of gridded samples (C1, exact on quadratics).
#[derive(Clone, Debug)]
pub struct Interpolator {
    grid: GridSpec,
}

impl Interpolator {
    pub fn new(grid: &GridSpec) -> Self {
        Interpolator { grid: grid.clone() }
    }

    /// Returns base index per axis and (value, d1, d2) weights per axis.
    #[allow(clippy::type_complexity)]
    fn stencil(&self, x: Point) -> ([usize; 3], [([f64; 4], [f64; 4], [f64; 4]); 3]) {
        let g = &self.grid;
        let mut base = [0usize; 3];
        let one = ([0.0, 1.0, 0.0, 0.0], [0.0; 4], [0.0; 4]);
        let mut w = [one, one, one];
        for a in 0..g.dim {
            let n = g.counts[a];
            let s = (x[a] - g.origin[a]) / g.spacing[a];
            let cell = (s.floor() as isize).clamp(1, n as isize - 3) as usize;
            let u = s - cell as f64;
            let (w0, w1, w2) = cr_weights(u);
            let h = g.spacing[a];
            w[a] = (w0, w1.map(|v| v / h), w2.map(|v| v / (h * h)));
            base[a] = cell - 1;
        }
        (base, w)
    }

    fn taps(&self, a: usize) -> usize {
        if a < self.grid.dim {
            4
        } else {
            1
        }
    }

    /// Value, gradient and Hessian of the interpolant of `values` at `x`.
    pub fn eval(&self, values: &[f64], x: Point) -> (f64, Point, Mat3) {
        let (base, w) = self.stencil(x);
        let g = &self.grid;
        let (mut v, mut gr, mut h) = (0.0, [0.0; 3], [[0.0; 3]; 3]);
        for k in 0..self.taps(2) {
            for j in 0..self.taps(1) {
                for i in 0..self.taps(0) {
                    let off = [i, j, k];
                    let f = values[g.index(base[0] + i, base[1] + j, base[2] + k)];
                    let wt = |a: usize, kind: usize| -> f64 {
                        let t = off[a];
                        match kind {
                            0 => w[a].0[t + if a < g.dim { 0 } else { 1 }],
                            1 => w[a].1[t],
                            _ => w[a].2[t],
                        }
                    };
                    let w0 = [wt(0, 0), wt(1, 0), wt(2, 0)];
                    v += f * w0[0] * w0[1] * w0[2];
                    for a in 0..g.dim {
                        let mut p = 1.0;
                        for b in 0..3 {
                            p *= if a == b { wt(b, 1) } else { w0[b] };
                        }
                        gr[a] += f * p;
                        for c in 0..g.dim {
                            let mut q = 1.0;
                            for b in 0..3 {
                                q *= if a == c && b == a {
                                    wt(b, 2)
                                } else if b == a || b == c {
                                    wt(b, 1)
                                } else {
                                    w0[b]
                                };
                            }
                            h[a][c] += f * q;
                        }
                    }
                }
            }
        }
        (v, gr, h)
    }
}

/// Scalar field interpolated between grid samples.
#[derive(Clone, Debug)]
pub struct SampledScalar {
    interp: Interpolator,
    values: Vec<f64>,
}

impl SampledScalar {
    pub fn new(field: &ScalarField<f64>) -> Self {
        SampledScalar { interp: Interpolator::new(&field.grid), values: field.values.clone() }
    }
}

impl ScalarFunction for SampledScalar {
    fn value(&self, x: Point) -> f64 {
        self.interp.eval(&self.values, x).0
    }
    fn gradient(&self, x: Point) -> Point {
        self.interp.eval(&self.values, x).1
    }
    fn hessian(&self, x: Point) -> Mat3 {
        self.interp.eval(&self.values, x).2
    }
}

/// Vector field interpolated componentwise.
#[derive(Clone, Debug)]
pub struct SampledVector {
    comps: Vec<SampledScalar>,
}

impl SampledVector {
    pub fn new(field: &VectorField<f64>) -> Self {
        SampledVector { comps: (0..3).map(|a| SampledScalar::new(&field.component(a))).collect() }
    }
}

impl VectorFunction for SampledVector {
    fn value(&self, x: Point) -> Point {
        [self.comps[0].value(x), self.comps[1].value(x), self.comps[2].value(x)]
    }
    fn jacobian(&self, x: Point) -> Mat3 {
        [self.comps[0].gradient(x), self.comps[1].gradient(x), self.comps[2].gradient(x)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_gauge_is_cross_product() {
        let nu = [0.3, -1.0, 2.0];
        let v = LinearVector::symmetric_gauge(nu);
        let x = [0.7, 0.2, -1.1];
        let c = crate::linalg::cross(nu, x);
        let got = v.value(x);
        for a in 0..3 {
            assert!((got[a] - 0.5 * c[a]).abs() < 1e-15);
        }
    }

    #[test]
    fn interpolation_reproduces_quadratics() {
        let g = GridSpec::new(3, &[-1.0; 3], &[0.25; 3], &[9, 8, 7]).unwrap();
        let q = Quadratic { c: 0.5, b: [1.0, -2.0, 0.3], a: [[1.0, 0.2, 0.0], [0.2, -0.5, 0.1], [0.0, 0.1, 2.0]] };
        let s = SampledScalar::new(&q.sample(&g));
        for x in [[0.13, -0.4, 0.02], [-0.9, 0.61, 0.3], [0.77, 0.0, -0.5]] {
            assert!((s.value(x) - q.value(x)).abs() < 1e-12);
            let (ga, gb) = (s.gradient(x), q.gradient(x));
            for a in 0..3 {
                assert!((ga[a] - gb[a]).abs() < 1e-11, "{ga:?} {gb:?}");
            }
        }
    }
}
