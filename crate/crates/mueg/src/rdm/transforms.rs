//! Gauge and affine transformations of kernels and density/current pairs.

use std::sync::Arc;

use num_complex::Complex64;

use super::functions::{ScalarFunction, VectorFunction};
use super::kernel::Kernel;
use crate::fields::{GridSpec, ScalarField, VectorField};
use crate::linalg::{det, inverse, mat_mul, mat_t_vec, mat_vec, Mat3, IDENTITY};
use crate::{Error, Point, Result};

/// Affine map `T x = M x + a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub m: Mat3,
    pub a: Point,
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap { m: IDENTITY, a: [0.0; 3] }
    }

    pub fn linear(m: Mat3) -> Self {
        AffineMap { m, a: [0.0; 3] }
    }

    pub fn translation(a: Point) -> Self {
        AffineMap { m: IDENTITY, a }
    }

    pub fn apply(&self, x: Point) -> Point {
        let y = mat_vec(&self.m, x);
        [y[0] + self.a[0], y[1] + self.a[1], y[2] + self.a[2]]
    }

    pub fn det(&self) -> f64 {
        det(&self.m)
    }

    pub fn check(&self) -> Result<()> {
        let d = self.det();
        if !d.is_finite() || d.abs() < 1e-14 {
            return Err(Error::Singular(format!("affine matrix has determinant {d:e}")));
        }
        Ok(())
    }

    /// `self` after `first`: `x -> self(first(x))`.
    pub fn after(&self, first: &AffineMap) -> AffineMap {
        AffineMap { m: mat_mul(&self.m, &first.m), a: self.apply(first.a) }
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        self.check()?;
        let mi = inverse(&self.m).ok_or_else(|| Error::Singular("affine matrix".into()))?;
        let b = mat_vec(&mi, self.a);
        Ok(AffineMap { m: mi, a: [-b[0], -b[1], -b[2]] })
    }
}

/// Real gauge function with cached samples on a grid.
#[derive(Clone)]
pub struct GaugeFunction {
    pub func: Arc<dyn ScalarFunction>,
    pub values: ScalarField<f64>,
    pub gradient: VectorField<f64>,
}

impl GaugeFunction {
    pub fn new(func: Arc<dyn ScalarFunction>, grid: &GridSpec) -> Self {
        let values = ScalarField::from_fn(grid, |x| func.value(x));
        let gradient = VectorField::from_fn(grid, |x| func.gradient(x));
        GaugeFunction { func, values, gradient }
    }
}

/// `exp(i (g(y) - g(x))) gamma(x, y)`.
pub struct GaugedKernel<K> {
    pub inner: K,
    pub g: Arc<dyn ScalarFunction>,
}

impl<K: Kernel> Kernel for GaugedKernel<K> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: Point, y: Point) -> Complex64 {
        Complex64::from_polar(1.0, self.g.value(y) - self.g.value(x)) * self.inner.eval(x, y)
    }
    fn length_scale(&self) -> f64 {
        self.inner.length_scale()
    }
}

/// `|det M| gamma(T x, T y)`.
pub struct AffineKernel<K> {
    pub inner: K,
    pub map: AffineMap,
}

impl<K: Kernel> AffineKernel<K> {
    pub fn new(inner: K, map: AffineMap) -> Result<Self> {
        map.check()?;
        Ok(AffineKernel { inner, map })
    }
}

impl<K: Kernel> Kernel for AffineKernel<K> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: Point, y: Point) -> Complex64 {
        self.inner.eval(self.map.apply(x), self.map.apply(y)) * self.map.det().abs()
    }
    fn length_scale(&self) -> f64 {
        let s = crate::linalg::frobenius(&self.map.m).max(1e-300);
        self.inner.length_scale() / s
    }
}

/// Transformed pair `(|det M| rho(T x), |det M| M^T j(T x))` sampled on `grid`.
pub fn affine_transform_pair(
    rho: &dyn ScalarFunction,
    jp: &dyn VectorFunction,
    map: &AffineMap,
    grid: &GridSpec,
) -> Result<(ScalarField<f64>, VectorField<f64>)> {
    map.check()?;
    let dt = map.det().abs();
    let r = ScalarField::from_fn(grid, |x| dt * rho.value(map.apply(x)));
    let j = VectorField::from_fn(grid, |x| mat_t_vec(&map.m, jp.value(map.apply(x))).map(|c| dt * c));
    r.check_finite("transformed density")?;
    j.check_finite("transformed current")?;
    Ok((r, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_and_inverse() {
        let t1 = AffineMap { m: [[1.0, 0.2, 0.0], [0.0, 2.0, 0.1], [0.3, 0.0, 0.5]], a: [0.1, -0.2, 0.3] };
        let t2 = AffineMap { m: [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.5]], a: [1.0, 0.0, 0.0] };
        let x = [0.4, -0.7, 1.1];
        let c = t2.after(&t1).apply(x);
        let s = t2.apply(t1.apply(x));
        for a in 0..3 {
            assert!((c[a] - s[a]).abs() < 1e-14);
        }
        let back = t1.inverse().unwrap().apply(t1.apply(x));
        for a in 0..3 {
            assert!((back[a] - x[a]).abs() < 1e-13);
        }
        assert!(AffineMap::linear([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]]).check().is_err());
    }
}
