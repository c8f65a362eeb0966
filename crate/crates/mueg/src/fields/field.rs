use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::GridSpec;
use crate::{Error, Point, Result};

/// Real or complex scalar usable as a field value.
pub trait FieldValue:
    Copy + Send + Sync + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + 'static
{
    fn finite(&self) -> bool;
}

impl FieldValue for f64 {
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl FieldValue for Complex64 {
    fn finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Clone, Debug)]
pub struct ScalarField<T = f64> {
    pub grid: GridSpec,
    pub values: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct VectorField<T = f64> {
    pub grid: GridSpec,
    pub values: Vec<[T; 3]>,
}

#[derive(Clone, Debug)]
pub struct TensorField<T = f64> {
    pub grid: GridSpec,
    pub values: Vec<[[T; 3]; 3]>,
}

impl<T: FieldValue> ScalarField<T> {
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        ScalarField { grid: grid.clone(), values: vec![T::default(); grid.len()] }
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(Point) -> T + Sync) -> Self {
        use rayon::prelude::*;
        let values = (0..grid.len()).into_par_iter().map(|i| f(grid.point(i))).collect();
        ScalarField { grid: grid.clone(), values }
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        if self.values.iter().all(|v| v.finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }

    pub fn map<U: FieldValue>(&self, f: impl Fn(T) -> U) -> ScalarField<U> {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }
}

impl<T: FieldValue> VectorField<T> {
    pub fn new(grid: GridSpec, values: Vec<[T; 3]>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(VectorField { grid, values })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        VectorField { grid: grid.clone(), values: vec![[T::default(); 3]; grid.len()] }
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(Point) -> [T; 3] + Sync) -> Self {
        use rayon::prelude::*;
        let values = (0..grid.len()).into_par_iter().map(|i| f(grid.point(i))).collect();
        VectorField { grid: grid.clone(), values }
    }

    pub fn component(&self, a: usize) -> ScalarField<T> {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(|v| v[a]).collect() }
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        if self.values.iter().all(|v| v.iter().all(|c| c.finite())) {
            Ok(())
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }
}

impl VectorField<f64> {
    pub fn norms(&self) -> ScalarField<f64> {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(|v| crate::linalg::norm(*v)).collect() }
    }
}

impl<T: FieldValue> TensorField<T> {
    pub fn zeros(grid: &GridSpec) -> Self {
        TensorField { grid: grid.clone(), values: vec![[[T::default(); 3]; 3]; grid.len()] }
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        if self.values.iter().all(|m| m.iter().all(|r| r.iter().all(|c| c.finite()))) {
            Ok(())
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }
}

impl TensorField<f64> {
    pub fn frobenius(&self) -> ScalarField<f64> {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(crate::linalg::frobenius).collect() }
    }
}
