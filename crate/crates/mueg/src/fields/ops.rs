//! Finite-difference operators and grid quadrature.
//!
//! Interior points use the five-point fourth-order central stencil; the two
//! outermost points on each side use four-point one-sided stencils (exact on
//! cubics). Jacobians follow the convention `(Du)[a][b] = d u_a / d x_b`.

use super::quad::pairwise_sum;
use super::{FieldValue, GridSpec, ScalarField, TensorField, VectorField};
use crate::{Error, Result};

fn check_grid(grid: &GridSpec) -> Result<()> {
    for a in 0..grid.dim {
        if grid.counts[a] < 4 {
            return Err(Error::GridTooSmall(format!("axis {a} has {} points", grid.counts[a])));
        }
    }
    Ok(())
}

/// First derivative of `values` along `axis`.
pub fn derivative_axis<T: FieldValue>(grid: &GridSpec, values: &[T], axis: usize) -> Result<Vec<T>> {
    check_grid(grid)?;
    if axis >= grid.dim {
        return Err(Error::UnsupportedDimension(axis + 1));
    }
    if values.len() != grid.len() {
        return Err(Error::GridMismatch("value array length differs from grid size".into()));
    }
    let n = grid.counts[axis];
    let s = grid.stride(axis);
    let h = grid.spacing[axis];
    let c12 = 1.0 / (12.0 * h);
    let c6 = 1.0 / (6.0 * h);
    let mut out = vec![T::default(); values.len()];
    for idx in 0..values.len() {
        let i = grid.coords(idx)[axis];
        let f = |k: isize| values[(idx as isize + k * s as isize) as usize];
        out[idx] = if i >= 2 && i + 2 < n {
            (f(-2) - f(-1) * 8.0 + f(1) * 8.0 - f(2)) * c12
        } else if i == 0 {
            (f(1) * 18.0 - f(0) * 11.0 - f(2) * 9.0 + f(3) * 2.0) * c6
        } else if i == 1 {
            (f(1) * 6.0 - f(-1) * 2.0 - f(0) * 3.0 - f(2)) * c6
        } else if i == n - 1 {
            (f(0) * 11.0 - f(-1) * 18.0 + f(-2) * 9.0 - f(-3) * 2.0) * c6
        } else {
            (f(1) * 2.0 + f(0) * 3.0 - f(-1) * 6.0 + f(-2)) * c6
        };
    }
    Ok(out)
}

pub fn gradient<T: FieldValue>(f: &ScalarField<T>) -> Result<VectorField<T>> {
    let mut out = VectorField::zeros(&f.grid);
    for a in 0..f.grid.dim {
        let d = derivative_axis(&f.grid, &f.values, a)?;
        for (o, v) in out.values.iter_mut().zip(d) {
            o[a] = v;
        }
    }
    Ok(out)
}

pub fn jacobian<T: FieldValue>(u: &VectorField<T>) -> Result<TensorField<T>> {
    let mut out = TensorField::zeros(&u.grid);
    for a in 0..u.grid.dim {
        let comp: Vec<T> = u.values.iter().map(|v| v[a]).collect();
        for b in 0..u.grid.dim {
            let d = derivative_axis(&u.grid, &comp, b)?;
            for (o, v) in out.values.iter_mut().zip(d) {
                o[a][b] = v;
            }
        }
    }
    Ok(out)
}

pub fn symmetric_part(m: &TensorField<f64>) -> TensorField<f64> {
    let mut out = m.clone();
    for (o, v) in out.values.iter_mut().zip(&m.values) {
        for a in 0..3 {
            for b in 0..3 {
                o[a][b] = 0.5 * (v[a][b] + v[b][a]);
            }
        }
    }
    out
}

pub fn antisymmetric_part(m: &TensorField<f64>) -> TensorField<f64> {
    let mut out = m.clone();
    for (o, v) in out.values.iter_mut().zip(&m.values) {
        for a in 0..3 {
            for b in 0..3 {
                o[a][b] = 0.5 * (v[a][b] - v[b][a]);
            }
        }
    }
    out
}

pub fn curl(u: &VectorField<f64>) -> Result<VectorField<f64>> {
    if u.grid.dim != 3 {
        return Err(Error::UnsupportedDimension(u.grid.dim));
    }
    let j = jacobian(u)?;
    let values = j.values.iter().map(|m| [m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]]).collect();
    Ok(VectorField { grid: u.grid.clone(), values })
}

/// Integral of raw samples on `grid` with end-corrected trapezoid weights.
pub fn integrate_values(grid: &GridSpec, values: &[f64]) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::GridMismatch("value array length differs from grid size".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("integrand".into()));
    }
    let w = grid.weights();
    let terms: Vec<f64> = values.iter().zip(&w).map(|(v, w)| v * w).collect();
    Ok(pairwise_sum(&terms))
}

pub fn integrate(f: &ScalarField<f64>) -> Result<f64> {
    integrate_values(&f.grid, &f.values)
}

pub fn integrate_weighted(f: &ScalarField<f64>, w: &ScalarField<f64>) -> Result<f64> {
    if f.grid != w.grid {
        return Err(Error::GridMismatch("value array length differs from grid size".into()));
    }
    let prod: Vec<f64> = f.values.iter().zip(&w.values).map(|(a, b)| a * b).collect();
    integrate_values(&f.grid, &prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    fn grid3(n: usize, h: f64) -> GridSpec {
        GridSpec::new(3, &[-1.0; 3], &[h; 3], &[n; 3]).unwrap()
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = grid3(6, 0.2);
        let f = ScalarField::from_fn(&g, |_| 3.5);
        let d = gradient(&f).unwrap();
        assert!(d.values.iter().all(|v| v.iter().all(|c| c.abs() < 1e-12)));
    }

    #[test]
    fn cubic_is_differentiated_exactly_everywhere() {
        let g = grid3(7, 0.25);
        let f = ScalarField::from_fn(&g, |p| p[0].powi(3) - 2.0 * p[1] * p[1] + p[2]);
        let d = gradient(&f).unwrap();
        for (i, v) in d.values.iter().enumerate() {
            let p = g.point(i);
            assert!((v[0] - 3.0 * p[0] * p[0]).abs() < 1e-11);
            assert!((v[1] + 4.0 * p[1]).abs() < 1e-11);
            assert!((v[2] - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn sine_derivative_fourth_order() {
        let g = GridSpec::new(1, &[0.0], &[0.05], &[200]).unwrap();
        let f = ScalarField::from_fn(&g, |p| p[0].sin());
        let d = gradient(&f).unwrap();
        let err = (0..g.len())
            .filter(|&i| g.is_interior(i, 2))
            .map(|i| (d.values[i][0] - g.point(i)[0].cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn curl_of_rotation_field() {
        let g = grid3(6, 0.25);
        let u = VectorField::from_fn(&g, |p| [-p[1], p[0], 0.0]);
        let c = curl(&u).unwrap();
        assert!(c.values.iter().all(|v| (v[2] - 2.0).abs() < 1e-12 && v[0].abs() < 1e-12));
        let d = jacobian(&u).unwrap();
        let da = antisymmetric_part(&d);
        for (m, cv) in da.values.iter().zip(&c.values) {
            assert!((linalg::frobenius(m) - std::f64::consts::FRAC_1_SQRT_2 * linalg::norm(*cv)).abs() < 1e-12);
        }
    }

    #[test]
    fn curl_requires_three_dimensions() {
        let g = GridSpec::new(2, &[0.0; 2], &[0.1; 2], &[5; 2]).unwrap();
        assert!(matches!(curl(&VectorField::zeros(&g)), Err(Error::UnsupportedDimension(2))));
    }

    #[test]
    fn gaussian_integrates_to_one() {
        let g = GridSpec::cube(3, -7.0, 7.0, 57).unwrap();
        let f = ScalarField::from_fn(&g, |p| (-linalg::norm2(p) / 2.0).exp() / (2.0 * std::f64::consts::PI).powf(1.5));
        assert!((integrate(&f).unwrap() - 1.0).abs() < 1e-8);
        let z = ScalarField::<f64>::zeros(&g);
        assert_eq!(integrate(&z).unwrap(), 0.0);
    }
}
