//! Fermi-sphere kernel `f_t(z) = (2 pi)^{-d} \int_{|k| <= k_F} e^{i k.z} dk` and its shift.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::consts::{fermi_radius, thomas_fermi_constant};
use crate::linalg::{dot, Mat3};
use crate::{Error, Point, Result};

/// Radial profile data at distance r: value, f'(r)/r and f''(r).
#[derive(Clone, Copy, Debug)]
pub struct Radial {
    pub f: f64,
    pub d1_over_r: f64,
    pub d2: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct FermiKernel {
    pub dim: usize,
    pub t: f64,
    pub kf: f64,
}

const SERIES_CUT: f64 = 2.0;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// g(s) = (sin s - s cos s)/s^3 and g'(s)/s, g''(s).
pub fn sphere_profile(s: f64) -> (f64, f64, f64) {
    if s < SERIES_CUT {
        let (mut g, mut g1s, mut g2) = (0.0, 0.0, 0.0);
        let s2 = s * s;
        for n in 1..=22usize {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let m = 2 * n;
            let c = sign / factorial(m + 1);
            g += c * m as f64 * s2.powi(n as i32 - 1);
            if n >= 2 {
                let p = s2.powi(n as i32 - 2);
                g1s += c * (m * (m - 2)) as f64 * p;
                g2 += c * (m * (m - 2) * (m - 3)) as f64 * p;
            }
        }
        (g, g1s, g2)
    } else {
        let (sn, cs) = s.sin_cos();
        let n0 = sn - s * cs;
        let n1 = s * sn;
        let n2 = sn + s * cs;
        let s3 = s * s * s;
        let s4 = s3 * s;
        let g = n0 / s3;
        let g1 = n1 / s3 - 3.0 * n0 / s4;
        let g2 = n2 / s3 - 6.0 * n1 / s4 + 12.0 * n0 / (s4 * s);
        (g, g1 / s, g2)
    }
}

/// Bessel function of the first kind via the periodic trapezoid rule on its
/// integral representation.
pub fn bessel_j(n: u32, s: f64) -> f64 {
    let m = (s.abs().ceil() as usize + 48).max(64);
    let mut acc = 0.0;
    for k in 0..m {
        let tau = 2.0 * PI * k as f64 / m as f64;
        acc += (n as f64 * tau - s * tau.sin()).cos();
    }
    acc / m as f64
}

/// J1(s)/s, J2(s)/s^2 with a series near the origin.
fn disk_profile_parts(s: f64) -> (f64, f64) {
    if s < 4.0 {
        let (mut a, mut b) = (0.0, 0.0);
        let q = s * s / 4.0;
        let mut p = 1.0;
        for m in 0..40usize {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let fm = factorial(m);
            a += sign * p / (2.0 * fm * factorial(m + 1));
            b += sign * p / (4.0 * fm * factorial(m + 2));
            p *= q;
        }
        (a, b)
    } else {
        (bessel_j(1, s) / s, bessel_j(2, s) / (s * s))
    }
}

fn sinc_parts(s: f64) -> (f64, f64, f64) {
    if s < SERIES_CUT {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        let s2 = s * s;
        for n in 0..=12usize {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let m = 2 * n;
            let f = sign / factorial(m + 1);
            a += f * s2.powi(n as i32);
            if n >= 1 {
                let p = s2.powi(n as i32 - 1);
                b += f * m as f64 * p;
                c += f * (m * (m - 1)) as f64 * p;
            }
        }
        (a, b, c)
    } else {
        let (sn, cs) = s.sin_cos();
        let f = sn / s;
        let d1 = (s * cs - sn) / (s * s);
        (f, d1 / s, -f - 2.0 * d1 / s)
    }
}

impl FermiKernel {
    pub fn new(dim: usize, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid("Fermi kernel density must be finite and nonnegative"));
        }
        let kf = fermi_radius(dim, t)?;
        Ok(FermiKernel { dim, t, kf })
    }

    pub fn radial(&self, r: f64) -> Radial {
        let k = self.kf;
        let s = k * r;
        match self.dim {
            1 => {
                let (a, b, c) = sinc_parts(s);
                let k3 = k * k * k / PI;
                Radial { f: k / PI * a, d1_over_r: k3 * b, d2: k3 * c }
            }
            2 => {
                let (a, b) = disk_profile_parts(s);
                let k4 = k.powi(4) / (2.0 * PI);
                let j1s = a;
                Radial { f: k * k / (2.0 * PI) * a, d1_over_r: -k4 * b, d2: k4 * (-j1s + 3.0 * b) }
            }
            _ => {
                let (g, g1s, g2) = sphere_profile(s);
                let c = 1.0 / (2.0 * PI * PI);
                let k5 = k.powi(5) * c;
                Radial { f: k * k * k * c * g, d1_over_r: k5 * g1s, d2: k5 * g2 }
            }
        }
    }

    fn r(&self, z: Point) -> f64 {
        dot(z, z).sqrt()
    }

    pub fn value(&self, z: Point) -> f64 {
        self.radial(self.r(z)).f
    }

    pub fn gradient(&self, z: Point) -> Point {
        let rd = self.radial(self.r(z));
        [rd.d1_over_r * z[0], rd.d1_over_r * z[1], rd.d1_over_r * z[2]]
    }

    pub fn hessian(&self, z: Point) -> Mat3 {
        let r = self.r(z);
        let rd = self.radial(r);
        let mut h = [[0.0; 3]; 3];
        for a in 0..self.dim {
            for b in 0..self.dim {
                let zz = if r > 0.0 { z[a] * z[b] / (r * r) } else { 0.0 };
                let id = if a == b { 1.0 } else { 0.0 };
                h[a][b] = if r > 0.0 { rd.d2 * zz + rd.d1_over_r * (id - zz) } else { rd.d2 * id };
            }
        }
        h
    }

    /// Kinetic energy density `c_TF t^{1+2/d}` on the diagonal.
    pub fn diagonal_kinetic_density(&self) -> f64 {
        let d = self.dim as f64;
        thomas_fermi_constant(self.dim).unwrap_or(f64::NAN) * self.t.powf(1.0 + 2.0 / d)
    }
}

/// Fermi sphere shifted in momentum by `u`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftedFermiKernel {
    pub base: FermiKernel,
    pub u: Point,
}

/// Diagonal observables of a translation-invariant kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformObservables {
    pub density: f64,
    pub current: Point,
    pub kinetic_density: f64,
}

impl ShiftedFermiKernel {
    pub fn new(dim: usize, t: f64, u: Point) -> Result<Self> {
        let mut u = u;
        for c in u.iter_mut().skip(dim) {
            *c = 0.0;
        }
        Ok(ShiftedFermiKernel { base: FermiKernel::new(dim, t)?, u })
    }

    pub fn value(&self, z: Point) -> Complex64 {
        Complex64::from_polar(self.base.value(z), dot(self.u, z))
    }

    pub fn observables(&self) -> UniformObservables {
        let t = self.base.t;
        UniformObservables {
            density: t,
            current: [t * self.u[0], t * self.u[1], t * self.u[2]],
            kinetic_density: t * dot(self.u, self.u) + self.base.diagonal_kinetic_density(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin_is_density() {
        for d in 1..=3 {
            let k = FermiKernel::new(d, 0.8).unwrap();
            assert!((k.value([0.0; 3]) - 0.8).abs() < 1e-13, "d={d}");
        }
        let k = FermiKernel::new(3, 0.0).unwrap();
        assert_eq!(k.value([1.0, 2.0, 0.0]), 0.0);
    }

    #[test]
    fn unit_radius_value_at_pi() {
        // k_F = 1 means t = 1/(6 pi^2)
        let k = FermiKernel::new(3, 1.0 / (6.0 * PI * PI)).unwrap();
        assert!((k.kf - 1.0).abs() < 1e-14);
        let v = k.value([PI, 0.0, 0.0]);
        assert!((v - 1.0 / (2.0 * PI.powi(4))).abs() < 1e-15);
    }

    #[test]
    fn series_and_closed_form_agree_at_cut() {
        let a = sphere_profile(SERIES_CUT * (1.0 - 1e-15));
        let b = sphere_profile(SERIES_CUT * (1.0 + 1e-15));
        assert!((a.0 - b.0).abs() < 1e-13 && (a.1 - b.1).abs() < 1e-12 && (a.2 - b.2).abs() < 1e-12, "{a:?} {b:?}");
        let a = disk_profile_parts(4.0 - 4e-15);
        let b = disk_profile_parts(4.0 + 4e-15);
        assert!((a.0 - b.0).abs() < 1e-13 && (a.1 - b.1).abs() < 1e-13, "{a:?} {b:?}");
    }

    #[test]
    fn laplacian_at_origin_gives_tf_density() {
        for d in 1..=3 {
            let k = FermiKernel::new(d, 2.0).unwrap();
            let h = k.hessian([0.0; 3]);
            let lap: f64 = (0..d).map(|a| h[a][a]).sum();
            let want = k.diagonal_kinetic_density();
            assert!((-lap - want).abs() < 1e-10 * want, "d={d} {} {}", -lap, want);
        }
    }

    #[test]
    fn shifted_kernel_is_hermitian() {
        let k = ShiftedFermiKernel::new(3, 1.3, [0.2, -1.0, 0.5]).unwrap();
        let z = [0.3, 0.1, -0.7];
        let a = k.value(z);
        let b = k.value([-z[0], -z[1], -z[2]]);
        assert!((a - b.conj()).norm() < 1e-14);
    }
}
