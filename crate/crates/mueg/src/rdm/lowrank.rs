//! Finite-rank density matrices `sum_j lambda_j |phi_j><phi_j|` with orbital jets.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::functions::ScalarFunction;
use super::kernel::Kernel;
use super::observables::RdmObservables;
use super::transforms::AffineMap;
use crate::fields::{derivative_axis, integrate_values, GridSpec, ScalarField, TensorField, VectorField};
use crate::linalg::{dot, mat_mul, mat_t_vec, transpose, Mat3};
use crate::{Error, Point, Result};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Value, gradient and Hessian of a complex function at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: C,
    pub grad: [C; 3],
    pub hess: [[C; 3]; 3],
}

impl Jet {
    pub fn scale(&self, s: C) -> Jet {
        Jet {
            value: self.value * s,
            grad: self.grad.map(|g| g * s),
            hess: self.hess.map(|r| r.map(|h| h * s)),
        }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = *self;
        r.value += o.value;
        for a in 0..3 {
            r.grad[a] += o.grad[a];
            for b in 0..3 {
                r.hess[a][b] += o.hess[a][b];
            }
        }
        r
    }

    /// Multiply by `exp(-i g)` given the jet of the real function g.
    pub fn gauge(&self, g: f64, dg: Point, hg: &Mat3) -> Jet {
        let ph = C::from_polar(1.0, -g);
        let p = self.value;
        let mut out = Jet { value: p * ph, ..Default::default() };
        for a in 0..3 {
            out.grad[a] = (self.grad[a] - I * p * dg[a]) * ph;
            for b in 0..3 {
                let h = self.hess[a][b]
                    - I * (self.grad[a] * dg[b] + self.grad[b] * dg[a])
                    - I * p * hg[a][b]
                    - p * dg[a] * dg[b];
                out.hess[a][b] = h * ph;
            }
        }
        out
    }

    /// Jet of `s * f(M x + a)` from the jet of f at `M x + a`.
    pub fn pullback(&self, m: &Mat3, s: f64) -> Jet {
        let mut out = Jet { value: self.value * s, ..Default::default() };
        for a in 0..3 {
            for i in 0..3 {
                out.grad[a] += self.grad[i] * m[i][a] * s;
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = ZERO;
                for i in 0..3 {
                    for j in 0..3 {
                        acc += self.hess[i][j] * (m[i][a] * m[j][b]);
                    }
                }
                out.hess[a][b] = acc * s;
            }
        }
        out
    }
}

/// Orbital evaluable with derivatives at any point.
pub trait Orbital: Send + Sync {
    fn jet(&self, x: Point) -> Jet;
    fn value(&self, x: Point) -> C {
        self.jet(x).value
    }
}

/// `coeff * exp(-alpha |x - c|^2 + i k.x)`.
#[derive(Clone, Copy, Debug)]
pub struct GaussianPrimitive {
    pub coeff: C,
    pub center: Point,
    pub alpha: f64,
    pub k: Point,
}

impl GaussianPrimitive {
    /// `<self | other>` over R^3.
    pub fn overlap(&self, o: &GaussianPrimitive) -> C {
        let s = self.alpha + o.alpha;
        let mut p = [0.0; 3];
        let mut dc2 = 0.0;
        let mut dk2 = 0.0;
        for a in 0..3 {
            p[a] = (self.alpha * self.center[a] + o.alpha * o.center[a]) / s;
            dc2 += (self.center[a] - o.center[a]).powi(2);
            dk2 += (o.k[a] - self.k[a]).powi(2);
        }
        let dk = [o.k[0] - self.k[0], o.k[1] - self.k[1], o.k[2] - self.k[2]];
        let mag = (std::f64::consts::PI / s).powf(1.5) * (-self.alpha * o.alpha * dc2 / s - dk2 / (4.0 * s)).exp();
        self.coeff.conj() * o.coeff * C::from_polar(mag, dot(dk, p))
    }
}

impl Orbital for GaussianPrimitive {
    fn jet(&self, x: Point) -> Jet {
        let mut r2 = 0.0;
        let mut q = [ZERO; 3];
        for a in 0..3 {
            let dx = x[a] - self.center[a];
            r2 += dx * dx;
            q[a] = C::new(-2.0 * self.alpha * dx, self.k[a]);
        }
        let v = self.coeff * C::from_polar((-self.alpha * r2).exp(), dot(self.k, x));
        let mut j = Jet { value: v, ..Default::default() };
        for a in 0..3 {
            j.grad[a] = v * q[a];
            for b in 0..3 {
                let id = if a == b { 2.0 * self.alpha } else { 0.0 };
                j.hess[a][b] = v * (q[a] * q[b] - id);
            }
        }
        j
    }
}

/// Linear combination of Gaussian primitives.
#[derive(Clone, Debug)]
pub struct GaussianOrbital {
    pub terms: Vec<GaussianPrimitive>,
}

impl GaussianOrbital {
    pub fn overlap(&self, o: &GaussianOrbital) -> C {
        let mut s = ZERO;
        for a in &self.terms {
            for b in &o.terms {
                s += a.overlap(b);
            }
        }
        s
    }

    pub fn scaled(&self, c: C) -> GaussianOrbital {
        GaussianOrbital { terms: self.terms.iter().map(|t| GaussianPrimitive { coeff: t.coeff * c, ..*t }).collect() }
    }

    pub fn axpy(&self, c: C, o: &GaussianOrbital) -> GaussianOrbital {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().map(|t| GaussianPrimitive { coeff: t.coeff * c, ..*t }));
        GaussianOrbital { terms }
    }

    /// Gram-Schmidt with exact overlaps.
    pub fn orthonormalize(set: &[GaussianOrbital]) -> Result<Vec<GaussianOrbital>> {
        let mut out: Vec<GaussianOrbital> = Vec::new();
        for f in set {
            let mut g = f.clone();
            for _pass in 0..2 {
                for e in &out {
                    let c = e.overlap(&g);
                    g = g.axpy(-c, e);
                }
            }
            let n = g.overlap(&g).re;
            if !(n > 1e-20) {
                return Err(Error::Degenerate("orbital set is linearly dependent".into()));
            }
            out.push(g.scaled(C::new(1.0 / n.sqrt(), 0.0)));
        }
        Ok(out)
    }
}

impl Orbital for GaussianOrbital {
    fn jet(&self, x: Point) -> Jet {
        self.terms.iter().fold(Jet::default(), |acc, t| acc.add(&t.jet(x)))
    }
}

/// Orbital multiplied by `exp(-i g)`.
pub struct GaugedOrbital {
    pub inner: Arc<dyn Orbital>,
    pub g: Arc<dyn ScalarFunction>,
}

impl Orbital for GaugedOrbital {
    fn jet(&self, x: Point) -> Jet {
        self.inner.jet(x).gauge(self.g.value(x), self.g.gradient(x), &self.g.hessian(x))
    }
}

/// Orbital `sqrt|det M| phi(M x + a)`.
pub struct AffineOrbital {
    pub inner: Arc<dyn Orbital>,
    pub map: AffineMap,
}

impl Orbital for AffineOrbital {
    fn jet(&self, x: Point) -> Jet {
        let s = self.map.det().abs().sqrt();
        self.inner.jet(self.map.apply(x)).pullback(&self.map.m, s)
    }
}

/// Finite-rank density matrix with jets sampled on a grid.
#[derive(Clone)]
pub struct LowRankRdm {
    pub grid: GridSpec,
    pub occupations: Vec<f64>,
    /// `jets[j][i]`: orbital j at grid point i.
    pub jets: Vec<Vec<Jet>>,
    orbitals: Option<Vec<Arc<dyn Orbital>>>,
}

impl std::fmt::Debug for LowRankRdm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LowRankRdm")
            .field("grid", &self.grid)
            .field("occupations", &self.occupations)
            .field("analytic", &self.orbitals.is_some())
            .finish()
    }
}

fn check_occupations(occ: &[f64]) -> Result<()> {
    for &l in occ {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::invalid(format!("occupation {l} outside [0, 1]")));
        }
    }
    Ok(())
}

impl LowRankRdm {
    pub fn from_orbitals(grid: &GridSpec, orbitals: Vec<Arc<dyn Orbital>>, occupations: Vec<f64>) -> Result<Self> {
        check_occupations(&occupations)?;
        if orbitals.len() != occupations.len() {
            return Err(Error::invalid("one occupation per orbital required"));
        }
        let pts = grid.points();
        let jets: Vec<Vec<Jet>> = orbitals.iter().map(|o| pts.par_iter().map(|&x| o.jet(x)).collect()).collect();
        for js in &jets {
            if js.iter().any(|j| !j.value.re.is_finite() || !j.value.im.is_finite()) {
                return Err(Error::NonFinite("orbital values".into()));
            }
        }
        Ok(LowRankRdm { grid: grid.clone(), occupations, jets, orbitals: Some(orbitals) })
    }

    /// Orbitals given only as samples; derivatives by grid differences.
    pub fn from_fields(orbitals: &[ScalarField<C>], occupations: Vec<f64>) -> Result<Self> {
        check_occupations(&occupations)?;
        let grid = orbitals.first().ok_or_else(|| Error::invalid("empty orbital list"))?.grid.clone();
        if orbitals.len() != occupations.len() {
            return Err(Error::invalid("one occupation per orbital required"));
        }
        let d = grid.dim;
        let mut jets = Vec::with_capacity(orbitals.len());
        for f in orbitals {
            if f.grid != grid {
                return Err(Error::GridMismatch("orbital grids differ".into()));
            }
            f.check_finite("orbital")?;
            let mut js: Vec<Jet> = f.values.iter().map(|&v| Jet { value: v, ..Default::default() }).collect();
            for a in 0..d {
                let da = derivative_axis(&grid, &f.values, a)?;
                for b in 0..d {
                    let dab = derivative_axis(&grid, &da, b)?;
                    for (i, j) in js.iter_mut().enumerate() {
                        j.hess[b][a] = dab[i];
                    }
                }
                for (i, j) in js.iter_mut().enumerate() {
                    j.grad[a] = da[i];
                }
            }
            jets.push(js);
        }
        Ok(LowRankRdm { grid, occupations, jets, orbitals: None })
    }

    pub fn rank(&self) -> usize {
        self.occupations.len()
    }

    pub fn has_analytic_orbitals(&self) -> bool {
        self.orbitals.is_some()
    }

    pub fn trace(&self) -> f64 {
        self.occupations.iter().sum()
    }

    /// Grid overlap matrix `<phi_i | phi_j>`.
    pub fn overlap_matrix(&self) -> Result<Vec<Vec<C>>> {
        let n = self.rank();
        let mut m = vec![vec![ZERO; n]; n];
        for i in 0..n {
            for j in 0..n {
                let re: Vec<f64> =
                    (0..self.grid.len()).map(|p| (self.jets[i][p].value.conj() * self.jets[j][p].value).re).collect();
                let im: Vec<f64> =
                    (0..self.grid.len()).map(|p| (self.jets[i][p].value.conj() * self.jets[j][p].value).im).collect();
                m[i][j] = C::new(integrate_values(&self.grid, &re)?, integrate_values(&self.grid, &im)?);
            }
        }
        Ok(m)
    }

    /// Largest deviation of the grid overlap matrix from the identity.
    pub fn orthonormality_defect(&self) -> Result<f64> {
        let m = self.overlap_matrix()?;
        let mut e: f64 = 0.0;
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                e = e.max((v - t).norm());
            }
        }
        Ok(e)
    }

    /// `sum_j lambda_j ||grad phi_j||^2`.
    pub fn kinetic_energy(&self) -> Result<f64> {
        let d = self.grid.dim;
        let dens: Vec<f64> = (0..self.grid.len())
            .map(|p| {
                self.occupations
                    .iter()
                    .zip(&self.jets)
                    .map(|(l, js)| l * (0..d).map(|a| js[p].grad[a].norm_sqr()).sum::<f64>())
                    .sum()
            })
            .collect();
        integrate_values(&self.grid, &dens)
    }

    /// `int Tr(A (grad x grad) gamma)|_diag = sum_j lambda_j int grad phi_j^* A grad phi_j`.
    pub fn weighted_kinetic_energy(&self, a: &Mat3) -> Result<f64> {
        let d = self.grid.dim;
        let dens: Vec<f64> = (0..self.grid.len())
            .map(|p| {
                let mut s = 0.0;
                for (l, js) in self.occupations.iter().zip(&self.jets) {
                    let g = js[p].grad;
                    for i in 0..d {
                        for j in 0..d {
                            s += l * a[i][j] * (g[i].conj() * g[j]).re;
                        }
                    }
                }
                s
            })
            .collect();
        integrate_values(&self.grid, &dens)
    }

    /// Kernel value at grid points `i`, `j`.
    pub fn kernel_at(&self, i: usize, j: usize) -> C {
        self.occupations.iter().zip(&self.jets).map(|(l, js)| js[i].value * js[j].value.conj() * *l).sum()
    }

    pub fn observables(&self) -> Result<RdmObservables> {
        let g = &self.grid;
        let n = g.len();
        let d = g.dim;
        let mut rho = ScalarField::<f64>::zeros(g);
        let mut zeta = VectorField::<C>::zeros(g);
        let mut tau = TensorField::<C>::zeros(g);
        let mut dj = TensorField::<f64>::zeros(g);
        for p in 0..n {
            for (l, js) in self.occupations.iter().zip(&self.jets) {
                let j = &js[p];
                rho.values[p] += l * j.value.norm_sqr();
                for a in 0..d {
                    zeta.values[p][a] += j.grad[a] * j.value.conj() * *l;
                    for b in 0..d {
                        tau.values[p][a][b] += j.grad[a] * j.grad[b].conj() * *l;
                        dj.values[p][a][b] +=
                            l * (j.grad[b].conj() * j.grad[a] + j.value.conj() * j.hess[a][b]).im;
                    }
                }
            }
        }
        // D(j/rho) = Dj/rho - j (grad rho)^T / rho^2 with grad rho = 2 Re zeta
        let rmax = rho.values.iter().copied().fold(0.0, f64::max);
        let mut vj = TensorField::<f64>::zeros(g);
        for p in 0..n {
            let r = rho.values[p];
            if !(r > super::observables::RHO_FLOOR * rmax && r > 0.0) {
                continue;
            }
            for a in 0..d {
                let ja = zeta.values[p][a].im;
                for b in 0..d {
                    let drb = 2.0 * zeta.values[p][b].re;
                    vj.values[p][a][b] = dj.values[p][a][b] / r - ja * drb / (r * r);
                }
            }
        }
        RdmObservables::assemble(rho, zeta, tau, Some(vj))
    }

    /// Gauge transform `gamma(x,y) -> exp(i(g(y) - g(x))) gamma(x,y)`, i.e. `phi -> exp(-i g) phi`.
    pub fn gauge_transform(&self, g: &Arc<dyn ScalarFunction>) -> LowRankRdm {
        let pts = self.grid.points();
        let gj: Vec<(f64, Point, Mat3)> = pts.iter().map(|&x| (g.value(x), g.gradient(x), g.hessian(x))).collect();
        let jets = self
            .jets
            .iter()
            .map(|js| js.iter().zip(&gj).map(|(j, (v, dg, hg))| j.gauge(*v, *dg, hg)).collect())
            .collect();
        let orbitals = self.orbitals.as_ref().map(|os| {
            os.iter()
                .map(|o| Arc::new(GaugedOrbital { inner: o.clone(), g: g.clone() }) as Arc<dyn Orbital>)
                .collect()
        });
        LowRankRdm { grid: self.grid.clone(), occupations: self.occupations.clone(), jets, orbitals }
    }

    /// `gamma_T(x,y) = |det M| gamma(T x, T y)` sampled on `grid`; requires analytic orbitals.
    pub fn affine_transform(&self, map: &AffineMap, grid: &GridSpec) -> Result<LowRankRdm> {
        map.check()?;
        let os = self
            .orbitals
            .as_ref()
            .ok_or_else(|| Error::invalid("affine transform needs orbitals evaluable off the grid"))?;
        let mapped: Vec<Arc<dyn Orbital>> = os
            .iter()
            .map(|o| Arc::new(AffineOrbital { inner: o.clone(), map: *map }) as Arc<dyn Orbital>)
            .collect();
        LowRankRdm::from_orbitals(grid, mapped, self.occupations.clone())
    }
}

impl Kernel for LowRankRdm {
    fn dim(&self) -> usize {
        self.grid.dim
    }
    fn eval(&self, x: Point, y: Point) -> C {
        let os = self.orbitals.as_ref().expect("off-grid kernel evaluation needs analytic orbitals");
        os.iter().zip(&self.occupations).map(|(o, l)| o.value(x) * o.value(y).conj() * *l).sum()
    }
    fn length_scale(&self) -> f64 {
        0.2
    }
}

/// Expected `Tr(M M^T tau)` density used by the affine kinetic rule.
pub fn transformed_kinetic_density(tau: &[[C; 3]; 3], m: &Mat3) -> f64 {
    let mmt = mat_mul(m, &transpose(m));
    let mut s = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            s += mmt[a][b] * tau[b][a].re;
        }
    }
    s
}

/// `j` transformed as `det(M) M^T j`.
pub fn transform_current(j: Point, m: &Mat3, det: f64) -> Point {
    mat_t_vec(m, j).map(|c| det * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prim(alpha: f64, c: Point, k: Point) -> GaussianPrimitive {
        GaussianPrimitive { coeff: C::new(1.0, 0.0), center: c, alpha, k }
    }

    #[test]
    fn jet_matches_finite_differences() {
        let o = GaussianOrbital {
            terms: vec![prim(0.7, [0.1, -0.2, 0.3], [1.0, 0.5, -0.3]), prim(1.3, [-0.4, 0.0, 0.2], [0.0, 0.0, 2.0])],
        };
        let x = [0.3, 0.1, -0.2];
        let j = o.jet(x);
        let h = 1e-5;
        for a in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            let fd = (o.value(xp) - o.value(xm)) / (2.0 * h);
            assert!((fd - j.grad[a]).norm() < 1e-8);
            let (gp, gm) = (o.jet(xp).grad, o.jet(xm).grad);
            for b in 0..3 {
                assert!(((gp[b] - gm[b]) / (2.0 * h) - j.hess[b][a]).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn analytic_overlap_matches_grid() {
        let a = prim(0.9, [0.2, 0.0, -0.1], [0.5, -1.0, 0.0]);
        let b = prim(1.4, [-0.3, 0.1, 0.2], [0.0, 0.7, 1.0]);
        let g = GridSpec::cube(3, -5.0, 5.0, 61).unwrap();
        let re: Vec<f64> = g.points().iter().map(|&x| (a.value(x).conj() * b.value(x)).re).collect();
        let im: Vec<f64> = g.points().iter().map(|&x| (a.value(x).conj() * b.value(x)).im).collect();
        let s = C::new(integrate_values(&g, &re).unwrap(), integrate_values(&g, &im).unwrap());
        assert!((s - a.overlap(&b)).norm() < 1e-7, "{s} {}", a.overlap(&b));
    }

    #[test]
    fn rejects_bad_occupations() {
        let g = GridSpec::cube(3, -1.0, 1.0, 5).unwrap();
        let o: Arc<dyn Orbital> = Arc::new(prim(1.0, [0.0; 3], [0.0; 3]));
        assert!(LowRankRdm::from_orbitals(&g, vec![o], vec![1.5]).is_err());
    }
}
