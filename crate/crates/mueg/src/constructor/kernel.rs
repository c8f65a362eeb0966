use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{ConstructorSpec, CurrentDecomposition, UQuadrature};
use crate::fields::{gauss_hermite, gauss_legendre, GridSpec};
use crate::kernels::{fermi_radius, FermiKernel};
use crate::rdm::{Kernel, ScalarFunction};
use crate::{Error, Point, Result};

/// Evaluation rule of the t-integral.
#[derive(Clone, Debug)]
pub enum TRule {
    /// Gauss-Legendre nodes in `s = t / sqrt(rho(x) rho(y))` on the joint support
    /// `[a e^{|l|}, b e^{-|l|}]`, `l = log(rho(x)/rho(y))/2`, so the bump
    /// singularities sit at the interval ends.
    Geometric,
    /// Pair-independent nodes in `log t` (trapezoid); keeps the sampled kernel an
    /// exact sum of positive congruences, used for operator-bound checks.
    Global { log_t: Vec<f64>, weight: f64 },
}

/// Quantities attached to one argument of the kernel.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Side {
    pub rho: f64,
    pub w: Point,
    pub delta: f64,
    pub g: f64,
}

#[derive(Clone)]
pub struct ConstructedRdm {
    pub dim: usize,
    pub rho: Arc<dyn ScalarFunction>,
    pub dec: CurrentDecomposition,
    pub spec: ConstructorSpec,
    /// Realized relative discrepancy against the order-doubled quadrature.
    pub quadrature_error: f64,
    s_nodes: Vec<(f64, f64)>,
    gh: Vec<(f64, f64)>,
    kf_unit: f64,
    length: f64,
    t_rule: TRule,
}

impl ConstructedRdm {
    /// Build the kernel; `grid` supplies the sample points of the quadrature self-check.
    pub fn build(
        dim: usize,
        rho: Arc<dyn ScalarFunction>,
        dec: CurrentDecomposition,
        spec: ConstructorSpec,
        grid: &GridSpec,
    ) -> Result<Self> {
        spec.validate()?;
        if grid.dim != dim {
            return Err(Error::GridMismatch(format!("{dim}-dimensional construction on a {}-dimensional grid", grid.dim)));
        }
        let samples: Vec<f64> = grid.points().iter().map(|&x| rho.value(x)).collect();
        if samples.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite("density".into()));
        }
        if samples.iter().any(|&r| r < 0.0) {
            return Err(Error::invalid("density must be nonnegative"));
        }
        let rmax = samples.iter().copied().fold(0.0, f64::max);
        if rmax <= 0.0 {
            return Err(Error::Degenerate("density vanishes identically".into()));
        }
        let mut vmax: f64 = 0.0;
        for &x in grid.points().iter() {
            let v = dec.velocity(x);
            vmax = vmax.max(crate::linalg::norm(v));
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("velocity field".into()));
            }
        }
        let kf_unit = fermi_radius(dim, 1.0)?;
        let kf_max = kf_unit * (spec.eta.b * rmax).powf(1.0 / dim as f64);
        let length = 1.0 / kf_max.max(vmax).max(1e-12);
        let mut out = Self::with_rules(dim, rho.clone(), dec.clone(), spec, kf_unit, length);
        // order-doubling self-check at sample pairs
        let mut fine_spec = spec;
        fine_spec.t_order *= 2;
        if let UQuadrature::GaussHermite(n) = spec.u_rule {
            fine_spec.u_rule = UQuadrature::GaussHermite(2 * n);
        }
        let fine = Self::with_rules(dim, rho, dec, fine_spec, kf_unit, length);
        let pts: Vec<Point> = grid
            .points()
            .into_iter()
            .zip(&samples)
            .filter(|(_, &r)| r > 1e-6 * rmax)
            .map(|(p, _)| p)
            .collect();
        let step = (pts.len() / 48).max(1);
        let mut err: f64 = 0.0;
        for &x in pts.iter().step_by(step) {
            let mut y = x;
            y[0] += 0.5 * length;
            let scale = (out.side(x).rho * out.side(y).rho).sqrt().max(1e-300);
            for (p, q) in [(x, x), (x, y)] {
                err = err.max((out.eval(p, q) - fine.eval(p, q)).norm() / scale);
            }
        }
        out.quadrature_error = err;
        if !(err <= spec.tolerance) {
            return Err(Error::Quadrature(format!(
                "order {} differs from order {} by {err:.3e} (tolerance {:.1e})",
                spec.t_order,
                2 * spec.t_order,
                spec.tolerance
            )));
        }
        Ok(out)
    }

    fn with_rules(
        dim: usize,
        rho: Arc<dyn ScalarFunction>,
        dec: CurrentDecomposition,
        spec: ConstructorSpec,
        kf_unit: f64,
        length: f64,
    ) -> Self {
        let rule = gauss_legendre(spec.t_order);
        let s_nodes = rule.nodes.iter().copied().zip(rule.weights.iter().copied()).collect();
        let gh = match spec.u_rule {
            UQuadrature::GaussHermite(n) => {
                let r = gauss_hermite(n);
                // symmetric rule: keep nonnegative nodes, double off-centre weights
                r.nodes
                    .iter()
                    .zip(&r.weights)
                    .filter(|(&x, _)| x >= 0.0)
                    .map(|(&x, &w)| (x, if x > 0.0 { 2.0 * w } else { w }))
                    .collect()
            }
            UQuadrature::Exact => Vec::new(),
        };
        ConstructedRdm {
            dim,
            rho,
            dec,
            spec,
            quadrature_error: 0.0,
            s_nodes,
            gh,
            kf_unit,
            length,
            t_rule: TRule::Geometric,
        }
    }

    /// Same construction with exact u-integral and pair-independent t-nodes covering
    /// densities in `[rho_min, rho_max]`, `per_width` nodes per support width of eta in log t.
    pub fn positivity_variant(&self, rho_min: f64, rho_max: f64, per_width: usize) -> Result<Self> {
        if !(rho_min > 0.0 && rho_max >= rho_min) {
            return Err(Error::invalid("density range for global t-nodes"));
        }
        let lo = (self.spec.eta.a * rho_min).ln();
        let hi = (self.spec.eta.b * rho_max).ln();
        let h = (self.spec.eta.b / self.spec.eta.a).ln() / per_width.max(4) as f64;
        let n = ((hi - lo) / h).ceil() as usize + 1;
        let log_t = (0..n).map(|k| lo + k as f64 * h).collect();
        let mut out = self.clone();
        out.spec.u_rule = UQuadrature::Exact;
        out.t_rule = TRule::Global { log_t, weight: h };
        Ok(out)
    }

    pub(crate) fn side(&self, x: Point) -> Side {
        let d = self.dim;
        let mut w = self.dec.w.value(x);
        let mut dw = self.dec.w.jacobian(x);
        for a in 0..3 {
            if a >= d {
                w[a] = 0.0;
            }
            for b in 0..3 {
                if a >= d || b >= d {
                    dw[a][b] = 0.0;
                }
            }
        }
        Side { rho: self.rho.value(x).max(0.0), w, delta: self.spec.width.delta(&dw), g: self.dec.gauge(x) }
    }

    pub fn delta_at(&self, x: Point) -> f64 {
        self.side(x).delta
    }

    fn fermi(&self, t: f64, r: f64) -> f64 {
        let kf = self.kf_unit * t.powf(1.0 / self.dim as f64);
        FermiKernel { dim: self.dim, t, kf }.radial(r).f
    }

    /// `int sqrt(eta(t/rho_x) eta(t/rho_y)) f_t(z) dt/t`.
    fn t_integral(&self, rx: f64, ry: f64, r: f64) -> f64 {
        let eta = &self.spec.eta;
        match &self.t_rule {
            TRule::Geometric => {
                let lam = 0.5 * (rx / ry).ln();
                let (el, eml) = (lam.exp(), (-lam).exp());
                let mu = lam.abs().exp();
                let (lo, hi) = (eta.a * mu, eta.b / mu);
                if lo >= hi {
                    return 0.0;
                }
                let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                let rbar = (rx * ry).sqrt();
                let mut acc = 0.0;
                for &(xi, w) in &self.s_nodes {
                    let s = c + h * xi;
                    let e = (eta.value(s * eml) * eta.value(s * el)).sqrt();
                    if e > 0.0 {
                        acc += w * h / s * e * self.fermi(rbar * s, r);
                    }
                }
                acc
            }
            TRule::Global { log_t, weight } => {
                let mut acc = 0.0;
                for &lt in log_t {
                    let t = lt.exp();
                    let e = (eta.value(t / rx) * eta.value(t / ry)).sqrt();
                    if e > 0.0 {
                        acc += weight * e * self.fermi(t, r);
                    }
                }
                acc
            }
        }
    }

    /// `int sqrt(theta_x(u - w_x) theta_y(u - w_y)) e^{i u.z} du`.
    fn u_integral(&self, sx: &Side, sy: &Side, z: Point) -> Complex64 {
        let d = self.dim;
        let df = d as f64;
        let a = df / (4.0 * sx.delta);
        let b = df / (4.0 * sy.delta);
        let p = a + b;
        let mut dv2 = 0.0;
        let mut phase = 0.0;
        for k in 0..d {
            let m = (a * sx.w[k] + b * sy.w[k]) / p;
            phase += m * z[k];
            dv2 += (sx.w[k] - sy.w[k]).powi(2);
        }
        let pref = (2.0 * PI * sx.delta / df).powf(-df / 4.0)
            * (2.0 * PI * sy.delta / df).powf(-df / 4.0)
            * (PI / p).powf(df / 2.0)
            * (-a * b / p * dv2).exp();
        let sigma = (0.5 / p).sqrt();
        let mut env = 1.0;
        match self.spec.u_rule {
            UQuadrature::Exact => {
                let z2: f64 = (0..d).map(|k| z[k] * z[k]).sum();
                env = (-0.25 * z2 / p).exp();
            }
            UQuadrature::GaussHermite(_) => {
                for &zk in z.iter().take(d) {
                    let c: f64 = self.gh.iter().map(|&(x, w)| w * (sigma * x * zk).cos()).sum();
                    env *= c;
                }
            }
        }
        Complex64::from_polar(pref * env, phase)
    }

    /// Kinetic energy density `d_{x} . d_{y} gamma` on the diagonal from the closed-form
    /// expansion of the construction (exact eta moments).
    pub fn analytic_kinetic_density(&self, x: Point) -> AnalyticDensity {
        let d = self.dim;
        let df = d as f64;
        let c = self.spec.eta.constants(d);
        let rho = self.rho.value(x).max(0.0);
        if rho <= 0.0 {
            return AnalyticDensity::default();
        }
        let grad = self.rho.gradient(x);
        let g2: f64 = (0..d).map(|a| grad[a] * grad[a]).sum();
        let v = self.dec.velocity(x);
        let v2: f64 = (0..d).map(|a| v[a] * v[a]).sum();
        let mut dw = self.dec.w.jacobian(x);
        for (a, row) in dw.iter_mut().enumerate() {
            for (b, e) in row.iter_mut().enumerate() {
                if a >= d || b >= d {
                    *e = 0.0;
                }
            }
        }
        let dwn = crate::linalg::frobenius(&dw);
        let delta = self.spec.width.delta(&dw);
        // gradient of the width by central differences
        let h = 1e-4 * self.length;
        let mut gd2 = 0.0;
        for a in 0..d {
            let (mut xp, mut xm) = (x, x);
            xp[a] += h;
            xm[a] -= h;
            let gd = (self.delta_at(xp) - self.delta_at(xm)) / (2.0 * h);
            gd2 += gd * gd;
        }
        let ctf = crate::kernels::thomas_fermi_constant(d).unwrap_or(f64::NAN);
        AnalyticDensity {
            tf: ctf * c.tf_factor * rho.powf(1.0 + 2.0 / df),
            weizsacker: c.weiz_factor * g2 / (4.0 * rho),
            gauge: rho * v2,
            width: rho * delta,
            strain: rho * df * dwn * dwn / (4.0 * delta),
            width_variation: rho * df * gd2 / (8.0 * delta * delta),
        }
    }
}

/// Terms of the closed-form kinetic density at one point.
#[derive(Clone, Copy, Debug, Default)]
pub struct AnalyticDensity {
    pub tf: f64,
    pub weizsacker: f64,
    pub gauge: f64,
    pub width: f64,
    pub strain: f64,
    pub width_variation: f64,
}

impl AnalyticDensity {
    pub fn total(&self) -> f64 {
        self.tf + self.weizsacker + self.gauge + self.width + self.strain + self.width_variation
    }
}

impl Kernel for ConstructedRdm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: Point, y: Point) -> Complex64 {
        let sx = self.side(x);
        let sy = self.side(y);
        if sx.rho <= 0.0 || sy.rho <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let z = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        let r = (0..self.dim).map(|k| z[k] * z[k]).sum::<f64>().sqrt();
        let h = self.t_integral(sx.rho, sy.rho, r);
        if h == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.u_integral(&sx, &sy, z) * h * Complex64::from_polar(1.0, sx.g - sy.g)
    }

    fn length_scale(&self) -> f64 {
        self.length
    }
}
