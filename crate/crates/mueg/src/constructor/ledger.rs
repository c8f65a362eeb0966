use std::sync::Arc;

use super::kernel::ConstructedRdm;
use super::{ConstructorSpec, CurrentDecomposition, WidthPolicy};
use crate::fields::{integrate_values, pairwise_sum, GridSpec};
use crate::kernels::{strain_constant, thomas_fermi_constant, EtaProfile};
use crate::linalg::frobenius;
use crate::rdm::{kernel_observables, FdOptions, KineticMode, ScalarFunction, RHO_FLOOR};
use crate::report::BoundReport;
use crate::{Error, Result};

/// Support widths of eta tried by the upper functional.
pub const EPSILON_GRID: [f64; 3] = [0.1, 0.3, 1.0];

/// Largest relative errors of the reproduced density and current.
#[derive(Clone, Copy, Debug)]
pub struct MarginalErrors {
    pub density: f64,
    pub current: f64,
    pub points: usize,
}

/// Density and current of the kernel against the prescribed pair, at grid points above the floor.
/// The current error at x is normalized by `rho(x) max(max|v|, 1e-12)`.
pub fn marginal_errors(gamma: &ConstructedRdm, grid: &GridSpec) -> Result<MarginalErrors> {
    let obs = kernel_observables(gamma, grid, FdOptions { kinetic: KineticMode::None, ..Default::default() })?;
    let pts = grid.points();
    let vmax = pts
        .iter()
        .map(|&x| crate::linalg::norm(gamma.dec.velocity(x)))
        .fold(0.0, f64::max)
        .max(1e-12);
    let rmax = pts.iter().map(|&x| gamma.rho.value(x)).fold(0.0, f64::max);
    let (mut ed, mut ej, mut n) = (0.0f64, 0.0f64, 0);
    for (i, &x) in pts.iter().enumerate() {
        let r = gamma.rho.value(x);
        if !(r > RHO_FLOOR * rmax) {
            continue;
        }
        n += 1;
        ed = ed.max((obs.rho.values[i] - r).abs() / r);
        let v = gamma.dec.velocity(x);
        let mut e2 = 0.0;
        for a in 0..grid.dim {
            e2 += (obs.jp.values[i][a] - r * v[a]).powi(2);
        }
        ej = ej.max(e2.sqrt() / (r * vmax));
    }
    Ok(MarginalErrors { density: ed, current: ej, points: n })
}

/// Marginal fidelity as a report (pass iff both errors are at most `tol`).
pub fn verify_marginals(gamma: &ConstructedRdm, grid: &GridSpec, tol: f64) -> Result<(MarginalErrors, BoundReport)> {
    let e = marginal_errors(gamma, grid)?;
    let worst = e.density.max(e.current);
    let r = BoundReport::inequality("marginals", "marginal-fidelity", worst, tol, 0.0, 1.0)
        .with("density_error", e.density)
        .with("current_error", e.current)
        .with("quadrature_estimate", gamma.quadrature_error)
        .with("points", e.points as f64);
    Ok((e, r))
}

#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub order: usize,
    pub density: f64,
    pub current: f64,
}

/// Marginal errors for a sequence of quadrature orders (t and u orders set together).
pub fn convergence_study(
    dim: usize,
    rho: Arc<dyn ScalarFunction>,
    dec: &CurrentDecomposition,
    spec: ConstructorSpec,
    grid: &GridSpec,
    orders: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    orders
        .iter()
        .map(|&n| {
            let mut s = spec.with_orders(n);
            s.tolerance = f64::INFINITY;
            let g = ConstructedRdm::build(dim, rho.clone(), dec.clone(), s, grid)?;
            let e = marginal_errors(&g, grid)?;
            Ok(ConvergenceRow { order: n, density: e.density, current: e.current })
        })
        .collect()
}

/// Integrals entering the right-hand side of the kinetic bound.
#[derive(Clone, Copy, Debug, Default)]
struct RhsIntegrals {
    mass: f64,
    tf: f64,
    weizsacker: f64,
    gauge: f64,
    strain: f64,
    strain_rhs: f64,
    width_variation: f64,
}

fn rhs_integrals(
    dim: usize,
    rho: &dyn ScalarFunction,
    dec: &CurrentDecomposition,
    width: WidthPolicy,
    pts: &[crate::Point],
    weights: &[f64],
) -> Result<RhsIntegrals> {
    if pts.len() != weights.len() {
        return Err(Error::GridMismatch("points and weights differ in length".into()));
    }
    let d = dim;
    let df = d as f64;
    let ctf = thomas_fermi_constant(d)?;
    let n = pts.len();
    let mut cols = vec![vec![0.0; n]; 7];
    let delta_at = |x: crate::Point| {
        let mut dw = dec.w.jacobian(x);
        clip(&mut dw, d);
        width.delta(&dw)
    };
    for (i, &x) in pts.iter().enumerate() {
        let r = rho.value(x);
        if !(r > 0.0) {
            continue;
        }
        let gr = rho.gradient(x);
        let v = dec.velocity(x);
        let mut dw = dec.w.jacobian(x);
        clip(&mut dw, d);
        let dwn = frobenius(&dw);
        let delta = width.delta(&dw);
        let h = 1e-5;
        let mut gd2 = 0.0;
        for a in 0..d {
            let (mut xp, mut xm) = (x, x);
            xp[a] += h;
            xm[a] -= h;
            gd2 += ((delta_at(xp) - delta_at(xm)) / (2.0 * h)).powi(2);
        }
        cols[0][i] = r;
        cols[1][i] = ctf * r.powf(1.0 + 2.0 / df);
        cols[2][i] = (0..d).map(|a| gr[a] * gr[a]).sum::<f64>() / (4.0 * r);
        cols[3][i] = r * (0..d).map(|a| v[a] * v[a]).sum::<f64>();
        cols[4][i] = r * dwn;
        cols[5][i] = r * (delta + df * df * df * dwn * dwn / (4.0 * delta));
        cols[6][i] = r * df * gd2 / (8.0 * delta * delta);
    }
    let mut out = [0.0; 7];
    for (k, c) in cols.iter().enumerate() {
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("kinetic bound integrand".into()));
        }
        let terms: Vec<f64> = c.iter().zip(weights).map(|(v, w)| v * w).collect();
        out[k] = pairwise_sum(&terms);
    }
    Ok(RhsIntegrals {
        mass: out[0],
        tf: out[1],
        weizsacker: out[2],
        gauge: out[3],
        strain: out[4],
        strain_rhs: out[5],
        width_variation: out[6],
    })
}

fn clip(m: &mut crate::linalg::Mat3, d: usize) {
    for (a, row) in m.iter_mut().enumerate() {
        for (b, e) in row.iter_mut().enumerate() {
            if a >= d || b >= d {
                *e = 0.0;
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KineticBoundLedger {
    pub epsilon: f64,
    /// Realized `int eta(s) s^{2/d} ds`.
    pub tf_factor: f64,
    /// Realized `int t^2 eta'^2 / eta dt`.
    pub weiz_factor: f64,
    pub inv_moment: f64,
    pub spin_states: usize,
    pub mass: f64,
    /// `tf_factor c_TF int rho^{1+2/d}`.
    pub tf_term: f64,
    /// `weiz_factor int |grad sqrt rho|^2`.
    pub weizsacker_term: f64,
    /// `int rho |v|^2`.
    pub gauge_term: f64,
    /// `int rho (delta + d^3 |Dw|^2 / (4 delta))`.
    pub strain_vorticity_term: f64,
    /// `C_d int rho |Dw|`.
    pub strain_constant_form: f64,
    /// Contribution of the width floor, `floor int rho` (pointwise policy).
    pub floor_term: f64,
    /// `int rho d |grad delta|^2 / (8 delta^2)`, nonzero only for a varying width.
    pub width_variation_term: f64,
    pub lhs_analytic: f64,
    pub lhs_fd: f64,
    pub lhs_discrepancy: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Tolerance on the agreement of the two kinetic-energy evaluations.
pub const LHS_AGREEMENT: f64 = 1e-4;

/// Relative rounding allowance in `lhs <= rhs`; for a constant velocity the bound is an equality.
pub const LEDGER_ROUNDING: f64 = 1e-12;

impl KineticBoundLedger {
    pub fn report(&self) -> BoundReport {
        let lhs = self.lhs_analytic.max(self.lhs_fd);
        let mut r = BoundReport::inequality("kinetic-ledger", "constructor-kinetic-bound", lhs, self.rhs, LEDGER_ROUNDING, self.rhs.max(1e-300))
            .with("epsilon", self.epsilon)
            .with("tf_factor", self.tf_factor)
            .with("weiz_factor", self.weiz_factor)
            .with("inv_moment", self.inv_moment)
            .with("tf_term", self.tf_term)
            .with("weizsacker_term", self.weizsacker_term)
            .with("gauge_term", self.gauge_term)
            .with("strain_vorticity_term", self.strain_vorticity_term)
            .with("strain_constant_form", self.strain_constant_form)
            .with("floor_term", self.floor_term)
            .with("width_variation_term", self.width_variation_term)
            .with("lhs_analytic", self.lhs_analytic)
            .with("lhs_fd", self.lhs_fd)
            .with("lhs_discrepancy", self.lhs_discrepancy);
        r.passed = self.pass;
        r
    }
}

/// Kinetic energy of the constructed kernel two ways against the bound's right-hand side.
pub fn kinetic_bound_ledger(gamma: &ConstructedRdm, grid: &GridSpec) -> Result<KineticBoundLedger> {
    let d = gamma.dim;
    let c = gamma.spec.eta.constants(d);
    let ri = rhs_integrals(d, gamma.rho.as_ref(), &gamma.dec, gamma.spec.width, &grid.points(), &grid.weights())?;
    let pts = grid.points();
    let dens: Vec<f64> = pts.iter().map(|&x| gamma.analytic_kinetic_density(x).total()).collect();
    let lhs_analytic = integrate_values(grid, &dens)?;
    let obs = kernel_observables(gamma, grid, FdOptions { kinetic: KineticMode::Trace, ..Default::default() })?;
    let lhs_fd = integrate_values(grid, &obs.tau.values)?;
    let lhs_discrepancy = (lhs_analytic - lhs_fd).abs() / lhs_analytic.abs().max(1e-300);
    let floor_term = match gamma.spec.width {
        WidthPolicy::Pointwise { floor } => floor * ri.mass,
        WidthPolicy::Constant(_) => 0.0,
    };
    let tf_term = c.tf_factor * ri.tf;
    let weizsacker_term = c.weiz_factor * ri.weizsacker;
    let rhs = tf_term + weizsacker_term + ri.gauge + ri.strain_rhs + ri.width_variation;
    let pass = lhs_analytic.max(lhs_fd) <= rhs * (1.0 + LEDGER_ROUNDING) && lhs_discrepancy <= LHS_AGREEMENT;
    Ok(KineticBoundLedger {
        epsilon: gamma.spec.epsilon(),
        tf_factor: c.tf_factor,
        weiz_factor: c.weiz_factor,
        inv_moment: c.inv_moment,
        spin_states: 1,
        mass: ri.mass,
        tf_term,
        weizsacker_term,
        gauge_term: ri.gauge,
        strain_vorticity_term: ri.strain_rhs,
        strain_constant_form: strain_constant(d)? * ri.strain,
        floor_term,
        width_variation_term: ri.width_variation,
        lhs_analytic,
        lhs_fd,
        lhs_discrepancy,
        rhs,
        pass,
    })
}

#[derive(Clone, Debug)]
pub struct UpperFunctional {
    pub value: f64,
    pub argmin_epsilon: f64,
    /// `(epsilon, rhs)` for every tried support width.
    pub per_epsilon: Vec<(f64, f64)>,
    pub gauge_term: f64,
    pub strain_term: f64,
    pub tf_integral: f64,
    pub weizsacker_integral: f64,
}

/// Right-hand side of the kinetic bound minimized over `EPSILON_GRID`; an upper bound on
/// the kinetic functional of `(rho, rho v)`.
pub fn kinetic_upper_functional(
    dim: usize,
    rho: &dyn ScalarFunction,
    dec: &CurrentDecomposition,
    width: WidthPolicy,
    grid: &GridSpec,
) -> Result<UpperFunctional> {
    kinetic_upper_functional_at(dim, rho, dec, width, &grid.points(), &grid.weights())
}

/// Same functional with an explicit quadrature `(points, weights)`.
pub fn kinetic_upper_functional_at(
    dim: usize,
    rho: &dyn ScalarFunction,
    dec: &CurrentDecomposition,
    width: WidthPolicy,
    points: &[crate::Point],
    weights: &[f64],
) -> Result<UpperFunctional> {
    let ri = rhs_integrals(dim, rho, dec, width, points, weights)?;
    for (name, v) in [("mass", ri.mass), ("int rho |v|^2", ri.gauge), ("int rho |Dw|", ri.strain)] {
        if !v.is_finite() {
            return Err(Error::Membership(format!("{name} is not finite")));
        }
    }
    for &x in points.iter() {
        if rho.value(x) < 0.0 {
            return Err(Error::Membership("negative density".into()));
        }
    }
    let mut per = Vec::new();
    for &eps in EPSILON_GRID.iter() {
        let c = EtaProfile::new(1.0, 1.0 + eps)?.constants(dim);
        let v = c.tf_factor * ri.tf + c.weiz_factor * ri.weizsacker + ri.gauge + ri.strain_rhs + ri.width_variation;
        per.push((eps, v));
    }
    let (argmin_epsilon, value) = per.iter().copied().fold((f64::NAN, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc });
    let value = if ri.mass == 0.0 { 0.0 } else { value };
    Ok(UpperFunctional {
        value,
        argmin_epsilon,
        per_epsilon: per,
        gauge_term: ri.gauge,
        strain_term: ri.strain_rhs,
        tf_integral: ri.tf,
        weizsacker_integral: ri.weizsacker,
    })
}
