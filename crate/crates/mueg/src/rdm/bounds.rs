//! Pointwise and integrated kinetic inequalities for density-matrix observables.

use super::observables::RdmObservables;
use crate::fields::integrate_values;
use crate::report::BoundReport;
use crate::{Error, Result};

/// Default tolerance of the pointwise margins (relative to the local kinetic density).
pub const POINTWISE_TOL: f64 = 1e-10;
/// Default tolerance of the integrated margin (relative to the kinetic energy).
pub const INTEGRATED_TOL: f64 = 1e-8;

/// Coefficient multiplying `rho |D_a(j/rho)|` in the pointwise bound.
pub fn antisym_coefficient(dim: usize, strict: bool) -> f64 {
    if strict {
        std::f64::consts::SQRT_2
    } else {
        1.0 / (dim as f64).sqrt()
    }
}

/// Pointwise checks over interior points above the density floor:
/// (i) `|grad sqrt rho|^2 + |j|^2/rho + c rho |D_a(j/rho)| <= tau`,
/// (ii) `|j| <= |zeta| <= sqrt(tau rho)`.
pub fn check_pointwise_bounds(obs: &RdmObservables, strict: bool, tol: f64) -> (BoundReport, BoundReport) {
    let g = &obs.grid;
    let c = antisym_coefficient(g.dim, strict);
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    let mut skipped = 0;
    let (mut lhs_max, mut rhs_max) = (0.0f64, 0.0f64);
    for i in 0..g.len() {
        if !g.is_interior(i, 2) {
            continue;
        }
        if !obs.mask[i] {
            skipped += 1;
            continue;
        }
        let r = obs.rho.values[i];
        let tau = obs.tau.values[i];
        let lhs = obs.weizsacker_density(i) + obs.gauge_density(i) + c * r * obs.antisym_velocity_norm(i);
        let scale = tau.abs().max(f64::MIN_POSITIVE);
        m1.push((tau - lhs) / scale);
        lhs_max = lhs_max.max(lhs);
        rhs_max = rhs_max.max(tau);
        let j = obs.jp.values[i];
        let jn = (j[0] * j[0] + j[1] * j[1] + j[2] * j[2]).sqrt();
        let zn = obs.zeta_norm(i);
        let top = (tau.max(0.0) * r).sqrt();
        let s2 = top.max(f64::MIN_POSITIVE);
        m2.push(((zn - jn) / s2).min((top - zn) / s2));
    }
    let tag = if strict { "pointwise-kinetic-strict" } else { "pointwise-kinetic" };
    let r1 = BoundReport::from_margins("pointwise-i", tag, &m1, tol, skipped)
        .with("max_lhs", lhs_max)
        .with("max_tau", rhs_max)
        .with("antisym_coefficient", c);
    let r2 = BoundReport::from_margins("pointwise-ii", "current-chain", &m2, tol, skipped);
    (r1, r2)
}

/// Terms of the integrated bound.
#[derive(Clone, Copy, Debug)]
pub struct IntegratedTerms {
    pub weizsacker: f64,
    pub gauge: f64,
    pub vorticity: f64,
}

pub fn integrated_terms(obs: &RdmObservables) -> Result<IntegratedTerms> {
    let g = &obs.grid;
    if g.dim != 3 {
        return Err(Error::UnsupportedDimension(g.dim));
    }
    let n = g.len();
    let w: Vec<f64> = (0..n).map(|i| obs.weizsacker_density(i)).collect();
    let q: Vec<f64> = (0..n).map(|i| obs.gauge_density(i)).collect();
    let v: Vec<f64> = (0..n)
        .map(|i| {
            if !obs.mask[i] {
                return 0.0;
            }
            let nu = obs.vorticity.as_ref().map(|f| f.values[i]).unwrap_or([0.0; 3]);
            obs.rho.values[i] * (nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]).sqrt()
        })
        .collect();
    Ok(IntegratedTerms {
        weizsacker: integrate_values(g, &w)?,
        gauge: integrate_values(g, &q)?,
        vorticity: integrate_values(g, &v)?,
    })
}

/// `T >= int |grad sqrt rho|^2 + int |j|^2/rho + c int rho |nu|`, c = 1/sqrt(6) or 1 (strict).
pub fn check_integrated_bound(obs: &RdmObservables, kinetic: f64, strict: bool, tol: f64) -> Result<BoundReport> {
    let t = integrated_terms(obs)?;
    let c = if strict { 1.0 } else { 1.0 / 6f64.sqrt() };
    let lhs = t.weizsacker + t.gauge + c * t.vorticity;
    let tag = if strict { "integrated-kinetic-strict" } else { "integrated-kinetic" };
    Ok(BoundReport::inequality("integrated", tag, lhs, kinetic, tol, kinetic)
        .with("weizsacker", t.weizsacker)
        .with("gauge", t.gauge)
        .with("vorticity", t.vorticity)
        .with("vorticity_coefficient", c))
}
