//! Uniform-gas trial pairs `(1_Omega * eta_delta)(rho0, rho0 nu0 x x / 2)` and their
//! surrogate energies per volume.
//!
//! Every energy here is an upper bound obtained from the explicit constructor,
//! never the exact constrained-search functional.

use std::sync::Arc;

use rayon::prelude::*;

use crate::constructor::{
    kinetic_upper_functional_at, ConstructedRdm, ConstructorSpec, CurrentDecomposition, WidthPolicy,
    DEFAULT_DELTA_FLOOR,
};
use crate::fields::{curl, pairwise_sum, GridSpec, ScalarField, VectorField};
use crate::kernels::{strain_constant, thomas_fermi_constant, EtaProfile};
use crate::linalg::{add, cross, det, dot, frobenius, mat_t_vec, mat_vec, norm, norm2, scale, sub, transpose, Mat3};
use crate::rdm::{coulomb_exchange_kernel, LinearVector, ScalarFunction, VectorFunction};
use crate::report::BoundReport;
use crate::tiling::{Mollifier, Polyhedron, SmearedIndicator, TetraDecomposition};
use crate::{Error, Point, Result};

/// Largest grid edge for which the exchange refinement is attempted.
pub const EXCHANGE_MAX_POINTS_PER_AXIS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// `ell Delta` with the reference tetrahedron of the tiling.
    Tetra { ell: f64 },
    /// Centred box with the given half-widths.
    Box { half: Point },
}

impl Domain {
    pub fn polyhedron(&self) -> Result<Polyhedron> {
        match *self {
            Domain::Tetra { ell } => {
                if !(ell > 0.0) {
                    return Err(Error::invalid("tetrahedron scale must be positive"));
                }
                Ok(TetraDecomposition::build().reference_polyhedron().scaled(ell, [0.0; 3]))
            }
            Domain::Box { half } => Polyhedron::cuboid(scale(half, -1.0), half),
        }
    }

    /// Same shape dilated by `factor`.
    pub fn scaled(&self, factor: f64) -> Domain {
        match *self {
            Domain::Tetra { ell } => Domain::Tetra { ell: ell * factor },
            Domain::Box { half } => Domain::Box { half: scale(half, factor) },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::Tetra { .. } => "tetra",
            Domain::Box { .. } => "box",
        }
    }
}

/// Mollifier width as a function of the scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaPolicy {
    Fixed(f64),
    /// `delta = ell^{-1/3} rho0^{-4/9}`.
    Thermodynamic,
}

impl DeltaPolicy {
    pub fn delta(&self, ell: f64, rho0: f64) -> Result<f64> {
        let d = match *self {
            DeltaPolicy::Fixed(d) => d,
            DeltaPolicy::Thermodynamic => ell.powf(-1.0 / 3.0) * rho0.powf(-4.0 / 9.0),
        };
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::invalid(format!("mollifier width {d} from policy {self:?}")));
        }
        Ok(d)
    }
}

/// `rho0 S(R x + a)` with `S` the smeared indicator.
#[derive(Clone)]
pub struct TrialDensity {
    pub rho0: f64,
    pub indicator: Arc<SmearedIndicator>,
    pub rotation: Mat3,
    pub offset: Point,
}

impl TrialDensity {
    fn body(&self, x: Point) -> Point {
        add(mat_vec(&self.rotation, x), self.offset)
    }
}

impl ScalarFunction for TrialDensity {
    fn value(&self, x: Point) -> f64 {
        self.rho0 * self.indicator.value(self.body(x))
    }

    fn gradient(&self, x: Point) -> Point {
        scale(mat_t_vec(&self.rotation, self.indicator.gradient(self.body(x))), self.rho0)
    }

    fn hessian(&self, x: Point) -> Mat3 {
        let h = 1e-4 * self.indicator.mollifier.radius;
        let mut m = [[0.0; 3]; 3];
        for b in 0..3 {
            let (mut xp, mut xm) = (x, x);
            xp[b] += h;
            xm[b] -= h;
            let (gp, gm) = (self.gradient(xp), self.gradient(xm));
            for a in 0..3 {
                m[a][b] = (gp[a] - gm[a]) / (2.0 * h);
            }
        }
        for a in 0..3 {
            for b in 0..a {
                let s = 0.5 * (m[a][b] + m[b][a]);
                m[a][b] = s;
                m[b][a] = s;
            }
        }
        m
    }
}

#[derive(Clone)]
pub struct UegTrial {
    pub rho0: f64,
    pub nu0: Point,
    pub domain: Domain,
    pub delta: f64,
    pub polyhedron: Polyhedron,
    pub indicator: Arc<SmearedIndicator>,
}

/// Invariant residuals of a sampled trial.
#[derive(Clone, Copy, Debug)]
pub struct TrialInvariants {
    /// Max `|curl(j/rho) - nu0|` over points whose stencil sees `rho > floor`.
    pub vorticity_error: f64,
    pub vorticity_points: usize,
    /// `| |Dw|_F - |nu0|/sqrt 2 |`.
    pub strain_norm_error: f64,
    /// Largest entry of the symmetric part of `Dw`.
    pub symmetric_part: f64,
}

pub fn build_trial(rho0: f64, nu0: Point, domain: Domain, delta: f64, mollifier: Option<Mollifier>) -> Result<UegTrial> {
    if !(rho0 >= 0.0) || !rho0.is_finite() || nu0.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("trial needs finite rho0 >= 0 and finite nu0"));
    }
    let polyhedron = domain.polyhedron()?;
    let m = match mollifier {
        Some(m) => m,
        None => Mollifier::ueg(delta)?,
    };
    let (lo, hi) = polyhedron.bounding_box();
    let diam = norm(sub(hi, lo));
    if m.radius > 0.5 * diam {
        return Err(Error::invalid(format!("mollifier radius {} too large for domain of diameter {diam}", m.radius)));
    }
    let indicator = Arc::new(SmearedIndicator::new(&polyhedron, &m)?);
    Ok(UegTrial { rho0, nu0, domain, delta: m.delta, polyhedron, indicator })
}

impl UegTrial {
    pub fn volume(&self) -> f64 {
        self.polyhedron.volume()
    }

    pub fn density(&self) -> TrialDensity {
        self.transformed_density(crate::linalg::IDENTITY, [0.0; 3])
    }

    /// Density `rho0 S(R x + a)`.
    pub fn transformed_density(&self, rotation: Mat3, offset: Point) -> TrialDensity {
        TrialDensity { rho0: self.rho0, indicator: self.indicator.clone(), rotation, offset }
    }

    pub fn velocity(&self) -> LinearVector {
        LinearVector::symmetric_gauge(self.nu0)
    }

    pub fn decomposition(&self) -> CurrentDecomposition {
        CurrentDecomposition::new(None, Arc::new(self.velocity()))
    }

    /// Cube grid centred at the origin that covers the support with one spacing to spare.
    pub fn support_grid(&self, n: usize) -> Result<GridSpec> {
        if n < 6 {
            return Err(Error::GridTooSmall(format!("{n} points per axis")));
        }
        let (lo, hi) = self.polyhedron.bounding_box();
        let ext = lo.iter().chain(hi.iter()).fold(0.0f64, |a, v| a.max(v.abs())) + self.indicator.mollifier.radius;
        let l = ext * (n as f64 - 1.0) / (n as f64 - 3.0);
        GridSpec::cube(3, -l, l, n)
    }

    pub fn sample(&self, grid: &GridSpec) -> (ScalarField<f64>, VectorField<f64>) {
        let s = self.indicator.sample(grid);
        let rho = s.map(|v| self.rho0 * v);
        let w = self.velocity();
        let pts = grid.points();
        let j = pts.iter().zip(&rho.values).map(|(&x, &r)| scale(w.value(x), r)).collect();
        (rho, VectorField { grid: grid.clone(), values: j })
    }

    pub fn invariants(&self, grid: &GridSpec, floor: f64) -> Result<TrialInvariants> {
        let (rho, j) = self.sample(grid);
        let ok: Vec<bool> = rho.values.iter().map(|&r| r > floor).collect();
        let v: Vec<Point> = j.values.iter().zip(&rho.values).zip(&ok).map(|((j, &r), &ok)| if ok { scale(*j, 1.0 / r) } else { [0.0; 3] }).collect();
        let c = curl(&VectorField { grid: grid.clone(), values: v })?;
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for idx in 0..grid.len() {
            if !grid.is_interior(idx, 2) {
                continue;
            }
            let [i, jj, k] = grid.coords(idx);
            let mut all = true;
            'stencil: for a in 0..3 {
                for s in -2i64..=2 {
                    let mut q = [i as i64, jj as i64, k as i64];
                    q[a] += s;
                    if !ok[grid.index(q[0] as usize, q[1] as usize, q[2] as usize)] {
                        all = false;
                        break 'stencil;
                    }
                }
            }
            if all {
                count += 1;
                worst = worst.max(norm(sub(c.values[idx], self.nu0)));
            }
        }
        let dw = self.velocity().jacobian([0.0; 3]);
        let mut sym: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                sym = sym.max((dw[a][b] + dw[b][a]).abs() / 2.0);
            }
        }
        Ok(TrialInvariants {
            vorticity_error: worst,
            vorticity_points: count,
            strain_norm_error: (frobenius(&dw) - norm(self.nu0) / 2f64.sqrt()).abs(),
            symmetric_part: sym,
        })
    }

    /// `int (1_Omega * eta) x dx` by Fubini: polyhedron moment plus `|Omega| int s eta(s) ds`.
    pub fn smeared_first_moment(&self) -> Point {
        let (nodes, w, _) = self.indicator.mollifier.ball_rule(16, 16, 16);
        let m1 = nodes.iter().zip(&w).fold([0.0; 3], |a, (s, w)| add(a, scale(*s, *w)));
        add(self.polyhedron.first_moment(), scale(m1, self.volume()))
    }

    /// `(rho0/|Omega|) int (1_Omega * eta) |nu0 x x / 2|^2` in closed form.
    pub fn gauge_correction_per_volume(&self) -> f64 {
        let s = self.polyhedron.second_moment();
        let n2 = norm2(self.nu0);
        let tr = s[0][0] + s[1][1] + s[2][2];
        let nsn = dot(self.nu0, mat_vec(&s, self.nu0));
        let body = 0.25 * (n2 * tr - nsn);
        let smear = 0.25 * n2 * (2.0 / 3.0) * self.indicator.mollifier.second_moment();
        self.rho0 * (body / self.volume() + smear)
    }

    /// Same quantity by grid quadrature.
    pub fn gauge_correction_grid(&self, grid: &GridSpec) -> Result<f64> {
        let (rho, j) = self.sample(grid);
        let w = grid.weights();
        let terms: Vec<f64> = rho
            .values
            .iter()
            .zip(&j.values)
            .zip(&w)
            .map(|((&r, j), w)| if r > 0.0 { w * norm2(*j) / r } else { 0.0 })
            .collect();
        Ok(pairwise_sum(&terms) / self.volume())
    }
}

#[derive(Clone, Debug)]
pub struct GaugeScan {
    pub rows: Vec<(f64, f64)>,
    /// Least-squares slope of log(value) against log(ell); `None` when nu0 = 0.
    pub exponent: Option<f64>,
    pub constant: Option<f64>,
}

fn loglog_fit(rows: &[(f64, f64)]) -> (f64, f64) {
    let n = rows.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in rows {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept.exp())
}

/// Gauge correction per volume for the dilates `ell Omega`, with a log-log fit.
pub fn gauge_term_scan(rho0: f64, nu0: Point, unit: Domain, policy: DeltaPolicy, scales: &[f64]) -> Result<GaugeScan> {
    if scales.len() < 4 {
        return Err(Error::invalid("gauge scan needs at least four scales"));
    }
    let mut sorted = scales.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    if sorted.iter().any(|s| !(*s > 0.0)) || sorted.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Degenerate("scales must be positive and distinct".into()));
    }
    let rows = scales
        .iter()
        .map(|&ell| {
            let t = build_trial(rho0, nu0, unit.scaled(ell), policy.delta(ell, rho0)?, None)?;
            Ok((ell, t.gauge_correction_per_volume()))
        })
        .collect::<Result<Vec<_>>>()?;
    if norm(nu0) == 0.0 || rho0 == 0.0 {
        return Ok(GaugeScan { rows, exponent: None, constant: None });
    }
    let (slope, c) = loglog_fit(&rows);
    Ok(GaugeScan { rows, exponent: Some(slope), constant: Some(c) })
}

/// Surrogate kinetic energy per volume with its term ledger.
#[derive(Clone, Debug)]
pub struct EnergyPerVolumeReport {
    pub domain: &'static str,
    pub volume: f64,
    pub delta: f64,
    pub mass_per_volume: f64,
    /// Constructor upper bound on the kinetic functional, per volume.
    pub kinetic: f64,
    pub argmin_epsilon: f64,
    pub tf: f64,
    /// Thomas-Fermi term with its profile factor; at most `tf_bound`.
    pub tf_bound: f64,
    pub weizsacker: f64,
    pub gauge: f64,
    pub strain: f64,
    /// Strain term divided by the mass; equals `C_3 |nu0| / sqrt 2`.
    pub strain_per_mass: f64,
    pub gauge_correction: f64,
    /// `kinetic - gauge_correction`.
    pub corrected: f64,
    pub exchange: Option<f64>,
    pub surrogate: bool,
}

impl EnergyPerVolumeReport {
    pub const TSV_HEADER: &'static str =
        "domain\tvolume\tdelta\tmass\tkinetic\teps\ttf\ttf_bound\tweizsacker\tgauge\tstrain\tgauge_correction\tcorrected\texchange\tsurrogate";

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{:.10e}\t{:.10e}\t{:.10e}\t{:.10e}\t{}\t{:.10e}\t{:.10e}\t{:.10e}\t{:.10e}\t{:.10e}\t{:.10e}\t{:.10e}\t{}\t{}",
            self.domain,
            self.volume,
            self.delta,
            self.mass_per_volume,
            self.kinetic,
            self.argmin_epsilon,
            self.tf,
            self.tf_bound,
            self.weizsacker,
            self.gauge,
            self.strain,
            self.gauge_correction,
            self.corrected,
            self.exchange.map(|e| format!("{e:.10e}")).unwrap_or_else(|| "nan".into()),
            self.surrogate
        )
    }
}

fn width_policy() -> WidthPolicy {
    WidthPolicy::Pointwise { floor: DEFAULT_DELTA_FLOOR }
}

pub fn surrogate_energies(trial: &UegTrial, grid: &GridSpec) -> Result<EnergyPerVolumeReport> {
    let rho = trial.density();
    let dec = trial.decomposition();
    let pts = grid.points();
    let w = grid.weights();
    let up = kinetic_upper_functional_at(3, &rho, &dec, width_policy(), &pts, &w)?;
    let vol = trial.volume();
    let s = trial.indicator.sample(grid);
    let mass_terms: Vec<f64> = s.values.iter().zip(&w).map(|(v, w)| trial.rho0 * v * w).collect();
    let mass = pairwise_sum(&mass_terms);
    let eps = if up.argmin_epsilon.is_finite() { up.argmin_epsilon } else { crate::constructor::EPSILON_GRID[0] };
    let c = EtaProfile::new(1.0, 1.0 + eps)?.constants(3);
    let ctf = thomas_fermi_constant(3)?;
    let gc = trial.gauge_correction_per_volume();
    let kinetic = up.value / vol;
    Ok(EnergyPerVolumeReport {
        domain: trial.domain.name(),
        volume: vol,
        delta: trial.delta,
        mass_per_volume: mass / vol,
        kinetic,
        argmin_epsilon: eps,
        tf: c.tf_factor * up.tf_integral / vol,
        tf_bound: c.tf_factor * ctf * trial.rho0.powf(5.0 / 3.0),
        weizsacker: c.weiz_factor * up.weizsacker_integral / vol,
        gauge: up.gauge_term / vol,
        strain: up.strain_term / vol,
        strain_per_mass: if mass > 0.0 { up.strain_term / mass } else { 0.0 },
        gauge_correction: gc,
        corrected: kinetic - gc,
        exchange: None,
        surrogate: true,
    })
}

/// Exchange energy per volume of the constructor state on a small grid.
pub fn exchange_refinement(trial: &UegTrial, grid: &GridSpec) -> Result<f64> {
    if grid.counts.iter().take(3).any(|&n| n > EXCHANGE_MAX_POINTS_PER_AXIS) {
        return Err(Error::invalid(format!("exchange refinement limited to {EXCHANGE_MAX_POINTS_PER_AXIS} points per axis")));
    }
    if trial.rho0 == 0.0 {
        return Ok(0.0);
    }
    let gamma = ConstructedRdm::build(3, Arc::new(trial.density()), trial.decomposition(), ConstructorSpec::default(), grid)?;
    Ok(coulomb_exchange_kernel(&gamma, grid)? / trial.volume())
}

#[derive(Clone, Debug)]
pub struct IsometryDetails {
    pub lab: f64,
    pub body: f64,
    pub offset: f64,
    pub mass: f64,
    /// `int x (1_Omega * eta)` by Fubini.
    pub first_moment: Point,
    /// Same moment by grid quadrature on the symmetric body grid.
    pub grid_first_moment: Point,
    pub barycentre: BoundReport,
}

/// Surrogate of the trial seen through `x -> R x + a` versus the body-frame
/// trial with vorticity `R nu0`; the difference must equal
/// `(rho0/4) |R nu0 x a|^2 int (1_Omega * eta)`.
pub fn isometry_identity_check(trial: &UegTrial, r: Mat3, a: Point, grid: &GridSpec, tol: f64) -> Result<(BoundReport, IsometryDetails)> {
    let rt = transpose(&r);
    let orth = crate::linalg::mat_mul(&rt, &r);
    for p in 0..3 {
        for q in 0..3 {
            let id = if p == q { 1.0 } else { 0.0 };
            if (orth[p][q] - id).abs() > 1e-12 {
                return Err(Error::invalid("isometry matrix is not orthogonal"));
            }
        }
    }
    let (lo, hi) = trial.polyhedron.bounding_box();
    let diam = norm(sub(hi, lo));
    let vol = trial.volume();
    let bc = trial.polyhedron.barycenter();
    if norm(bc) > 1e-12 * diam {
        return Err(Error::Membership(format!("domain barycentre {bc:?} is not at the origin")));
    }
    let body_pts = grid.points();
    let w = grid.weights();
    let lab_pts: Vec<Point> = body_pts.iter().map(|&y| mat_vec(&rt, sub(y, a))).collect();
    let lab_rho = trial.transformed_density(r, a);
    let lab_dec = trial.decomposition();
    let lab = kinetic_upper_functional_at(3, &lab_rho, &lab_dec, width_policy(), &lab_pts, &w)?.value;
    let nu_body = scale(mat_vec(&r, trial.nu0), det(&r).signum());
    let body_trial = UegTrial { nu0: nu_body, ..trial.clone() };
    let body = kinetic_upper_functional_at(3, &body_trial.density(), &body_trial.decomposition(), width_policy(), &body_pts, &w)?.value;
    let s = trial.indicator.sample(grid);
    let mass = pairwise_sum(&s.values.iter().zip(&w).map(|(v, w)| v * w).collect::<Vec<_>>());
    let offset = 0.25 * trial.rho0 * norm2(cross(mat_vec(&r, trial.nu0), a)) * mass;
    let report = BoundReport::identity("isometry-offset", "translation-offset", lab - body, offset, tol, lab.abs().max(f64::MIN_POSITIVE))
        .with("lab", lab)
        .with("body", body)
        .with("mass", mass);
    let first_moment = trial.smeared_first_moment();
    let gm: Vec<Point> = body_pts.iter().zip(&s.values).zip(&w).map(|((y, v), w)| scale(*y, v * w)).collect();
    let grid_first_moment = [0, 1, 2].map(|k| pairwise_sum(&gm.iter().map(|p| p[k]).collect::<Vec<_>>()));
    let barycentre = BoundReport::identity("barycentre", "smeared-barycentre", norm(first_moment), 0.0, 1e-8, vol * diam)
        .with("grid_moment", norm(grid_first_moment) / (vol * diam));
    Ok((report, IsometryDetails { lab, body, offset, mass, first_moment, grid_first_moment, barycentre }))
}

/// Symmetric-gauge facts for `w = nu0 x x / 2`: FD curl error at random points,
/// `| |Dw| - |nu0|/sqrt 2 |`, and the symmetric part of `Dw`.
pub fn symmetric_gauge_residuals(nu0: Point, points: &[Point], h: f64) -> (f64, f64, f64) {
    let w = LinearVector::symmetric_gauge(nu0);
    let curl_err = points
        .par_iter()
        .map(|&x| {
            let mut j = [[0.0; 3]; 3];
            for b in 0..3 {
                let (mut xp, mut xm) = (x, x);
                xp[b] += h;
                xm[b] -= h;
                let (vp, vm) = (w.value(xp), w.value(xm));
                for a in 0..3 {
                    j[a][b] = (vp[a] - vm[a]) / (2.0 * h);
                }
            }
            let c = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
            norm(sub(c, nu0))
        })
        .reduce(|| 0.0, f64::max);
    let dw = w.jacobian([0.0; 3]);
    let mut sym: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            sym = sym.max((dw[a][b] + dw[b][a]).abs());
        }
    }
    (curl_err, (frobenius(&dw) - norm(nu0) / 2f64.sqrt()).abs(), sym)
}

/// Strain constant times `|nu0|/sqrt 2`, the expected strain term per unit mass.
pub fn expected_strain_per_mass(nu0: Point) -> f64 {
    strain_constant(3).unwrap_or(f64::NAN) * norm(nu0) / 2f64.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_trial_is_zero() {
        let t = build_trial(0.0, [0.0, 0.0, 1.0], Domain::Box { half: [1.0; 3] }, 0.3, None).unwrap();
        let g = t.support_grid(16).unwrap();
        let r = surrogate_energies(&t, &g).unwrap();
        assert_eq!(r.kinetic, 0.0);
        assert_eq!(r.gauge_correction, 0.0);
        assert!(r.surrogate);
    }

    #[test]
    fn gauge_correction_closed_form_matches_grid() {
        let t = build_trial(1.3, [0.2, -0.4, 1.0], Domain::Tetra { ell: 3.0 }, 0.5, None).unwrap();
        let g = t.support_grid(64).unwrap();
        let a = t.gauge_correction_per_volume();
        let b = t.gauge_correction_grid(&g).unwrap();
        assert!((a - b).abs() < 1e-5 * a, "{a} {b}");
    }

    #[test]
    fn rejects_oversized_mollifier() {
        assert!(build_trial(1.0, [0.0; 3], Domain::Tetra { ell: 1.0 }, 2.0, None).is_err());
    }
}
