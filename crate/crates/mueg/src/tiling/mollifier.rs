//! Radial bump mollifier and the primitives used by the smeared indicator.

use std::f64::consts::PI;

use crate::fields::gauss_legendre;
use crate::{Error, Result};

const TABLE_INTERVALS: usize = 4096;

/// Radial profile `c exp(-1/(1-s^2))` on the unit ball, unit mass in three
/// dimensions, together with tables of
/// `psi(s) = int_0^s eta r^2`, `lambda(s) = int_0^s psi/r^2`, `e(s) = int_0^s eta r`.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    norm: f64,
    psi: Vec<f64>,
    lambda: Vec<f64>,
    e: Vec<f64>,
}

fn raw_bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

impl RadialProfile {
    pub fn new() -> Self {
        let n = TABLE_INTERVALS;
        let h = 1.0 / n as f64;
        let rule = gauss_legendre(10);
        let mut psi = vec![0.0; n + 1];
        let mut e = vec![0.0; n + 1];
        for i in 0..n {
            let r = rule.on_interval(i as f64 * h, (i + 1) as f64 * h);
            psi[i + 1] = psi[i] + r.integrate(|s| raw_bump(s) * s * s);
            e[i + 1] = e[i] + r.integrate(|s| raw_bump(s) * s);
        }
        let norm = 1.0 / (4.0 * PI * psi[n]);
        for v in psi.iter_mut().chain(e.iter_mut()) {
            *v *= norm;
        }
        let mut p = RadialProfile { norm, psi, lambda: vec![0.0; n + 1], e };
        // lambda integrates the interpolated psi, whose ratio psi/s^2 is regular at 0
        let mut lambda = vec![0.0; n + 1];
        for i in 0..n {
            let r = rule.on_interval(i as f64 * h, (i + 1) as f64 * h);
            lambda[i + 1] = lambda[i] + r.integrate(|s| p.psi(s) / (s * s));
        }
        p.lambda = lambda;
        p
    }

    pub fn eta(&self, s: f64) -> f64 {
        self.norm * raw_bump(s)
    }

    /// Total `psi(1) = 1/(4 pi)`.
    pub fn psi_total(&self) -> f64 {
        1.0 / (4.0 * PI)
    }

    fn hermite(table: &[f64], s: f64, deriv: impl Fn(f64) -> f64) -> f64 {
        let n = table.len() - 1;
        let x = s * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let h = 1.0 / n as f64;
        let t = x - i as f64;
        let (s0, s1) = (i as f64 * h, (i + 1) as f64 * h);
        let (y0, y1) = (table[i], table[i + 1]);
        let (d0, d1) = (deriv(s0) * h, deriv(s1) * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
    }

    pub fn psi(&self, s: f64) -> f64 {
        if s >= 1.0 {
            return self.psi_total();
        }
        Self::hermite(&self.psi, s.max(0.0), |r| self.eta(r) * r * r)
    }

    pub fn lambda(&self, s: f64) -> f64 {
        let n = self.lambda.len() - 1;
        if s >= 1.0 {
            return self.lambda[n] + self.psi_total() * (1.0 - 1.0 / s);
        }
        Self::hermite(&self.lambda, s.max(0.0), |r| if r > 0.0 { self.psi(r) / (r * r) } else { 0.0 })
    }

    pub fn lambda_at_one(&self) -> f64 {
        self.lambda[self.lambda.len() - 1]
    }

    pub fn e(&self, s: f64) -> f64 {
        let n = self.e.len() - 1;
        if s >= 1.0 {
            return self.e[n];
        }
        Self::hermite(&self.e, s.max(0.0), |r| self.eta(r) * r)
    }
}

impl Default for RadialProfile {
    fn default() -> Self {
        Self::new()
    }
}

/// Mollifier `radius^{-3} eta(x / radius)` supported in the closed ball of that radius.
#[derive(Clone, Debug)]
pub struct Mollifier {
    pub delta: f64,
    pub radius: f64,
    pub profile: std::sync::Arc<RadialProfile>,
}

impl Mollifier {
    fn with_radius(delta: f64, radius: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::invalid("mollifier width must be positive"));
        }
        Ok(Mollifier { delta, radius, profile: std::sync::Arc::new(RadialProfile::new()) })
    }

    /// Tiling scaling `(10/delta)^3 eta(10 x/delta)`, support radius `delta/10`.
    pub fn tiling(delta: f64) -> Result<Self> {
        Self::with_radius(delta, delta / 10.0)
    }

    /// Plain scaling `delta^{-3} eta(x/delta)`, support radius `delta`.
    pub fn ueg(delta: f64) -> Result<Self> {
        Self::with_radius(delta, delta)
    }

    /// Same profile, different width; reuses the tables.
    pub fn rescaled(&self, factor: f64) -> Mollifier {
        Mollifier { delta: self.delta * factor, radius: self.radius * factor, profile: self.profile.clone() }
    }

    pub fn value(&self, x: crate::Point) -> f64 {
        let r = crate::linalg::norm(x) / self.radius;
        self.profile.eta(r) / self.radius.powi(3)
    }

    /// `int eta_r(s) |s|^2 ds`.
    pub fn second_moment(&self) -> f64 {
        let rule = gauss_legendre(64);
        let p = &self.profile;
        4.0 * PI * self.radius * self.radius * rule.on_interval(0.0, 1.0).integrate(|s| p.eta(s) * s.powi(4))
    }

    /// Radial-angular product rule for `int eta_r(s) f(s) ds` with the
    /// weights renormalized to unit mass. Returns (nodes, weights, raw mass).
    pub fn ball_rule(&self, radial: usize, polar: usize, azimuthal: usize) -> (Vec<crate::Point>, Vec<f64>, f64) {
        let rr = gauss_legendre(radial).on_interval(0.0, 1.0);
        let rc = gauss_legendre(polar);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (&s, &ws) in rr.nodes.iter().zip(&rr.weights) {
            let radial_w = ws * self.profile.eta(s) * s * s;
            for (&c, &wc) in rc.nodes.iter().zip(&rc.weights) {
                let st = (1.0 - c * c).sqrt();
                for k in 0..azimuthal {
                    let phi = 2.0 * PI * (k as f64 + 0.5) / azimuthal as f64;
                    let dir = [st * phi.cos(), st * phi.sin(), c];
                    nodes.push([dir[0] * s * self.radius, dir[1] * s * self.radius, dir[2] * s * self.radius]);
                    weights.push(radial_w * wc * 2.0 * PI / azimuthal as f64);
                }
            }
        }
        let mass: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= mass;
        }
        (nodes, weights, mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_match_direct_integration() {
        let p = RadialProfile::new();
        let rule = gauss_legendre(200);
        for &s in &[0.1, 0.37, 0.5, 0.8, 0.93, 0.999] {
            let r = rule.on_interval(0.0, s);
            let psi = r.integrate(|x| p.eta(x) * x * x);
            let e = r.integrate(|x| p.eta(x) * x);
            assert!((p.psi(s) - psi).abs() < 1e-13, "s={s}");
            assert!((p.e(s) - e).abs() < 1e-13, "s={s}");
        }
        assert!((p.psi(1.0 - 1e-9) - p.psi_total()).abs() < 1e-13);
        // lambda(s) = int_0^s psi/r^2 by a nested rule
        let s = 0.7;
        let lam = rule.on_interval(0.0, s).integrate(|x| rule.on_interval(0.0, x).integrate(|y| p.eta(y) * y * y) / (x * x));
        assert!((p.lambda(s) - lam).abs() < 1e-12);
    }

    #[test]
    fn mollifier_mass_and_support() {
        let m = Mollifier::tiling(0.5).unwrap();
        assert!((m.radius - 0.05).abs() < 1e-16);
        assert_eq!(m.value([0.05, 0.0, 0.0]), 0.0);
        let (nodes, w, mass) = m.ball_rule(40, 20, 20);
        assert!((mass - 1.0).abs() < 1e-10, "{mass}");
        let bary = nodes.iter().zip(&w).fold([0.0; 3], |a, (x, w)| [a[0] + w * x[0], a[1] + w * x[1], a[2] + w * x[2]]);
        assert!(bary.iter().all(|c| c.abs() < 1e-16));
        assert!(Mollifier::ueg(0.0).is_err());
    }
}
