//! Gaussian momentum-smearing profile `theta(u) = (2 pi delta/d)^{-d/2} exp(-d|u|^2/(2 delta))`.

use std::f64::consts::PI;

use crate::fields::gauss_hermite;
use crate::linalg::dot;
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug)]
pub struct ThetaProfile {
    pub dim: usize,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ThetaMoments {
    pub mass: f64,
    pub mean: Point,
    pub second_moment: f64,
    /// Realized Fisher integral of `|grad theta|^2/(4 theta)`.
    pub fisher: f64,
    /// Upper bound `d^3/(4 delta)` used in the kinetic estimate.
    pub fisher_bound: f64,
}

impl ThetaProfile {
    pub fn new(dim: usize, delta: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::invalid("theta width must be positive"));
        }
        Ok(ThetaProfile { dim, delta })
    }

    /// Per-axis variance `delta/d`.
    pub fn variance(&self) -> f64 {
        self.delta / self.dim as f64
    }

    pub fn value(&self, u: Point) -> f64 {
        let var = self.variance();
        (2.0 * PI * var).powf(-(self.dim as f64) / 2.0) * (-dot(u, u) / (2.0 * var)).exp()
    }

    /// `|grad theta|^2 / (4 theta)` at `u`.
    pub fn fisher_density(&self, u: Point) -> f64 {
        let var = self.variance();
        self.value(u) * dot(u, u) / (4.0 * var * var)
    }

    /// Moments by a tensor Gauss-Hermite rule of a deliberately wider Gaussian,
    /// so the integrals are genuine quadratures rather than identities of the rule.
    pub fn moments(&self, order: usize) -> ThetaMoments {
        let rule = gauss_hermite(order);
        let d = self.dim;
        let s = (1.5 * self.variance()).sqrt();
        let mut mass = 0.0;
        let mut mean = [0.0; 3];
        let mut second = 0.0;
        let mut fisher = 0.0;
        let n = rule.order();
        let total = n.pow(d as u32);
        for flat in 0..total {
            let mut u = [0.0; 3];
            let mut w = 1.0;
            let mut rest = flat;
            for ua in u.iter_mut().take(d) {
                let i = rest % n;
                rest /= n;
                let x = rule.nodes[i];
                // weight density of N(0, s^2) at s x
                let pdf = (-0.5 * x * x).exp() / ((2.0 * PI).sqrt() * s);
                *ua = s * x;
                w *= rule.weights[i] / pdf;
            }
            let th = self.value(u);
            mass += w * th;
            for a in 0..3 {
                mean[a] += w * th * u[a];
            }
            second += w * th * dot(u, u);
            fisher += w * self.fisher_density(u);
        }
        let df = d as f64;
        ThetaMoments { mass, mean, second_moment: second, fisher, fisher_bound: df * df * df / (4.0 * self.delta) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_definition() {
        for d in 1..=3 {
            let p = ThetaProfile::new(d, 0.7).unwrap();
            let m = p.moments(24);
            assert!((m.mass - 1.0).abs() < 1e-10, "d={d} {}", m.mass);
            assert!(m.mean.iter().all(|c| c.abs() < 1e-12));
            assert!((m.second_moment - 0.7).abs() < 1e-10, "d={d} {}", m.second_moment);
            let df = d as f64;
            assert!((m.fisher - df * df / (4.0 * 0.7)).abs() < 1e-9);
            assert!(m.fisher <= m.fisher_bound * (1.0 + 1e-10));
        }
        assert!(ThetaProfile::new(3, 0.0).is_err());
    }
}
