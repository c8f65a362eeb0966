//! Smooth compactly supported weight `eta` on `[a, b]` with unit mass.

use crate::fields::gauss_legendre;
use crate::{Error, Result};

/// Order of the reference rule used to normalize the bump and its moments.
pub const REFERENCE_ORDER: usize = 200;

/// `eta(t) = c exp(-1/(1 - s^2))` with `s` the affine image of `t` in (-1, 1).
#[derive(Clone, Copy, Debug)]
pub struct EtaProfile {
    pub a: f64,
    pub b: f64,
    norm: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct EtaConstants {
    pub mass: f64,
    /// Integral of eta(t)/t; at most 1 for admissible profiles.
    pub inv_moment: f64,
    /// Integral of eta(s) s^{2/d}.
    pub tf_factor: f64,
    /// Integral of t^2 eta'(t)^2 / eta(t).
    pub weiz_factor: f64,
    /// Integral of t eta'(t); equals minus the mass after integration by parts.
    pub t_eta_prime: f64,
}

impl EtaProfile {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !(b > a) || !b.is_finite() {
            return Err(Error::invalid(format!("eta support [{a}, {b}] must satisfy 0 < a < b")));
        }
        let mut p = EtaProfile { a, b, norm: 1.0 };
        let rule = gauss_legendre(REFERENCE_ORDER).on_interval(a, b);
        let mass = rule.integrate(|t| p.value(t));
        p.norm = 1.0 / mass;
        let inv = rule.integrate(|t| p.value(t) / t);
        if inv > 1.0 {
            return Err(Error::invalid(format!("eta profile inadmissible: integral of eta/t = {inv} > 1")));
        }
        Ok(p)
    }

    /// Default profile supported on [1, 2].
    pub fn standard() -> Self {
        Self::new(1.0, 2.0).expect("default profile is admissible")
    }

    fn s_of(&self, t: f64) -> f64 {
        (2.0 * t - self.a - self.b) / (self.b - self.a)
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = self.s_of(t);
        if s.abs() >= 1.0 {
            0.0
        } else {
            self.norm * (-1.0 / (1.0 - s * s)).exp()
        }
    }

    /// Logarithmic derivative `eta'/eta` inside the support.
    pub fn log_derivative(&self, t: f64) -> f64 {
        let s = self.s_of(t);
        let q = 1.0 - s * s;
        -2.0 * s / (q * q) * 2.0 / (self.b - self.a)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let v = self.value(t);
        if v == 0.0 {
            0.0
        } else {
            v * self.log_derivative(t)
        }
    }

    pub fn constants(&self, dim: usize) -> EtaConstants {
        let rule = gauss_legendre(REFERENCE_ORDER).on_interval(self.a, self.b);
        let p = 2.0 / dim as f64;
        let weiz = rule.integrate(|t| {
            let v = self.value(t);
            if v == 0.0 {
                0.0
            } else {
                let l = self.log_derivative(t);
                t * t * v * l * l
            }
        });
        EtaConstants {
            mass: rule.integrate(|t| self.value(t)),
            inv_moment: rule.integrate(|t| self.value(t) / t),
            tf_factor: rule.integrate(|t| self.value(t) * t.powf(p)),
            weiz_factor: weiz,
            t_eta_prime: rule.integrate(|t| t * self.derivative(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_profile_constants() {
        let e = EtaProfile::standard();
        let c = e.constants(3);
        assert!((c.mass - 1.0).abs() < 1e-10);
        assert!(c.inv_moment > 0.5 && c.inv_moment < 1.0);
        assert!(c.tf_factor > 1.0 && c.tf_factor < 2f64.powf(2.0 / 3.0));
        assert!(c.weiz_factor.is_finite() && c.weiz_factor > 0.0);
        assert!((c.t_eta_prime + c.mass).abs() < 1e-10);
    }

    #[test]
    fn rejects_supports_below_one() {
        assert!(EtaProfile::new(0.3, 0.6).is_err());
        assert!(EtaProfile::new(2.0, 1.0).is_err());
    }
}
