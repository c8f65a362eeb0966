use std::f64::consts::PI;

use crate::{Error, Result};

fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Volume of the unit ball in dimension `d`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    check_dim(d)?;
    Ok([2.0, PI, 4.0 * PI / 3.0][d - 1])
}

/// Thomas-Fermi constant `d/(d+2) * 4 pi^2 / |B_1|^{2/d}`.
pub fn thomas_fermi_constant(d: usize) -> Result<f64> {
    let b = unit_ball_volume(d)?;
    let df = d as f64;
    Ok(df / (df + 2.0) * 4.0 * PI * PI / b.powf(2.0 / df))
}

/// Fermi momentum of the free gas at density `t` (one spin state).
pub fn fermi_radius(d: usize, t: f64) -> Result<f64> {
    let b = unit_ball_volume(d)?;
    if !(t >= 0.0) {
        return Err(Error::invalid("density must be nonnegative"));
    }
    Ok(2.0 * PI * (t / b).powf(1.0 / d as f64))
}

/// Prefactor `1 + d^3/4` of the strain/vorticity term in the kinetic bound.
pub fn strain_constant(d: usize) -> Result<f64> {
    check_dim(d)?;
    Ok(1.0 + (d * d * d) as f64 / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tf_constant_values() {
        let c3 = thomas_fermi_constant(3).unwrap();
        assert!((c3 - 0.6 * (6.0 * PI * PI).powf(2.0 / 3.0)).abs() < 1e-12 * c3);
        assert!((c3 - 9.1156).abs() < 1e-4);
        assert!((thomas_fermi_constant(1).unwrap() - PI * PI / 3.0).abs() < 1e-14);
        assert!((thomas_fermi_constant(2).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!(thomas_fermi_constant(4).is_err());
        assert_eq!(strain_constant(3).unwrap(), 7.75);
    }

    #[test]
    fn fermi_radius_matches_tf_relation() {
        for d in 1..=3 {
            let t = 0.37;
            let k = fermi_radius(d, t).unwrap();
            let df = d as f64;
            let rhs = (df + 2.0) / df * thomas_fermi_constant(d).unwrap() * t.powf(2.0 / df);
            assert!((k * k - rhs).abs() < 1e-12 * rhs);
        }
    }
}
