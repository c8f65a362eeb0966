//! One-dimensional Gauss rules and compensated summation.

use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Affinely map a rule on [-1, 1] to [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> GaussRule {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        GaussRule {
            nodes: self.nodes.iter().map(|x| c + h * x).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss-Legendre rule of order `n` on [-1, 1].
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1, "order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

/// Gauss-Hermite rule for the standard normal weight: sum of weights is 1 and
/// `sum w f(x)` approximates `E[f(X)]` for `X ~ N(0, 1)`.
pub fn gauss_hermite(n: usize) -> GaussRule {
    assert!(n >= 1, "order must be positive");
    let pim4 = PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j + 1) as f64).sqrt() * p2 - (j as f64 / (j + 1) as f64).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    // physicists' rule -> probabilists' normalized rule
    let rule_nodes: Vec<f64> = nodes.iter().rev().map(|x| x * 2f64.sqrt()).collect();
    let rule_weights: Vec<f64> = weights.iter().rev().map(|w| w / PI.sqrt()).collect();
    GaussRule { nodes: rule_nodes, weights: rule_weights }
}

/// Pairwise (tree) summation with a fixed order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        for n in [1, 2, 5, 16, 33, 200] {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((r.integrate(|x| x.powi(deg as i32)) - exact).abs() < 1e-13);
            let even = (2 * n - 2) as i32;
            assert!((r.integrate(|x| x.powi(even)) - 2.0 / (even as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_moments() {
        for n in [1, 4, 16, 32, 64] {
            let r = gauss_hermite(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "n={n} {s}");
            assert!(r.weights.iter().all(|&w| w > 0.0));
            if n >= 2 {
                assert!((r.integrate(|x| x * x) - 1.0).abs() < 1e-12);
                assert!(r.integrate(|x| x).abs() < 1e-12);
            }
            if n >= 3 {
                assert!((r.integrate(|x| x.powi(4)) - 3.0).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn hermite_characteristic_function() {
        let r = gauss_hermite(32);
        for s in [0.5, 2.0, 5.0] {
            let v = r.integrate(|x| (s * x).cos());
            let tol = if s < 3.0 { 1e-13 } else { 1e-11 };
            assert!((v - (-s * s / 2.0).exp()).abs() < tol, "s={s}");
        }
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        assert!((pairwise_sum(&xs) - xs.iter().sum::<f64>()).abs() < 1e-12);
    }
}
