//! Convolution of a convex polyhedron's indicator with a radial mollifier.
//!
//! By the divergence theorem the volume integral becomes a sum over faces of
//! the flux of a radial field, and each face integral a sum over edges of a
//! one-dimensional integral in the variable `u = asinh(t/d)` along the edge.

use rayon::prelude::*;

use super::geometry::Polyhedron;
use super::mollifier::{Mollifier, RadialProfile};
use crate::fields::{gauss_legendre, GaussRule, GridSpec, ScalarField};
use crate::linalg::{cross, dot, norm, scale, sub};
use crate::{Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    One,
    Zero,
    Transition,
}

#[derive(Clone, Debug)]
struct Edge {
    a: Point,
    e: Point,
    m: Point,
    len: f64,
}

#[derive(Clone, Debug)]
struct Face {
    n: Point,
    c: f64,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug)]
pub struct SmearedIndicator {
    faces: Vec<Face>,
    pub mollifier: Mollifier,
    pub volume: f64,
    rule: GaussRule,
}

const PIECE: f64 = 1.0;

impl SmearedIndicator {
    pub fn new(poly: &Polyhedron, mollifier: &Mollifier) -> Result<Self> {
        let planes = poly.planes();
        let faces = poly
            .faces
            .iter()
            .zip(&planes)
            .map(|(f, pl)| {
                let k = f.len();
                let edges = (0..k)
                    .map(|i| {
                        let (a, b) = (f[i], f[(i + 1) % k]);
                        let d = sub(b, a);
                        let len = norm(d);
                        let e = scale(d, 1.0 / len);
                        Edge { a, e, m: cross(e, pl.n), len }
                    })
                    .collect();
                Face { n: pl.n, c: pl.c, edges }
            })
            .collect();
        Ok(SmearedIndicator { faces, mollifier: mollifier.clone(), volume: poly.volume(), rule: gauss_legendre(16) })
    }

    /// Signed face distances `c_f - n_f . x` (positive inside).
    fn heights(&self, x: Point) -> impl Iterator<Item = f64> + '_ {
        self.faces.iter().map(move |f| f.c - dot(f.n, x))
    }

    pub fn classify(&self, x: Point) -> Region {
        let r = self.mollifier.radius;
        let mut min = f64::INFINITY;
        for h in self.heights(x) {
            if h <= -r {
                return Region::Zero;
            }
            min = min.min(h);
        }
        if min >= r {
            Region::One
        } else {
            Region::Transition
        }
    }

    /// Value by the boundary formula, ignoring the classifier.
    pub fn value_unclassified(&self, x: Point) -> f64 {
        self.evaluate(x, true, false).0
    }

    pub fn value(&self, x: Point) -> f64 {
        match self.classify(x) {
            Region::One => 1.0,
            Region::Zero => 0.0,
            // the exact value lies in [0, 1]; clamp roundoff
            Region::Transition => self.evaluate(x, true, false).0.clamp(0.0, 1.0),
        }
    }

    pub fn gradient(&self, x: Point) -> Point {
        match self.classify(x) {
            Region::Transition => self.evaluate(x, false, true).1,
            _ => [0.0; 3],
        }
    }

    pub fn value_and_gradient(&self, x: Point) -> (f64, Point) {
        match self.classify(x) {
            Region::One => (1.0, [0.0; 3]),
            Region::Zero => (0.0, [0.0; 3]),
            Region::Transition => {
                let (v, g) = self.evaluate(x, true, true);
                (v.clamp(0.0, 1.0), g)
            }
        }
    }

    fn evaluate(&self, x: Point, want_value: bool, want_grad: bool) -> (f64, Point) {
        let r = self.mollifier.radius;
        let p = &*self.mollifier.profile;
        let xs = scale(x, 1.0 / r);
        let mut value = 0.0;
        let mut grad = [0.0; 3];
        for f in &self.faces {
            let h = (f.c / r) - dot(f.n, xs);
            let foot = [xs[0] + h * f.n[0], xs[1] + h * f.n[1], xs[2] + h * f.n[2]];
            let (mut fl, mut fe) = (0.0, 0.0);
            for ed in &f.edges {
                let a = scale(ed.a, 1.0 / r);
                let rel = sub(a, foot);
                let d = dot(ed.m, rel);
                if d.abs() < 1e-300 {
                    continue;
                }
                let t1 = dot(ed.e, rel);
                let t2 = t1 + ed.len / r;
                let sign = d.signum();
                let (il, ie) = edge_integrals(p, &self.rule, h, d.abs(), t1, t2, want_value, want_grad);
                fl += sign * il;
                fe += sign * ie;
            }
            value += h * fl;
            for k in 0..3 {
                grad[k] -= f.n[k] * fe / r;
            }
        }
        (value, grad)
    }

    pub fn sample(&self, grid: &GridSpec) -> ScalarField<f64> {
        let values = grid.points().par_iter().map(|&x| self.value(x)).collect();
        ScalarField { grid: grid.clone(), values }
    }
}

fn gd(u: f64) -> f64 {
    u.sinh().atan()
}

/// `(int [lambda(s) - lambda(|h|)]/cosh u du, int [e(s) - e(|h|)]/cosh u du)`
/// over `u in [asinh(t1/d), asinh(t2/d)]`, `s = sqrt(h^2 + d^2 cosh^2 u)`.
#[allow(clippy::too_many_arguments)]
fn edge_integrals(
    p: &RadialProfile,
    rule: &GaussRule,
    h: f64,
    d: f64,
    t1: f64,
    t2: f64,
    want_value: bool,
    want_grad: bool,
) -> (f64, f64) {
    let ah = h.abs();
    let (u1, u2) = ((t1 / d).asinh(), (t2 / d).asinh());
    let lam_h = p.lambda(ah);
    let e_h = p.e(ah);
    let psi = p.psi_total();
    let s_of = |u: f64| (h * h + d * d * u.cosh().powi(2)).sqrt();
    let a_of = |u: f64| {
        let t = d * u.sinh();
        let s = s_of(u);
        if ah < 1e-12 {
            t / (d * s)
        } else {
            (ah * t / (d * s)).atan() / ah
        }
    };
    let (mut il, mut ie) = (0.0, 0.0);
    let mut outer = |lo: f64, hi: f64| {
        if hi > lo {
            let dg = gd(hi) - gd(lo);
            if want_value {
                il += (p.lambda_at_one() + psi - lam_h) * dg - psi * (a_of(hi) - a_of(lo));
            }
            if want_grad {
                ie += (p.e(1.0) - e_h) * dg;
            }
        }
    };
    let inside = 1.0 - h * h;
    if inside <= d * d {
        outer(u1, u2);
        return (il, ie);
    }
    let ustar = ((inside).sqrt() / d).acosh();
    let (lo, hi) = (u1.max(-ustar), u2.min(ustar));
    if hi <= lo {
        outer(u1, u2);
        return (il, ie);
    }
    outer(u1, lo.min(u2));
    outer(hi.max(u1), u2);
    let pieces = ((hi - lo) / PIECE).ceil().max(1.0) as usize;
    let w = (hi - lo) / pieces as f64;
    for k in 0..pieces {
        let sub = rule.on_interval(lo + k as f64 * w, lo + (k + 1) as f64 * w);
        for (&u, &wt) in sub.nodes.iter().zip(&sub.weights) {
            let s = s_of(u);
            let c = wt / u.cosh();
            if want_value {
                il += c * (p.lambda(s) - lam_h);
            }
            if want_grad {
                ie += c * (p.e(s) - e_h);
            }
        }
    }
    (il, ie)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> Polyhedron {
        Polyhedron::cuboid([-0.5; 3], [0.5; 3]).unwrap()
    }

    #[test]
    fn interior_and_exterior_values() {
        let m = Mollifier::ueg(0.2).unwrap();
        let s = SmearedIndicator::new(&unit_box(), &m).unwrap();
        assert_eq!(s.classify([0.0; 3]), Region::One);
        assert!((s.value_unclassified([0.0; 3]) - 1.0).abs() < 1e-12);
        assert!((s.value_unclassified([0.1, -0.2, 0.05]) - 1.0).abs() < 1e-12);
        assert_eq!(s.classify([2.0, 0.0, 0.0]), Region::Zero);
        assert!(s.value_unclassified([2.0, 0.3, 0.0]).abs() < 1e-12);
        // flat face far from edges: half
        assert!((s.value([0.5, 0.0, 0.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn flat_face_matches_one_dimensional_marginal() {
        let m = Mollifier::ueg(1.0).unwrap();
        let s = SmearedIndicator::new(&Polyhedron::cuboid([-10.0; 3], [10.0; 3]).unwrap(), &m).unwrap();
        let p = &m.profile;
        let rule = gauss_legendre(80);
        for h in [0.05, 0.2, 0.5, 0.8, 0.95] {
            // marginal of the radial bump across a plane: 2 pi (e(1) - e(|z|))
            let marg = rule.on_interval(0.0, h).integrate(|z| 2.0 * std::f64::consts::PI * (p.e(1.0) - p.e(z)));
            let v = s.value([10.0 - h, 0.3, -0.2]);
            assert!((v - 0.5 - marg).abs() < 1e-13, "{h}");
        }
    }

    #[test]
    fn corner_value_is_one_eighth() {
        let m = Mollifier::ueg(0.2).unwrap();
        let s = SmearedIndicator::new(&unit_box(), &m).unwrap();
        assert!((s.value([0.5, 0.5, 0.5]) - 0.125).abs() < 1e-12);
        assert!((s.value([0.5, 0.5, 0.0]) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn matches_direct_ball_quadrature() {
        let tet = Polyhedron::tetrahedron([[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let m = Mollifier::ueg(0.3).unwrap();
        let s = SmearedIndicator::new(&tet, &m).unwrap();
        let planes = tet.planes();
        // brute force: radial x angular rule with fine smooth indicator via many nodes
        let (nodes, w, _) = m.ball_rule(60, 60, 120);
        for &x in &[[0.1, 0.1, 0.1], [0.0, 0.0, 0.0], [0.3, 0.2, -0.05], [0.5, 0.5, 0.2]] {
            let brute: f64 = nodes
                .iter()
                .zip(&w)
                .filter(|(y, _)| planes.iter().all(|p| p.signed_distance(sub(x, **y)) <= 0.0))
                .map(|(_, w)| w)
                .sum();
            let v = s.value(x);
            assert!((v - brute).abs() < 2e-3, "{x:?} {v} {brute}");
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let tet = Polyhedron::tetrahedron([[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let m = Mollifier::ueg(0.3).unwrap();
        let s = SmearedIndicator::new(&tet, &m).unwrap();
        let hstep = 1e-5;
        for &x in &[[0.1, 0.1, 0.1], [0.02, -0.1, 0.3], [0.4, 0.4, 0.1]] {
            let g = s.gradient(x);
            for k in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[k] += hstep;
                xm[k] -= hstep;
                let fd = (s.value(xp) - s.value(xm)) / (2.0 * hstep);
                assert!((g[k] - fd).abs() < 1e-7, "{x:?} {k} {} {fd}", g[k]);
            }
        }
    }
}
