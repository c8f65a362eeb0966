//! Convex polyhedra stored as outward-oriented face polygons.

use crate::linalg::{add, cross, dot, norm, scale, sub};
use crate::{Error, Point, Result};

#[derive(Clone, Debug)]
pub struct Polyhedron {
    /// Faces as vertex loops, counter-clockwise seen from outside.
    pub faces: Vec<Vec<Point>>,
}

/// Plane `n . x = c` with unit outward normal `n`.
#[derive(Clone, Copy, Debug)]
pub struct Plane {
    pub n: Point,
    pub c: f64,
}

impl Plane {
    pub fn signed_distance(&self, x: Point) -> f64 {
        dot(self.n, x) - self.c
    }
}

fn polygon_area_vector(poly: &[Point]) -> Point {
    let mut a = [0.0; 3];
    for i in 0..poly.len() {
        a = add(a, cross(poly[i], poly[(i + 1) % poly.len()]));
    }
    scale(a, 0.5)
}

impl Polyhedron {
    /// Tetrahedron with faces oriented outward regardless of vertex order.
    pub fn tetrahedron(v: [Point; 4]) -> Result<Self> {
        let vol = dot(sub(v[1], v[0]), cross(sub(v[2], v[0]), sub(v[3], v[0])));
        if vol.abs() < 1e-300 {
            return Err(Error::Degenerate("flat tetrahedron".into()));
        }
        let idx: [[usize; 3]; 4] = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];
        let flip = vol < 0.0;
        let faces = idx
            .iter()
            .map(|f| {
                let mut p = vec![v[f[0]], v[f[1]], v[f[2]]];
                if flip {
                    p.swap(1, 2);
                }
                p
            })
            .collect();
        Ok(Polyhedron { faces })
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn cuboid(lo: Point, hi: Point) -> Result<Self> {
        if (0..3).any(|a| !(hi[a] > lo[a])) {
            return Err(Error::Degenerate("empty box".into()));
        }
        let c = |i: usize, j: usize, k: usize| [[lo[0], hi[0]][i], [lo[1], hi[1]][j], [lo[2], hi[2]][k]];
        let faces = vec![
            vec![c(0, 0, 0), c(0, 1, 0), c(1, 1, 0), c(1, 0, 0)],
            vec![c(0, 0, 1), c(1, 0, 1), c(1, 1, 1), c(0, 1, 1)],
            vec![c(0, 0, 0), c(1, 0, 0), c(1, 0, 1), c(0, 0, 1)],
            vec![c(0, 1, 0), c(0, 1, 1), c(1, 1, 1), c(1, 1, 0)],
            vec![c(0, 0, 0), c(0, 0, 1), c(0, 1, 1), c(0, 1, 0)],
            vec![c(1, 0, 0), c(1, 1, 0), c(1, 1, 1), c(1, 0, 1)],
        ];
        Ok(Polyhedron { faces })
    }

    pub fn vertices(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for f in &self.faces {
            for &p in f {
                if !out.iter().any(|q| norm(sub(*q, p)) < 1e-12) {
                    out.push(p);
                }
            }
        }
        out
    }

    pub fn planes(&self) -> Vec<Plane> {
        self.faces
            .iter()
            .map(|f| {
                let a = polygon_area_vector(f);
                let n = scale(a, 1.0 / norm(a));
                Plane { n, c: dot(n, f[0]) }
            })
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.faces.iter().map(|f| dot(f[0], polygon_area_vector(f))).sum::<f64>() / 3.0
    }

    /// `int_P x dx`.
    pub fn first_moment(&self) -> Point {
        // sum over tetrahedra (0, a, b, c) of vol * (a + b + c)/4
        let mut m = [0.0; 3];
        for f in &self.faces {
            for i in 1..f.len() - 1 {
                let (a, b, c) = (f[0], f[i], f[i + 1]);
                let v = dot(a, cross(b, c)) / 6.0;
                m = add(m, scale(add(add(a, b), c), v / 4.0));
            }
        }
        m
    }

    /// `int_P x x^T dx`.
    pub fn second_moment(&self) -> [[f64; 3]; 3] {
        let mut s = [[0.0; 3]; 3];
        for f in &self.faces {
            for i in 1..f.len() - 1 {
                let (a, b, c) = (f[0], f[i], f[i + 1]);
                let v = dot(a, cross(b, c)) / 6.0;
                let sum = add(add(a, b), c);
                // tetra with vertex at origin: V/20 (sum_i v_i v_i^T + s s^T)
                for p in 0..3 {
                    for q in 0..3 {
                        let diag = a[p] * a[q] + b[p] * b[q] + c[p] * c[q];
                        s[p][q] += v / 20.0 * (diag + sum[p] * sum[q]);
                    }
                }
            }
        }
        s
    }

    pub fn barycenter(&self) -> Point {
        scale(self.first_moment(), 1.0 / self.volume())
    }

    pub fn translated(&self, t: Point) -> Polyhedron {
        Polyhedron { faces: self.faces.iter().map(|f| f.iter().map(|&p| add(p, t)).collect()).collect() }
    }

    /// Image under `x -> s x + t` (s > 0 keeps orientation).
    pub fn scaled(&self, s: f64, t: Point) -> Polyhedron {
        Polyhedron { faces: self.faces.iter().map(|f| f.iter().map(|&p| add(scale(p, s), t)).collect()).collect() }
    }

    /// Point reflection `x -> c - x`.
    pub fn reflected(&self, c: Point) -> Polyhedron {
        Polyhedron {
            faces: self.faces.iter().map(|f| f.iter().rev().map(|&p| sub(c, p)).collect()).collect(),
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for f in &self.faces {
            for p in f {
                for a in 0..3 {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
        }
        (lo, hi)
    }

    pub fn contains(&self, x: Point, tol: f64) -> bool {
        self.planes().iter().all(|p| p.signed_distance(x) <= tol)
    }

    /// Keep the part with `n . x <= c`.
    pub fn clip(&self, plane: &Plane) -> Polyhedron {
        let mut faces = Vec::new();
        let mut cut: Vec<Point> = Vec::new();
        for f in &self.faces {
            let m = f.len();
            let mut out = Vec::with_capacity(m + 1);
            for i in 0..m {
                let (p, q) = (f[i], f[(i + 1) % m]);
                let (dp, dq) = (plane.signed_distance(p), plane.signed_distance(q));
                if dp <= 0.0 {
                    out.push(p);
                }
                if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
                    let t = dp / (dp - dq);
                    let r = add(p, scale(sub(q, p), t));
                    out.push(r);
                    cut.push(r);
                } else if dp == 0.0 {
                    cut.push(p);
                }
            }
            if out.len() >= 3 {
                faces.push(out);
            }
        }
        // cap polygon on the cutting plane, ordered counter-clockwise about +n
        let mut pts: Vec<Point> = Vec::new();
        for p in cut {
            if !pts.iter().any(|q| norm(sub(*q, p)) < 1e-14) {
                pts.push(p);
            }
        }
        if pts.len() >= 3 {
            let c = scale(pts.iter().fold([0.0; 3], |a, &p| add(a, p)), 1.0 / pts.len() as f64);
            let e1 = {
                let t = if plane.n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let u = cross(plane.n, t);
                scale(u, 1.0 / norm(u))
            };
            let e2 = cross(plane.n, e1);
            pts.sort_by(|a, b| {
                let (da, db) = (sub(*a, c), sub(*b, c));
                let ta = dot(da, e2).atan2(dot(da, e1));
                let tb = dot(db, e2).atan2(dot(db, e1));
                ta.partial_cmp(&tb).unwrap_or(std::cmp::Ordering::Equal)
            });
            faces.push(pts);
        }
        Polyhedron { faces }
    }

    /// Intersection with another convex polyhedron.
    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        let mut p = self.clone();
        for pl in other.planes() {
            if p.faces.is_empty() {
                break;
            }
            p = p.clip(&pl);
        }
        p
    }

    /// Distance from `x` to the boundary (faces triangulated as fans).
    pub fn boundary_distance(&self, x: Point) -> f64 {
        let mut best = f64::INFINITY;
        for f in &self.faces {
            for i in 1..f.len() - 1 {
                best = best.min(point_triangle_distance(x, f[0], f[i], f[i + 1]));
            }
        }
        best
    }
}

/// Euclidean distance from `p` to the triangle `abc`.
pub fn point_triangle_distance(p: Point, a: Point, b: Point, c: Point) -> f64 {
    let closest = closest_point_triangle(p, a, b, c);
    norm(sub(p, closest))
}

fn closest_point_triangle(p: Point, a: Point, b: Point, c: Point) -> Point {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return add(a, scale(ab, d1 / (d1 - d3)));
    }
    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return add(a, scale(ac, d2 / (d2 - d6)));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return add(b, scale(sub(c, b), (d4 - d3) / ((d4 - d3) + (d5 - d6))));
    }
    let denom = 1.0 / (va + vb + vc);
    add(a, add(scale(ab, vb * denom), scale(ac, vc * denom)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_moments() {
        let b = Polyhedron::cuboid([-1.0, -0.5, 0.0], [1.0, 0.5, 3.0]).unwrap();
        assert!((b.volume() - 6.0).abs() < 1e-13);
        let c = b.barycenter();
        assert!(c[0].abs() < 1e-14 && c[1].abs() < 1e-14 && (c[2] - 1.5).abs() < 1e-14);
        let s = b.second_moment();
        // int x^2 over [-1,1] x [-0.5,0.5] x [0,3] = (2/3) * 1 * 3
        assert!((s[0][0] - 2.0).abs() < 1e-13);
        assert!((s[2][2] - 2.0 * 9.0).abs() < 1e-12);
    }

    #[test]
    fn clipping_halves_a_cube() {
        let b = Polyhedron::cuboid([0.0; 3], [1.0; 3]).unwrap();
        let n = [1.0 / 3f64.sqrt(); 3];
        let half = b.clip(&Plane { n, c: dot(n, [0.5; 3]) });
        assert!((half.volume() - 0.5).abs() < 1e-14);
        let corner = b.clip(&Plane { n: [1.0, 0.0, 0.0], c: 0.25 });
        assert!((corner.volume() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn tetra_orientation_and_distance() {
        let t = Polyhedron::tetrahedron([[0.0; 3], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!((t.volume() - 1.0 / 6.0).abs() < 1e-15);
        assert!(t.contains([0.1, 0.1, 0.1], 0.0));
        assert!(!t.contains([0.5, 0.5, 0.5], 0.0));
        assert!((t.boundary_distance([0.1, 0.1, 0.1]) - 0.1).abs() < 1e-14);
    }
}
