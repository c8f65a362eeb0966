//! Unit cube split into 24 congruent tetrahedra (cube centre, face centre, one face edge).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::geometry::Polyhedron;
use crate::linalg::{add, det, inverse, mat_vec, norm, scale, sub, Mat3};
use crate::{Error, Point, Result};

/// Barycentric tolerance for face incidence.
pub const FACE_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct TetraDecomposition {
    /// Reference tetrahedron with barycentre 0.
    pub reference: [Point; 4],
    pub rotations: Vec<Mat3>,
    /// `T_j x = R_j x - z_j`.
    pub offsets: Vec<Point>,
    /// Vertices of `T_j Delta` inside the unit cube `[-1/2, 1/2]^3`.
    pub tetrahedra: Vec<[Point; 4]>,
    inverse_frames: Vec<Mat3>,
}

fn cube_rotations() -> Vec<Mat3> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::new();
    for p in perms {
        for signs in 0..8u32 {
            let mut m = [[0.0; 3]; 3];
            for (row, &col) in p.iter().enumerate() {
                m[row][col] = if signs >> row & 1 == 1 { -1.0 } else { 1.0 };
            }
            if det(&m) > 0.0 {
                out.push(m);
            }
        }
    }
    out
}

fn edge_lengths(t: &[Point; 4]) -> Vec<f64> {
    let mut l = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            l.push(norm(sub(t[i], t[j])));
        }
    }
    l.sort_by(|a, b| a.partial_cmp(b).unwrap());
    l
}

/// Result of summing tetrahedron indicators at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IndicatorSum {
    Value(f64),
    OnFace,
}

#[derive(Clone, Debug)]
pub struct CoverageReport {
    pub samples: usize,
    pub resampled: usize,
    pub uncovered: usize,
    pub overlapping: usize,
    pub coverage: f64,
    pub per_tet_frequency: Vec<f64>,
    /// Largest `|count - N/24| / sqrt(N p (1-p))` over the 24 cells.
    pub max_z: f64,
}

impl TetraDecomposition {
    pub fn build() -> Self {
        let o = [0.0; 3];
        let first = [o, [0.5, 0.0, 0.0], [0.5, -0.5, -0.5], [0.5, 0.5, -0.5]];
        let c1 = scale(first.iter().fold([0.0; 3], |a, &p| add(a, p)), 0.25);
        let reference = first.map(|p| sub(p, c1));
        let rotations = cube_rotations();
        let offsets: Vec<Point> = rotations.iter().map(|r| scale(mat_vec(r, c1), -1.0)).collect();
        let tetrahedra: Vec<[Point; 4]> = rotations
            .iter()
            .zip(&offsets)
            .map(|(r, z)| reference.map(|v| sub(mat_vec(r, v), *z)))
            .collect();
        let inverse_frames = tetrahedra
            .iter()
            .map(|t| {
                let (a, b, c) = (sub(t[1], t[0]), sub(t[2], t[0]), sub(t[3], t[0]));
                let m = [[a[0], b[0], c[0]], [a[1], b[1], c[1]], [a[2], b[2], c[2]]];
                inverse(&m).expect("nondegenerate tetrahedron")
            })
            .collect();
        TetraDecomposition { reference, rotations, offsets, tetrahedra, inverse_frames }
    }

    pub fn len(&self) -> usize {
        self.tetrahedra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tetrahedra.is_empty()
    }

    /// Barycentric coordinates of a unit-cube point in tetrahedron `j`.
    pub fn barycentric(&self, j: usize, y: Point) -> [f64; 4] {
        let l = mat_vec(&self.inverse_frames[j], sub(y, self.tetrahedra[j][0]));
        [1.0 - l[0] - l[1] - l[2], l[0], l[1], l[2]]
    }

    /// Vertices of `ell (T_j Delta + z) + shift`.
    pub fn cell_vertices(&self, j: usize, ell: f64, z: [i64; 3], shift: Point) -> [Point; 4] {
        let zf = [z[0] as f64, z[1] as f64, z[2] as f64];
        self.tetrahedra[j].map(|p| add(scale(add(p, zf), ell), shift))
    }

    pub fn cell(&self, j: usize, ell: f64, z: [i64; 3], shift: Point) -> Polyhedron {
        Polyhedron::tetrahedron(self.cell_vertices(j, ell, z, shift)).expect("nondegenerate tetrahedron")
    }

    /// Barycentre of `T_j Delta`, i.e. `-z_j`.
    pub fn centre(&self, j: usize) -> Point {
        scale(self.offsets[j], -1.0)
    }

    pub fn reference_polyhedron(&self) -> Polyhedron {
        Polyhedron::tetrahedron(self.reference).expect("nondegenerate tetrahedron")
    }

    /// Invariant check: proper rotations, congruence, volumes, reference barycentre.
    pub fn verify(&self) -> Result<()> {
        if self.len() != 24 {
            return Err(Error::Degenerate(format!("{} tetrahedra", self.len())));
        }
        for r in &self.rotations {
            if (det(r) - 1.0).abs() > 1e-14 {
                return Err(Error::Degenerate("improper rotation".into()));
            }
        }
        let base = edge_lengths(&self.tetrahedra[0]);
        for t in &self.tetrahedra {
            let l = edge_lengths(t);
            if l.iter().zip(&base).any(|(a, b)| (a - b).abs() > 1e-12) {
                return Err(Error::Degenerate("tetrahedra not congruent".into()));
            }
            let vol = Polyhedron::tetrahedron(*t)?.volume();
            if (vol - 1.0 / 24.0).abs() > 1e-14 {
                return Err(Error::Degenerate(format!("tetra volume {vol}")));
            }
        }
        let b = scale(self.reference.iter().fold([0.0; 3], |a, &p| add(a, p)), 0.25);
        if norm(b) > 1e-15 {
            return Err(Error::Degenerate("reference barycentre not at 0".into()));
        }
        Ok(())
    }

    /// `sum_{z, j} 1_{ell T_j Delta}(x - ell z)`, or `OnFace` within the barycentric tolerance.
    pub fn pou_indicator_sum(&self, x: Point, ell: f64) -> IndicatorSum {
        let base = x.map(|c| (c / ell).round() as i64);
        let mut count = 0usize;
        for dz in -1..=1i64 {
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let z = [base[0] + dx, base[1] + dy, base[2] + dz];
                    let y = [x[0] / ell - z[0] as f64, x[1] / ell - z[1] as f64, x[2] / ell - z[2] as f64];
                    if y.iter().any(|c| c.abs() > 0.5 + 1e-9) {
                        continue;
                    }
                    for j in 0..self.len() {
                        let l = self.barycentric(j, y);
                        let min = l.iter().cloned().fold(f64::INFINITY, f64::min);
                        if min.abs() <= FACE_TOL {
                            return IndicatorSum::OnFace;
                        }
                        if min > 0.0 {
                            count += 1;
                        }
                    }
                }
            }
        }
        IndicatorSum::Value(count as f64)
    }

    /// Monte-Carlo membership over the unit cube. Face-incident samples are
    /// redrawn; chunks use independent ChaCha streams keyed by chunk index.
    pub fn coverage(&self, samples: usize, seed: u64) -> CoverageReport {
        const CHUNK: usize = 1 << 14;
        let chunks = samples.div_ceil(CHUNK);
        let parts: Vec<(Vec<usize>, usize, usize, usize)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let n = CHUNK.min(samples - c * CHUNK);
                let mut counts = vec![0usize; 24];
                let (mut resampled, mut uncovered, mut overlapping) = (0, 0, 0);
                let mut done = 0;
                while done < n {
                    let y: Point = [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
                    let mut hits = 0usize;
                    let mut last = 0;
                    let mut on_face = false;
                    for j in 0..24 {
                        let l = self.barycentric(j, y);
                        let min = l.iter().cloned().fold(f64::INFINITY, f64::min);
                        if min.abs() <= FACE_TOL {
                            on_face = true;
                        } else if min > 0.0 {
                            hits += 1;
                            last = j;
                        }
                    }
                    if on_face {
                        resampled += 1;
                        continue;
                    }
                    match hits {
                        0 => uncovered += 1,
                        1 => counts[last] += 1,
                        _ => overlapping += 1,
                    }
                    done += 1;
                }
                (counts, resampled, uncovered, overlapping)
            })
            .collect();
        let mut counts = vec![0usize; 24];
        let (mut resampled, mut uncovered, mut overlapping) = (0, 0, 0);
        for (c, r, u, o) in parts {
            for j in 0..24 {
                counts[j] += c[j];
            }
            resampled += r;
            uncovered += u;
            overlapping += o;
        }
        let n = samples as f64;
        let p = 1.0 / 24.0;
        let sd = (n * p * (1.0 - p)).sqrt();
        let max_z = counts.iter().map(|&c| (c as f64 - n * p).abs() / sd).fold(0.0, f64::max);
        CoverageReport {
            samples,
            resampled,
            uncovered,
            overlapping,
            coverage: (samples - uncovered) as f64 / n,
            per_tet_frequency: counts.iter().map(|&c| c as f64 / n).collect(),
            max_z,
        }
    }

    /// OFF mesh of the 24 tetrahedra scaled by `ell`.
    pub fn to_off(&self, ell: f64) -> String {
        let mut s = format!("OFF\n{} {} 0\n", 4 * self.len(), 4 * self.len());
        for t in &self.tetrahedra {
            for v in t {
                s.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", ell * v[0], ell * v[1], ell * v[2]));
            }
        }
        for j in 0..self.len() {
            let poly = self.cell(j, 1.0, [0; 3], [0.0; 3]);
            let t = &self.tetrahedra[j];
            for f in &poly.faces {
                let idx: Vec<usize> =
                    f.iter().map(|p| 4 * j + t.iter().position(|q| norm(sub(*p, *q)) < 1e-15).unwrap()).collect();
                s.push_str(&format!("3 {} {} {}\n", idx[0], idx[1], idx[2]));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_invariants() {
        let d = TetraDecomposition::build();
        d.verify().unwrap();
        assert!(d.offsets.iter().all(|z| z.iter().all(|c| c.abs() <= 0.5)));
        let diam = edge_lengths(&d.reference)[5];
        assert!((diam - 1.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_sum_is_one_and_periodic() {
        let d = TetraDecomposition::build();
        let x = [0.123, -0.377, 0.291];
        assert_eq!(d.pou_indicator_sum(x, 1.0), IndicatorSum::Value(1.0));
        let shifted = [x[0] * 2.5 + 5.0, x[1] * 2.5 - 7.5, x[2] * 2.5 + 2.5];
        assert_eq!(d.pou_indicator_sum(shifted, 2.5), IndicatorSum::Value(1.0));
        assert_eq!(d.pou_indicator_sum([0.3, 0.1, 0.1], 1.0), IndicatorSum::OnFace);
        assert_eq!(d.pou_indicator_sum([0.0, 0.0, 0.0], 1.0), IndicatorSum::OnFace);
    }

    #[test]
    fn small_coverage_run() {
        let d = TetraDecomposition::build();
        let r = d.coverage(100_000, 7);
        assert_eq!(r.uncovered, 0);
        assert_eq!(r.overlapping, 0);
        assert!(r.max_z < 4.5);
        assert_eq!(d.coverage(100_000, 7).per_tet_frequency, r.per_tet_frequency);
    }

    #[test]
    fn off_export_counts() {
        let d = TetraDecomposition::build();
        let s = d.to_off(2.0);
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("96 96 0"));
        assert_eq!(s.lines().count(), 2 + 96 + 96);
    }
}
