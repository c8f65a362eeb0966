//! Interior / boundary classification of lattice tetrahedra against a target domain.

use rayon::prelude::*;

use super::decomposition::TetraDecomposition;
use super::geometry::{Plane, Polyhedron};
use crate::linalg::{cross, dot, norm, scale, sub};
use crate::{Error, Point, Result};

pub type CellIndex = ([i64; 3], usize);

#[derive(Clone, Debug)]
pub struct IndexClassification {
    pub ell: f64,
    pub delta: f64,
    pub delta_target: f64,
    /// Cells whose mollified support may meet the mollified target.
    pub touching: Vec<CellIndex>,
    /// Cells whose mollified support lies in the target inset by `delta_target`.
    pub interior: Vec<CellIndex>,
    pub cell_volume: f64,
    pub target_volume: f64,
    /// Largest distance from a boundary-band cell's barycentre to the target boundary.
    pub band_max_distance: f64,
}

impl IndexClassification {
    /// `M_ell = |ell Delta| |J_0|`.
    pub fn interior_volume(&self) -> f64 {
        self.cell_volume * self.interior.len() as f64
    }

    /// `|ell Delta| |J \ J_0|`.
    pub fn band_volume(&self) -> f64 {
        self.cell_volume * (self.touching.len() - self.interior.len()) as f64
    }

    pub fn band_bound(&self) -> f64 {
        self.ell + self.delta + self.delta_target
    }

    pub fn band_within_bound(&self) -> bool {
        self.band_max_distance <= self.band_bound()
    }
}

fn support(points: &[Point], axis: Point) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let v = dot(*p, axis);
        (lo.min(v), hi.max(v))
    })
}

fn edges(faces: &[Vec<Point>]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for f in faces {
        for i in 0..f.len() {
            let e = sub(f[(i + 1) % f.len()], f[i]);
            let n = norm(e);
            if n > 0.0 {
                let e = scale(e, 1.0 / n);
                if !out.iter().any(|q| norm(cross(*q, e)) < 1e-12) {
                    out.push(e);
                }
            }
        }
    }
    out
}

/// Separating-axis test with margin: true if some axis separates the two
/// point sets by more than `margin`.
fn separated(a: &[Point], b: &[Point], axes: &[Point], margin: f64) -> bool {
    axes.iter().any(|&ax| {
        let (alo, ahi) = support(a, ax);
        let (blo, bhi) = support(b, ax);
        alo > bhi + margin || blo > ahi + margin
    })
}

/// Classify the cells `ell (T_j Delta + z) + shift` of the tiling against a
/// convex target. Cells meeting the target enlarged by the two mollifier
/// radii form `J`; cells inside the target inset by `delta_target + delta/10` form `J_0`.
pub fn classify_indices(
    target: &Polyhedron,
    dec: &TetraDecomposition,
    ell: f64,
    delta: f64,
    delta_target: f64,
    shift: Point,
) -> Result<IndexClassification> {
    if !(ell > 0.0) || !(delta >= 0.0) || !(delta_target >= 0.0) {
        return Err(Error::invalid("classification needs ell > 0 and nonnegative widths"));
    }
    let planes: Vec<Plane> = target.planes();
    let tverts = target.vertices();
    let tedges = edges(&target.faces);
    let outer = delta / 10.0 + delta_target / 10.0;
    let inner = delta_target + delta / 10.0;
    let (lo, hi) = target.bounding_box();
    let range = |a: usize| ((lo[a] - shift[a]) / ell).floor() as i64 - 1..=((hi[a] - shift[a]) / ell).ceil() as i64 + 1;
    let zs: Vec<[i64; 3]> = range(0)
        .flat_map(|x| range(1).flat_map(move |y| range(2).map(move |z| [x, y, z])))
        .collect();
    let results: Vec<(CellIndex, bool, f64)> = zs
        .par_iter()
        .flat_map_iter(|&z| {
            let planes = &planes;
            let tverts = &tverts;
            let tedges = &tedges;
            (0..dec.len()).filter_map(move |j| {
                let v = dec.cell_vertices(j, ell, z, shift);
                let dist: Vec<f64> = planes
                    .iter()
                    .map(|p| v.iter().map(|&x| p.signed_distance(x)).fold(f64::NEG_INFINITY, f64::max))
                    .collect();
                if dist.iter().all(|&d| d <= -inner) {
                    return Some(((z, j), true, 0.0));
                }
                let mins: Vec<f64> = planes
                    .iter()
                    .map(|p| v.iter().map(|&x| p.signed_distance(x)).fold(f64::INFINITY, f64::min))
                    .collect();
                if mins.iter().any(|&m| m > outer) {
                    return None;
                }
                let cell = Polyhedron::tetrahedron(v).ok()?;
                let cedges = edges(&cell.faces);
                let mut axes: Vec<Point> = cell.planes().iter().map(|p| p.n).collect();
                for a in &cedges {
                    for b in tedges {
                        let c = cross(*a, *b);
                        let n = norm(c);
                        if n > 1e-9 {
                            axes.push(scale(c, 1.0 / n));
                        }
                    }
                }
                if separated(&v, tverts, &axes, outer) {
                    return None;
                }
                let bary = scale(v.iter().fold([0.0; 3], |a, p| [a[0] + p[0], a[1] + p[1], a[2] + p[2]]), 0.25);
                Some(((z, j), false, target.boundary_distance(bary)))
            })
        })
        .collect();
    let mut touching = Vec::with_capacity(results.len());
    let mut interior = Vec::new();
    let mut band_max: f64 = 0.0;
    for (idx, inside, d) in results {
        touching.push(idx);
        if inside {
            interior.push(idx);
        } else {
            band_max = band_max.max(d);
        }
    }
    Ok(IndexClassification {
        ell,
        delta,
        delta_target,
        touching,
        interior,
        cell_volume: ell.powi(3) / 24.0,
        target_volume: target.volume(),
        band_max_distance: band_max,
    })
}

/// Fitted boundary constant `C = (1 - M_ell/|target|) ell' / (ell + delta + delta')`
/// for targets `ell' Delta` with the given ratios `ell'/ell`.
pub fn boundary_constant_sweep(
    dec: &TetraDecomposition,
    ell: f64,
    delta: f64,
    delta_target: f64,
    ratios: &[f64],
) -> Result<Vec<(f64, f64, IndexClassification)>> {
    let reference = dec.reference_polyhedron();
    ratios
        .iter()
        .map(|&q| {
            let big = q * ell;
            let target = reference.scaled(big, [0.0; 3]);
            let c = classify_indices(&target, dec, ell, delta, delta_target, [0.0; 3])?;
            let frac = c.interior_volume() / c.target_volume;
            Ok((q, (1.0 - frac) * big / (ell + delta + delta_target), c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_target_has_no_interior() {
        let dec = TetraDecomposition::build();
        let t = dec.reference_polyhedron().scaled(0.5, [0.0; 3]);
        let c = classify_indices(&t, &dec, 1.0, 0.1, 0.05, [0.0; 3]).unwrap();
        assert!(c.interior.is_empty());
        assert!(!c.touching.is_empty());
    }

    #[test]
    fn interior_shrinks_with_target_width() {
        let dec = TetraDecomposition::build();
        let t = dec.reference_polyhedron().scaled(8.0, [0.0; 3]);
        let a = classify_indices(&t, &dec, 1.0, 0.1, 0.0, [0.0; 3]).unwrap();
        let b = classify_indices(&t, &dec, 1.0, 0.1, 0.5, [0.0; 3]).unwrap();
        assert!(b.interior.len() <= a.interior.len());
        assert!(b.interior.iter().all(|i| a.interior.contains(i)));
        assert!(a.interior.iter().all(|i| a.touching.contains(i)));
        assert!(a.interior_volume() <= a.target_volume);
        assert!(a.band_within_bound(), "{} {}", a.band_max_distance, a.band_bound());
    }
}
