//! Regularized partition of unity averaged over cube translations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::decomposition::TetraDecomposition;
use super::geometry::Polyhedron;
use super::mollifier::Mollifier;
use super::smeared::SmearedIndicator;
use crate::fields::pairwise_sum;
use crate::linalg::{add, scale, sub};
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug)]
pub enum Sampling {
    /// Translation average done exactly by polyhedral clipping; the mollifier
    /// integral by a radial-angular product rule of the given orders.
    Quadrature { radial: usize, polar: usize, azimuthal: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Quadrature { radial: 8, polar: 8, azimuthal: 8 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PouAverage {
    pub estimate: f64,
    pub std_error: f64,
    pub evaluations: usize,
    /// Unnormalized mass of the mollifier rule (quadrature only).
    pub rule_mass: f64,
}

/// Shrunken tetrahedron `ell T_j ((1 - delta/ell) Delta)`.
fn shrunken(dec: &TetraDecomposition, j: usize, ell: f64, delta: f64) -> Polyhedron {
    let s = 1.0 - delta / ell;
    let c = dec.centre(j);
    let v = dec.tetrahedra[j].map(|p| scale(add(c, scale(sub(p, c), s)), ell));
    Polyhedron::tetrahedron(v).expect("nondegenerate tetrahedron")
}

fn lattice_range(lo: f64, hi: f64, ell: f64) -> std::ops::RangeInclusive<i64> {
    ((lo / ell - 0.5).ceil() as i64 - 1)..=((hi / ell + 0.5).floor() as i64 + 1)
}

/// Average over `tau` in the cube `C_ell` of
/// `sum_{z,j} (1 - delta/ell)^{-3} (1_{A_j} * eta_delta)(x - tau - ell z)`,
/// where `A_j` is the shrunken tetrahedron and `eta_delta` the tiling mollifier.
pub fn pou_regularized_average(
    x: Point,
    dec: &TetraDecomposition,
    ell: f64,
    delta: f64,
    sampling: Sampling,
) -> Result<PouAverage> {
    if !(delta > 0.0) || delta > ell / 2.0 {
        return Err(Error::invalid(format!("need 0 < delta <= ell/2, got delta = {delta}, ell = {ell}")));
    }
    let mollifier = Mollifier::tiling(delta)?;
    let factor = (1.0 - delta / ell).powi(-3);
    let cells: Vec<Polyhedron> = (0..dec.len()).map(|j| shrunken(dec, j, ell, delta)).collect();
    match sampling {
        Sampling::Quadrature { radial, polar, azimuthal } => {
            let cube = Polyhedron::cuboid([-ell / 2.0; 3], [ell / 2.0; 3])?;
            let (nodes, weights, mass) = mollifier.ball_rule(radial, polar, azimuthal);
            // int eta(s) sum_{j,z} |C_ell cap (x - s - ell z - A_j)| ds
            let terms: Vec<f64> = nodes
                .par_iter()
                .zip(&weights)
                .map(|(&s, &w)| {
                    let centre = sub(x, s);
                    let mut acc = Vec::new();
                    for cell in &cells {
                        let refl = cell.reflected(centre);
                        let (lo, hi) = refl.bounding_box();
                        for zx in lattice_range(lo[0], hi[0], ell) {
                            for zy in lattice_range(lo[1], hi[1], ell) {
                                for zz in lattice_range(lo[2], hi[2], ell) {
                                    let t = [-(zx as f64) * ell, -(zy as f64) * ell, -(zz as f64) * ell];
                                    let moved = refl.translated(t);
                                    let (a, b) = moved.bounding_box();
                                    if (0..3).any(|k| a[k] >= ell / 2.0 || b[k] <= -ell / 2.0) {
                                        continue;
                                    }
                                    acc.push(moved.intersect(&cube).volume());
                                }
                            }
                        }
                    }
                    w * pairwise_sum(&acc)
                })
                .collect();
            let estimate = factor * pairwise_sum(&terms) / ell.powi(3);
            Ok(PouAverage { estimate, std_error: 0.0, evaluations: nodes.len(), rule_mass: mass })
        }
        Sampling::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::invalid("Monte-Carlo average needs at least two samples"));
            }
            let smeared: Vec<SmearedIndicator> =
                cells.iter().map(|c| SmearedIndicator::new(c, &mollifier)).collect::<Result<_>>()?;
            const CHUNK: usize = 1024;
            let chunks = samples.div_ceil(CHUNK);
            let values: Vec<f64> = (0..chunks)
                .into_par_iter()
                .flat_map_iter(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c as u64);
                    let n = CHUNK.min(samples - c * CHUNK);
                    (0..n)
                        .map(|_| {
                            let tau: Point = [
                                ell * (rng.gen::<f64>() - 0.5),
                                ell * (rng.gen::<f64>() - 0.5),
                                ell * (rng.gen::<f64>() - 0.5),
                            ];
                            let y = sub(x, tau);
                            let base = y.map(|c| (c / ell).round() as i64);
                            let mut f = 0.0;
                            for dz in -1..=1 {
                                for dy in -1..=1 {
                                    for dx in -1..=1 {
                                        let z = [base[0] + dx, base[1] + dy, base[2] + dz];
                                        let p = [
                                            y[0] - ell * z[0] as f64,
                                            y[1] - ell * z[1] as f64,
                                            y[2] - ell * z[2] as f64,
                                        ];
                                        for s in &smeared {
                                            f += s.value(p);
                                        }
                                    }
                                }
                            }
                            factor * f
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            let n = values.len() as f64;
            let mean = pairwise_sum(&values) / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Ok(PouAverage { estimate: mean, std_error: (var / n).sqrt(), evaluations: values.len(), rule_mass: 1.0 })
        }
    }
}

/// `|(1_{(ell/a) Delta} * eta_{delta/a})(x/a) - (1_{ell Delta} * eta_delta)(x)|` for the tiling mollifier.
pub fn cutoff_scaling_residual(dec: &TetraDecomposition, ell: f64, delta: f64, a: f64, x: Point) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::invalid("scale factor must be positive"));
    }
    let reference = dec.reference_polyhedron();
    let m = Mollifier::tiling(delta)?;
    let big = SmearedIndicator::new(&reference.scaled(ell, [0.0; 3]), &m)?;
    let small = SmearedIndicator::new(&reference.scaled(ell / a, [0.0; 3]), &m.rescaled(1.0 / a))?;
    Ok((small.value(scale(x, 1.0 / a)) - big.value(x)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_average_is_one() {
        let dec = TetraDecomposition::build();
        let r = pou_regularized_average([0.13, -0.41, 0.27], &dec, 1.0, 0.3, Sampling::default()).unwrap();
        assert!((r.estimate - 1.0).abs() < 1e-10, "{}", r.estimate);
        assert!(pou_regularized_average([0.0; 3], &dec, 1.0, 0.6, Sampling::default()).is_err());
    }

    #[test]
    fn scaling_relation() {
        let dec = TetraDecomposition::build();
        let r = cutoff_scaling_residual(&dec, 2.0, 0.5, 1.7, [0.3, 0.2, -0.4]).unwrap();
        assert!(r < 1e-12, "{r}");
    }
}
