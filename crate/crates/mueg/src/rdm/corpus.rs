//! Seeded random complex Slater sets of Gaussian orbitals.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lowrank::{GaussianOrbital, GaussianPrimitive, LowRankRdm, Orbital};
use crate::fields::GridSpec;
use crate::Result;

/// Parameter ranges of the generated orbitals.
#[derive(Clone, Copy, Debug)]
pub struct CorpusSpec {
    pub max_orbitals: usize,
    pub max_primitives: usize,
    pub alpha: (f64, f64),
    pub center: f64,
    pub momentum: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { max_orbitals: 5, max_primitives: 2, alpha: (0.6, 1.4), center: 0.6, momentum: 1.2 }
    }
}

fn random_orbital(rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> GaussianOrbital {
    let n = rng.gen_range(1..=spec.max_primitives.max(1));
    let terms = (0..n)
        .map(|_| GaussianPrimitive {
            coeff: Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..std::f64::consts::TAU)),
            center: [(); 3].map(|_| rng.gen_range(-spec.center..=spec.center)),
            alpha: rng.gen_range(spec.alpha.0..=spec.alpha.1),
            k: [(); 3].map(|_| rng.gen_range(-spec.momentum..=spec.momentum)),
        })
        .collect();
    GaussianOrbital { terms }
}

/// Orthonormal orbitals, all occupied; set `index` of the corpus drawn from `seed`.
pub fn random_slater_set(seed: u64, index: u64, spec: &CorpusSpec, grid: &GridSpec) -> Result<LowRankRdm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = rng.gen_range(1..=spec.max_orbitals.max(1));
    loop {
        let raw: Vec<GaussianOrbital> = (0..n).map(|_| random_orbital(&mut rng, spec)).collect();
        // nearly dependent draws are rejected and redrawn
        if let Ok(orbs) = GaussianOrbital::orthonormalize(&raw) {
            let orbs: Vec<Arc<dyn Orbital>> = orbs.into_iter().map(|o| Arc::new(o) as Arc<dyn Orbital>).collect();
            return LowRankRdm::from_orbitals(grid, orbs, vec![1.0; n]);
        }
    }
}

/// Grid used for the bundled corpus.
pub fn corpus_grid(n: usize) -> Result<GridSpec> {
    GridSpec::cube(3, -4.0, 4.0, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_orthonormal() {
        let g = corpus_grid(25).unwrap();
        let a = random_slater_set(7, 3, &CorpusSpec::default(), &g).unwrap();
        let b = random_slater_set(7, 3, &CorpusSpec::default(), &g).unwrap();
        assert_eq!(a.rank(), b.rank());
        assert_eq!(a.jets[0][100].value, b.jets[0][100].value);
        assert!(a.orthonormality_defect().unwrap() < 1e-6);
    }
}
