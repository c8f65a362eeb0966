use crate::{Error, Point, Result};

/// Uniform box grid in dimension 1 to 3. Unused axes carry count 1.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub counts: [usize; 3],
}

impl GridSpec {
    pub fn new(dim: usize, origin: &[f64], spacing: &[f64], counts: &[usize]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if origin.len() != dim || spacing.len() != dim || counts.len() != dim {
            return Err(Error::invalid(format!("grid arrays must have length {dim}")));
        }
        let mut g = GridSpec { dim, origin: [0.0; 3], spacing: [1.0; 3], counts: [1; 3] };
        for a in 0..dim {
            if !(spacing[a] > 0.0) || !spacing[a].is_finite() {
                return Err(Error::invalid(format!("spacing[{a}] must be positive")));
            }
            if !origin[a].is_finite() {
                return Err(Error::invalid(format!("origin[{a}] must be finite")));
            }
            if counts[a] < 4 {
                return Err(Error::GridTooSmall(format!("counts[{a}] = {} < 4", counts[a])));
            }
            g.origin[a] = origin[a];
            g.spacing[a] = spacing[a];
            g.counts[a] = counts[a];
        }
        Ok(g)
    }

    /// Grid of `n` points per axis spanning `[lo, hi]` in every used axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::invalid("cube grid needs hi > lo and n >= 2"));
        }
        let h = (hi - lo) / (n - 1) as f64;
        GridSpec::new(dim, &vec![lo; dim], &vec![h; dim], &vec![n; dim])
    }

    /// Grid spanning an arbitrary axis-aligned box with `n` points per axis.
    pub fn spanning(dim: usize, lo: Point, hi: Point, n: usize) -> Result<Self> {
        let mut spacing = vec![0.0; dim];
        for a in 0..dim {
            spacing[a] = (hi[a] - lo[a]) / (n.max(2) - 1) as f64;
        }
        GridSpec::new(dim, &lo[..dim], &spacing, &vec![n; dim])
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.counts[..axis].iter().product()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.counts[0] * (j + self.counts[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.counts[0];
        let r = idx / self.counts[0];
        [i, r % self.counts[1], r / self.counts[1]]
    }

    #[inline]
    pub fn point(&self, idx: usize) -> Point {
        let c = self.coords(idx);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.origin[a] + c[a] as f64 * self.spacing[a];
        }
        p
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn upper(&self) -> Point {
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.origin[a] + (self.counts[a] - 1) as f64 * self.spacing[a];
        }
        p
    }

    /// Points at least `margin` nodes away from every face of the box.
    pub fn is_interior(&self, idx: usize, margin: usize) -> bool {
        let c = self.coords(idx);
        (0..self.dim).all(|a| c[a] >= margin && c[a] + margin < self.counts[a])
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing[..self.dim].iter().product()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|a| (self.counts[a] - 1) as f64 * self.spacing[a]).product()
    }

    /// One-dimensional quadrature weights along `axis`: Gregory end corrections
    /// (exact on cubics) when there are at least six points, trapezoid otherwise.
    pub fn axis_weights(&self, axis: usize) -> Vec<f64> {
        let n = self.counts[axis];
        let h = self.spacing[axis];
        let mut w = vec![h; n];
        if n >= 6 {
            let ends = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
            for (i, e) in ends.iter().enumerate() {
                w[i] = e * h;
                w[n - 1 - i] = e * h;
            }
        } else {
            w[0] = 0.5 * h;
            w[n - 1] = 0.5 * h;
        }
        w
    }

    /// Full tensor-product integration weights.
    pub fn weights(&self) -> Vec<f64> {
        let w: Vec<Vec<f64>> = (0..3)
            .map(|a| if a < self.dim { self.axis_weights(a) } else { vec![1.0] })
            .collect();
        (0..self.len())
            .map(|idx| {
                let c = self.coords(idx);
                w[0][c[0]] * w[1][c[1]] * w[2][c[2]]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let g = GridSpec::new(3, &[0.0; 3], &[0.1; 3], &[5, 6, 7]).unwrap();
        for idx in [0, 17, 100, g.len() - 1] {
            let c = g.coords(idx);
            assert_eq!(g.index(c[0], c[1], c[2]), idx);
        }
    }

    #[test]
    fn rejects_small_and_bad_grids() {
        assert!(matches!(GridSpec::new(2, &[0.0; 2], &[0.1; 2], &[3, 8]), Err(Error::GridTooSmall(_))));
        assert!(GridSpec::new(2, &[0.0; 2], &[0.0, 0.1], &[8, 8]).is_err());
        assert!(matches!(GridSpec::new(4, &[0.0; 4], &[0.1; 4], &[8; 4]), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn weights_sum_to_box_length() {
        for n in [4, 5, 6, 7, 20] {
            let g = GridSpec::new(1, &[0.0], &[0.3], &[n]).unwrap();
            let s: f64 = g.axis_weights(0).iter().sum();
            assert!((s - 0.3 * (n - 1) as f64).abs() < 1e-13);
        }
    }
}
