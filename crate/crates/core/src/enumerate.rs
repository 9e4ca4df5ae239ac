//! Depth-first enumeration of lattice points inside a ball, in coefficient
//! space, using the triangular factor of the generator.
//!
//! Shared by the short-vector tables used for tie detection and by the
//! exhaustive box search that serves as the decoder oracle. Neither path
//! touches the per-lattice decoding algorithms.

use nalgebra::DMatrix;

pub(crate) struct Triangular {
    dim: usize,
    /// Upper-triangular factor, row-major: `upper[j * dim + i]` for `i >= j`.
    upper: Vec<f64>,
    /// Orthogonal factor, row-major.
    ortho: Vec<f64>,
}

impl Triangular {
    /// Factor `generator = Rᵀ Qᵀ` so that `|x - z G|² = |x Q - z Rᵀ|²`.
    pub(crate) fn new(generator: &DMatrix<f64>) -> Self {
        let dim = generator.nrows();
        let qr = generator.transpose().qr();
        let q = qr.q();
        let r = qr.r();
        let mut upper = vec![0.0; dim * dim];
        let mut ortho = vec![0.0; dim * dim];
        for j in 0..dim {
            for i in 0..dim {
                upper[j * dim + i] = r[(j, i)];
                ortho[j * dim + i] = q[(j, i)];
            }
        }
        Self { dim, upper, ortho }
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|j| (0..d).map(|i| x[i] * self.ortho[i * d + j]).sum())
            .collect()
    }

    /// Visit every coefficient vector `z` (entries within `[-bound, bound]`
    /// when a bound is given) with `|x - zG|² <= radius2`. The visitor
    /// returns the radius to use from then on, which must not grow.
    pub(crate) fn search<F>(&self, x: &[f64], bound: Option<i64>, radius2: f64, mut visit: F)
    where
        F: FnMut(&[i64], f64) -> f64,
    {
        let y = self.project(x);
        let mut z = vec![0i64; self.dim];
        let mut radius2 = radius2;
        self.descend(&y, bound, self.dim, 0.0, &mut z, &mut radius2, &mut visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn descend<F>(
        &self,
        y: &[f64],
        bound: Option<i64>,
        level: usize,
        partial: f64,
        z: &mut [i64],
        radius2: &mut f64,
        visit: &mut F,
    ) where
        F: FnMut(&[i64], f64) -> f64,
    {
        if level == 0 {
            *radius2 = visit(z, partial).min(*radius2);
            return;
        }
        let d = self.dim;
        let j = level - 1;
        let rjj = self.upper[j * d + j];
        let mut shift = y[j];
        for i in (j + 1)..d {
            shift -= z[i] as f64 * self.upper[j * d + i];
        }
        let center = shift / rjj;

        let (mut lo, mut hi) = match bound {
            Some(b) => (-b, b),
            None => (i64::MIN, i64::MAX),
        };
        if radius2.is_finite() {
            let width = ((*radius2 - partial).max(0.0)).sqrt() / rjj.abs();
            lo = lo.max((center - width).ceil() as i64);
            hi = hi.min((center + width).floor() as i64);
        }
        if lo > hi {
            return;
        }

        // Closest values first so the radius shrinks early.
        let mut values: Vec<i64> = (lo..=hi).collect();
        values.sort_by(|a, b| {
            let da = (*a as f64 - center).abs();
            let db = (*b as f64 - center).abs();
            da.total_cmp(&db).then(a.cmp(b))
        });
        for v in values {
            let diff = rjj * (center - v as f64);
            let next = partial + diff * diff;
            if next > *radius2 {
                // Sorted by distance from the center: the rest are farther.
                break;
            }
            z[j] = v;
            self.descend(y, bound, j, next, z, radius2, visit);
        }
        z[j] = 0;
    }
}
