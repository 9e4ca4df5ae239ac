//! Catalog of sampling lattices and their duals.
//!
//! Every lattice is stored with a square generator (rows are basis vectors)
//! together with the closed-form packing and covering radii of its native
//! construction. The native construction is what the decoders work in; an
//! [`Embedding`] maps ambient coordinates onto it. For `A_n` and `A_n*` the
//! native space is the zero-sum hyperplane of `R^(n+1)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::enumerate::Triangular;
use crate::error::{LatticeError, Result};

/// Largest ambient dimension in the catalog.
pub const MAX_DIM: usize = 8;
/// Largest native dimension (`A_8` lives in `R^9`).
pub(crate) const MAX_NATIVE: usize = MAX_DIM + 1;

/// Catalog identifier. Names refer to the lattice itself; whether it is used
/// for sampling or as a frequency-domain lattice depends on the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LatticeName {
    Z1,
    Z2,
    Z3,
    Z4,
    Z8,
    A2,
    #[serde(rename = "A2_dual")]
    A2Dual,
    A3,
    #[serde(rename = "A3_dual")]
    A3Dual,
    A4,
    #[serde(rename = "A4_dual")]
    A4Dual,
    D4,
    #[serde(rename = "D4_dual")]
    D4Dual,
    E8,
    A8,
    #[serde(rename = "A8_dual")]
    A8Dual,
}

impl LatticeName {
    pub const ALL: [LatticeName; 16] = [
        LatticeName::Z1,
        LatticeName::Z2,
        LatticeName::A2,
        LatticeName::A2Dual,
        LatticeName::Z3,
        LatticeName::A3Dual,
        LatticeName::A3,
        LatticeName::Z4,
        LatticeName::D4,
        LatticeName::D4Dual,
        LatticeName::A4,
        LatticeName::A4Dual,
        LatticeName::Z8,
        LatticeName::E8,
        LatticeName::A8,
        LatticeName::A8Dual,
    ];

    /// The twelve sampling lattices of the threshold table, in table order.
    pub const TABLE: [LatticeName; 12] = [
        LatticeName::Z1,
        LatticeName::Z2,
        LatticeName::A2,
        LatticeName::Z3,
        LatticeName::A3Dual,
        LatticeName::A3,
        LatticeName::Z4,
        LatticeName::D4,
        LatticeName::A4,
        LatticeName::Z8,
        LatticeName::E8,
        LatticeName::A8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LatticeName::Z1 => "Z1",
            LatticeName::Z2 => "Z2",
            LatticeName::Z3 => "Z3",
            LatticeName::Z4 => "Z4",
            LatticeName::Z8 => "Z8",
            LatticeName::A2 => "A2",
            LatticeName::A2Dual => "A2_dual",
            LatticeName::A3 => "A3",
            LatticeName::A3Dual => "A3_dual",
            LatticeName::A4 => "A4",
            LatticeName::A4Dual => "A4_dual",
            LatticeName::D4 => "D4",
            LatticeName::D4Dual => "D4_dual",
            LatticeName::E8 => "E8",
            LatticeName::A8 => "A8",
            LatticeName::A8Dual => "A8_dual",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            LatticeName::Z1 => 1,
            LatticeName::Z2 | LatticeName::A2 | LatticeName::A2Dual => 2,
            LatticeName::Z3 | LatticeName::A3 | LatticeName::A3Dual => 3,
            LatticeName::Z4
            | LatticeName::A4
            | LatticeName::A4Dual
            | LatticeName::D4
            | LatticeName::D4Dual => 4,
            LatticeName::Z8 | LatticeName::E8 | LatticeName::A8 | LatticeName::A8Dual => 8,
        }
    }

    /// Name of the dual lattice. Self-dual lattices map to themselves.
    pub fn dual(self) -> LatticeName {
        match self {
            LatticeName::A2 => LatticeName::A2Dual,
            LatticeName::A2Dual => LatticeName::A2,
            LatticeName::A3 => LatticeName::A3Dual,
            LatticeName::A3Dual => LatticeName::A3,
            LatticeName::A4 => LatticeName::A4Dual,
            LatticeName::A4Dual => LatticeName::A4,
            LatticeName::D4 => LatticeName::D4Dual,
            LatticeName::D4Dual => LatticeName::D4,
            LatticeName::A8 => LatticeName::A8Dual,
            LatticeName::A8Dual => LatticeName::A8,
            other => other,
        }
    }

    /// True for the cubic lattices `Z^d`.
    pub fn is_cubic(self) -> bool {
        matches!(
            self,
            LatticeName::Z1 | LatticeName::Z2 | LatticeName::Z3 | LatticeName::Z4 | LatticeName::Z8
        )
    }
}

impl fmt::Display for LatticeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LatticeName {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        if let Some(name) = LatticeName::ALL
            .iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(key))
        {
            return Ok(*name);
        }
        match key.to_ascii_lowercase().as_str() {
            "z" => Ok(LatticeName::Z1),
            "bcc" => Ok(LatticeName::A3Dual),
            "fcc" => Ok(LatticeName::A3),
            "hex" | "hexagonal" => Ok(LatticeName::A2),
            _ => Err(LatticeError::UnknownLattice(s.to_string())),
        }
    }
}

/// The lattice family a spec is decoded as, in native coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NativeKind {
    Cubic(usize),
    D4,
    D4Star,
    /// `A_n` as zero-sum integer vectors in `R^(n+1)`.
    A(usize),
    /// `A_n*`, the union of `n+1` cosets of `A_n`.
    AStar(usize),
    /// Even coordinate system: `D_8 ∪ (D_8 + ½)`.
    E8,
}

impl NativeKind {
    pub(crate) fn native_dim(self) -> usize {
        match self {
            NativeKind::Cubic(n) => n,
            NativeKind::D4 | NativeKind::D4Star => 4,
            NativeKind::A(n) | NativeKind::AStar(n) => n + 1,
            NativeKind::E8 => 8,
        }
    }

    fn dual(self) -> NativeKind {
        match self {
            NativeKind::Cubic(n) => NativeKind::Cubic(n),
            NativeKind::D4 => NativeKind::D4Star,
            NativeKind::D4Star => NativeKind::D4,
            NativeKind::A(n) => NativeKind::AStar(n),
            NativeKind::AStar(n) => NativeKind::A(n),
            NativeKind::E8 => NativeKind::E8,
        }
    }

    /// Packing and covering radius of the native construction.
    fn radii(self) -> (f64, f64) {
        let half_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            NativeKind::Cubic(n) => (0.5, (n as f64).sqrt() / 2.0),
            NativeKind::D4 => (half_sqrt2, 1.0),
            NativeKind::D4Star => (0.5, half_sqrt2),
            NativeKind::A(n) => {
                let m = (n + 1) as f64;
                let a = ((n + 1) / 2) as f64;
                (half_sqrt2, (a * (m - a) / m).sqrt())
            }
            NativeKind::AStar(n) => {
                let nf = n as f64;
                let m = nf + 1.0;
                (0.5 * (nf / m).sqrt(), (nf * (nf + 2.0) / (12.0 * m)).sqrt())
            }
            NativeKind::E8 => (half_sqrt2, 1.0),
        }
    }
}

/// Similarity map between ambient `R^d` and the native coordinates:
/// `native = scale * x * Q`, where `Q` is `d × m` with orthonormal rows.
#[derive(Debug, Clone)]
pub(crate) struct Embedding {
    pub(crate) dim: usize,
    pub(crate) native_dim: usize,
    /// Row-major `d × m`; `None` means the identity (`d == m`).
    q: Option<Vec<f64>>,
    pub(crate) scale: f64,
}

impl Embedding {
    fn identity(dim: usize) -> Self {
        Self {
            dim,
            native_dim: dim,
            q: None,
            scale: 1.0,
        }
    }

    fn from_matrix(q: &DMatrix<f64>, scale: f64) -> Self {
        let (d, m) = q.shape();
        let mut flat = vec![0.0; d * m];
        for i in 0..d {
            for j in 0..m {
                flat[i * m + j] = q[(i, j)];
            }
        }
        Self {
            dim: d,
            native_dim: m,
            q: Some(flat),
            scale,
        }
    }

    fn matrix(&self) -> DMatrix<f64> {
        match &self.q {
            Some(flat) => DMatrix::from_row_slice(self.dim, self.native_dim, flat),
            None => DMatrix::identity(self.dim, self.dim),
        }
    }

    #[inline]
    pub(crate) fn to_native(&self, x: &[f64], out: &mut [f64]) {
        let m = self.native_dim;
        match &self.q {
            None => {
                for (o, xi) in out[..m].iter_mut().zip(x) {
                    *o = self.scale * xi;
                }
            }
            Some(q) => {
                for (j, o) in out[..m].iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (i, xi) in x.iter().enumerate() {
                        acc += xi * q[i * m + j];
                    }
                    *o = self.scale * acc;
                }
            }
        }
    }

    #[inline]
    pub(crate) fn from_native(&self, y: &[f64], out: &mut [f64]) {
        let m = self.native_dim;
        match &self.q {
            None => {
                for (o, yi) in out[..self.dim].iter_mut().zip(y) {
                    *o = yi / self.scale;
                }
            }
            Some(q) => {
                for (i, o) in out[..self.dim].iter_mut().enumerate() {
                    let row = &q[i * m..(i + 1) * m];
                    let acc: f64 = row.iter().zip(y).map(|(a, b)| a * b).sum();
                    *o = acc / self.scale;
                }
            }
        }
    }
}

/// A catalog lattice with its generator and geometric constants.
#[derive(Debug, Clone)]
pub struct LatticeSpec {
    name: LatticeName,
    generator: DMatrix<f64>,
    generator_inv: DMatrix<f64>,
    cell_volume: f64,
    packing_radius: f64,
    covering_radius: f64,
    pub(crate) kind: NativeKind,
    pub(crate) embedding: Embedding,
    /// Nonzero lattice vectors of norm at most twice the covering radius,
    /// flattened with stride `dim`, sorted by squared norm.
    short_vectors: Vec<f64>,
    short_norms2: Vec<f64>,
}

impl LatticeSpec {
    fn assemble(
        name: LatticeName,
        kind: NativeKind,
        generator: DMatrix<f64>,
        embedding: Embedding,
    ) -> Result<Self> {
        let generator_inv = generator
            .clone()
            .try_inverse()
            .ok_or(LatticeError::SingularGenerator)?;
        debug_assert_eq!(embedding.native_dim, kind.native_dim());
        let (rho, cover) = kind.radii();
        let mut spec = Self {
            name,
            cell_volume: generator.determinant().abs(),
            packing_radius: rho / embedding.scale,
            covering_radius: cover / embedding.scale,
            generator,
            generator_inv,
            kind,
            embedding,
            short_vectors: Vec::new(),
            short_norms2: Vec::new(),
        };
        spec.fill_short_vectors();
        Ok(spec)
    }

    fn fill_short_vectors(&mut self) {
        let d = self.dim();
        let radius = 2.0 * self.covering_radius * (1.0 + 1e-9);
        let tri = Triangular::new(&self.generator);
        let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
        tri.search(&vec![0.0; d], None, radius * radius, |z, norm2| {
            if z.iter().any(|&c| c != 0) {
                let v = self.combine(z);
                found.push((norm2, v));
            }
            f64::INFINITY
        });
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        self.short_norms2 = found.iter().map(|(n, _)| *n).collect();
        self.short_vectors = found.into_iter().flat_map(|(_, v)| v).collect();
    }

    /// Lattice point `z G` for an integer coefficient vector.
    pub fn combine(&self, coeffs: &[i64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for (j, o) in out.iter_mut().enumerate() {
                    *o += c as f64 * self.generator[(i, j)];
                }
            }
        }
        out
    }

    /// Integer coordinates of a lattice point with respect to the generator.
    pub fn coefficients(&self, point: &[f64]) -> Vec<i64> {
        let d = self.dim();
        (0..d)
            .map(|j| {
                let c: f64 = (0..d).map(|i| point[i] * self.generator_inv[(i, j)]).sum();
                c.round() as i64
            })
            .collect()
    }

    /// Column `i` of the inverse generator.
    pub(crate) fn inverse_column(&self, i: usize) -> Vec<f64> {
        self.generator_inv.column(i).iter().copied().collect()
    }

    pub fn name(&self) -> LatticeName {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    /// Rows are basis vectors.
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    pub fn packing_radius(&self) -> f64 {
        self.packing_radius
    }

    pub fn covering_radius(&self) -> f64 {
        self.covering_radius
    }

    pub(crate) fn short_vectors(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.short_norms2
            .iter()
            .copied()
            .zip(self.short_vectors.chunks_exact(self.dim()))
    }

    #[cfg(test)]
    pub(crate) fn with_radii(&self, packing_radius: f64, covering_radius: f64) -> LatticeSpec {
        LatticeSpec {
            packing_radius,
            covering_radius,
            ..self.clone()
        }
    }

    /// The lattice scaled by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> LatticeSpec {
        assert!(
            factor > 0.0 && factor.is_finite(),
            "scale factor must be positive"
        );
        let d = self.dim() as i32;
        let mut embedding = self.embedding.clone();
        embedding.scale /= factor;
        LatticeSpec {
            name: self.name,
            generator: &self.generator * factor,
            generator_inv: &self.generator_inv / factor,
            cell_volume: self.cell_volume * factor.powi(d),
            packing_radius: self.packing_radius * factor,
            covering_radius: self.covering_radius * factor,
            kind: self.kind,
            embedding,
            short_vectors: self.short_vectors.iter().map(|v| v * factor).collect(),
            short_norms2: self
                .short_norms2
                .iter()
                .map(|n| n * factor * factor)
                .collect(),
        }
    }

    /// The lattice rescaled so that its Voronoi cell has unit volume.
    pub fn with_unit_volume(&self) -> LatticeSpec {
        let d = self.dim() as f64;
        let spec = self.scaled(self.cell_volume.powf(-1.0 / d));
        // Pin the volume: the rescaled determinant is one up to rounding.
        LatticeSpec {
            cell_volume: 1.0,
            ..spec
        }
    }

    /// The lattice rotated by an orthogonal `d × d` matrix acting on row
    /// vectors (`x ↦ x O`).
    pub fn rotated(&self, orthogonal: &DMatrix<f64>) -> Result<LatticeSpec> {
        let d = self.dim();
        if orthogonal.shape() != (d, d) {
            return Err(LatticeError::DimensionMismatch {
                expected: d,
                got: orthogonal.nrows(),
            });
        }
        let q = orthogonal.transpose() * self.embedding.matrix();
        let embedding = Embedding::from_matrix(&q, self.embedding.scale);
        LatticeSpec::assemble(
            self.name,
            self.kind,
            &self.generator * orthogonal,
            embedding,
        )
    }
}

/// The two normalized threshold rates of a sampling lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPair {
    /// Below this rate the error variance equals the universal lower bound.
    pub low: f64,
    /// At or above this rate reconstruction is error-free.
    pub high: f64,
}

fn a_n_basis(n: usize) -> DMatrix<f64> {
    // Rows e_0 - e_i, i = 1..n.
    DMatrix::from_fn(n, n + 1, |i, j| {
        if j == 0 {
            1.0
        } else if j == i + 1 {
            -1.0
        } else {
            0.0
        }
    })
}

/// Orthonormal rows spanning the row space of `basis`, oriented so that the
/// ambient generator `basis * Qᵀ` is lower triangular with positive diagonal.
fn orthonormal_rows(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = basis.transpose().qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..r.nrows() {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q.transpose()
}

fn a_n_lattice(name: LatticeName, n: usize, scale: f64) -> Result<LatticeSpec> {
    let basis = a_n_basis(n);
    let q = orthonormal_rows(&basis);
    let generator = (&basis * q.transpose()) / scale;
    LatticeSpec::assemble(
        name,
        NativeKind::A(n),
        generator,
        Embedding::from_matrix(&q, scale),
    )
}

fn cubic(name: LatticeName, n: usize) -> Result<LatticeSpec> {
    LatticeSpec::assemble(
        name,
        NativeKind::Cubic(n),
        DMatrix::identity(n, n),
        Embedding::identity(n),
    )
}

/// Look up a catalog lattice in its standard construction.
///
/// `A2` is the hexagonal lattice with minimum distance one, rows `(1, 0)` and
/// `(1/2, √3/2)`. The other `A_n` keep their native scale (minimum norm √2).
/// Dual entries are produced by [`dual_lattice`] from their primal.
pub fn get_lattice(name: LatticeName) -> Result<LatticeSpec> {
    match name {
        LatticeName::Z1 => cubic(name, 1),
        LatticeName::Z2 => cubic(name, 2),
        LatticeName::Z3 => cubic(name, 3),
        LatticeName::Z4 => cubic(name, 4),
        LatticeName::Z8 => cubic(name, 8),
        LatticeName::A2 => a_n_lattice(name, 2, std::f64::consts::SQRT_2),
        LatticeName::A3 => a_n_lattice(name, 3, 1.0),
        LatticeName::A4 => a_n_lattice(name, 4, 1.0),
        LatticeName::A8 => a_n_lattice(name, 8, 1.0),
        LatticeName::D4 => {
            #[rustfmt::skip]
            let generator = DMatrix::from_row_slice(4, 4, &[
                1.0,  1.0,  0.0,  0.0,
                1.0, -1.0,  0.0,  0.0,
                0.0,  1.0, -1.0,  0.0,
                0.0,  0.0,  1.0, -1.0,
            ]);
            LatticeSpec::assemble(name, NativeKind::D4, generator, Embedding::identity(4))
        }
        LatticeName::E8 => {
            #[rustfmt::skip]
            let generator = DMatrix::from_row_slice(8, 8, &[
                 2.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0, 0.0,
                -1.0,  1.0,  0.0,  0.0,  0.0,  0.0,  0.0, 0.0,
                 0.0, -1.0,  1.0,  0.0,  0.0,  0.0,  0.0, 0.0,
                 0.0,  0.0, -1.0,  1.0,  0.0,  0.0,  0.0, 0.0,
                 0.0,  0.0,  0.0, -1.0,  1.0,  0.0,  0.0, 0.0,
                 0.0,  0.0,  0.0,  0.0, -1.0,  1.0,  0.0, 0.0,
                 0.0,  0.0,  0.0,  0.0,  0.0, -1.0,  1.0, 0.0,
                 0.5,  0.5,  0.5,  0.5,  0.5,  0.5,  0.5, 0.5,
            ]);
            LatticeSpec::assemble(name, NativeKind::E8, generator, Embedding::identity(8))
        }
        LatticeName::A2Dual
        | LatticeName::A3Dual
        | LatticeName::A4Dual
        | LatticeName::A8Dual
        | LatticeName::D4Dual => dual_lattice(&get_lattice(name.dual())?),
    }
}

/// Unit dual: generator `G' = G^{-T}`, so `G' Gᵀ = I` and the cell volumes
/// multiply to one.
pub fn dual_lattice(spec: &LatticeSpec) -> Result<LatticeSpec> {
    let generator = spec.generator_inv.transpose();
    let mut embedding = spec.embedding.clone();
    embedding.scale = 1.0 / embedding.scale;
    LatticeSpec::assemble(spec.name.dual(), spec.kind.dual(), generator, embedding)
}

/// Frequency-domain lattice of a sampling lattice, rescaled to unit cell
/// volume so that the normalized rate `r/ω0` is simply `1/ω0`.
pub fn frequency_lattice(sampling: &LatticeSpec) -> Result<LatticeSpec> {
    Ok(dual_lattice(sampling)?.with_unit_volume())
}

/// Threshold rates of a sampling lattice, computed on its dual:
/// `vol^{1/d} / R` and `vol^{1/d} / ρ`. Invariant under scaling.
pub fn normalized_thresholds(spec: &LatticeSpec) -> ThresholdPair {
    let dual = dual_lattice(spec).expect("catalog generators are invertible");
    let rate = dual.cell_volume().powf(1.0 / dual.dim() as f64);
    ThresholdPair {
        low: rate / dual.covering_radius(),
        high: rate / dual.packing_radius(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }

    /// Shortest nonzero vector by exhaustive search over `[-3, 3]^d`.
    fn shortest_vector_box(spec: &LatticeSpec) -> f64 {
        let d = spec.dim();
        let mut best = f64::INFINITY;
        let mut z = vec![-3i64; d];
        loop {
            if z.iter().any(|&c| c != 0) {
                let p = spec.combine(&z);
                let n2: f64 = p.iter().map(|v| v * v).sum();
                best = best.min(n2);
            }
            let mut k = 0;
            while k < d {
                z[k] += 1;
                if z[k] <= 3 {
                    break;
                }
                z[k] = -3;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        best.sqrt()
    }

    #[test]
    fn z2_constants() {
        let spec = get_lattice(LatticeName::Z2).unwrap();
        assert_eq!(spec.generator(), &DMatrix::<f64>::identity(2, 2));
        assert_eq!(spec.cell_volume(), 1.0);
        assert_eq!(spec.packing_radius(), 0.5);
        assert!((spec.covering_radius() - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn a2_is_unit_hexagonal() {
        let spec = get_lattice(LatticeName::A2).unwrap();
        let g = spec.generator();
        let s3 = 3f64.sqrt();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-14 && g[(0, 1)].abs() < 1e-14);
        assert!((g[(1, 0)] - 0.5).abs() < 1e-14 && (g[(1, 1)] - s3 / 2.0).abs() < 1e-14);
        assert!(rel_close(spec.cell_volume(), s3 / 2.0, 1e-12));
        assert!(rel_close(spec.packing_radius(), 0.5, 1e-12));
        assert!(rel_close(spec.covering_radius(), 1.0 / s3, 1e-12));
    }

    #[test]
    fn e8_constants() {
        let spec = get_lattice(LatticeName::E8).unwrap();
        assert_eq!(spec.dim(), 8);
        assert!(rel_close(spec.cell_volume(), 1.0, 1e-12));
        assert!(rel_close(spec.packing_radius(), 0.5f64.sqrt(), 1e-12));
        assert!(rel_close(spec.covering_radius(), 1.0, 1e-12));
    }

    #[test]
    fn packing_radius_matches_shortest_vector() {
        for name in LatticeName::ALL {
            let spec = get_lattice(name).unwrap();
            let shortest = shortest_vector_box(&spec);
            assert!(
                rel_close(2.0 * spec.packing_radius(), shortest, 1e-12),
                "{name}: 2ρ = {} but shortest = {shortest}",
                2.0 * spec.packing_radius()
            );
            assert!(spec.packing_radius() <= spec.covering_radius());
        }
    }

    #[test]
    fn closed_form_volumes() {
        let s = |x: f64| x.sqrt();
        let expected = [
            (LatticeName::Z1, 1.0),
            (LatticeName::A2, s(3.0) / 2.0),
            (LatticeName::A2Dual, 2.0 / s(3.0)),
            (LatticeName::A3, 2.0),
            (LatticeName::A3Dual, 0.5),
            (LatticeName::D4, 2.0),
            (LatticeName::D4Dual, 0.5),
            (LatticeName::A4, s(5.0)),
            (LatticeName::A4Dual, 1.0 / s(5.0)),
            (LatticeName::E8, 1.0),
            (LatticeName::A8, 3.0),
            (LatticeName::A8Dual, 1.0 / 3.0),
        ];
        for (name, vol) in expected {
            let spec = get_lattice(name).unwrap();
            assert!(rel_close(spec.cell_volume(), vol, 1e-12), "{name}");
        }
    }

    #[test]
    fn dual_generator_is_inverse_transpose() {
        for name in LatticeName::ALL {
            let spec = get_lattice(name).unwrap();
            let dual = dual_lattice(&spec).unwrap();
            let prod = dual.generator() * spec.generator().transpose();
            let eye = DMatrix::<f64>::identity(spec.dim(), spec.dim());
            assert!((prod - eye).abs().max() < 1e-12, "{name}");
            assert!((spec.cell_volume() * dual.cell_volume() - 1.0).abs() < 1e-12);
            assert_eq!(dual.name(), name.dual());
        }
    }

    #[test]
    fn dual_of_a2_volume() {
        let dual = dual_lattice(&get_lattice(LatticeName::A2).unwrap()).unwrap();
        assert!(rel_close(dual.cell_volume(), 2.0 / 3f64.sqrt(), 1e-12));
    }

    #[test]
    fn duality_is_an_involution() {
        for name in LatticeName::ALL {
            let spec = get_lattice(name).unwrap();
            let back = dual_lattice(&dual_lattice(&spec).unwrap()).unwrap();
            // Mutual membership of basis vectors.
            for (a, b) in [(&spec, &back), (&back, &spec)] {
                for row in a.generator().row_iter() {
                    let v: Vec<f64> = row.iter().copied().collect();
                    let z = b.coefficients(&v);
                    let p = b.combine(&z);
                    let err = v
                        .iter()
                        .zip(&p)
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    assert!(err < 1e-9, "{name}");
                }
            }
        }
    }

    #[test]
    fn table_rows() {
        let s = f64::sqrt;
        let p = f64::powf;
        let rows = [
            (LatticeName::Z1, 2.0, 2.0),
            (LatticeName::Z2, s(2.0), 2.0),
            (
                LatticeName::A2,
                p(3.0, 0.75) / s(2.0),
                p(3.0, 0.25) * s(2.0),
            ),
            (LatticeName::Z3, 2.0 / s(3.0), 2.0),
            (LatticeName::A3Dual, p(2.0, 1.0 / 3.0), p(2.0, 5.0 / 6.0)),
            (
                LatticeName::A3,
                p(2.0, 5.0 / 3.0) / s(5.0),
                p(2.0, 5.0 / 3.0) / s(3.0),
            ),
            (LatticeName::Z4, 1.0, 2.0),
            (LatticeName::D4, p(2.0, 0.25), p(2.0, 0.75)),
            (
                LatticeName::A4,
                p(5.0, 3.0 / 8.0) / s(2.0),
                p(5.0, 3.0 / 8.0),
            ),
            (LatticeName::Z8, 1.0 / s(2.0), 2.0),
            (LatticeName::E8, 1.0, s(2.0)),
            (
                LatticeName::A8,
                p(3.0, 11.0 / 8.0) / s(20.0),
                p(3.0, 7.0 / 8.0) / s(2.0),
            ),
        ];
        for (name, low, high) in rows {
            let t = normalized_thresholds(&get_lattice(name).unwrap());
            assert!(rel_close(t.low, low, 1e-9), "{name} low {} vs {low}", t.low);
            assert!(
                rel_close(t.high, high, 1e-9),
                "{name} high {} vs {high}",
                t.high
            );
            assert!(0.0 < t.low && t.low <= t.high);
        }
    }

    #[test]
    fn thresholds_are_scale_invariant() {
        for name in LatticeName::TABLE {
            let spec = get_lattice(name).unwrap();
            let base = normalized_thresholds(&spec);
            for s in [0.5, 2.0, 3.7] {
                let t = normalized_thresholds(&spec.scaled(s));
                assert!(rel_close(t.low, base.low, 1e-12), "{name} x{s}");
                assert!(rel_close(t.high, base.high, 1e-12), "{name} x{s}");
            }
        }
    }

    #[test]
    fn names_round_trip_and_aliases() {
        for name in LatticeName::ALL {
            assert_eq!(name.as_str().parse::<LatticeName>().unwrap(), name);
            assert_eq!(name.dual().dual(), name);
            assert_eq!(name.dim(), get_lattice(name).unwrap().dim());
        }
        assert_eq!("bcc".parse::<LatticeName>().unwrap(), LatticeName::A3Dual);
        assert_eq!(
            "a3_DUAL".parse::<LatticeName>().unwrap(),
            LatticeName::A3Dual
        );
        assert!(matches!(
            "Q7".parse::<LatticeName>(),
            Err(LatticeError::UnknownLattice(_))
        ));
    }

    #[test]
    fn unit_volume_rescaling() {
        for name in LatticeName::ALL {
            let spec = get_lattice(name).unwrap().with_unit_volume();
            assert!(
                (spec.generator().determinant().abs() - 1.0).abs() < 1e-12,
                "{name}"
            );
        }
    }
}
