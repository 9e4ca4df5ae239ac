//! Exact nearest-lattice-point decoding.
//!
//! Each catalog lattice is decoded in its native coordinates with the
//! classical algorithms: coordinate rounding for `Z^n`, parity repair for
//! `D_n`, residue sorting for `A_n`, and best-of-cosets for `D_4*`, `A_n*`
//! and `E_8`. [`brute_force_nearest`] is an independent exhaustive search
//! used as the test oracle.

use serde::Serialize;

use crate::catalog::{LatticeSpec, NativeKind, MAX_NATIVE};
use crate::enumerate::Triangular;
use crate::error::{LatticeError, Result};

/// Relative tolerance under which two squared distances count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeResult {
    /// Nearest lattice point, ambient coordinates.
    pub point: Vec<f64>,
    /// Integer coordinates of `point` with respect to the generator.
    pub coeffs: Vec<i64>,
    /// Squared distance from the query to `point`.
    pub dist2: f64,
    /// A second lattice point lies within tie tolerance of the same distance.
    pub tie: bool,
}

#[inline]
fn is_tie(best: f64, other: f64) -> bool {
    other - best <= TIE_TOLERANCE * best.max(1.0)
}

#[inline]
fn round_into(x: &[f64], out: &mut [f64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o = v.round();
    }
}

#[inline]
fn dist2(x: &[f64], p: &[f64]) -> f64 {
    x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `D_n`: round, then fix odd coordinate sums by re-rounding the worst
/// coordinate the other way.
fn decode_dn(x: &[f64], out: &mut [f64]) {
    round_into(x, out);
    let sum: f64 = out.iter().sum();
    if (sum as i64).rem_euclid(2) != 0 {
        let mut worst = 0;
        let mut worst_err = -1.0;
        for (k, (xv, fv)) in x.iter().zip(out.iter()).enumerate() {
            let err = (xv - fv).abs();
            if err > worst_err {
                worst_err = err;
                worst = k;
            }
        }
        out[worst] += if x[worst] >= out[worst] { 1.0 } else { -1.0 };
    }
}

/// Best of `base` and `base + shift·1` for a coset decoder `base`.
fn decode_two_cosets(x: &[f64], out: &mut [f64], shift: f64, base: fn(&[f64], &mut [f64])) {
    let n = x.len();
    let mut shifted = [0.0; MAX_NATIVE];
    let mut alt = [0.0; MAX_NATIVE];
    for k in 0..n {
        shifted[k] = x[k] - shift;
    }
    base(x, out);
    base(&shifted[..n], &mut alt[..n]);
    for v in &mut alt[..n] {
        *v += shift;
    }
    if dist2(x, &alt[..n]) < dist2(x, out) {
        out.copy_from_slice(&alt[..n]);
    }
}

/// `A_n` in `R^(n+1)`: round, then move the coordinates with the most
/// extreme rounding residues until the coordinate sum is zero.
fn decode_an(x: &[f64], out: &mut [f64]) {
    let m = x.len();
    round_into(x, out);
    let excess = out.iter().sum::<f64>().round() as i64;
    if excess == 0 {
        return;
    }
    let mut order = [0usize; MAX_NATIVE];
    for (k, o) in order[..m].iter_mut().enumerate() {
        *o = k;
    }
    let residue = |k: usize| x[k] - out[k];
    // Ascending residue; ties broken by index so decoding is deterministic.
    order[..m].sort_by(|&a, &b| residue(a).total_cmp(&residue(b)).then(a.cmp(&b)));
    if excess > 0 {
        for &k in &order[..excess as usize] {
            out[k] -= 1.0;
        }
    } else {
        for &k in order[..m].iter().rev().take((-excess) as usize) {
            out[k] += 1.0;
        }
    }
}

/// `A_n*` as the union of the cosets `[i] + A_n`, `i = 0..=n`, with glue
/// vector `[i] = (i/(n+1), …, i/(n+1), -(n+1-i)/(n+1), …)` (last `i` entries
/// negative).
fn decode_an_star(x: &[f64], out: &mut [f64]) {
    let m = x.len();
    let mf = m as f64;
    let mut best = f64::INFINITY;
    let mut shifted = [0.0; MAX_NATIVE];
    let mut cand = [0.0; MAX_NATIVE];
    let mut glue = [0.0; MAX_NATIVE];
    for i in 0..m {
        for (k, g) in glue[..m].iter_mut().enumerate() {
            *g = if k < m - i {
                i as f64 / mf
            } else {
                -((m - i) as f64) / mf
            };
        }
        for k in 0..m {
            shifted[k] = x[k] - glue[k];
        }
        decode_an(&shifted[..m], &mut cand[..m]);
        for k in 0..m {
            cand[k] += glue[k];
        }
        let d = dist2(x, &cand[..m]);
        if d < best {
            best = d;
            out.copy_from_slice(&cand[..m]);
        }
    }
}

/// Nearest point of the native lattice to native coordinates `y`.
#[inline]
pub(crate) fn decode_native(kind: NativeKind, y: &[f64], out: &mut [f64]) {
    match kind {
        NativeKind::Cubic(_) => round_into(y, out),
        NativeKind::D4 => decode_dn(y, out),
        NativeKind::D4Star => decode_two_cosets(y, out, 0.5, round_into),
        NativeKind::A(_) => decode_an(y, out),
        NativeKind::AStar(_) => decode_an_star(y, out),
        NativeKind::E8 => decode_two_cosets(y, out, 0.5, decode_dn),
    }
}

/// Decode without tie detection. Returns the ambient point in `point` and
/// the squared distance.
#[inline]
fn decode_fast(spec: &LatticeSpec, x: &[f64], point: &mut [f64]) -> f64 {
    let emb = &spec.embedding;
    let m = emb.native_dim;
    let mut y = [0.0; MAX_NATIVE];
    let mut p = [0.0; MAX_NATIVE];
    emb.to_native(x, &mut y);
    decode_native(spec.kind, &y[..m], &mut p[..m]);
    emb.from_native(&p[..m], point);
    let s = emb.scale;
    dist2(&y[..m], &p[..m]) / (s * s)
}

fn check_dim(spec: &LatticeSpec, x: &[f64]) -> Result<()> {
    if x.len() != spec.dim() {
        return Err(LatticeError::DimensionMismatch {
            expected: spec.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Exact nearest lattice point to `x`.
///
/// Panics if `x` does not have the lattice dimension.
pub fn nearest_point(spec: &LatticeSpec, x: &[f64]) -> DecodeResult {
    check_dim(spec, x).expect("query dimension");
    let d = spec.dim();
    let mut point = vec![0.0; d];
    decode_fast(spec, x, &mut point);
    // Recompute in ambient coordinates so `dist2` matches `point` exactly.
    let best = dist2(x, &point);

    // Any tied neighbour q has |q - p| <= 2·sqrt(best).
    let reach = 4.0 * best * (1.0 + 1e-6) + 1e-12;
    let mut tie = false;
    let mut cand = [0.0; MAX_NATIVE];
    for (norm2, v) in spec.short_vectors() {
        if norm2 > reach {
            break;
        }
        for k in 0..d {
            cand[k] = point[k] + v[k];
        }
        if is_tie(best, dist2(x, &cand[..d])) {
            tie = true;
            break;
        }
    }

    DecodeResult {
        coeffs: spec.coefficients(&point),
        point,
        dist2: best,
        tie,
    }
}

/// True iff the origin is a nearest lattice point of `x`. Points on the
/// Voronoi boundary count as inside.
#[inline]
pub fn in_voronoi(spec: &LatticeSpec, x: &[f64]) -> bool {
    let mut point = [0.0; MAX_NATIVE];
    let d2 = decode_fast(spec, x, &mut point[..spec.dim()]);
    let origin2: f64 = x.iter().map(|v| v * v).sum();
    origin2 <= d2 || is_tie(d2, origin2)
}

/// Membership without tie tolerance: the origin is at least as close as the
/// decoded point, compared in native coordinates. Used for bisection, where
/// a tolerance band would bias the located boundary.
#[inline]
pub(crate) fn origin_is_nearest(spec: &LatticeSpec, x: &[f64]) -> bool {
    let emb = &spec.embedding;
    let m = emb.native_dim;
    let mut y = [0.0; MAX_NATIVE];
    let mut p = [0.0; MAX_NATIVE];
    emb.to_native(x, &mut y);
    decode_native(spec.kind, &y[..m], &mut p[..m]);
    let origin2: f64 = y[..m].iter().map(|v| v * v).sum();
    origin2 <= dist2(&y[..m], &p[..m])
}

/// Exhaustive nearest-point search over all coefficient vectors with
/// entries in `[-bound, bound]`.
///
/// The search prunes branches whose partial distance already exceeds the
/// second-best candidate, so it remains exact within the box. Fails with
/// [`LatticeError::BoxTooSmall`] when the minimizer touches the box boundary.
pub fn brute_force_nearest(spec: &LatticeSpec, x: &[f64], bound: i64) -> Result<DecodeResult> {
    check_dim(spec, x)?;
    if bound < 2 {
        return Err(LatticeError::InvalidArgument(format!(
            "box bound must be at least 2, got {bound}"
        )));
    }
    let tri = Triangular::new(spec.generator());
    let mut best = f64::INFINITY;
    let mut second = f64::INFINITY;
    let mut best_z = vec![0i64; spec.dim()];
    tri.search(x, Some(bound), f64::INFINITY, |z, d2| {
        if d2 < best {
            second = best;
            best = d2;
            best_z.copy_from_slice(z);
        } else if d2 < second {
            second = d2;
        }
        // Keep exploring anything that could still tie with the best.
        if second.is_finite() {
            second + TIE_TOLERANCE * second.max(1.0) + 1e-12
        } else {
            f64::INFINITY
        }
    });
    if best_z.iter().any(|c| c.abs() == bound) {
        return Err(LatticeError::BoxTooSmall { bound });
    }
    let point = spec.combine(&best_z);
    let best = dist2(x, &point);
    Ok(DecodeResult {
        tie: second.is_finite() && is_tie(best, second),
        coeffs: best_z,
        point,
        dist2: best,
    })
}

/// Oracle for arbitrary queries: shift the query by the Babai rounding
/// point, then run [`brute_force_nearest`] on a box large enough to contain
/// every lattice point at least as close as the Babai point.
///
/// With `p = z G`, `|z_i| = |p · c_i| <= |x · c_i| + r |c_i|` where `c_i` is
/// column `i` of `G⁻¹` and `r` the Babai distance, which bounds the box.
pub fn oracle_nearest(spec: &LatticeSpec, x: &[f64]) -> Result<DecodeResult> {
    check_dim(spec, x)?;
    let d = spec.dim();
    let base = spec.coefficients(x);
    let offset = spec.combine(&base);
    let reduced: Vec<f64> = x.iter().zip(&offset).map(|(a, b)| a - b).collect();
    let radius = dist2(&reduced, &vec![0.0; d]).sqrt() * (1.0 + 1e-9) + 1e-12;

    let mut bound = 2i64;
    for i in 0..d {
        let col = spec.inverse_column(i);
        let proj: f64 = reduced.iter().zip(&col).map(|(a, b)| a * b).sum();
        let norm = col.iter().map(|c| c * c).sum::<f64>().sqrt();
        bound = bound.max((proj.abs() + radius * norm).ceil() as i64);
    }
    let local = brute_force_nearest(spec, &reduced, bound + 1)?;
    let coeffs: Vec<i64> = local.coeffs.iter().zip(&base).map(|(a, b)| a + b).collect();
    let point = spec.combine(&coeffs);
    Ok(DecodeResult {
        dist2: dist2(x, &point),
        coeffs,
        point,
        tie: local.tie,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{get_lattice, LatticeName};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(name: LatticeName) -> LatticeSpec {
        get_lattice(name).unwrap()
    }

    #[test]
    fn cubic_rounds() {
        let r = nearest_point(&spec(LatticeName::Z3), &[0.2, -0.4, 0.49]);
        assert_eq!(r.point, vec![0.0, 0.0, 0.0]);
        assert_eq!(r.coeffs, vec![0, 0, 0]);
        assert!(!r.tie);
    }

    #[test]
    fn d4_parity_repair() {
        let l = spec(LatticeName::D4);
        let x = [1.1, 0.9, 0.1, -0.1];
        let r = nearest_point(&l, &x);
        assert_eq!(r.point, vec![1.0, 1.0, 0.0, 0.0]);
        let b = brute_force_nearest(&l, &x, 3).unwrap();
        assert!((b.dist2 - r.dist2).abs() < 1e-12);
        assert_eq!(l.combine(&b.coeffs), r.point);
    }

    #[test]
    fn d4_odd_sum_query() {
        // Rounds to (1,0,0,0), odd; must move one coordinate.
        let l = spec(LatticeName::D4);
        let x = [0.9, 0.4, 0.0, 0.0];
        let r = nearest_point(&l, &x);
        assert_eq!(r.point, vec![1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn midpoint_tie_in_z2() {
        let r = brute_force_nearest(&spec(LatticeName::Z2), &[0.5, 0.0], 2).unwrap();
        assert!((r.dist2 - 0.25).abs() < 1e-15);
        assert!(r.tie);
        let n = nearest_point(&spec(LatticeName::Z2), &[0.5, 0.0]);
        assert!(n.tie);
    }

    #[test]
    fn hexagon_vertex_is_a_deep_hole() {
        let l = spec(LatticeName::A2);
        // Circumcentre of (0,0), (1,0), (1/2, √3/2).
        let hole = [0.5, 0.5 / 3f64.sqrt()];
        let r = brute_force_nearest(&l, &hole, 2).unwrap();
        assert!(r.tie);
        assert!((r.dist2 - l.covering_radius().powi(2)).abs() < 1e-12);
        assert!(nearest_point(&l, &hole).tie);
    }

    #[test]
    fn box_too_small_is_reported() {
        let l = spec(LatticeName::Z2);
        let err = brute_force_nearest(&l, &[2.1, 0.0], 2).unwrap_err();
        assert_eq!(err, LatticeError::BoxTooSmall { bound: 2 });
        assert!(brute_force_nearest(&l, &[2.1, 0.0], 3).is_ok());
        assert!(matches!(
            brute_force_nearest(&l, &[0.0, 0.0], 1),
            Err(LatticeError::InvalidArgument(_))
        ));
    }

    #[test]
    fn voronoi_membership_along_axis() {
        for name in [
            LatticeName::Z1,
            LatticeName::Z2,
            LatticeName::Z4,
            LatticeName::Z8,
        ] {
            let l = spec(name);
            let mut x = vec![0.0; l.dim()];
            x[0] = 0.49;
            assert!(in_voronoi(&l, &x));
            x[0] = 0.51;
            assert!(!in_voronoi(&l, &x));
            x[0] = 0.5;
            assert!(in_voronoi(&l, &x), "facet ties count as inside");
        }
    }

    #[test]
    fn decoding_is_idempotent_on_lattice_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in LatticeName::ALL {
            let l = spec(name);
            for _ in 0..200 {
                let z: Vec<i64> = (0..l.dim()).map(|_| rng.random_range(-3..=3)).collect();
                let p = l.combine(&z);
                let r = nearest_point(&l, &p);
                assert!(r.dist2 <= 1e-18, "{name}: {}", r.dist2);
                assert_eq!(r.coeffs, z, "{name}");
            }
        }
    }

    #[test]
    fn point_matches_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for name in LatticeName::ALL {
            let l = spec(name);
            for _ in 0..200 {
                let x: Vec<f64> = (0..l.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
                let r = nearest_point(&l, &x);
                let back = l.combine(&r.coeffs);
                for (a, b) in back.iter().zip(&r.point) {
                    assert!((a - b).abs() <= 1e-12, "{name}");
                }
                let d2 = dist2(&x, &r.point);
                assert!((d2 - r.dist2).abs() <= 1e-12 * d2.max(1.0));
            }
        }
    }

    #[test]
    fn agrees_with_brute_force_on_random_queries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for name in LatticeName::ALL {
            let l = spec(name);
            for _ in 0..300 {
                let x: Vec<f64> = (0..l.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
                let fast = nearest_point(&l, &x);
                let slow = oracle_nearest(&l, &x).unwrap();
                assert!(
                    (fast.dist2 - slow.dist2).abs() <= 1e-12,
                    "{name}: {} vs {}",
                    fast.dist2,
                    slow.dist2
                );
            }
        }
    }

    #[test]
    fn deep_holes_reach_covering_radius() {
        // Known deep holes in native coordinates, mapped to ambient space.
        let cases: Vec<(LatticeName, Vec<f64>)> = vec![
            (LatticeName::Z3, vec![0.5, 0.5, 0.5]),
            (LatticeName::D4, vec![1.0, 0.0, 0.0, 0.0]),
            (
                LatticeName::E8,
                vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            ),
        ];
        for (name, hole) in cases {
            let l = spec(name);
            let r = nearest_point(&l, &hole);
            assert!(
                (r.dist2.sqrt() - l.covering_radius()).abs() < 1e-12,
                "{name}"
            );
            assert!(r.tie);
        }
    }

    #[test]
    fn every_catalog_lattice_attains_its_covering_radius() {
        use crate::catalog::NativeKind;
        for name in LatticeName::ALL {
            let l = spec(name);
            let hole: Vec<f64> = match l.kind {
                NativeKind::Cubic(n) => vec![0.5; n],
                NativeKind::D4 => vec![1.0, 0.0, 0.0, 0.0],
                NativeKind::D4Star => vec![0.5, 0.5, 0.0, 0.0],
                NativeKind::E8 => {
                    let mut v = vec![0.0; 8];
                    v[0] = 1.0;
                    v
                }
                NativeKind::A(n) => {
                    let m = n + 1;
                    let a = m / 2;
                    (0..m)
                        .map(|j| if j < a { (m - a) as f64 } else { -(a as f64) } / m as f64)
                        .collect()
                }
                NativeKind::AStar(n) => (0..=n)
                    .map(|j| (j as f64 - n as f64 / 2.0) / (n + 1) as f64)
                    .collect(),
            };
            let mut x = vec![0.0; l.dim()];
            l.embedding.from_native(&hole, &mut x);
            let r = nearest_point(&l, &x);
            assert!(
                (r.dist2.sqrt() - l.covering_radius()).abs() < 1e-12,
                "{name}: {} vs {}",
                r.dist2.sqrt(),
                l.covering_radius()
            );
            assert!(r.tie, "{name}");
        }
    }
}
