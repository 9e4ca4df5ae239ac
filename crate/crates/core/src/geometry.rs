//! Ball volumes, isotropic direction sampling and the radial Voronoi
//! boundary profile.
//!
//! The Voronoi cell is convex and contains the origin, so along each unit
//! direction `u` the set `{ω ≥ 0 : ω u ∈ Ω}` is an interval `[0, t(u)]`.
//! A [`RadialProfile`] stores `t(u)` for many random directions; from it
//! `vol(Ω ∩ B(ω0)) = V_d(1) · E[min(t, ω0)^d]` for every radius at once.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::catalog::{LatticeSpec, MAX_DIM};
use crate::decoder::origin_is_nearest;
use crate::error::{LatticeError, Result};
use crate::par::Execution;

/// Default absolute bisection tolerance at unit cell volume.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Relative margin used to check that `[ρ, R]` brackets the boundary.
const BRACKET_MARGIN: f64 = 1e-9;

/// `Γ(d/2 + 1)` for integer `d ≥ 0`, by the recurrence from `Γ(1)` or `Γ(3/2)`.
pub fn gamma_half_dim(d: usize) -> f64 {
    let target = d as f64 / 2.0 + 1.0;
    let (mut g, mut arg) = if d % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt() / 2.0, 1.5)
    };
    while arg < target {
        g *= arg;
        arg += 1.0;
    }
    g
}

/// Volume of the `d`-dimensional ball: `π^{d/2} r^d / Γ(d/2 + 1)`.
///
/// The unit-ball volume is built by `V_d = V_{d-2} · 2π/d` from `V_0 = 1`,
/// `V_1 = 2`, which keeps `d = 1` and `d = 2` exact.
pub fn ball_volume(d: usize, radius: f64) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    assert!(radius >= 0.0, "radius must be nonnegative");
    let mut unit = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        unit *= 2.0 * PI / k as f64;
        k += 2;
    }
    unit * radius.powi(d as i32)
}

/// Flat power spectrum on the ball of radius `bandwidth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicSpectrum {
    pub dim: usize,
    /// Angular bandwidth `ω0 > 0`.
    pub bandwidth: f64,
    /// Spectral density `S0 > 0` inside the ball.
    pub amplitude: f64,
}

impl IsotropicSpectrum {
    /// Amplitude chosen so that the process variance is one.
    pub fn normalized(dim: usize, bandwidth: f64) -> Self {
        let amplitude = (2.0 * PI).powi(dim as i32) / ball_volume(dim, bandwidth);
        Self {
            dim,
            bandwidth,
            amplitude,
        }
    }

    /// `σ² = S0 · vol Δ / (2π)^d`.
    pub fn variance(&self) -> f64 {
        self.amplitude * ball_volume(self.dim, self.bandwidth) / (2.0 * PI).powi(self.dim as i32)
    }

    pub fn density(&self, omega: &[f64]) -> f64 {
        let norm2: f64 = omega.iter().map(|w| w * w).sum();
        if norm2 <= self.bandwidth * self.bandwidth {
            self.amplitude
        } else {
            0.0
        }
    }
}

/// Independent RNG stream for direction `index` under `seed`.
pub fn direction_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn sample_direction_into<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            norm2 += *v * *v;
        }
        if out.len() == 1 && norm2 > 0.0 {
            out[0] = out[0].signum();
            return;
        }
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            for v in out.iter_mut() {
                *v *= inv;
            }
            return;
        }
    }
}

/// Uniformly distributed unit vector in `R^d` (normalized Gaussian).
pub fn sample_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    assert!(d >= 1, "dimension must be at least 1");
    let mut out = vec![0.0; d];
    sample_direction_into(rng, &mut out);
    out
}

/// Distance from the origin to the Voronoi boundary along unit vector `u`,
/// by bisection on Voronoi membership over `[ρ, R]`.
///
/// Membership is tested without the tie band of
/// [`in_voronoi`](crate::decoder::in_voronoi), so the result is within `tol`
/// of the true boundary rather than of a tolerance-shifted one.
pub fn radial_boundary(spec: &LatticeSpec, u: &[f64], tol: f64) -> Result<f64> {
    let d = spec.dim();
    if u.len() != d {
        return Err(LatticeError::DimensionMismatch {
            expected: d,
            got: u.len(),
        });
    }
    let norm2: f64 = u.iter().map(|v| v * v).sum();
    if (norm2.sqrt() - 1.0).abs() > 1e-9 {
        return Err(LatticeError::InvalidArgument(format!(
            "direction must have unit norm, got {}",
            norm2.sqrt()
        )));
    }
    if !(tol > 0.0) {
        return Err(LatticeError::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let rho = spec.packing_radius();
    let cover = spec.covering_radius();
    let mut buf = [0.0; MAX_DIM];
    let mut inside = |radius: f64| {
        for (b, v) in buf[..d].iter_mut().zip(u) {
            *b = radius * v;
        }
        origin_is_nearest(spec, &buf[..d])
    };
    let violation = |reason| LatticeError::BracketViolation {
        direction: u.to_vec(),
        reason,
        packing_radius: rho,
        covering_radius: cover,
    };

    if !inside(rho * (1.0 - BRACKET_MARGIN)) {
        return Err(violation(
            "point inside the packing ball is outside the cell",
        ));
    }
    if inside(cover * (1.0 + BRACKET_MARGIN)) {
        return Err(violation(
            "point beyond the covering radius is inside the cell",
        ));
    }
    if inside(cover) {
        return Ok(cover);
    }
    if !inside(rho) {
        return Ok(rho);
    }

    let (mut lo, mut hi) = (rho, cover);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Monte-Carlo sample of the radial boundary function of a Voronoi cell.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    /// Frequency-domain lattice whose cell was profiled.
    pub lattice: LatticeSpec,
    pub t_values: Vec<f64>,
    pub seed: u64,
    pub tolerance: f64,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn min(&self) -> f64 {
        self.t_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.t_values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Empirical quantile, `q ∈ [0, 1]`, by nearest rank.
    pub fn quantile(&self, q: f64) -> f64 {
        let mut sorted = self.t_values.clone();
        sorted.sort_by(f64::total_cmp);
        let idx = ((q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64).round()) as usize;
        sorted[idx]
    }

    /// Estimate of the cell volume `V_d(1) · mean(t^d)` and its standard error.
    pub fn cell_volume_estimate(&self) -> (f64, f64) {
        let d = self.dim() as i32;
        let unit = ball_volume(self.dim(), 1.0);
        let (mean, se) = mean_and_stderr(self.t_values.iter().map(|t| t.powi(d)), self.len());
        (unit * mean, unit * se)
    }
}

/// Sample mean and standard error (sample standard deviation over `√n`),
/// summed in iteration order. The mean is accumulated as offsets from the
/// first value, so a constant sequence returns that constant exactly.
pub(crate) fn mean_and_stderr<I>(values: I, n: usize) -> (f64, f64)
where
    I: Iterator<Item = f64> + Clone,
{
    let Some(first) = values.clone().next() else {
        return (f64::NAN, f64::NAN);
    };
    let nf = n as f64;
    let mean = first + values.clone().map(|v| v - first).sum::<f64>() / nf;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (nf - 1.0)).sqrt() / nf.sqrt())
}

/// Profile `n` random directions with the default execution strategy.
pub fn build_profile(spec: &LatticeSpec, n: usize, seed: u64, tol: f64) -> Result<RadialProfile> {
    build_profile_with(spec, n, seed, tol, Execution::default())
}

/// Profile `n` random directions. Direction `i` is drawn from its own RNG
/// stream, so the result is identical for any execution strategy.
pub fn build_profile_with(
    spec: &LatticeSpec,
    n: usize,
    seed: u64,
    tol: f64,
    exec: Execution,
) -> Result<RadialProfile> {
    if n == 0 {
        return Err(LatticeError::InvalidArgument(
            "profile needs at least one direction".into(),
        ));
    }
    let d = spec.dim();
    let t_values = exec.try_map(n, |i| {
        let mut rng = direction_rng(seed, i as u64);
        let mut u = [0.0; MAX_DIM];
        sample_direction_into(&mut rng, &mut u[..d]);
        radial_boundary(spec, &u[..d], tol)
    })?;
    Ok(RadialProfile {
        lattice: spec.clone(),
        t_values,
        seed,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{dual_lattice, frequency_lattice, get_lattice, LatticeName};

    #[test]
    fn ball_volume_values() {
        assert_eq!(ball_volume(1, 0.7), 1.4);
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-15);
        assert!((ball_volume(3, 1.0) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_volume(8, 1.0) - PI.powi(4) / 24.0).abs() < 1e-13);
    }

    #[test]
    fn ball_volume_matches_gamma_form() {
        for d in 1..=12 {
            let via_gamma = PI.powf(d as f64 / 2.0) / gamma_half_dim(d);
            assert!(
                (ball_volume(d, 1.0) - via_gamma).abs() <= 1e-13 * via_gamma,
                "d = {d}"
            );
        }
    }

    #[test]
    fn gamma_matches_statrs() {
        for d in 0..20 {
            let expected = statrs::function::gamma::gamma(d as f64 / 2.0 + 1.0);
            let got = gamma_half_dim(d);
            assert!((got - expected).abs() <= 1e-13 * expected, "d = {d}");
        }
    }

    #[test]
    fn normalized_spectrum_has_unit_variance() {
        for d in [1, 2, 3, 4, 8] {
            let s = IsotropicSpectrum::normalized(d, 2.5);
            assert!((s.variance() - 1.0).abs() < 1e-12);
            let mut inside = vec![0.0; d];
            inside[0] = 2.4;
            assert_eq!(s.density(&inside), s.amplitude);
            inside[0] = 2.6;
            assert_eq!(s.density(&inside), 0.0);
        }
    }

    #[test]
    fn one_dimensional_directions_are_signs() {
        let mut rng = direction_rng(1, 0);
        let mut plus = 0;
        for _ in 0..10_000 {
            let u = sample_direction(1, &mut rng);
            assert_eq!(u[0].abs(), 1.0);
            if u[0] > 0.0 {
                plus += 1;
            }
        }
        // Binomial(10^4, 1/2): 4 sigma = 200.
        assert!((plus as i64 - 5000).abs() < 200);
    }

    #[test]
    fn radial_boundary_of_square() {
        let z2 = get_lattice(LatticeName::Z2).unwrap();
        let t = radial_boundary(&z2, &[1.0, 0.0], 1e-12).unwrap();
        assert!((t - 0.5).abs() <= 1e-12);
        let s = 0.5f64.sqrt();
        let t = radial_boundary(&z2, &[s, s], 1e-12).unwrap();
        // Corner direction hits the covering radius exactly.
        assert!((t - s).abs() <= 1e-12);
    }

    #[test]
    fn radial_boundary_of_hexagon_vertex() {
        let hex = dual_lattice(&get_lattice(LatticeName::A2).unwrap()).unwrap();
        // Find a deep hole: decode-free, use the circumcentre of a basis triangle.
        let g = hex.generator();
        let a = [g[(0, 0)], g[(0, 1)]];
        let mut b = [g[(1, 0)], g[(1, 1)]];
        if a[0] * b[0] + a[1] * b[1] < 0.0 {
            // Use the acute triangle (0, a, a + b).
            b = [a[0] + b[0], a[1] + b[1]];
        }
        let hole = circumcentre(a, b);
        let r = (hole[0] * hole[0] + hole[1] * hole[1]).sqrt();
        assert!((r - hex.covering_radius()).abs() < 1e-12);
        let u = [hole[0] / r, hole[1] / r];
        let t = radial_boundary(&hex, &u, 1e-12).unwrap();
        assert!((t - hex.covering_radius()).abs() <= 1e-9);
    }

    fn circumcentre(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        // Circumcentre of (0, a, b).
        let d = 2.0 * (a[0] * b[1] - a[1] * b[0]);
        let a2 = a[0] * a[0] + a[1] * a[1];
        let b2 = b[0] * b[0] + b[1] * b[1];
        [(b[1] * a2 - a[1] * b2) / d, (a[0] * b2 - b[0] * a2) / d]
    }

    #[test]
    fn radial_boundary_rejects_bad_input() {
        let z2 = get_lattice(LatticeName::Z2).unwrap();
        assert!(matches!(
            radial_boundary(&z2, &[1.0, 1.0], 1e-10),
            Err(LatticeError::InvalidArgument(_))
        ));
        assert!(matches!(
            radial_boundary(&z2, &[1.0, 0.0], 0.0),
            Err(LatticeError::InvalidArgument(_))
        ));
        assert!(matches!(
            radial_boundary(&z2, &[1.0], 1e-10),
            Err(LatticeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn wrong_constants_trigger_bracket_violation() {
        let z2 = get_lattice(LatticeName::Z2).unwrap();
        let too_big = z2.with_radii(0.6, 0.75);
        let err = radial_boundary(&too_big, &[1.0, 0.0], 1e-10).unwrap_err();
        assert!(matches!(err, LatticeError::BracketViolation { .. }));
        let too_small = z2.with_radii(0.4, 0.6);
        let s = 0.5f64.sqrt();
        let err = radial_boundary(&too_small, &[s, s], 1e-10).unwrap_err();
        assert!(matches!(err, LatticeError::BracketViolation { .. }));
    }

    #[test]
    fn one_dimensional_profile_is_constant() {
        let spec = frequency_lattice(&get_lattice(LatticeName::Z1).unwrap()).unwrap();
        let p = build_profile(&spec, 1000, 5, DEFAULT_TOLERANCE).unwrap();
        assert!(p.t_values.iter().all(|&t| t == 0.5));
    }

    #[test]
    fn square_profile_integrates_to_unit_area() {
        let spec = frequency_lattice(&get_lattice(LatticeName::Z2).unwrap()).unwrap();
        let p = build_profile(&spec, 100_000, 17, DEFAULT_TOLERANCE).unwrap();
        let (vol, se) = p.cell_volume_estimate();
        assert!((vol - 1.0).abs() <= 4.0 * se, "{vol} ± {se}");
    }

    #[test]
    fn e8_profile_within_radii() {
        let spec = frequency_lattice(&get_lattice(LatticeName::E8).unwrap()).unwrap();
        let p = build_profile(&spec, 10_000, 2, DEFAULT_TOLERANCE).unwrap();
        assert!(p.min() >= 0.5f64.sqrt() - DEFAULT_TOLERANCE);
        assert!(p.max() <= 1.0 + DEFAULT_TOLERANCE);
    }

    #[test]
    fn sequential_and_default_execution_agree() {
        let spec = frequency_lattice(&get_lattice(LatticeName::A3).unwrap()).unwrap();
        let a = build_profile_with(&spec, 2000, 9, 1e-10, Execution::Sequential).unwrap();
        let b = build_profile(&spec, 2000, 9, 1e-10).unwrap();
        assert_eq!(a.t_values, b.t_values);
    }

    #[test]
    fn zero_directions_rejected() {
        let spec = get_lattice(LatticeName::Z2).unwrap();
        assert!(build_profile(&spec, 0, 1, 1e-10).is_err());
    }
}
