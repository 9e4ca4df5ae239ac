//! Error variance, lower bound, rate sweeps and crossover search.
//!
//! All quantities are normalized: variances are reported as `σe²/σ²`, rates
//! as `r/ω0`. For a frequency-domain lattice with cell volume `V`, the rate
//! is `r = V^{1/d}`, so `ω0 = r / rate`.

use serde::{Deserialize, Serialize};

use crate::catalog::{normalized_thresholds, LatticeName, LatticeSpec, ThresholdPair};
use crate::error::{LatticeError, Result};
use crate::geometry::{ball_volume, RadialProfile};
use crate::par::Execution;

/// Default rate grid: 601 points on `[0.5, 2.05]`.
pub const DEFAULT_RATE_MIN: f64 = 0.5;
pub const DEFAULT_RATE_MAX: f64 = 2.05;
pub const DEFAULT_RATE_STEPS: usize = 601;

/// Normalized error variance with its Monte-Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Profile terms prepared for repeated evaluation: `t` ascending and `t^d`
/// alongside. At any rate the directions with `t·rate/r >= 1` form a suffix
/// whose terms are all exactly one.
struct SortedTerms {
    t: Vec<f64>,
    t_pow: Vec<f64>,
    d: i32,
    inv_r: f64,
}

impl SortedTerms {
    fn new(profile: &RadialProfile) -> Self {
        let d = profile.dim() as i32;
        let mut t = profile.t_values.clone();
        t.sort_by(f64::total_cmp);
        let t_pow = t.iter().map(|v| v.powi(d)).collect();
        Self {
            t,
            t_pow,
            d,
            inv_r: profile.lattice.cell_volume().powf(-1.0 / d as f64),
        }
    }

    fn estimate(&self, rate: f64) -> Estimate {
        let n = self.t.len();
        let k = rate * self.inv_r;
        let kd = k.powi(self.d);
        let cut = self.t.partition_point(|&t| t * k < 1.0);
        if cut == 0 {
            return Estimate {
                value: 0.0,
                stderr: 0.0,
            };
        }
        let head = &self.t_pow[..cut];
        let saturated = (n - cut) as f64;
        let nf = n as f64;
        // Offsets from the first term keep a constant sequence exact.
        let first = (head[0] * kd).min(1.0);
        let offset: f64 =
            head.iter().map(|u| (u * kd).min(1.0) - first).sum::<f64>() + saturated * (1.0 - first);
        let mean = first + offset / nf;
        let stderr = if n == 1 {
            0.0
        } else {
            let ss: f64 = head
                .iter()
                .map(|u| {
                    let e = (u * kd).min(1.0) - mean;
                    e * e
                })
                .sum::<f64>()
                + saturated * (1.0 - mean) * (1.0 - mean);
            (ss / (nf - 1.0)).sqrt() / nf.sqrt()
        };
        Estimate {
            value: 1.0 - mean,
            stderr,
        }
    }
}

/// Normalized error variance of the best linear interpolator at the given
/// normalized rate, estimated from a radial profile.
///
/// The per-direction term is `min(t·rate/r, 1)^d = (min(t, ω0)/ω0)^d`, and the
/// variance is one minus its mean.
pub fn error_variance(profile: &RadialProfile, rate_over_bandwidth: f64) -> Estimate {
    assert!(rate_over_bandwidth > 0.0, "rate must be positive");
    SortedTerms::new(profile).estimate(rate_over_bandwidth)
}

/// Closed-form lower bound `max{0, 1 - Γ(d/2+1)/π^{d/2} · rate^d}`.
pub fn lower_bound(d: usize, rate_over_bandwidth: f64) -> f64 {
    assert!(rate_over_bandwidth > 0.0, "rate must be positive");
    (1.0 - rate_over_bandwidth.powi(d as i32) / ball_volume(d, 1.0)).max(0.0)
}

/// Threshold rates of a sampling lattice.
pub fn thresholds(spec: &LatticeSpec) -> ThresholdPair {
    normalized_thresholds(spec)
}

/// Strictly increasing grid of positive normalized rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateGrid(Vec<f64>);

impl RateGrid {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(LatticeError::InvalidGrid("empty grid".into()));
        }
        if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(LatticeError::InvalidGrid(
                "rates must be positive and finite".into(),
            ));
        }
        if rates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LatticeError::InvalidGrid(
                "rates must be strictly increasing".into(),
            ));
        }
        Ok(Self(rates))
    }

    /// `steps` evenly spaced points from `min` to `max` inclusive.
    pub fn uniform(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(LatticeError::InvalidGrid("need at least two steps".into()));
        }
        if !(min > 0.0 && min < max) {
            return Err(LatticeError::InvalidGrid(format!(
                "need 0 < min < max, got [{min}, {max}]"
            )));
        }
        let h = (max - min) / (steps - 1) as f64;
        let mut rates: Vec<f64> = (0..steps).map(|i| min + h * i as f64).collect();
        rates[steps - 1] = max;
        Self::new(rates)
    }

    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for RateGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_RATE_MIN, DEFAULT_RATE_MAX, DEFAULT_RATE_STEPS)
            .expect("default grid is well formed")
    }
}

/// Error variance and lower bound over a rate grid for one sampling lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCurve {
    /// Sampling lattice (the dual of the profiled lattice).
    pub lattice_name: LatticeName,
    pub dim: usize,
    pub rates: Vec<f64>,
    pub sigma_e2: Vec<f64>,
    pub sigma_lb2: Vec<f64>,
    pub gap: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl VarianceCurve {
    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }
}

/// Evaluate the error variance and lower bound at every grid rate, reusing
/// the single profile.
pub fn sweep(profile: &RadialProfile, grid: &RateGrid) -> VarianceCurve {
    sweep_with(profile, grid, Execution::default())
}

pub fn sweep_with(profile: &RadialProfile, grid: &RateGrid, exec: Execution) -> VarianceCurve {
    let d = profile.dim();
    let rates = grid.rates().to_vec();
    assert!(rates.iter().all(|&r| r > 0.0), "rate must be positive");
    let terms = SortedTerms::new(profile);
    let estimates = exec.map(rates.len(), |i| terms.estimate(rates[i]));
    let sigma_lb2: Vec<f64> = rates.iter().map(|&r| lower_bound(d, r)).collect();
    let sigma_e2: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let gap = sigma_e2
        .iter()
        .zip(&sigma_lb2)
        .map(|(e, lb)| e - lb)
        .collect();
    VarianceCurve {
        lattice_name: profile.lattice.name().dual(),
        dim: d,
        rates,
        sigma_e2,
        sigma_lb2,
        gap,
        stderr: estimates.iter().map(|e| e.stderr).collect(),
    }
}

/// Number of combined standard errors below which a difference between two
/// curves is treated as zero when locating a crossover.
pub const CROSSOVER_SIGNIFICANCE: f64 = 3.0;

/// A located crossover between two variance curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    /// Interpolated normalized rate where `σe²(a) - σe²(b)` changes sign.
    pub rate: f64,
    /// Grid indices of the two bracketing points.
    pub lower_index: usize,
    pub upper_index: usize,
    /// `σe²(a) - σe²(b)` at the bracketing points.
    pub lower_diff: f64,
    pub upper_diff: f64,
}

/// Rate at which `curve_a` and `curve_b` cross.
///
/// Grid points where the two variances differ by no more than
/// [`CROSSOVER_SIGNIFICANCE`] combined standard errors carry no sign; among
/// the rest exactly one sign change must occur. The crossing is placed by
/// linear interpolation between the two significant points around it.
pub fn crossover(curve_a: &VarianceCurve, curve_b: &VarianceCurve) -> Result<Crossover> {
    if curve_a.rates != curve_b.rates {
        return Err(LatticeError::GridMismatch);
    }
    let significant: Vec<(usize, f64)> = (0..curve_a.len())
        .filter_map(|i| {
            let diff = curve_a.sigma_e2[i] - curve_b.sigma_e2[i];
            let se = curve_a.stderr[i].hypot(curve_b.stderr[i]);
            (diff.abs() > CROSSOVER_SIGNIFICANCE * se && diff != 0.0).then_some((i, diff))
        })
        .collect();

    let changes: Vec<Crossover> = significant
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| {
            let (i, di) = w[0];
            let (j, dj) = w[1];
            let (ri, rj) = (curve_a.rates[i], curve_a.rates[j]);
            Crossover {
                rate: ri + (rj - ri) * di / (di - dj),
                lower_index: i,
                upper_index: j,
                lower_diff: di,
                upper_diff: dj,
            }
        })
        .collect();

    match changes.len() {
        0 => Err(LatticeError::NoSignChange),
        1 => Ok(changes.into_iter().next().expect("one element")),
        _ => Err(LatticeError::MultipleSignChanges(
            changes.iter().map(|c| c.rate).collect(),
        )),
    }
}
