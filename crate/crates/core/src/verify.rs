//! Self-verification suite: decoder against the exhaustive oracle, the
//! threshold table against its closed forms, the cell-volume identity of
//! every profile, and bound dominance on the default grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{frequency_lattice, get_lattice, normalized_thresholds, LatticeName};
use crate::decoder::{nearest_point, oracle_nearest};
use crate::engine::{sweep_with, RateGrid};
use crate::error::Result;
use crate::geometry::{build_profile_with, DEFAULT_TOLERANCE};
use crate::par::Execution;

/// Closed-form threshold pair `(low, high)` for each table lattice.
pub fn closed_form_thresholds(name: LatticeName) -> Option<(f64, f64)> {
    let s = f64::sqrt;
    let p = f64::powf;
    Some(match name {
        LatticeName::Z1 => (2.0, 2.0),
        LatticeName::Z2 => (s(2.0), 2.0),
        LatticeName::A2 => (p(3.0, 0.75) / s(2.0), p(3.0, 0.25) * s(2.0)),
        LatticeName::Z3 => (2.0 / s(3.0), 2.0),
        LatticeName::A3Dual => (p(2.0, 1.0 / 3.0), p(2.0, 5.0 / 6.0)),
        LatticeName::A3 => (p(2.0, 5.0 / 3.0) / s(5.0), p(2.0, 5.0 / 3.0) / s(3.0)),
        LatticeName::Z4 => (1.0, 2.0),
        LatticeName::D4 => (p(2.0, 0.25), p(2.0, 0.75)),
        LatticeName::A4 => (p(5.0, 3.0 / 8.0) / s(2.0), p(5.0, 3.0 / 8.0)),
        LatticeName::Z8 => (1.0 / s(2.0), 2.0),
        LatticeName::E8 => (1.0, s(2.0)),
        LatticeName::A8 => (p(3.0, 11.0 / 8.0) / s(20.0), p(3.0, 7.0 / 8.0) / s(2.0)),
        _ => return None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, measured: String, expected: String) -> Self {
        Self {
            name: name.into(),
            passed,
            measured,
            expected,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub decoder_queries: usize,
    pub profile_directions: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            decoder_queries: 10_000,
            profile_directions: 100_000,
            seed: 1,
            exec: Execution::default(),
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

pub fn check_thresholds() -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut compared = 0;
    for name in LatticeName::TABLE {
        let (low, high) = closed_form_thresholds(name).expect("table lattice");
        let t = normalized_thresholds(&get_lattice(name).expect("catalog"));
        worst = worst.max(rel_err(t.low, low)).max(rel_err(t.high, high));
        compared += 2;
    }
    CheckOutcome::new(
        "threshold table",
        worst <= 1e-9 && compared == 24,
        format!("{compared} values, max rel err {worst:.3e}"),
        "24 values, max rel err <= 1e-9".into(),
    )
}

pub fn check_decoder(name: LatticeName, queries: usize, seed: u64) -> Result<CheckOutcome> {
    let spec = get_lattice(name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..queries {
        let x: Vec<f64> = (0..spec.dim())
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        let fast = nearest_point(&spec, &x);
        let slow = oracle_nearest(&spec, &x)?;
        worst = worst.max((fast.dist2 - slow.dist2).abs());
    }
    Ok(CheckOutcome::new(
        format!("decoder {name}"),
        worst <= 1e-12,
        format!("{queries} queries, max |Δdist²| {worst:.3e}"),
        "max |Δdist²| <= 1e-12".into(),
    ))
}

/// Cell-volume identity and bound dominance for the frequency lattice of one
/// sampling lattice.
pub fn check_profile(name: LatticeName, config: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let freq = frequency_lattice(&get_lattice(name)?)?;
    let profile = build_profile_with(
        &freq,
        config.profile_directions,
        config.seed,
        DEFAULT_TOLERANCE,
        config.exec,
    )?;
    let (vol, se) = profile.cell_volume_estimate();
    let volume = CheckOutcome::new(
        format!("cell volume {name}"),
        (vol - 1.0).abs() <= 4.0 * se,
        format!("{vol:.6} ± {se:.2e}"),
        "1 within 4 SE".into(),
    );

    let curve = sweep_with(&profile, &RateGrid::default(), config.exec);
    let mut worst = f64::INFINITY;
    for i in 0..curve.len() {
        let slack = curve.sigma_e2[i] - (curve.sigma_lb2[i] - 3.0 * curve.stderr[i]);
        worst = worst.min(slack);
    }
    let dominance = CheckOutcome::new(
        format!("bound dominance {name}"),
        worst >= 0.0,
        format!("min(σe² - σlb² + 3 SE) = {worst:.3e}"),
        ">= 0".into(),
    );
    Ok(vec![volume, dominance])
}

/// Run every check.
pub fn run_all(config: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = vec![check_thresholds()];
    for name in LatticeName::ALL {
        out.push(check_decoder(name, config.decoder_queries, config.seed)?);
    }
    for name in LatticeName::TABLE {
        out.extend(check_profile(name, config)?);
    }
    Ok(out)
}
