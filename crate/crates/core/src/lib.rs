//! Reconstruction-error variance of lattice sampling for isotropically
//! bandlimited processes.
//!
//! A stationary process with flat spectrum on the ball `|ω| ≤ ω0` is sampled
//! on a lattice and reconstructed with the best linear interpolator. The
//! normalized error variance is the fraction of the spectral ball that lies
//! outside the Voronoi cell of the (frequency-domain) dual lattice:
//!
//! ```text
//! σe²/σ² = vol(Δ \ Ω) / vol(Δ)
//! ```
//!
//! and it never falls below `max{0, 1 - Γ(d/2+1)/π^{d/2} (r/ω0)^d}`, with
//! equality exactly when `ω0 ≤ ρ` or `ω0 ≥ R` of the dual lattice.
//!
//! The crate computes both quantities for a catalog of classical lattices.
//! The Voronoi cell is described by its radial boundary function, sampled
//! over random directions by bisection with exact nearest-point decoders;
//! one such [`RadialProfile`] yields the error variance at every rate.
//!
//! ```
//! use lattice_sampler::{build_profile, frequency_lattice, get_lattice, sweep, LatticeName, RateGrid};
//!
//! let sampling = get_lattice(LatticeName::A2).unwrap();
//! let profile = build_profile(&frequency_lattice(&sampling).unwrap(), 2_000, 1, 1e-10).unwrap();
//! let curve = sweep(&profile, &RateGrid::uniform(1.0, 2.0, 11).unwrap());
//! assert_eq!(curve.sigma_e2[10], 0.0); // above the hexagonal Nyquist-type rate
//! ```

pub mod cache;
pub mod catalog;
pub mod decoder;
pub mod engine;
mod enumerate;
pub mod error;
pub mod geometry;
mod par;
pub mod verify;

pub use cache::{read_profile, write_profile, ProfileCache, CACHE_ENV};
pub use catalog::{
    dual_lattice, frequency_lattice, get_lattice, normalized_thresholds, LatticeName, LatticeSpec,
    ThresholdPair, MAX_DIM,
};
pub use decoder::{brute_force_nearest, in_voronoi, nearest_point, oracle_nearest, DecodeResult};
pub use engine::{
    crossover, error_variance, lower_bound, sweep, sweep_with, thresholds, Crossover, Estimate,
    RateGrid, VarianceCurve,
};
pub use error::{LatticeError, Result};
pub use geometry::{
    ball_volume, build_profile, build_profile_with, direction_rng, radial_boundary,
    sample_direction, IsotropicSpectrum, RadialProfile, DEFAULT_TOLERANCE,
};
pub use par::Execution;
