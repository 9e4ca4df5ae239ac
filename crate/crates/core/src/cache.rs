//! On-disk profile cache.
//!
//! A profile file is one metadata header line followed by one `t` value per
//! line in scientific notation with 17 significant digits, which round-trips
//! every `f64` exactly:
//!
//! ```text
//! # lattice=A3 dim=3 n=1000000 seed=1 tol=1e-10
//! 7.0710678118654757e-1
//! ...
//! ```

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::catalog::LatticeSpec;
use crate::error::{LatticeError, Result};
use crate::geometry::{build_profile_with, RadialProfile};
use crate::par::Execution;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "LATTICE_SAMPLER_CACHE";

fn io_err(path: &Path, err: std::io::Error) -> LatticeError {
    LatticeError::Io {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}

fn malformed(path: &Path, message: impl Into<String>) -> LatticeError {
    LatticeError::MalformedProfile {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn header(profile: &RadialProfile) -> String {
    format!(
        "# lattice={} dim={} n={} seed={} tol={:e}",
        profile.lattice.name(),
        profile.dim(),
        profile.len(),
        profile.seed,
        profile.tolerance
    )
}

/// Write a profile in the cache format.
pub fn write_profile(path: &Path, profile: &RadialProfile) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", header(profile)).map_err(|e| io_err(path, e))?;
    for t in &profile.t_values {
        writeln!(w, "{t:.16e}").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Read a profile written by [`write_profile`]. The header must describe
/// `lattice`; the returned profile carries a clone of it.
pub fn read_profile(path: &Path, lattice: &LatticeSpec) -> Result<RadialProfile> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let head = lines
        .next()
        .ok_or_else(|| malformed(path, "empty file"))?
        .map_err(|e| io_err(path, e))?;
    let fields = head
        .strip_prefix("# ")
        .ok_or_else(|| malformed(path, "missing header"))?;

    let mut name = None;
    let mut n = None;
    let mut seed = None;
    let mut tol = None;
    for field in fields.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| malformed(path, format!("bad header field `{field}`")))?;
        match key {
            "lattice" => name = Some(value.to_string()),
            "n" => n = value.parse::<usize>().ok(),
            "seed" => seed = value.parse::<u64>().ok(),
            "tol" => tol = value.parse::<f64>().ok(),
            _ => {}
        }
    }
    let (name, n, seed, tol) = match (name, n, seed, tol) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => return Err(malformed(path, "incomplete header")),
    };
    if name != lattice.name().as_str() {
        return Err(malformed(
            path,
            format!("profile is for {name}, expected {}", lattice.name()),
        ));
    }

    let mut t_values = Vec::with_capacity(n);
    for line in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let t = line
            .parse::<f64>()
            .map_err(|_| malformed(path, format!("bad value `{line}`")))?;
        t_values.push(t);
    }
    if t_values.len() != n {
        return Err(malformed(
            path,
            format!("header says {n} values, found {}", t_values.len()),
        ));
    }
    Ok(RadialProfile {
        lattice: lattice.clone(),
        t_values,
        seed,
        tolerance: tol,
    })
}

/// Directory of cached profiles keyed by `(lattice, n, seed, tol)`.
#[derive(Debug, Clone)]
pub struct ProfileCache {
    dir: PathBuf,
}

impl ProfileCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Cache at `$LATTICE_SAMPLER_CACHE`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, lattice: &LatticeSpec, n: usize, seed: u64, tol: f64) -> PathBuf {
        self.dir.join(format!(
            "profile_{}_n{n}_seed{seed}_tol{tol:e}.csv",
            lattice.name()
        ))
    }

    /// Load the profile if cached, otherwise build and store it.
    pub fn load_or_build(
        &self,
        lattice: &LatticeSpec,
        n: usize,
        seed: u64,
        tol: f64,
        exec: Execution,
    ) -> Result<RadialProfile> {
        let path = self.path_for(lattice, n, seed, tol);
        if path.exists() {
            let profile = read_profile(&path, lattice)?;
            if profile.seed == seed && profile.tolerance == tol {
                return Ok(profile);
            }
        }
        let profile = build_profile_with(lattice, n, seed, tol, exec)?;
        fs::create_dir_all(&self.dir).map_err(|e| io_err(&self.dir, e))?;
        // Write then rename so concurrent readers never see a partial file.
        let tmp = path.with_extension("csv.tmp");
        write_profile(&tmp, &profile)?;
        fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))?;
        Ok(profile)
    }
}
