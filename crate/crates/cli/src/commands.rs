use std::fmt::Write as _;
use std::path::Path;

use lattice_sampler::verify::{self, VerifyConfig};
use lattice_sampler::{
    build_profile_with, crossover as find_crossover, frequency_lattice, get_lattice,
    normalized_thresholds, sweep_with, Execution, LatticeError, LatticeName, ProfileCache,
    RadialProfile, RateGrid, VarianceCurve,
};
use serde::Serialize;

use crate::output::{curves_csv, emit, json};
use crate::{CliError, Format, OutputArgs, SweepArgs, VerifyArgs};

fn or_table(names: &[LatticeName]) -> Vec<LatticeName> {
    if names.is_empty() {
        LatticeName::TABLE.to_vec()
    } else {
        names.to_vec()
    }
}

fn default_directions(dim: usize) -> usize {
    if dim <= 4 {
        1_000_000
    } else {
        100_000
    }
}

#[derive(Serialize)]
struct ListRow {
    lattice: LatticeName,
    dim: usize,
    cell_volume: f64,
    packing_radius: f64,
    covering_radius: f64,
}

pub fn list(output: &OutputArgs) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for name in LatticeName::ALL {
        let spec = get_lattice(name)?;
        rows.push(ListRow {
            lattice: name,
            dim: spec.dim(),
            cell_volume: spec.cell_volume(),
            packing_radius: spec.packing_radius(),
            covering_radius: spec.covering_radius(),
        });
    }
    let text = match output.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut s = String::from("lattice,dim,cell_volume,packing_radius,covering_radius\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{:.6},{:.6},{:.6}",
                    r.lattice, r.dim, r.cell_volume, r.packing_radius, r.covering_radius
                );
            }
            s
        }
    };
    emit(output.out.as_deref(), &text)
}

#[derive(Serialize)]
struct ThresholdRow {
    lattice: LatticeName,
    dim: usize,
    low: f64,
    high: f64,
}

pub fn thresholds(names: &[LatticeName], output: &OutputArgs) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for name in or_table(names) {
        let t = normalized_thresholds(&get_lattice(name)?);
        rows.push(ThresholdRow {
            lattice: name,
            dim: name.dim(),
            low: t.low,
            high: t.high,
        });
    }
    let text = match output.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut s = String::from("lattice,dim,low,high\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{:.6},{:.6}", r.lattice, r.dim, r.low, r.high);
            }
            s
        }
    };
    emit(output.out.as_deref(), &text)
}

fn grid(args: &SweepArgs) -> Result<RateGrid, CliError> {
    Ok(RateGrid::uniform(args.rate_min, args.rate_max, args.steps)?)
}

fn profile(name: LatticeName, args: &SweepArgs) -> Result<RadialProfile, CliError> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let freq = frequency_lattice(&get_lattice(name)?)?;
    let n = args.n.unwrap_or_else(|| default_directions(freq.dim()));
    let exec = Execution::default();
    let profile = match &args.cache_dir {
        Some(dir) => ProfileCache::new(dir).load_or_build(&freq, n, args.seed, args.tol, exec)?,
        None => build_profile_with(&freq, n, args.seed, args.tol, exec)?,
    };
    Ok(profile)
}

fn curves(names: &[LatticeName], args: &SweepArgs) -> Result<Vec<VarianceCurve>, CliError> {
    let grid = grid(args)?;
    names
        .iter()
        .map(|&name| {
            Ok(sweep_with(
                &profile(name, args)?,
                &grid,
                Execution::default(),
            ))
        })
        .collect()
}

pub fn curve(names: &[LatticeName], args: &SweepArgs, output: &OutputArgs) -> Result<(), CliError> {
    let curves = curves(&or_table(names), args)?;
    let text = match output.format {
        Format::Csv => curves_csv(&curves),
        Format::Json => json(&curves),
    };
    emit(output.out.as_deref(), &text)
}

#[derive(Serialize)]
struct Bracket {
    rate: [f64; 2],
    gap_a: [f64; 2],
    gap_b: [f64; 2],
    stderr_a: [f64; 2],
    stderr_b: [f64; 2],
}

#[derive(Serialize)]
struct CrossoverReport {
    lattice_a: LatticeName,
    lattice_b: LatticeName,
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bracket: Option<Bracket>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    candidates: Vec<f64>,
}

pub fn crossover(
    names: &[LatticeName],
    args: &SweepArgs,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let [a, b] = names else {
        return Err(CliError::Usage(format!(
            "crossover needs exactly two lattices, got {}",
            names.len()
        )));
    };
    let curves = curves(&[*a, *b], args)?;
    let (ca, cb) = (&curves[0], &curves[1]);
    let mut report = CrossoverReport {
        lattice_a: *a,
        lattice_b: *b,
        found: false,
        rate: None,
        bracket: None,
        reason: None,
        candidates: Vec::new(),
    };
    match find_crossover(ca, cb) {
        Ok(x) => {
            let (i, j) = (x.lower_index, x.upper_index);
            report.found = true;
            report.rate = Some(x.rate);
            report.bracket = Some(Bracket {
                rate: [ca.rates[i], ca.rates[j]],
                gap_a: [ca.gap[i], ca.gap[j]],
                gap_b: [cb.gap[i], cb.gap[j]],
                stderr_a: [ca.stderr[i], ca.stderr[j]],
                stderr_b: [cb.stderr[i], cb.stderr[j]],
            });
        }
        Err(LatticeError::NoSignChange) => {
            report.reason = Some("no significant sign change on the grid".into());
        }
        Err(LatticeError::MultipleSignChanges(rates)) => {
            report.reason = Some("more than one sign change on the grid".into());
            report.candidates = rates;
        }
        Err(other) => return Err(other.into()),
    }
    emit(out, &json(&report))
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let config = VerifyConfig {
        decoder_queries: args.queries,
        profile_directions: args.n,
        seed: args.seed,
        exec: Execution::default(),
    };
    let outcomes = verify::run_all(&config)?;
    let text = if args.json {
        json(&outcomes)
    } else {
        let mut s = String::new();
        for o in &outcomes {
            let status = if o.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{status} {}: {} (expected {})",
                o.name, o.measured, o.expected
            );
        }
        let passed = outcomes.iter().filter(|o| o.passed).count();
        let _ = writeln!(s, "{passed}/{} checks passed", outcomes.len());
        s
    };
    emit(args.out.as_deref(), &text)?;
    if outcomes.iter().all(|o| o.passed) {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}
