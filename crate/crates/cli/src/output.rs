use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use lattice_sampler::VarianceCurve;

use crate::CliError;

pub const CURVE_HEADER: &str = "lattice,dim,rate,sigma_e2,sigma_lb2,gap,stderr";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Curves as CSV, lattice-major then rate-ascending.
pub fn curves_csv(curves: &[VarianceCurve]) -> String {
    let mut s = String::new();
    s.push_str(CURVE_HEADER);
    s.push('\n');
    for c in curves {
        for i in 0..c.len() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                c.lattice_name,
                c.dim,
                float(c.rates[i]),
                float(c.sigma_e2[i]),
                float(c.sigma_lb2[i]),
                float(c.gap[i]),
                float(c.stderr[i])
            );
        }
    }
    s
}

pub fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Write to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}
