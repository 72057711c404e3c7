//! Text emission of sampled profiles for external plotting.

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::grid::{build_grid, GridSpec, RadialProfile};

/// Writes a profile as CSV with columns `rho,re,im`, 17 significant digits.
pub fn profile_to_csv(p: &RadialProfile, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "rho,re,im")?;
    for (&r, v) in p.grid().nodes().iter().zip(p.values()) {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", r, v.re, v.im)?;
    }
    Ok(())
}

/// Parses a profile written by [`profile_to_csv`]; the grid is rebuilt as a
/// log-uniform grid over the parsed nodes (which round-trips exactly for
/// profiles sampled on one).
pub fn profile_from_csv(input: &mut impl BufRead) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CoreError::BadSpec(format!("csv read: {e}")))?;
        if k == 0 {
            if line.trim() != "rho,re,im" {
                return Err(CoreError::BadSpec(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let mut next = || -> Result<f64> {
            it.next()
                .ok_or_else(|| CoreError::BadSpec(format!("short row {line:?}")))?
                .trim()
                .parse()
                .map_err(|e| CoreError::BadSpec(format!("bad number in {line:?}: {e}")))
        };
        let r = next()?;
        let re = next()?;
        let im = next()?;
        nodes.push(r);
        values.push(Complex64::new(re, im));
    }
    Ok((nodes, values))
}

/// Round-trips a profile through its CSV representation, for tests of the
/// emission contract.
pub fn profile_csv_roundtrip(p: &RadialProfile) -> Result<RadialProfile> {
    let mut buf = Vec::new();
    profile_to_csv(p, &mut buf).map_err(|e| CoreError::BadSpec(format!("csv write: {e}")))?;
    let (_, values) = profile_from_csv(&mut buf.as_slice())?;
    RadialProfile::from_values(Arc::clone(p.grid()), values)
}

/// Convenience: sample and emit a named closed-form profile.
pub fn eta_star_csv(params: &crate::model::CouplingParams, out: &mut impl Write) -> Result<()> {
    let (_, decay) = params.eta_star_profile()?;
    let grid = build_grid(GridSpec::default_for_decay(decay))?;
    let eta = crate::grid::make_eta_star(params, &grid)?;
    profile_to_csv(&eta, out).map_err(|e| CoreError::BadSpec(format!("csv write: {e}")))
}
