//! Runtime settings: flags take precedence over the config file, which
//! takes precedence over the defaults. The config file is a flat
//! `key = value` text format; `#` starts a comment.
//!
//! Recognized keys: `grid.n`, `grid.rho_min`, `grid.rho_max_floor`,
//! `tol.criticality`, `sweep.jobs`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone)]
pub struct Settings {
    pub grid_n: usize,
    pub grid_rho_min: f64,
    pub grid_rho_max_floor: f64,
    pub criticality_tol: f64,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            grid_n: 2000,
            grid_rho_min: 1e-6,
            grid_rho_max_floor: 50.0,
            criticality_tol: abdirac_core::DEFAULT_CRITICALITY_TOL,
            jobs: 1,
        }
    }
}

impl Settings {
    pub fn load(config: Option<&Path>) -> Result<Self> {
        let mut s = Settings::default();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            for (k, v) in parse_flat(&text)? {
                match k.as_str() {
                    "grid.n" => s.grid_n = v.parse().context("grid.n")?,
                    "grid.rho_min" => s.grid_rho_min = v.parse().context("grid.rho_min")?,
                    "grid.rho_max_floor" => {
                        s.grid_rho_max_floor = v.parse().context("grid.rho_max_floor")?
                    }
                    "tol.criticality" => {
                        s.criticality_tol = v.parse().context("tol.criticality")?
                    }
                    "sweep.jobs" => s.jobs = v.parse().context("sweep.jobs")?,
                    other => bail!("unknown config key {other:?}"),
                }
            }
        }
        Ok(s)
    }

    /// Grid spec for a profile with the given decay rate.
    pub fn grid_spec(&self, decay: f64) -> abdirac_core::GridSpec {
        let tail = if decay > 0.0 { 20.0 / decay } else { 0.0 };
        abdirac_core::GridSpec::log_uniform(
            self.grid_rho_min,
            tail.max(self.grid_rho_max_floor),
            self.grid_n,
        )
    }

    pub fn params(&self, nu: f64, a: f64) -> abdirac_core::Result<abdirac_core::CouplingParams> {
        Ok(abdirac_core::CouplingParams::new(nu, a)?.with_criticality_tol(self.criticality_tol))
    }

    /// Provenance fragment describing the effective configuration.
    pub fn provenance(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert(
            "grid".into(),
            format!(
                "log-uniform n={} rho_min={:e} rho_max_floor={}",
                self.grid_n, self.grid_rho_min, self.grid_rho_max_floor
            ),
        );
        m.insert(
            "tolerances".into(),
            format!("criticality={:e}", self.criticality_tol),
        );
        m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        m
    }
}

fn parse_flat(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {} is not key=value: {raw:?}", lineno + 1);
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
