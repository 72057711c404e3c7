//! Command-line front end: closed-form energy queries, parameter sweeps
//! with deterministic CSV/JSON emission, and profile export.

mod settings;
mod sweeps;
mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use abdirac_core::*;

use settings::Settings;
use sweeps::{SweepKind, SweepRequest};
use table::fmt_sig;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "ABDIRAC_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "abdirac",
    version,
    about = "Spectral data for the 2d Aharonov-Bohm Dirac-Coulomb operator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form ground-state data at one parameter point.
    Energy(EnergyArgs),
    /// Parameter sweeps emitted as CSV or JSON tables.
    Sweep(SweepArgs),
    /// Export a named radial profile as CSV (columns rho, re, im).
    Profile(ProfileArgs),
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    nu: f64,
    /// Flux value; omit together with --critical to evaluate at the
    /// critical field.
    #[arg(long, conflicts_with = "critical")]
    a: Option<f64>,
    /// Evaluate at a = critical_field(nu).
    #[arg(long)]
    critical: bool,
    /// Emit a single JSON object instead of plain text.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Which sweep to run.
    #[arg(value_enum)]
    kind: SweepKind,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    a_min: f64,
    #[arg(long)]
    a_max: Option<f64>,
    #[arg(long, default_value_t = 41)]
    steps: usize,
    /// Comma-separated offsets from the critical field (slope sweep).
    #[arg(long, value_delimiter = ',')]
    h_list: Vec<f64>,
    /// Comma-separated speeds of light (nonrel sweep).
    #[arg(long, value_delimiter = ',')]
    c_list: Vec<f64>,
    /// Comma-separated witness scales (supercritical sweep).
    #[arg(long, value_delimiter = ',')]
    eps_list: Vec<f64>,
    /// Comma-separated nu:a pairs, e.g. 0.3:0.1,0.2:0.05.
    #[arg(long, value_delimiter = ',')]
    pairs: Vec<String>,
    /// Comma-separated mode indices (eigensolve sweep).
    #[arg(long, value_delimiter = ',')]
    modes: Vec<i32>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker count; never changes the output bytes.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output file; stdout when omitted. Relative paths resolve against
    /// the ABDIRAC_OUT_DIR environment variable when it is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileKind {
    /// The optimal trial profile of the weighted form.
    EtaStar,
    /// The ground-state upper component.
    GroundUpper,
    /// The breakdown witness (requires --eps).
    Witness,
    /// Computed eigenprofile (shooting, upper component; requires --ell).
    EigenUpper,
    /// Computed eigenprofile (shooting, lower component; requires --ell).
    EigenLower,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(value_enum)]
    kind: ProfileKind,
    #[arg(long)]
    nu: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    ell: i32,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Energy(args) => cmd_energy(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Profile(args) => cmd_profile(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<CoreError>() {
                Some(CoreError::Domain(_)) => 2,
                Some(CoreError::Supercritical { .. }) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn cmd_energy(args: EnergyArgs) -> Result<ExitCode> {
    let settings = Settings::load(args.config.as_deref())?;
    let a = if args.critical {
        critical_field(args.nu)?
    } else {
        args.a
            .ok_or_else(|| anyhow::anyhow!("either --a or --critical is required"))?
    };
    let params = settings.params(args.nu, a)?;
    let regime = params.regime();
    let a_crit = params.critical_field();
    // supercritical points have no gap data: surface the dedicated exit code
    let lambda = params.ground_state_energy()?;
    let mu = params.lemma_square_mu()?;
    let (eta_exp, eta_decay) = params.eta_star_profile()?;
    let gs = params.ground_state_spinor()?;
    let mut out = std::io::stdout().lock();
    if args.json {
        writeln!(
            out,
            "{{\"nu\": {}, \"a\": {}, \"regime\": \"{regime}\", \"critical_field\": {}, \
             \"lambda\": {}, \"mu\": {}, \"eta_star_exponent\": {}, \"eta_star_decay\": {}, \
             \"spinor_exponent\": {}, \"lower_upper_ratio\": {}}}",
            fmt_sig(args.nu, 17),
            fmt_sig(a, 17),
            fmt_sig(a_crit, 17),
            fmt_sig(lambda, 17),
            fmt_sig(mu, 17),
            fmt_sig(eta_exp, 17),
            fmt_sig(eta_decay, 17),
            fmt_sig(gs.power_exponent, 17),
            fmt_sig(gs.lower_upper_ratio, 17),
        )?;
    } else {
        writeln!(out, "nu              = {}", args.nu)?;
        writeln!(out, "a               = {a} ({regime}; critical field {a_crit})")?;
        writeln!(out, "lambda          = {lambda}")?;
        writeln!(out, "mu              = {mu}")?;
        writeln!(
            out,
            "eta_star        = rho^({eta_exp}) exp(-{eta_decay} rho)"
        )?;
        writeln!(
            out,
            "spinor upper    = rho^({}) exp(-{} rho)",
            gs.power_exponent, gs.decay_rate
        )?;
        writeln!(out, "lower/upper     = {}", gs.lower_upper_ratio)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_pairs(raw: &[String]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(raw.len());
    for item in raw {
        let (nu, a) = item
            .split_once(':')
            .with_context(|| format!("pair {item:?} is not nu:a"))?;
        out.push((nu.trim().parse()?, a.trim().parse()?));
    }
    Ok(out)
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(path);
            }
        }
    }
    path.to_path_buf()
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut settings = Settings::load(args.config.as_deref())?;
    if args.jobs > 0 {
        settings.jobs = args.jobs;
    }
    let req = SweepRequest {
        kind: args.kind,
        nu: args.nu,
        a: args.a,
        a_min: args.a_min,
        a_max: args.a_max,
        steps: args.steps,
        h_list: args.h_list,
        c_list: args.c_list,
        eps_list: args.eps_list,
        pairs: parse_pairs(&args.pairs)?,
        modes: args.modes,
        trials: args.trials,
        seed: args.seed,
    };
    let tbl = sweeps::run(&req, &settings)?;
    let mut buf: Vec<u8> = Vec::new();
    match args.format {
        Format::Csv => tbl.to_csv(&mut buf)?,
        Format::Json => tbl.to_json(&mut buf)?,
    }
    match &args.out {
        None => std::io::stdout().lock().write_all(&buf)?,
        Some(path) => {
            let path = resolve_out(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(&path, &buf)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if tbl.any_failed() {
        eprintln!("some rows failed; see the error column");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_profile(args: ProfileArgs) -> Result<ExitCode> {
    let settings = Settings::load(args.config.as_deref())?;
    let params = settings.params(args.nu, args.a)?;
    let mut buf: Vec<u8> = Vec::new();
    match args.kind {
        ProfileKind::EtaStar => {
            let (_, decay) = params.eta_star_profile()?;
            let grid = build_grid(settings.grid_spec(decay))?;
            let p = make_eta_star(&params, &grid)?;
            profile_to_csv(&p, &mut buf)?;
        }
        ProfileKind::GroundUpper => {
            let gs = params.ground_state_spinor()?;
            let grid = build_grid(settings.grid_spec(gs.decay_rate))?;
            let p = RadialProfile::from_real_fn(&grid, |r| {
                r.powf(gs.power_exponent) * (-gs.decay_rate * r).exp()
            });
            profile_to_csv(&p, &mut buf)?;
        }
        ProfileKind::Witness => {
            let grid = build_grid(GridSpec::log_uniform(
                (args.eps * 1e-3).min(1e-6),
                50.0,
                settings.grid_n,
            ))?;
            let p = make_supercritical_witness(&params, args.eps, &grid)?;
            profile_to_csv(&p, &mut buf)?;
        }
        ProfileKind::EigenUpper | ProfileKind::EigenLower => {
            let mode = params.mode_energy(args.ell)?;
            let grid = build_grid(settings.grid_spec(mode.b_ell))?;
            let res = eigensolve_shooting(&params, args.ell, &grid)?;
            let p = if matches!(args.kind, ProfileKind::EigenUpper) {
                &res.upper_profile
            } else {
                &res.lower_profile
            };
            profile_to_csv(p, &mut buf)?;
        }
    }
    match &args.out {
        None => std::io::stdout().lock().write_all(&buf)?,
        Some(path) => std::fs::write(resolve_out(path), &buf)?,
    }
    Ok(ExitCode::SUCCESS)
}
