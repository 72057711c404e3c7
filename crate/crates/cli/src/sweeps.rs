//! The sweep kinds: each builds a list of row inputs, evaluates them on a
//! bounded worker pool, and gathers the results in input order so output
//! never depends on the worker count.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use rayon::prelude::*;

use abdirac_core::*;

use crate::settings::Settings;
use crate::table::{Cell, Row, SweepTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    EnergyVsA,
    Slope,
    Nonrel,
    Supercritical,
    Hardy,
    Eigensolve,
    Variational,
    Positron,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::EnergyVsA => "energy-vs-a",
            SweepKind::Slope => "slope",
            SweepKind::Nonrel => "nonrel",
            SweepKind::Supercritical => "supercritical",
            SweepKind::Hardy => "hardy",
            SweepKind::Eigensolve => "eigensolve",
            SweepKind::Variational => "variational",
            SweepKind::Positron => "positron",
        }
    }
}

/// Inputs shared by the sweep kinds; unused fields are ignored by kinds
/// that do not need them.
#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub kind: SweepKind,
    pub nu: Option<f64>,
    pub a: Option<f64>,
    pub a_min: f64,
    pub a_max: Option<f64>,
    pub steps: usize,
    pub h_list: Vec<f64>,
    pub c_list: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub pairs: Vec<(f64, f64)>,
    pub modes: Vec<i32>,
    pub trials: usize,
    pub seed: u64,
}

fn provenance_for(req: &SweepRequest, settings: &Settings) -> BTreeMap<String, String> {
    let mut m = settings.provenance();
    m.insert("command".into(), format!("sweep {}", req.kind.name()));
    let mut params: Vec<String> = Vec::new();
    if let Some(nu) = req.nu {
        params.push(format!("nu={nu}"));
    }
    if let Some(a) = req.a {
        params.push(format!("a={a}"));
    }
    match req.kind {
        SweepKind::EnergyVsA => {
            params.push(format!("a_min={}", req.a_min));
            if let Some(am) = req.a_max {
                params.push(format!("a_max={am}"));
            }
            params.push(format!("steps={}", req.steps));
        }
        SweepKind::Slope => params.push(format!("h_list={:?}", req.h_list)),
        SweepKind::Nonrel => params.push(format!("c_list={:?}", req.c_list)),
        SweepKind::Supercritical => params.push(format!("eps_list={:?}", req.eps_list)),
        SweepKind::Hardy => {
            params.push(format!("trials={}", req.trials));
            params.push(format!("seed={}", req.seed));
        }
        SweepKind::Eigensolve | SweepKind::Variational | SweepKind::Positron => {
            params.push(format!("pairs={:?}", req.pairs));
            if req.kind == SweepKind::Eigensolve {
                params.push(format!("modes={:?}", req.modes));
            }
        }
    }
    m.insert("parameters".into(), params.join(" "));
    m
}

fn run_rows<I: Send + Sync>(
    inputs: Vec<I>,
    jobs: usize,
    f: impl Fn(&I) -> Result<Vec<Cell>> + Sync,
) -> Result<Vec<Row>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    // collect preserves the input order regardless of scheduling
    let rows: Vec<Row> = pool.install(|| {
        inputs
            .par_iter()
            .map(|i| match f(i) {
                Ok(cells) => Row { cells, error: None },
                Err(e) => Row {
                    cells: Vec::new(),
                    error: Some(format!("{e:#}")),
                },
            })
            .collect()
    });
    Ok(rows)
}

pub fn run(req: &SweepRequest, settings: &Settings) -> Result<SweepTable> {
    let prov = provenance_for(req, settings);
    match req.kind {
        SweepKind::EnergyVsA => energy_vs_a(req, settings, prov),
        SweepKind::Slope => slope(req, settings, prov),
        SweepKind::Nonrel => nonrel(req, settings, prov),
        SweepKind::Supercritical => supercritical(req, settings, prov),
        SweepKind::Hardy => hardy(req, settings, prov),
        SweepKind::Eigensolve => eigensolve(req, settings, prov),
        SweepKind::Variational => variational(req, settings, prov),
        SweepKind::Positron => positron(req, settings, prov),
    }
}

fn need_nu(req: &SweepRequest) -> Result<f64> {
    req.nu.ok_or_else(|| anyhow::anyhow!("--nu is required for this sweep"))
}

fn energy_vs_a(
    req: &SweepRequest,
    settings: &Settings,
    prov: BTreeMap<String, String>,
) -> Result<SweepTable> {
    let nu = need_nu(req)?;
    let a_max = match req.a_max {
        Some(a) => a,
        None => critical_field(nu)?,
    };
    if req.steps < 2 {
        bail!("--steps must be at least 2");
    }
    let inputs: Vec<f64> = (0..req.steps)
        .map(|k| req.a_min + (a_max - req.a_min) * k as f64 / (req.steps - 1) as f64)
        .collect();
    let mut table = SweepTable::new(&["nu", "a", "lambda", "mu"], prov);
    table.rows = run_rows(inputs, settings.jobs, |&a| {
        let p = settings.params(nu, a)?;
        Ok(vec![
            nu.into(),
            a.into(),
            p.ground_state_energy()?.into(),
            p.lemma_square_mu()?.into(),
        ])
    })?;
    Ok(table)
}

fn slope(
    req: &SweepRequest,
    settings: &Settings,
    prov: BTreeMap<String, String>,
) -> Result<SweepTable> {
    let nu = need_nu(req)?;
    if req.h_list.is_empty() {
        bail!("--h-list is required for the slope sweep");
    }
    let inputs = req.h_list.clone();
    let mut table = SweepTable::new(&["nu", "h", "a", "abs_slope"], prov);
    table.rows = run_rows(inputs, settings.jobs, |&h| {
        let a = critical_field(nu)? - h;
        let s = energy_slope_fd(nu, h, h / 100.0)?;
        Ok(vec![nu.into(), h.into(), a.into(), s.abs().into()])
    })?;
    Ok(table)
}

fn nonrel(
    req: &SweepRequest,
    settings: &Settings,
    prov: BTreeMap<String, String>,
) -> Result<SweepTable> {
    let nu = need_nu(req)?;
    let a = req.a.unwrap_or(0.0);
    if req.c_list.is_empty() {
        bail!("--c-list is required for the nonrel sweep");
    }
    let params = settings.params(nu, a)?;
    let limit = binding_limit(&params);
    let inputs = req.c_list.clone();
    let mut table = SweepTable::new(&["c", "lambda_c", "shifted", "error", "ratio"], prov);
    table.rows = run_rows(inputs, settings.jobs, |&c| {
        let se = scaled_energy(&params, c)?;
        let ratio = ((c * c - se.lambda_c) / (c * c + se.lambda_c)).sqrt();
        Ok(vec![
            c.into(),
            se.lambda_c.into(),
            se.shifted.into(),
            (se.shifted - limit).abs().into(),
            ratio.into(),
        ])
    })?;
    Ok(table)
}

fn supercritical(
    req: &SweepRequest,
    settings: &Settings,
    prov: BTreeMap<String, String>,
) -> Result<SweepTable> {
    let nu = need_nu(req)?;
    let a = req
        .a
        .ok_or_else(|| anyhow::anyhow!("--a is required for the supercritical sweep"))?;
    let eps_list = if req.eps_list.is_empty() {
        (0..=18).map(|k| 10f64.powf(-0.5 * k as f64)).collect()
    } else {
        req.eps_list.clone()
    };
    let params = settings.params(nu, a)?;
    let inputs = eps_list;
    let mut table = SweepTable::new(&["nu", "a", "eps", "j_at_minus_one"], prov);
    table.rows = run_rows(inputs, settings.jobs, |&eps| {
        let scan = supercritical_scan(&params, &[eps])?;
        Ok(vec![
            nu.into(),
            a.into(),
            eps.into(),
            scan.rows[0].j_at_minus_one.into(),
        ])
    })?;
    Ok(table)
}

fn hardy(
    req: &SweepRequest,
    settings: &Settings,
    prov: BTreeMap<String, String>,
) -> Result<SweepTable> {
    let nu = need_nu(req)?;
    let report = special_case_checks(nu, req.trials.max(50), req.seed)?;
    let mut table = SweepTable::new(
        &["case", "n_trials", "min_slack", "near_equality", "sharpness_extrapolation"],
        prov,
    );
    let _ = settings;
    for case in report.cases {
        table.rows.push(Row {
            cells: vec![
                Cell::Text(case.case),
                Cell::Int(case.n_trials as i64),
                Cell::Num(case.min_slack),
                case.near_equality.map(Cell::Num).unwrap_or(Cell::Text(String::new())),
                case.sharpness_extrapolation
                    .map(Cell::Num)
                    .unwrap_or(Cell::Text(String::new())),
            ],
            error: None,
        });
    }
    Ok(table)
}

fn eigensolve(
    req: &SweepRequest,
    settings: &Settings,
    prov: BTreeMap<String, String>,
) -> Result<SweepTable> {
    if req.pairs.is_empty() {
        bail!("--pairs is required for the eigensolve sweep");
    }
    let modes = if req.modes.is_empty() { vec![0] } else { req.modes.clone() };
    let mut inputs = Vec::new();
    for &(nu, a) in &req.pairs {
        for &ell in &modes {
            inputs.push((nu, a, ell));
        }
    }
    let mut table = SweepTable::new(
        &["nu", "a", "ell", "lambda_closed", "lambda_form", "lambda_shoot", "max_abs_diff"],
        prov,
    );
    table.rows = run_rows(inputs, settings.jobs, |&(nu, a, ell)| {
        let params = settings.params(nu, a)?;
        let mode = params.mode_energy(ell)?;
        let spec = settings.grid_spec(mode.b_ell);
        let (lam_form, _) =
            eigensolve_extrapolated(&params, ell, spec, SolveMethod::FormBisection)?;
        let (lam_shoot, _) = eigensolve_extrapolated(&params, ell, spec, SolveMethod::Shooting)?;
        let diff = (lam_form - mode.lambda_ell)
            .abs()
            .max((lam_shoot - mode.lambda_ell).abs());
        Ok(vec![
            nu.into(),
            a.into(),
            Cell::Int(ell as i64),
            mode.lambda_ell.into(),
            lam_form.into(),
            lam_shoot.into(),
            diff.into(),
        ])
    })?;
    Ok(table)
}

fn variational(
    req: &SweepRequest,
    settings: &Settings,
    prov: BTreeMap<String, String>,
) -> Result<SweepTable> {
    if req.pairs.is_empty() {
        bail!("--pairs is required for the variational sweep");
    }
    let inputs = req.pairs.clone();
    let mut table = SweepTable::new(
        &["nu", "a", "lambda_closed", "best_lambda", "a_star", "b_star", "abs_err", "evaluations"],
        prov,
    );
    table.rows = run_rows(inputs, settings.jobs, |&(nu, a)| {
        let params = settings.params(nu, a)?;
        let (_, decay) = params.eta_star_profile()?;
        let grid = build_grid(settings.grid_spec(decay))?;
        let spec = TrialFamilySpec {
            family: TrialFamily::default_power_exp(&params),
            mode: 0,
        };
        let res = minimize_lambda_star(&params, &spec, &grid, MinimizeOptions::default())?;
        let closed = params.ground_state_energy()?;
        Ok(vec![
            nu.into(),
            a.into(),
            closed.into(),
            res.best_lambda.into(),
            res.best_params[0].into(),
            res.best_params[1].into(),
            (res.best_lambda - closed).abs().into(),
            Cell::Int(res.evaluations as i64),
        ])
    })?;
    Ok(table)
}

fn positron(
    req: &SweepRequest,
    settings: &Settings,
    prov: BTreeMap<String, String>,
) -> Result<SweepTable> {
    if req.pairs.is_empty() {
        bail!("--pairs is required for the positron sweep");
    }
    let inputs = req.pairs.clone();
    let mut table = SweepTable::new(
        &["nu", "a", "expected", "best_lambda", "abs_err"],
        prov,
    );
    table.rows = run_rows(inputs, settings.jobs, |&(nu, a)| {
        let params = settings.params(nu, a)?;
        let (_, decay) = params.eta_star_profile()?;
        let grid = build_grid(settings.grid_spec(decay))?;
        let res = positron_ground(&params, &grid, MinimizeOptions::default())?;
        let expected = -params.ground_state_energy()?;
        Ok(vec![
            nu.into(),
            a.into(),
            expected.into(),
            res.best_lambda.into(),
            (res.best_lambda - expected).abs().into(),
        ])
    })?;
    Ok(table)
}
