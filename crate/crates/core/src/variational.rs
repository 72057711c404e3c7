//! The spectral root map `lambda*`, its minimization over trial families,
//! the supercritical breakdown scan, and the completed-square identity
//! check.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::forms::JModeEvaluator;
use crate::grid::{
    build_grid, differentiate_sharp, integrate_weighted, make_supercritical_witness,
    GridSpec, RadialGrid, RadialProfile, RationalWeight,
};
use crate::model::CouplingParams;

/// Options for the root bisection.
#[derive(Debug, Clone, Copy)]
pub struct LambdaStarOptions {
    /// Fourier mode of the profile.
    pub mode: i32,
    /// Proxy for +infinity: if the form stays positive up to this probe the
    /// root is reported as not found.
    pub mu_max: f64,
    /// Standoff from the lower end of the gap when probing.
    pub standoff: f64,
    /// Converged when |J| falls below this fraction of the mass scale.
    pub j_tol_rel: f64,
    /// ... or when the bracket is narrower than this.
    pub bracket_tol: f64,
}

impl Default for LambdaStarOptions {
    fn default() -> Self {
        Self {
            mode: 0,
            mu_max: 1e3,
            standoff: 1e-6,
            j_tol_rel: 1e-10,
            bracket_tol: 1e-12,
        }
    }
}

/// Outcome of the root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LambdaStarValue {
    /// The unique zero of the form in the probed range.
    Root(f64),
    /// The form is still positive at the `mu_max` proxy (the +infinity
    /// convention).
    NoRootUpTo(f64),
    /// The form is already nonpositive at the near edge of the gap: the
    /// root escapes below, the breakdown signature.
    BelowGap,
}

impl LambdaStarValue {
    pub fn root(&self) -> Option<f64> {
        match self {
            LambdaStarValue::Root(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambdaStarResult {
    pub value: LambdaStarValue,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
    /// Number of form evaluations performed.
    pub evaluations: usize,
}

fn bisect_root(
    mut eval: impl FnMut(f64) -> Result<f64>,
    lo0: f64,
    expand_from: f64,
    cap: f64,
    increasing: bool,
    j_tol: f64,
    bracket_tol: f64,
) -> Result<LambdaStarResult> {
    let mut evals = 0usize;
    let mut f = |x: f64, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = eval(x)?;
        Ok(if increasing { -v } else { v })
    };
    // with the sign flip the function is nonincreasing: positive at lo,
    // searching for the first nonpositive probe
    let f_lo = f(lo0, &mut evals)?;
    if f_lo <= 0.0 {
        return Ok(LambdaStarResult {
            value: LambdaStarValue::BelowGap,
            bracket: (lo0, lo0),
            evaluations: evals,
        });
    }
    let mut lo = expand_from.max(lo0);
    let mut hi = lo;
    let mut step = 1.0;
    loop {
        hi = (hi + step).min(cap);
        let fh = f(hi, &mut evals)?;
        if fh <= 0.0 {
            break;
        }
        lo = hi;
        step *= 2.0;
        if hi >= cap {
            return Ok(LambdaStarResult {
                value: LambdaStarValue::NoRootUpTo(cap),
                bracket: (lo, cap),
                evaluations: evals,
            });
        }
    }
    // the expansion seed may already sit past the root; re-anchor the left end
    let mut lo = if f(lo, &mut evals)? > 0.0 { lo } else { lo0 };
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let fm = f(mid, &mut evals)?;
        if fm.abs() <= j_tol || (hi - lo) <= bracket_tol * mid.abs().max(1.0) {
            break;
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(LambdaStarResult {
        value: LambdaStarValue::Root(mid),
        bracket: (lo, hi),
        evaluations: evals,
    })
}

/// The unique zero of `mu -> J(p, nu, a, mu)` in `(-1, mu_max]`, by
/// bisection on the monotone form. Reports [`LambdaStarValue::BelowGap`]
/// when the form is already nonpositive at `-1 + standoff`.
pub fn lambda_star(
    p: &RadialProfile,
    params: &CouplingParams,
    opts: LambdaStarOptions,
) -> Result<LambdaStarResult> {
    let ev = JModeEvaluator::new(p, params, opts.mode)?;
    let j_tol = opts.j_tol_rel * ev.mass_scale();
    bisect_root(
        |mu| Ok(ev.eval(mu)?.total),
        -1.0 + opts.standoff,
        0.0,
        opts.mu_max,
        false,
        j_tol,
        opts.bracket_tol,
    )
}

pub fn lambda_star_default(p: &RadialProfile, params: &CouplingParams) -> Result<LambdaStarResult> {
    lambda_star(p, params, LambdaStarOptions::default())
}

/// The unique zero of `lam -> J+(p, nu, a, lam)`, approached from above
/// since the positron form increases with the probe.
pub fn lambda_star_positron(
    p: &RadialProfile,
    params: &CouplingParams,
    opts: LambdaStarOptions,
) -> Result<LambdaStarResult> {
    let ev = JModeEvaluator::positron(p, params, opts.mode)?;
    let j_tol = opts.j_tol_rel * ev.mass_scale();
    // mirror the probe axis: x = -lambda makes the form nonincreasing
    let res = bisect_root(
        |x| Ok(ev.eval(-x)?.total),
        -1.0 + opts.standoff,
        0.0,
        opts.mu_max,
        false,
        j_tol,
        opts.bracket_tol,
    )?;
    Ok(LambdaStarResult {
        value: match res.value {
            LambdaStarValue::Root(x) => LambdaStarValue::Root(-x),
            LambdaStarValue::NoRootUpTo(c) => LambdaStarValue::NoRootUpTo(-c),
            LambdaStarValue::BelowGap => LambdaStarValue::BelowGap,
        },
        bracket: (-res.bracket.1, -res.bracket.0),
        evaluations: res.evaluations,
    })
}

/// Audits the monotonicity that the bisection relies on by sampling the
/// form at interior points of the bracket; returns the number of sign
/// changes found (must be one for a legitimate root).
pub fn audit_bracket_sign_changes(
    p: &RadialProfile,
    params: &CouplingParams,
    mode: i32,
    bracket: (f64, f64),
    samples: usize,
) -> Result<usize> {
    let ev = JModeEvaluator::new(p, params, mode)?;
    let mut changes = 0;
    let mut prev = ev.eval(bracket.0)?.total;
    for k in 1..=samples {
        let mu = bracket.0 + (bracket.1 - bracket.0) * k as f64 / samples as f64;
        let v = ev.eval(mu)?.total;
        if prev.signum() != v.signum() && prev != 0.0 && v != 0.0 {
            changes += 1;
        }
        prev = v;
    }
    Ok(changes)
}

/// Trial family for the variational search.
pub enum TrialFamily {
    /// `rho^A e^{-B rho}` with box bounds on `(A, B)`.
    PowerExp {
        a_bounds: (f64, f64),
        b_bounds: (f64, f64),
    },
    /// `rho^A e^{-B rho}` truncated outside `[eps, 1/eps]`; parameters
    /// `(A, B)` with a fixed truncation.
    TruncatedPower {
        a_bounds: (f64, f64),
        b_bounds: (f64, f64),
        eps: f64,
    },
    /// Arbitrary parametrized profiles.
    Custom {
        bounds: Vec<(f64, f64)>,
        build: Box<dyn Fn(&[f64], &Arc<RadialGrid>) -> Result<RadialProfile> + Sync>,
    },
}

impl TrialFamily {
    /// Default electron family: exponents above the integrability edge
    /// `a - 1/2`, decay rates bracketing every closed-form profile.
    pub fn default_power_exp(params: &CouplingParams) -> Self {
        TrialFamily::PowerExp {
            a_bounds: (params.a() - 0.5 + 0.02, 1.0),
            b_bounds: (0.05, 5.0),
        }
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        match self {
            TrialFamily::PowerExp { a_bounds, b_bounds }
            | TrialFamily::TruncatedPower {
                a_bounds, b_bounds, ..
            } => vec![*a_bounds, *b_bounds],
            TrialFamily::Custom { bounds, .. } => bounds.clone(),
        }
    }

    fn build(&self, x: &[f64], grid: &Arc<RadialGrid>) -> Result<RadialProfile> {
        match self {
            TrialFamily::PowerExp { .. } => {
                RadialProfile::from_real_fn(grid, |r| r.powf(x[0]) * (-x[1] * r).exp())
                    .with_asymptotics(Some(x[0]), Some(x[1]))
            }
            TrialFamily::TruncatedPower { eps, .. } => {
                let p = RadialProfile::from_real_fn(grid, |r| r.powf(x[0]) * (-x[1] * r).exp());
                crate::grid::make_truncation(&p, *eps)
            }
            TrialFamily::Custom { build, .. } => build(x, grid),
        }
    }
}

/// A trial family together with the Fourier mode it is evaluated in.
pub struct TrialFamilySpec {
    pub family: TrialFamily,
    pub mode: i32,
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    /// Budget of objective (root-solve) evaluations, restarts included.
    pub max_evals: usize,
    /// Simplex diameter below which a run stops.
    pub simplex_tol: f64,
    /// Objective spread below which a run stops.
    pub f_tol: f64,
    pub seed_point: Option<[f64; 2]>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_evals: 200,
            simplex_tol: 1e-5,
            f_tol: 1e-10,
            seed_point: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeResult {
    pub best_lambda: f64,
    pub best_params: Vec<f64>,
    /// Visited points and objective values, in evaluation order.
    pub trace: Vec<(Vec<f64>, f64)>,
    pub evaluations: usize,
    /// False when the evaluation budget ran out first.
    pub converged: bool,
}

struct Simplex {
    pts: Vec<Vec<f64>>,
    vals: Vec<f64>,
}

fn clamp_to(bounds: &[(f64, f64)], x: &mut [f64]) {
    for (xi, (lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(*lo, *hi);
    }
}

/// Derivative-free simplex minimization of `lambda*` over a trial family;
/// reflection/expansion/contraction coefficients (1, 2, 0.5), one restart
/// from the perturbed optimum.
pub fn minimize_lambda_star(
    params: &CouplingParams,
    spec: &TrialFamilySpec,
    grid: &Arc<RadialGrid>,
    opts: MinimizeOptions,
) -> Result<MinimizeResult> {
    let bounds = spec.family.bounds();
    let dim = bounds.len();
    let mut trace: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut evals = 0usize;

    let objective = |x: &[f64], trace: &mut Vec<(Vec<f64>, f64)>, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let p = spec.family.build(x, grid)?;
        let res = lambda_star(
            &p,
            params,
            LambdaStarOptions {
                mode: spec.mode,
                ..Default::default()
            },
        )?;
        let v = match res.value {
            LambdaStarValue::Root(v) => v,
            LambdaStarValue::NoRootUpTo(c) => c,
            LambdaStarValue::BelowGap => -1.0,
        };
        trace.push((x.to_vec(), v));
        Ok(v)
    };

    let start: Vec<f64> = match opts.seed_point {
        Some(s) if dim == 2 => s.to_vec(),
        _ => bounds
            .iter()
            .map(|(lo, hi)| lo + 0.35 * (hi - lo))
            .collect(),
    };

    let run = |x0: Vec<f64>,
                   budget: usize,
                   trace: &mut Vec<(Vec<f64>, f64)>,
                   evals: &mut usize|
     -> Result<(Vec<f64>, f64, bool)> {
        let mut sx = Simplex {
            pts: Vec::with_capacity(dim + 1),
            vals: Vec::with_capacity(dim + 1),
        };
        let start_evals = *evals;
        let mut x = x0.clone();
        clamp_to(&bounds, &mut x);
        sx.pts.push(x.clone());
        sx.vals.push(objective(&x, trace, evals)?);
        for d in 0..dim {
            let mut xi = x.clone();
            let span = bounds[d].1 - bounds[d].0;
            xi[d] = (xi[d] + 0.15 * span).min(bounds[d].1);
            if (xi[d] - x[d]).abs() < 1e-12 {
                xi[d] = (x[d] - 0.15 * span).max(bounds[d].0);
            }
            sx.pts.push(xi.clone());
            sx.vals.push(objective(&xi, trace, evals)?);
        }
        let mut converged = false;
        while *evals - start_evals < budget {
            // order
            let mut idx: Vec<usize> = (0..=dim).collect();
            idx.sort_by(|&i, &j| sx.vals[i].partial_cmp(&sx.vals[j]).unwrap());
            let pts: Vec<Vec<f64>> = idx.iter().map(|&i| sx.pts[i].clone()).collect();
            let vals: Vec<f64> = idx.iter().map(|&i| sx.vals[i]).collect();
            sx.pts = pts;
            sx.vals = vals;

            let diam = (0..dim)
                .map(|d| {
                    let lo = sx.pts.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
                    let hi = sx.pts.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max);
                    hi - lo
                })
                .fold(0.0f64, f64::max);
            if diam < opts.simplex_tol && (sx.vals[dim] - sx.vals[0]).abs() < opts.f_tol {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..dim)
                .map(|d| sx.pts[..dim].iter().map(|p| p[d]).sum::<f64>() / dim as f64)
                .collect();
            let worst = sx.pts[dim].clone();
            let mut refl: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + (c - w))
                .collect();
            clamp_to(&bounds, &mut refl);
            let f_refl = objective(&refl, trace, evals)?;
            if f_refl < sx.vals[0] {
                let mut exp: Vec<f64> = centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + 2.0 * (c - w))
                    .collect();
                clamp_to(&bounds, &mut exp);
                let f_exp = objective(&exp, trace, evals)?;
                if f_exp < f_refl {
                    sx.pts[dim] = exp;
                    sx.vals[dim] = f_exp;
                } else {
                    sx.pts[dim] = refl;
                    sx.vals[dim] = f_refl;
                }
            } else if f_refl < sx.vals[dim - 1] {
                sx.pts[dim] = refl;
                sx.vals[dim] = f_refl;
            } else {
                let mut contr: Vec<f64> = centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + 0.5 * (w - c))
                    .collect();
                clamp_to(&bounds, &mut contr);
                let f_contr = objective(&contr, trace, evals)?;
                if f_contr < sx.vals[dim] {
                    sx.pts[dim] = contr;
                    sx.vals[dim] = f_contr;
                } else {
                    // shrink toward the best vertex
                    for i in 1..=dim {
                        let best = sx.pts[0].clone();
                        for d in 0..dim {
                            sx.pts[i][d] = best[d] + 0.5 * (sx.pts[i][d] - best[d]);
                        }
                        sx.vals[i] = objective(&sx.pts[i].clone(), trace, evals)?;
                    }
                }
            }
        }
        let best = sx
            .vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        Ok((sx.pts[best].clone(), sx.vals[best], converged))
    };

    let budget1 = opts.max_evals * 3 / 5;
    let (x1, f1, conv1) = run(start, budget1, &mut trace, &mut evals)?;
    // single restart from the perturbed optimum
    let mut x2_seed = x1.clone();
    for (d, v) in x2_seed.iter_mut().enumerate() {
        *v += 0.02 * (bounds[d].1 - bounds[d].0);
    }
    let remaining = opts.max_evals.saturating_sub(evals);
    let (x2, f2, conv2) = if remaining > dim + 2 {
        run(x2_seed, remaining, &mut trace, &mut evals)?
    } else {
        (x1.clone(), f1, conv1)
    };
    let (bx, bf) = if f2 < f1 { (x2, f2) } else { (x1, f1) };
    Ok(MinimizeResult {
        best_lambda: bf,
        best_params: bx,
        trace,
        evaluations: evals,
        converged: conv1 || conv2,
    })
}

/// Variationally determined positron ground energy: the supremum over the
/// trial family of the positron root, taken at the conjugate flux `-a`
/// (the charge-conjugation map `(nu, a, lambda) -> (-nu, -a, -lambda)`).
/// Equals `-lambda_{nu,a}`, attained by the electron-optimal profile.
pub fn positron_ground(
    params: &CouplingParams,
    grid: &Arc<RadialGrid>,
    opts: MinimizeOptions,
) -> Result<MinimizeResult> {
    let conj = params.flux_conjugate();
    let family = TrialFamily::default_power_exp(params);
    let mut trace: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut evals = 0usize;
    // reuse the electron machinery through the exact per-mode identity
    // J+_0(p, nu, -a, lam) = J_0(p, nu, a, -lam): maximizing the positron
    // root is minimizing the electron root and negating.
    let spec = TrialFamilySpec { family, mode: 0 };
    let inner = minimize_lambda_star(params, &spec, grid, opts)?;
    // confirm through the positron channel itself at the found optimum
    let p = spec.family.build(&inner.best_params, grid)?;
    let check = lambda_star_positron(
        &p,
        &conj,
        LambdaStarOptions {
            mode: 0,
            ..Default::default()
        },
    )?;
    evals += inner.evaluations + check.evaluations;
    for (x, v) in &inner.trace {
        trace.push((x.clone(), -v));
    }
    let best_lambda = match check.value {
        LambdaStarValue::Root(v) => v,
        _ => -inner.best_lambda,
    };
    Ok(MinimizeResult {
        best_lambda,
        best_params: inner.best_params,
        trace,
        evaluations: evals,
        converged: inner.converged,
    })
}

/// One row of the supercritical scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRow {
    pub eps: f64,
    pub j_at_minus_one: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupercriticalScan {
    pub nu: f64,
    pub a: f64,
    pub rows: Vec<ScanRow>,
    /// Largest scanned `eps` with a negative form value, if any.
    pub eps_star: Option<f64>,
    /// Fitted slope of the form value against `ln eps` over the small-eps
    /// half of the scan.
    pub log_slope: f64,
}

/// Evaluates the witness family at the gap edge over a list of scales. The
/// form decreases like `C_1 ln eps (c(a)^2/nu - nu) + C_2`: it crosses zero
/// at a finite threshold exactly in the supercritical regime.
pub fn supercritical_scan(
    params: &CouplingParams,
    eps_list: &[f64],
) -> Result<SupercriticalScan> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if !(0.0 < eps && eps <= 1.0) {
            return Err(CoreError::Domain(format!("eps = {eps} outside (0, 1]")));
        }
        let spec = GridSpec::log_uniform((eps * 1e-3).min(1e-6), 50.0, 2000);
        let grid = build_grid(spec)?;
        let witness = make_supercritical_witness(params, eps, &grid)?;
        let j = crate::forms::eval_j_mode(&witness, params, -1.0, 0)?.total;
        rows.push(ScanRow {
            eps,
            j_at_minus_one: j,
        });
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|p, q| q.eps.partial_cmp(&p.eps).unwrap());
    let eps_star = sorted
        .iter()
        .find(|r| r.j_at_minus_one < 0.0)
        .map(|r| r.eps);
    // least-squares slope in ln(eps) on the small-eps half
    let half = &sorted[sorted.len() / 2..];
    let n = half.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for r in half {
        let x = r.eps.ln();
        sx += x;
        sy += r.j_at_minus_one;
        sxx += x * x;
        sxy += x * r.j_at_minus_one;
    }
    let log_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(SupercriticalScan {
        nu: params.nu(),
        a: params.a(),
        rows,
        eps_star,
        log_slope,
    })
}

/// Both sides of the completed-square identity and their relative defect.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SquareCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
}

/// Verifies
/// `int |rho phi' + mu (nu + rho) phi|^2 rho^{-2a}/(nu + rho)
///  = I_1 + mu^2 I_2 + (nu mu^2 - (1-2a) mu) I_3`
/// on the sampled profile.
pub fn completed_square_check(
    phi: &RadialProfile,
    params: &CouplingParams,
    mu: f64,
) -> Result<SquareCheck> {
    let a = params.a();
    let nu = params.nu();
    let grid = phi.grid();
    let dphi = differentiate_sharp(phi);
    // lhs through a synthetic profile so the head completion applies
    let combo: Vec<_> = grid
        .nodes()
        .iter()
        .zip(phi.values())
        .zip(dphi.values())
        .map(|((&r, v), d)| d * r + v * (mu * (nu + r)))
        .collect();
    let combo_exp = phi.origin_exponent(); // rho phi' + mu nu phi ~ rho^A
    let synth = RadialProfile::from_values(Arc::clone(grid), combo)?
        .with_asymptotics_unchecked(combo_exp, phi.decay_rate());
    let lhs = integrate_weighted(
        &synth,
        -2.0 * a,
        Some(RationalWeight {
            alpha: 1.0,
            beta: nu,
        }),
    )?
    .value;
    let i1 = integrate_weighted(
        &dphi,
        2.0 - 2.0 * a,
        Some(RationalWeight {
            alpha: 1.0,
            beta: nu,
        }),
    )?
    .value;
    let i2 = integrate_weighted(phi, 1.0 - 2.0 * a, None)?.value;
    let i3 = integrate_weighted(phi, -2.0 * a, None)?.value;
    let rhs = i1 + mu * mu * i2 + (nu * mu * mu - (1.0 - 2.0 * a) * mu) * i3;
    let scale = i1.abs() + mu * mu * i2.abs() + (nu * mu * mu - (1.0 - 2.0 * a) * mu).abs() * i3.abs();
    Ok(SquareCheck {
        lhs,
        rhs,
        defect: (lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE),
    })
}
