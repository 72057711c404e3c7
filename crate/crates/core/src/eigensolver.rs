//! Gap eigenvalues of the per-mode radial problem by two independent
//! numerical methods, cross-validated against the closed forms:
//!
//! * form bisection: a weighted-basis Galerkin discretization of the
//!   per-mode quadratic form, with the eigenvalue located where the
//!   smallest eigenvalue of the pencil crosses zero;
//! * shooting: adaptive integration of the first-order radial system from
//!   both ends, with the eigenvalue located where the matching defect
//!   changes sign.
//!
//! The sign conventions of the first-order system are fixed by requiring
//! the closed-form ground state to solve it exactly: with upper component
//! `f` in mode `ell` and lower component `g` in mode `ell + 1`,
//!
//! ```text
//! f' = (ell - a) f / rho - (1 + lambda + nu/rho) g
//! g' = -(ell + 1 - a) g / rho - (1 - lambda - nu/rho) f
//! ```
//!
//! and `f = rho^{s - 1/2} e^{-nu rho / c}`, `g = mu f` with
//! `mu = (c - s)/nu`, `s = sqrt(c^2 - nu^2)`, solves it at
//! `lambda = s / c` for `ell = 0`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::grid::{
    build_grid, differentiate_in_map, head_power_integral, GridSpec, RadialGrid, RadialProfile,
    RationalWeight,
};
use crate::model::CouplingParams;

/// Which numerical path produced an [`EigenResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveMethod {
    FormBisection,
    Shooting,
}

/// A gap eigenvalue with its two-component radial eigenprofile.
///
/// Profiles are stored in the weighted radial variables: `upper_profile`
/// carries the mode-`ell` radial factor of the substituted upper component,
/// `lower_profile` the mode-`ell + 1` radial factor of the lower one (the
/// physical lower component also carries a phase factor `i`).
#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub lambda: f64,
    pub ell: i32,
    pub residual: f64,
    pub method: SolveMethod,
    #[serde(skip)]
    pub upper_profile: RadialProfile,
    #[serde(skip)]
    pub lower_profile: RadialProfile,
}

/// Symmetric tridiagonal discretization of the per-mode quadratic form at a
/// probe energy, in the Frobenius-weighted hat basis
/// `psi_i = rho^A h_i(ln rho)` with the first basis function extended as
/// `rho^A` over `(0, rho_min)` and a Dirichlet cap at `rho_max`.
#[derive(Debug, Clone)]
pub struct ModePencil {
    pub ell: i32,
    pub lambda: f64,
    /// Frobenius exponent of the basis weight.
    pub frobenius_exponent: f64,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    grid: Arc<RadialGrid>,
}

const GAUSS4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_26,
    0.339_981_043_584_856_26,
    0.861_136_311_594_052_6,
];
const GAUSS4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_2,
    0.652_145_154_862_546_2,
    0.347_854_845_137_453_85,
];

/// Frobenius exponent of the weighted radial variable in mode `ell`:
/// `A_ell = a - 1/2 + sqrt(c_ell^2 - nu^2)`.
fn frobenius_exponent(params: &CouplingParams, ell: i32) -> Result<f64> {
    let c_ell = crate::model::mode_half_gap(ell, params.a());
    if params.nu() >= c_ell.abs() {
        return Err(CoreError::NoCrossing { ell });
    }
    let s_ell = (c_ell * c_ell - params.nu() * params.nu()).sqrt();
    Ok(params.a() - 0.5 + c_ell.signum() * s_ell)
}

/// Assembles the tridiagonal pencil `Q_h(lambda)` such that `v^T Q_h v`
/// approximates the per-mode form (without the `2 pi` factor) of the
/// weighted piecewise interpolant of `v`.
pub fn assemble_mode_pencil(
    params: &CouplingParams,
    ell: i32,
    lambda: f64,
    grid: &Arc<RadialGrid>,
) -> Result<ModePencil> {
    if !(-1.0 < lambda && lambda < 1.0) {
        return Err(CoreError::Domain(format!(
            "probe lambda = {lambda} outside the gap"
        )));
    }
    if grid.len() < 16 {
        return Err(CoreError::BadSpec("grid too small for assembly".into()));
    }
    let a = params.a();
    let nu = params.nu();
    let a_frob = frobenius_exponent(params, ell)?;
    let u = grid.u_nodes();
    let n = grid.len();
    let mut diag = vec![0.0; n];
    let mut offdiag = vec![0.0; n - 1];
    let lf = ell as f64;
    for e in 0..n - 1 {
        let (u0, u1) = (u[e], u[e + 1]);
        let h = u1 - u0;
        let mut k = [[0.0f64; 2]; 2];
        for (gx, gw) in GAUSS4_NODES.iter().zip(&GAUSS4_WEIGHTS) {
            let uu = 0.5 * (u0 + u1) + 0.5 * h * gx;
            let w = 0.5 * h * gw;
            let r = uu.exp();
            let r2a = r.powf(2.0 * a_frob - 2.0 * a);
            let t = (uu - u0) / h;
            let chi = [1.0 - t, t];
            let dchi = [-1.0 / h, 1.0 / h];
            let kinw = 1.0 / ((1.0 + lambda) * r + nu);
            let massw = (1.0 - lambda) * r - nu;
            // (rho psi' - ell psi) = rho^{A} ((A - ell) chi + chi_u)
            let b = [
                (a_frob - lf) * chi[0] + dchi[0],
                (a_frob - lf) * chi[1] + dchi[1],
            ];
            for i in 0..2 {
                for j in 0..2 {
                    k[i][j] += w * r2a * r * (b[i] * b[j] * kinw + massw * chi[i] * chi[j]);
                }
            }
        }
        diag[e] += k[0][0];
        diag[e + 1] += k[1][1];
        offdiag[e] += k[0][1];
    }
    // analytic extension of the first basis function over (0, first node]
    let weight = RationalWeight {
        alpha: 1.0 + lambda,
        beta: nu,
    };
    let q0 = 2.0 * a_frob - 2.0 * a;
    let coef = a_frob - lf;
    let delta = grid.nodes()[0];
    let head = coef * coef * head_power_integral(q0, 0.0, weight, delta)
        + (1.0 - lambda) * head_power_integral(q0 + 1.0, 0.0, RationalWeight::ONE, delta)
        - nu * head_power_integral(q0, 0.0, RationalWeight::ONE, delta);
    diag[0] += head;
    // Dirichlet cap at the far end
    diag.pop();
    offdiag.pop();
    Ok(ModePencil {
        ell,
        lambda,
        frobenius_exponent: a_frob,
        diag,
        offdiag,
        grid: Arc::clone(grid),
    })
}

impl ModePencil {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `v^T Q_h v` for profile samples `v` (divided by the basis weight
    /// internally). Approximates the per-mode form value over `2 pi`.
    pub fn quad_value(&self, samples: &[Complex64]) -> f64 {
        let n = self.dim();
        let w: Vec<f64> = self
            .grid
            .nodes()
            .iter()
            .zip(samples)
            .take(n)
            .map(|(&r, v)| v.re * r.powf(-self.frobenius_exponent))
            .collect();
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.diag[i] * w[i] * w[i];
            if i + 1 < n {
                acc += 2.0 * self.offdiag[i] * w[i] * w[i + 1];
            }
        }
        acc
    }

    /// Number of negative pivots of the `L D L^T` factorization: the count
    /// of gap eigenvalues below the probe.
    pub fn negative_inertia(&self) -> usize {
        let n = self.dim();
        let mut count = 0;
        let mut d = self.diag[0];
        if d <= 0.0 {
            count += 1;
        }
        for i in 1..n {
            let e = self.offdiag[i - 1];
            let mut dn = self.diag[i] - e * e / d;
            if dn == 0.0 {
                dn = -f64::MIN_POSITIVE;
            }
            if dn <= 0.0 {
                count += 1;
            }
            d = dn;
        }
        count
    }

    /// Smallest eigenvalue and eigenvector by inertia bisection plus
    /// inverse iteration.
    pub fn min_eigenpair(&self) -> (f64, Vec<f64>) {
        let n = self.dim();
        let scale = self
            .diag
            .iter()
            .map(|d| d.abs())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let inertia_at = |theta: f64| {
            let mut count = 0;
            let mut d = self.diag[0] - theta;
            if d <= 0.0 {
                count += 1;
            }
            for i in 1..n {
                let e = self.offdiag[i - 1];
                let mut dn = self.diag[i] - theta - e * e / d;
                if dn == 0.0 {
                    dn = -f64::MIN_POSITIVE;
                }
                if dn <= 0.0 {
                    count += 1;
                }
                d = dn;
            }
            count
        };
        let (mut lo, mut hi) = (-2.0 * scale, 2.0 * scale);
        while inertia_at(lo) > 0 {
            lo *= 2.0;
        }
        while inertia_at(hi) == 0 {
            hi *= 2.0;
        }
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if inertia_at(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 * scale {
                break;
            }
        }
        let theta = 0.5 * (lo + hi);
        // inverse iteration with a slight inward shift
        let shift = theta - 1e-10 * scale;
        let mut v = vec![1.0f64; n];
        for _ in 0..6 {
            let mut w = solve_tridiag_shifted(&self.diag, &self.offdiag, shift, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut w {
                *x /= norm;
            }
            v = w;
        }
        // deterministic sign: largest-magnitude entry positive
        let imax = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        if v[imax] < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
        (theta, v)
    }
}

fn solve_tridiag_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut denom = diag[0] - shift;
    if denom.abs() < 1e-300 {
        denom = 1e-300;
    }
    c[0] = off.first().copied().unwrap_or(0.0) / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        let e = off[i - 1];
        let mut m = diag[i] - shift - e * c[i - 1];
        if m.abs() < 1e-300 {
            m = 1e-300;
        }
        c[i] = if i < n - 1 { off[i] / m } else { 0.0 };
        d[i] = (rhs[i] - e * d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Reconstructs the lower radial component from the upper one through the
/// elimination relation: `L = rho^{-2a} (ell eta - rho eta') / ((1+lambda) rho + nu)`.
pub fn reconstruct_lower(
    upper: &RadialProfile,
    params: &CouplingParams,
    lambda: f64,
    ell: i32,
) -> RadialProfile {
    let a = params.a();
    let nu = params.nu();
    let du = differentiate_in_map(upper);
    let values: Vec<Complex64> = upper
        .grid()
        .nodes()
        .iter()
        .zip(upper.values())
        .zip(&du)
        .map(|((&r, v), d)| {
            (v * ell as f64 - d) * (r.powf(-2.0 * a) / ((1.0 + lambda) * r + nu))
        })
        .collect();
    RadialProfile::from_values(Arc::clone(upper.grid()), values).expect("same grid")
}

fn normalized(mut values: Vec<Complex64>) -> Vec<Complex64> {
    let max = values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    if max > 0.0 {
        let imax = values
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let phase = values[imax] / values[imax].norm();
        let scale = phase * max;
        for v in &mut values {
            *v /= scale;
        }
    }
    values
}

/// Lowest gap eigenvalue by bisection on the inertia of the form pencil:
/// the pencil is positive definite below the ground state and acquires a
/// negative direction above it.
pub fn lowest_gap_eigenvalue_form(
    params: &CouplingParams,
    ell: i32,
    grid: &Arc<RadialGrid>,
) -> Result<EigenResult> {
    let edge = 1e-9;
    let (mut lo, mut hi) = (-1.0 + edge, 1.0 - edge);
    if assemble_mode_pencil(params, ell, lo, grid)?.negative_inertia() > 0 {
        return Err(CoreError::NoCrossing { ell });
    }
    if assemble_mode_pencil(params, ell, hi, grid)?.negative_inertia() == 0 {
        return Err(CoreError::NoCrossing { ell });
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if assemble_mode_pencil(params, ell, mid, grid)?.negative_inertia() == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-11 {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let pencil = assemble_mode_pencil(params, ell, lambda, grid)?;
    let (theta, coeffs) = pencil.min_eigenpair();
    let a_frob = pencil.frobenius_exponent;
    let mut values: Vec<Complex64> = grid
        .nodes()
        .iter()
        .zip(coeffs.iter().chain(std::iter::repeat(&0.0)))
        .map(|(&r, &c)| Complex64::new(c * r.powf(a_frob), 0.0))
        .collect();
    values.truncate(grid.len());
    let values = normalized(values);
    let upper = RadialProfile::from_values(Arc::clone(grid), values)?
        .with_asymptotics_unchecked(Some(a_frob), Some((1.0 - lambda * lambda).sqrt()));
    let lower = reconstruct_lower(&upper, params, lambda, ell);
    let scale = pencil
        .diag
        .iter()
        .map(|d| d.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    Ok(EigenResult {
        lambda,
        ell,
        residual: (hi - lo).max(theta.abs() / scale),
        method: SolveMethod::FormBisection,
        upper_profile: upper,
        lower_profile: lower,
    })
}

/// State of the first-order radial system in the log variable.
#[derive(Debug, Clone, Copy)]
struct SpinorState {
    f: f64,
    g: f64,
}

fn system_rhs(params: &CouplingParams, ell: i32, lambda: f64, u: f64, y: SpinorState) -> SpinorState {
    let r = u.exp();
    let a = params.a();
    let nu = params.nu();
    let lf = ell as f64;
    SpinorState {
        f: (lf - a) * y.f - ((1.0 + lambda) * r + nu) * y.g,
        g: -(lf + 1.0 - a) * y.g - ((1.0 - lambda) * r - nu) * y.f,
    }
}

/// Dormand-Prince 5(4) step with PI step-size control, specialized to the
/// 2-component radial system.
fn rk45_integrate(
    params: &CouplingParams,
    ell: i32,
    lambda: f64,
    mut u: f64,
    u_end: f64,
    mut y: SpinorState,
    rtol: f64,
    mut observe: impl FnMut(f64, SpinorState),
) -> Result<SpinorState> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let span = u_end - u;
    let dir = span.signum();
    let mut h: f64 = dir * 0.01;
    let mut steps = 0usize;
    observe(u, y);
    while (u_end - u) * dir > 1e-14 {
        steps += 1;
        if steps > 2_000_000 {
            return Err(CoreError::StiffIntegration(format!(
                "step budget exhausted at u = {u}"
            )));
        }
        if (u + h - u_end) * dir > 0.0 {
            h = u_end - u;
        }
        let add = |y: SpinorState, k: &[SpinorState], c: &[f64]| SpinorState {
            f: y.f + h * k.iter().zip(c).map(|(k, c)| c * k.f).sum::<f64>(),
            g: y.g + h * k.iter().zip(c).map(|(k, c)| c * k.g).sum::<f64>(),
        };
        let k1 = system_rhs(params, ell, lambda, u, y);
        let k2 = system_rhs(params, ell, lambda, u + A21 * h, add(y, &[k1], &[A21]));
        let k3 = system_rhs(
            params, ell, lambda,
            u + 0.3 * h,
            add(y, &[k1, k2], &[A31, A32]),
        );
        let k4 = system_rhs(
            params, ell, lambda,
            u + 0.8 * h,
            add(y, &[k1, k2, k3], &[A41, A42, A43]),
        );
        let k5 = system_rhs(
            params, ell, lambda,
            u + 8.0 / 9.0 * h,
            add(y, &[k1, k2, k3, k4], &[A51, A52, A53, A54]),
        );
        let k6 = system_rhs(
            params, ell, lambda,
            u + h,
            add(y, &[k1, k2, k3, k4, k5], &[A61, A62, A63, A64, A65]),
        );
        let y5 = add(y, &[k1, k3, k4, k5, k6], &[B1, B3, B4, B5, B6]);
        let k7 = system_rhs(params, ell, lambda, u + h, y5);
        let err = SpinorState {
            f: h * (E1 * k1.f + E3 * k3.f + E4 * k4.f + E5 * k5.f + E6 * k6.f + E7 * k7.f),
            g: h * (E1 * k1.g + E3 * k3.g + E4 * k4.g + E5 * k5.g + E6 * k6.g + E7 * k7.g),
        };
        let scale_f = rtol * y.f.abs().max(y5.f.abs()).max(1e-290);
        let scale_g = rtol * y.g.abs().max(y5.g.abs()).max(1e-290);
        let err_norm = ((err.f / scale_f).powi(2) + (err.g / scale_g).powi(2)).sqrt()
            / std::f64::consts::SQRT_2;
        if err_norm <= 1.0 {
            u += h;
            y = y5;
            observe(u, y);
        }
        let fac = (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0);
        h *= fac;
        if h.abs() < 1e-13 {
            return Err(CoreError::StiffIntegration(format!(
                "step collapsed at u = {u}"
            )));
        }
    }
    Ok(y)
}

/// Two-term Frobenius data of the regular solution at `rho0`:
/// `f = rho^p (1 + f1 rho)`, `g = kappa rho^p (1 + g1 rho)`, the common
/// `rho0^p` factor dropped (the system is linear).
fn frobenius_start(params: &CouplingParams, ell: i32, lambda: f64, rho0: f64) -> Result<SpinorState> {
    let a = params.a();
    let nu = params.nu();
    let c_ell = crate::model::mode_half_gap(ell, a);
    if nu >= c_ell.abs() {
        return Err(CoreError::NoCrossing { ell });
    }
    let s_ell = (c_ell * c_ell - nu * nu).sqrt();
    let kappa = (c_ell - c_ell.signum() * s_ell) / nu * c_ell.signum();
    // first-order correction from the rho^p order of both equations:
    //   (1 - kappa nu) f1 + kappa nu g1 = -(1 + lambda) kappa
    //   -nu f1 + (nu + kappa) g1 = -(1 - lambda)
    let a11 = 1.0 - kappa * nu;
    let a12 = kappa * nu;
    let b1 = -(1.0 + lambda) * kappa;
    let a21 = -nu;
    let a22 = nu + kappa;
    let b2 = -(1.0 - lambda);
    let det = a11 * a22 - a12 * a21;
    let (f1, g1) = if det.abs() > 1e-14 {
        ((b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det)
    } else {
        (0.0, 0.0)
    };
    Ok(SpinorState {
        f: 1.0 + f1 * rho0,
        g: kappa * (1.0 + g1 * rho0),
    })
}

/// Report of one two-sided integration at a probe energy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShootingDefect {
    /// Normalized Wronskian-type mismatch at the match point.
    pub defect: f64,
    pub lambda: f64,
}

/// Integrates the radial system from both ends and returns the normalized
/// mismatch at `match_point`. The defect changes sign across an eigenvalue.
pub fn shoot_radial_system(
    params: &CouplingParams,
    ell: i32,
    lambda: f64,
    grid: &Arc<RadialGrid>,
    match_point: f64,
) -> Result<ShootingDefect> {
    if !(-1.0 < lambda && lambda < 1.0) {
        return Err(CoreError::Domain(format!(
            "probe lambda = {lambda} outside the gap"
        )));
    }
    if match_point <= 20.0 * grid.rho_min() || match_point >= 0.5 * grid.rho_max() {
        return Err(CoreError::BadSpec(format!(
            "match point {match_point} not inside the grid interior"
        )));
    }
    let rho0 = 10.0 * grid.rho_min();
    let y0 = frobenius_start(params, ell, lambda, rho0)?;
    let rtol = 1e-11;
    let inner = rk45_integrate(
        params, ell, lambda,
        rho0.ln(),
        match_point.ln(),
        y0,
        rtol,
        |_, _| {},
    )?;
    let tau = ((1.0 - lambda) / (1.0 + lambda)).sqrt();
    let outer = rk45_integrate(
        params, ell, lambda,
        grid.rho_max().ln(),
        match_point.ln(),
        SpinorState { f: 1.0, g: tau },
        rtol,
        |_, _| {},
    )?;
    let norm_l = (inner.f * inner.f + inner.g * inner.g).sqrt();
    let norm_r = (outer.f * outer.f + outer.g * outer.g).sqrt();
    Ok(ShootingDefect {
        defect: (inner.f * outer.g - inner.g * outer.f) / (norm_l * norm_r).max(1e-300),
        lambda,
    })
}

/// Lowest gap eigenvalue by sign-change bracketing of the matching defect,
/// then bisection; eigenprofiles sampled on the grid.
pub fn eigensolve_shooting(
    params: &CouplingParams,
    ell: i32,
    grid: &Arc<RadialGrid>,
) -> Result<EigenResult> {
    let match_point = 1.0;
    let edge = 1e-6;
    // multi-level defect scan: the towers accumulate at the upper gap edge,
    // so a uniform scan is refined toward lambda = 1 until the leftmost
    // sign change is isolated
    let scan = |lo: f64, hi: f64, m: usize| -> Result<Option<(f64, f64)>> {
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=m {
            let lam = lo + (hi - lo) * k as f64 / m as f64;
            let d = shoot_radial_system(params, ell, lam, grid, match_point)?.defect;
            if let Some((lp, dp)) = prev {
                if dp.signum() != d.signum() {
                    return Ok(Some((lp, lam)));
                }
            }
            prev = Some((lam, d));
        }
        Ok(None)
    };
    let (mut glo, ghi) = (-1.0 + edge, 1.0 - edge);
    let mut bracket = None;
    for _level in 0..4 {
        match scan(glo, ghi, 96)? {
            Some((lo, hi)) => {
                // within the clustered upper region, refine once more so the
                // leftmost root of the cell is the one bracketed
                if lo > 0.8 && hi - lo > 1e-7 {
                    if let Some(inner) = scan(lo, hi, 64)? {
                        bracket = Some(inner);
                        break;
                    }
                }
                bracket = Some((lo, hi));
                break;
            }
            None => {
                // sign changes pair-hidden: zoom the top of the range
                let width = ghi - glo;
                glo = ghi - width / 12.0;
                if width < 1e-6 {
                    break;
                }
            }
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(CoreError::NoCrossing { ell })?;
    let mut d_lo = shoot_radial_system(params, ell, lo, grid, match_point)?.defect;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let dm = shoot_radial_system(params, ell, mid, grid, match_point)?.defect;
        if dm.signum() == d_lo.signum() {
            lo = mid;
            d_lo = dm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let residual = shoot_radial_system(params, ell, lambda, grid, match_point)?
        .defect
        .abs();

    // sample the matched solution on the grid nodes
    let rho0 = 10.0 * grid.rho_min();
    let n = grid.len();
    let mut f_vals = vec![0.0f64; n];
    let mut g_vals = vec![0.0f64; n];
    let i_match = grid
        .nodes()
        .iter()
        .position(|&r| r >= match_point)
        .unwrap_or(n / 2);
    let i_start = grid.nodes().iter().position(|&r| r >= rho0).unwrap_or(0);
    let rtol = 1e-11;
    // inner sweep: node-to-node up to the match node
    let mut y = frobenius_start(params, ell, lambda, grid.nodes()[i_start])?;
    f_vals[i_start] = y.f;
    g_vals[i_start] = y.g;
    for i in i_start..=i_match.min(n - 1) {
        if i > i_start {
            y = rk45_integrate(
                params, ell, lambda,
                grid.u_nodes()[i - 1],
                grid.u_nodes()[i],
                y,
                rtol,
                |_, _| {},
            )?;
            f_vals[i] = y.f;
            g_vals[i] = y.g;
        }
    }
    // Frobenius fill below the start node
    let c_ell = crate::model::mode_half_gap(ell, params.a());
    let s_ell = (c_ell * c_ell - params.nu() * params.nu()).sqrt();
    let p_exp = s_ell - 0.5; // spinor exponent relative to the start sample
    for i in 0..i_start {
        let scale = (grid.nodes()[i] / grid.nodes()[i_start]).powf(p_exp);
        f_vals[i] = f_vals[i_start] * scale;
        g_vals[i] = g_vals[i_start] * scale;
    }
    let inner_end = SpinorState {
        f: f_vals[i_match],
        g: g_vals[i_match],
    };
    // outer sweep down to the match node
    let tau = ((1.0 - lambda) / (1.0 + lambda)).sqrt();
    let mut y = SpinorState { f: 1.0, g: tau };
    let mut outer_f = vec![0.0f64; n];
    let mut outer_g = vec![0.0f64; n];
    outer_f[n - 1] = y.f;
    outer_g[n - 1] = y.g;
    for i in (i_match..n - 1).rev() {
        y = rk45_integrate(
            params, ell, lambda,
            grid.u_nodes()[i + 1],
            grid.u_nodes()[i],
            y,
            rtol,
            |_, _| {},
        )?;
        outer_f[i] = y.f;
        outer_g[i] = y.g;
    }
    // least-squares alignment of the outer branch to the inner one
    let denom = outer_f[i_match] * outer_f[i_match] + outer_g[i_match] * outer_g[i_match];
    let scale = (inner_end.f * outer_f[i_match] + inner_end.g * outer_g[i_match])
        / denom.max(1e-300);
    for i in i_match + 1..n {
        f_vals[i] = scale * outer_f[i];
        g_vals[i] = scale * outer_g[i];
    }
    // spinor (f, g) -> weighted radial variables
    let a = params.a();
    let upper_vals: Vec<Complex64> = grid
        .nodes()
        .iter()
        .zip(&f_vals)
        .map(|(&r, &f)| Complex64::new(f * r.powf(a), 0.0))
        .collect();
    let lower_vals: Vec<Complex64> = grid
        .nodes()
        .iter()
        .zip(&g_vals)
        .map(|(&r, &g)| Complex64::new(g * r.powf(-a), 0.0))
        .collect();
    let max = f_vals
        .iter()
        .zip(grid.nodes())
        .map(|(&f, &r)| (f * r.powf(a)).abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let upper_vals: Vec<Complex64> = upper_vals.into_iter().map(|v| v / max).collect();
    let lower_vals: Vec<Complex64> = lower_vals.into_iter().map(|v| v / max).collect();
    let upper = RadialProfile::from_values(Arc::clone(grid), upper_vals)?
        .with_asymptotics_unchecked(
            Some(params.a() - 0.5 + s_ell),
            Some((1.0 - lambda * lambda).sqrt()),
        );
    let lower = RadialProfile::from_values(Arc::clone(grid), lower_vals)?;
    Ok(EigenResult {
        lambda,
        ell,
        residual,
        method: SolveMethod::Shooting,
        upper_profile: upper,
        lower_profile: lower,
    })
}

/// Runs a solver on the grid and its refinement and applies one Richardson
/// step (`(4 lambda_{h/2} - lambda_h)/3` for the second-order form method).
pub fn eigensolve_extrapolated(
    params: &CouplingParams,
    ell: i32,
    spec: GridSpec,
    method: SolveMethod,
) -> Result<(f64, EigenResult)> {
    let coarse_grid = build_grid(spec)?;
    let fine_grid = build_grid(spec.refined())?;
    let solve = |grid: &Arc<RadialGrid>| match method {
        SolveMethod::FormBisection => lowest_gap_eigenvalue_form(params, ell, grid),
        SolveMethod::Shooting => eigensolve_shooting(params, ell, grid),
    };
    let coarse = solve(&coarse_grid)?;
    let fine = solve(&fine_grid)?;
    let extrapolated = match method {
        SolveMethod::FormBisection => (4.0 * fine.lambda - coarse.lambda) / 3.0,
        // shooting error is dominated by the Frobenius start offset
        SolveMethod::Shooting => fine.lambda,
    };
    Ok((extrapolated, fine))
}

/// Discrete residual of the second-order radial equation on the sampled
/// upper profile, in a relative weighted norm.
pub fn ode_residual_check(
    upper: &RadialProfile,
    params: &CouplingParams,
    ell: i32,
    lambda: f64,
) -> Result<f64> {
    let grid = upper.grid();
    let n = grid.len();
    if n < 32 {
        return Err(CoreError::BadSpec("grid too small for the residual".into()));
    }
    let a = params.a();
    let nu = params.nu();
    let lf = ell as f64;
    let phi_u = differentiate_in_map(upper);
    // q = (rho phi' - ell phi) / ((1+lambda) rho + nu), sampled
    let q: Vec<Complex64> = grid
        .nodes()
        .iter()
        .zip(upper.values())
        .zip(&phi_u)
        .map(|((&r, v), d)| (d - v * lf) / ((1.0 + lambda) * r + nu))
        .collect();
    let q_prof = RadialProfile::from_values(Arc::clone(grid), q.clone())?;
    let q_u = differentiate_in_map(&q_prof);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let r = grid.nodes()[i];
        if r < 10.0 * grid.rho_min() || r > 0.5 * grid.rho_max() || i < 8 || i >= n - 8 {
            continue;
        }
        let t1 = -q_u[i] / r;
        let t2 = -q[i] * ((lf + 1.0 - 2.0 * a) / r);
        let t3 = upper.values()[i] * (1.0 - lambda - nu / r);
        let res = t1 + t2 + t3;
        let scale = t1.norm() + t2.norm() + t3.norm();
        let w = grid.weights()[i] * r.powf(1.0 - 2.0 * a);
        num += w * res.norm_sqr();
        den += w * scale * scale;
    }
    if den == 0.0 {
        return Err(CoreError::DegenerateInput("zero residual scale".into()));
    }
    Ok((num / den).sqrt())
}
