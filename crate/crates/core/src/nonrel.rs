//! The non-relativistic limit: speed-of-light scaled energies, the binding
//! energy limit, convergence-rate sweeps, and the limiting Pauli-equation
//! residual.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::forms::eval_pauli_form;
use crate::grid::{build_grid, differentiate_in_map, integrate_weighted, GridSpec, RadialProfile};
use crate::model::CouplingParams;

/// Scaled ground-state energy at a finite speed of light.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScaledEnergy {
    pub c: f64,
    /// `c^2 sqrt(1 - nu^2 / (c(a)^2 c^2))`.
    pub lambda_c: f64,
    /// `lambda_c - c^2`, evaluated cancellation-safe.
    pub shifted: f64,
    /// `-nu^2 / (2 c(a)^2)`.
    pub limit: f64,
}

/// The scaled energy; requires `c > nu / c(a)` so the scaled pair stays
/// subcritical.
pub fn scaled_energy(params: &CouplingParams, c: f64) -> Result<ScaledEnergy> {
    let ca = params.half_gap_a();
    let nu = params.nu();
    if !(c > nu / ca) {
        return Err(CoreError::Domain(format!(
            "speed of light {c} at or below the critical value {}",
            nu / ca
        )));
    }
    let x = (nu / (ca * c)).powi(2);
    let root = (1.0 - x).sqrt();
    // c^2 (sqrt(1-x) - 1) = -c^2 x / (1 + sqrt(1-x)): no cancellation
    let shifted = -nu * nu / (ca * ca * (1.0 + root));
    Ok(ScaledEnergy {
        c,
        lambda_c: c * c * root,
        shifted,
        limit: binding_limit(params),
    })
}

/// The non-relativistic binding energy `-nu^2 / (2 c(a)^2)`.
pub fn binding_limit(params: &CouplingParams) -> f64 {
    let ca = params.half_gap_a();
    -params.nu() * params.nu() / (2.0 * ca * ca)
}

/// One row of the convergence sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NonrelRow {
    pub c: f64,
    pub lambda_c: f64,
    pub shifted: f64,
    /// `|shifted - limit|`.
    pub error: f64,
    /// Lower-to-upper spinor ratio `sqrt((c^2 - lambda_c)/(c^2 + lambda_c))`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonrelSweep {
    pub nu: f64,
    pub a: f64,
    pub limit: f64,
    pub rows: Vec<NonrelRow>,
    /// Log-log slope of the error against `c` (approaches -2).
    pub error_slope: f64,
    /// Log-log slope of the spinor ratio against `c` (approaches -1).
    pub ratio_slope: f64,
}

fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Sweeps the scaled energy over a list of speeds and fits the approach
/// rates to the limit.
pub fn convergence_sweep(params: &CouplingParams, c_list: &[f64]) -> Result<NonrelSweep> {
    let limit = binding_limit(params);
    let mut rows = Vec::with_capacity(c_list.len());
    for &c in c_list {
        let se = scaled_energy(params, c)?;
        let ratio = ((c * c - se.lambda_c) / (c * c + se.lambda_c)).sqrt();
        rows.push(NonrelRow {
            c,
            lambda_c: se.lambda_c,
            shifted: se.shifted,
            error: (se.shifted - limit).abs(),
            ratio,
        });
    }
    let error_slope = loglog_slope(
        &rows
            .iter()
            .map(|r| (r.c, r.error.max(f64::MIN_POSITIVE)))
            .collect::<Vec<_>>(),
    );
    let ratio_slope = loglog_slope(&rows.iter().map(|r| (r.c, r.ratio)).collect::<Vec<_>>());
    Ok(NonrelSweep {
        nu: params.nu(),
        a: params.a(),
        limit,
        rows,
        error_slope,
        ratio_slope,
    })
}

/// Samples the limiting upper profile `rho^{-a} e^{-nu rho / c(a)}`.
pub fn limiting_profile(
    params: &CouplingParams,
    grid: &std::sync::Arc<crate::grid::RadialGrid>,
) -> Result<RadialProfile> {
    let a = params.a();
    let b = params.nu() / params.half_gap_a();
    RadialProfile::from_real_fn(grid, |r| r.powf(-a) * (-b * r).exp())
        .with_asymptotics(Some(-a), Some(b))
}

/// Discrete residual of the limiting Pauli equation
/// `(1/2) D D* phi - (nu/rho) phi = -(nu^2 / (2 c(a)^2)) phi`
/// on a sampled mode-0 profile, in a relative weighted norm away from the
/// origin (the point magnetic field lives at zero and is excluded).
pub fn pauli_residual_on(profile: &RadialProfile, params: &CouplingParams) -> Result<f64> {
    let grid = profile.grid();
    let n = grid.len();
    let a = params.a();
    let nu = params.nu();
    let e0 = binding_limit(params);
    let f_u = differentiate_in_map(profile);
    // g = f' + a f / rho = (f_u + a f) / rho
    let g: Vec<_> = grid
        .nodes()
        .iter()
        .zip(profile.values())
        .zip(&f_u)
        .map(|((&r, v), d)| (d + v * a) / r)
        .collect();
    let g_prof = RadialProfile::from_values(std::sync::Arc::clone(grid), g.clone())?;
    let g_u = differentiate_in_map(&g_prof);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let r = grid.nodes()[i];
        if r < 10.0 * grid.rho_min() || r > 0.5 * grid.rho_max() || i < 8 || i >= n - 8 {
            continue;
        }
        // D D* on mode 0: -(g' + (1 - a) g / rho)
        let dd = -(g_u[i] / r + g[i] * ((1.0 - a) / r));
        let t1 = dd * 0.5;
        let t2 = -profile.values()[i] * (nu / r);
        let t3 = -profile.values()[i] * e0;
        let res = t1 + t2 + t3;
        let scale = t1.norm() + t2.norm() + t3.norm();
        let w = grid.weights()[i] * r;
        num += w * res.norm_sqr();
        den += w * scale * scale;
    }
    if den == 0.0 {
        return Err(CoreError::DegenerateInput("zero residual scale".into()));
    }
    Ok((num / den).sqrt())
}

/// Residual of the limiting equation on the closed-form limiting profile.
pub fn pauli_residual(params: &CouplingParams) -> Result<f64> {
    let b = params.nu() / params.half_gap_a();
    let grid = build_grid(GridSpec::default_for_decay(b))?;
    let phi = limiting_profile(params, &grid)?;
    pauli_residual_on(&phi, params)
}

/// Rayleigh-quotient energy of the limiting profile:
/// `(2 q(phi, phi) - nu int |phi|^2 / |x| dx) / int |phi|^2 dx`,
/// which approaches the binding limit.
pub fn pauli_rayleigh_energy(params: &CouplingParams) -> Result<f64> {
    let b = params.nu() / params.half_gap_a();
    let grid = build_grid(GridSpec::default_for_decay(b))?;
    let phi = limiting_profile(params, &grid)?;
    let q = eval_pauli_form(&phi, params, 0)?;
    let tau = std::f64::consts::TAU;
    let coulomb = tau * integrate_weighted(&phi, 0.0, None)?.value;
    let norm = tau * integrate_weighted(&phi, 1.0, None)?.value;
    Ok((2.0 * q - params.nu() * coulomb) / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scaled_energy_values() {
        let params = CouplingParams::new(0.2, 0.1).unwrap();
        let se = scaled_energy(&params, 10.0).unwrap();
        assert_abs_diff_eq!(se.shifted, -0.1250782, epsilon = 1e-7);
        assert_abs_diff_eq!(se.limit, -0.125, epsilon = 1e-15);
        assert!(scaled_energy(&params, 0.4).is_err());
        // scaling identity: ground_state_energy(nu/c, a) = lambda_c / c^2
        for c in [2.0, 10.0, 100.0] {
            let scaled = CouplingParams::new(0.2 / c, 0.1).unwrap();
            assert_abs_diff_eq!(
                scaled.ground_state_energy().unwrap(),
                scaled_energy(&params, c).unwrap().lambda_c / (c * c),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn cancellation_safe_at_large_c() {
        let params = CouplingParams::new(0.2, 0.1).unwrap();
        let se = scaled_energy(&params, 1e6).unwrap();
        // naive evaluation would lose all digits here
        let err = (se.shifted - se.limit).abs();
        assert!(err > 0.0 && err < 1e-12, "error {err}");
    }

    #[test]
    fn sweep_slopes() {
        let params = CouplingParams::new(0.2, 0.1).unwrap();
        let sweep = convergence_sweep(&params, &[10.0, 20.0, 40.0, 80.0]).unwrap();
        assert!((sweep.error_slope + 2.0).abs() < 0.1, "slope {}", sweep.error_slope);
        assert!((sweep.ratio_slope + 1.0).abs() < 0.05, "ratio slope {}", sweep.ratio_slope);
        // shifted increases toward the limit
        let cs: Vec<f64> = (1..=20).map(|k| 5.0 * k as f64).collect();
        let sweep = convergence_sweep(&params, &cs).unwrap();
        for w in sweep.rows.windows(2) {
            assert!(w[1].shifted > w[0].shifted);
            assert!(w[1].shifted < sweep.limit);
        }
    }

    #[test]
    fn upper_exponent_tends_to_flux() {
        // the c-dependent exponent sqrt(c(a)^2 - nu^2/c^2) - 1/2 -> -a
        let params = CouplingParams::new(0.2, 0.1).unwrap();
        let ca = params.half_gap_a();
        let exponent = |c: f64| (ca * ca - (0.2 / c).powi(2)).sqrt() - 0.5;
        assert!((exponent(1e8) + params.a()).abs() < 1e-12);
        let e10 = (exponent(10.0) + params.a()).abs();
        let e100 = (exponent(100.0) + params.a()).abs();
        assert!(e100 < e10 / 50.0);
    }

    #[test]
    fn pauli_residual_small_on_limit_profile() {
        for (nu, a) in [(0.2, 0.1), (0.3, 0.05)] {
            let params = CouplingParams::new(nu, a).unwrap();
            let res = pauli_residual(&params).unwrap();
            assert!(res <= 1e-6, "residual {res}");
            // negative control: perturbed decay rate
            let b = 1.1 * nu / params.half_gap_a();
            let grid = build_grid(GridSpec::default_for_decay(b)).unwrap();
            let bad = RadialProfile::from_real_fn(&grid, |r| r.powf(-a) * (-b * r).exp())
                .with_asymptotics(Some(-a), Some(b))
                .unwrap();
            let res_bad = pauli_residual_on(&bad, &params).unwrap();
            assert!(res_bad > 1e-3, "control residual {res_bad}");
        }
    }

    #[test]
    fn rayleigh_energy_matches_limit() {
        for (nu, a) in [(0.2, 0.1), (0.45, 0.02)] {
            let params = CouplingParams::new(nu, a).unwrap();
            let e = pauli_rayleigh_energy(&params).unwrap();
            assert_abs_diff_eq!(e, binding_limit(&params), epsilon = 1e-5);
        }
    }
}
