//! Closed-form spectral quantities of the 2d Aharonov-Bohm Dirac-Coulomb
//! operator: coupling parameters with regime classification, half-gap
//! functions, the critical field, ground-state energy and spinor, the
//! completed-square constant, and the per-mode generating energies.

use serde::Serialize;

use crate::error::{CoreError, ModeRejection, Result};

/// Default relative tolerance for detecting `a = critical_field(nu)` in
/// floating-point sweeps.
pub const DEFAULT_CRITICALITY_TOL: f64 = 1e-12;

/// Half-gap map `c(s) = 1/2 - s`.
#[inline]
pub fn half_gap(s: f64) -> f64 {
    0.5 - s
}

/// Per-mode half-gap `c_ell(a) = 1/2 + ell - a`.
#[inline]
pub fn mode_half_gap(ell: i32, a: f64) -> f64 {
    0.5 + ell as f64 - a
}

/// Critical flux `a(nu) = c(nu) = 1/2 - nu` for `nu` in `(0, 1/2]`.
pub fn critical_field(nu: f64) -> Result<f64> {
    if !nu.is_finite() || nu <= 0.0 || nu > 0.5 {
        return Err(CoreError::Domain(format!("nu = {nu} is outside (0, 1/2]")));
    }
    Ok(half_gap(nu))
}

/// Position of `(nu, a)` relative to the critical field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Subcritical => write!(f, "subcritical"),
            Regime::Critical => write!(f, "critical"),
            Regime::Supercritical => write!(f, "supercritical"),
        }
    }
}

/// Coulomb coupling strength and Aharonov-Bohm flux.
///
/// `nu` lies in `(0, 1/2]`. The flux `a` lies in `(-1/2, 1/2)`; the primary
/// regime is `a >= 0`, negative values are the conjugate flux orientation
/// used by the positron channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingParams {
    nu: f64,
    a: f64,
    criticality_tol: f64,
}

impl CouplingParams {
    pub fn new(nu: f64, a: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 0.0 || nu > 0.5 {
            return Err(CoreError::Domain(format!("nu = {nu} is outside (0, 1/2]")));
        }
        if !a.is_finite() || a <= -0.5 || a >= 0.5 {
            return Err(CoreError::Domain(format!("a = {a} is outside (-1/2, 1/2)")));
        }
        Ok(Self {
            nu,
            a,
            criticality_tol: DEFAULT_CRITICALITY_TOL,
        })
    }

    /// Overrides the relative tolerance used by [`CouplingParams::regime`].
    pub fn with_criticality_tol(mut self, tol: f64) -> Self {
        self.criticality_tol = tol.max(0.0);
        self
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    /// The conjugate-flux parameters `(nu, -a)`.
    pub fn flux_conjugate(&self) -> Self {
        Self {
            nu: self.nu,
            a: -self.a,
            criticality_tol: self.criticality_tol,
        }
    }

    /// `c(a) = 1/2 - a`, the effective half-gap seen by the `ell = 0` mode.
    #[inline]
    pub fn half_gap_a(&self) -> f64 {
        half_gap(self.a)
    }

    /// `a(nu) = 1/2 - nu`.
    #[inline]
    pub fn critical_field(&self) -> f64 {
        half_gap(self.nu)
    }

    pub fn regime(&self) -> Regime {
        let a_crit = self.critical_field();
        let tol = self.criticality_tol * a_crit.abs().max(1.0);
        if self.a - a_crit > tol {
            Regime::Supercritical
        } else if a_crit - self.a > tol {
            Regime::Subcritical
        } else {
            Regime::Critical
        }
    }

    pub fn is_supercritical(&self) -> bool {
        self.regime() == Regime::Supercritical
    }

    fn require_gap(&self) -> Result<()> {
        if self.is_supercritical() {
            Err(CoreError::Supercritical {
                nu: self.nu,
                a: self.a,
                a_crit: self.critical_field(),
            })
        } else {
            Ok(())
        }
    }

    /// `sqrt(c(a)^2 - nu^2)`, clamped to zero at the critical point.
    pub fn gap_root(&self) -> Result<f64> {
        self.require_gap()?;
        if self.regime() == Regime::Critical {
            return Ok(0.0);
        }
        let c = self.half_gap_a();
        Ok((c * c - self.nu * self.nu).max(0.0).sqrt())
    }

    /// Ground-state energy `lambda_{nu,a} = sqrt(c(a)^2 - nu^2) / c(a)`.
    pub fn ground_state_energy(&self) -> Result<f64> {
        Ok(self.gap_root()? / self.half_gap_a())
    }

    /// The smaller root `mu = (c(a) - sqrt(c(a)^2 - nu^2)) / nu` of
    /// `nu mu^2 - (1 - 2a) mu + nu = 0`. Exactly 1 at the critical point.
    pub fn lemma_square_mu(&self) -> Result<f64> {
        let s = self.gap_root()?;
        if self.regime() == Regime::Critical {
            return Ok(1.0);
        }
        Ok((self.half_gap_a() - s) / self.nu)
    }

    /// Both roots of `nu mu^2 - (1 - 2a) mu + nu = 0`, ascending.
    ///
    /// Their product is 1 and their sum is `(1 - 2a)/nu`. At the critical
    /// point the two roots collide at 1.
    pub fn quadratic_roots_mu(&self) -> Result<(f64, f64)> {
        self.require_gap()?;
        if self.regime() == Regime::Critical {
            return Err(CoreError::Degenerate(format!(
                "double root mu = 1 at the critical point a = {}",
                self.critical_field()
            )));
        }
        let c = self.half_gap_a();
        let s = self.gap_root()?;
        let small = (c - s) / self.nu;
        // large root via the product identity to avoid cancellation
        let large = 1.0 / small;
        Ok((small, large))
    }

    /// Exponent and decay rate of the optimal trial profile
    /// `eta*(x) = |x|^{sqrt(c(a)^2-nu^2) - c(a)} e^{-nu |x| / c(a)}`.
    pub fn eta_star_profile(&self) -> Result<(f64, f64)> {
        let c = self.half_gap_a();
        Ok((self.gap_root()? - c, self.nu / c))
    }

    /// Ground-state spinor data (upper component `rho^{power} e^{-decay rho}`,
    /// lower component shifted by one angular mode and carrying a phase `i`).
    pub fn ground_state_spinor(&self) -> Result<GroundStateProfile> {
        let lambda = self.ground_state_energy()?;
        let s = self.gap_root()?;
        Ok(GroundStateProfile {
            lambda,
            power_exponent: s - 0.5,
            decay_rate: self.nu / self.half_gap_a(),
            lower_upper_ratio: ((1.0 - lambda) / (1.0 + lambda)).sqrt(),
            lower_mode_shift: 1,
        })
    }

    /// Closed-form data of the generating solution in Fourier mode `ell >= 0`.
    pub fn mode_energy(&self, ell: i32) -> Result<ModeEnergy> {
        if ell < 0 {
            return Err(CoreError::NoModeEigenvalue {
                ell,
                reason: ModeRejection::NegativeMode,
            });
        }
        let c_ell = mode_half_gap(ell, self.a);
        if self.nu >= c_ell.abs() {
            return Err(CoreError::NoModeEigenvalue {
                ell,
                reason: ModeRejection::GapClosed,
            });
        }
        let s_ell = (c_ell * c_ell - self.nu * self.nu).sqrt();
        Ok(ModeEnergy {
            ell,
            c_ell,
            lambda_ell: s_ell / c_ell.abs(),
            a_ell: self.a - 0.5 + c_ell.signum() * s_ell,
            b_ell: self.nu / c_ell,
        })
    }
}

/// Ground-state spinor in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundStateProfile {
    /// Energy in `(-1, 1]`.
    pub lambda: f64,
    /// Exponent of `rho` in the upper component.
    pub power_exponent: f64,
    /// Coefficient of `rho` in the exponential.
    pub decay_rate: f64,
    /// `sqrt((1 - lambda)/(1 + lambda))`.
    pub lower_upper_ratio: f64,
    /// The lower component carries the angular factor `e^{i theta}`.
    pub lower_mode_shift: i32,
}

/// Generating solution of Fourier mode `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEnergy {
    pub ell: i32,
    /// `c_ell(a) = 1/2 + ell - a`.
    pub c_ell: f64,
    /// `sqrt(c_ell^2 - nu^2) / |c_ell|`.
    pub lambda_ell: f64,
    /// Exponent of the generating profile.
    pub a_ell: f64,
    /// Decay rate of the generating profile.
    pub b_ell: f64,
}

/// Centered finite-difference slope of `a -> lambda_{nu,a}` evaluated at
/// `a = a(nu) - h`, with a step small relative to `h`.
pub fn energy_slope_fd(nu: f64, h: f64, step: f64) -> Result<f64> {
    let a_crit = critical_field(nu)?;
    if h <= 0.0 || step <= 0.0 || step >= h {
        return Err(CoreError::Domain(format!(
            "need 0 < step < h, got h = {h}, step = {step}"
        )));
    }
    let at = |a: f64| CouplingParams::new(nu, a)?.ground_state_energy();
    let a0 = a_crit - h;
    Ok((at(a0 + step)? - at(a0 - step)?) / (2.0 * step))
}
