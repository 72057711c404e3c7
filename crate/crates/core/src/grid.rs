//! Radial grids on `(0, rho_max]`, quadrature for singular power-law
//! weights with analytic endpoint completion, differentiation of sampled
//! profiles, and construction of the named trial profiles.
//!
//! Grids map a uniform (or Gauss-panelled) variable `u` through `rho = e^u`,
//! which resolves both the power-law behaviour at the origin and the
//! exponential tails of the closed-form profiles. Profiles are stored as
//! sampled values, never closures; every operation is grid-discrete.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::model::CouplingParams;

/// Node-generating map of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MapKind {
    /// Midpoint nodes, uniform in `u = ln rho`.
    LogUniform,
    /// Composite 4-point Gauss-Legendre panels in `u = ln rho`.
    GaussLogPanels,
}

/// Construction parameters for [`build_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub map_kind: MapKind,
    pub rho_min: f64,
    pub rho_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn log_uniform(rho_min: f64, rho_max: f64, n: usize) -> Self {
        Self {
            map_kind: MapKind::LogUniform,
            rho_min,
            rho_max,
            n,
        }
    }

    /// Default desk-scale grid: `rho_min = 1e-6`, `rho_max = max(50, 20/decay)`,
    /// 2000 nodes. Resolves the origin singularity and the exponential tail of
    /// every closed-form profile with decay rate `decay`.
    pub fn default_for_decay(decay: f64) -> Self {
        let tail = if decay > 0.0 { 20.0 / decay } else { 50.0 };
        Self::log_uniform(1e-6, tail.max(50.0), 2000)
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// Halves the mesh width (doubles the node count).
    pub fn refined(mut self) -> Self {
        self.n *= 2;
        self
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::default_for_decay(0.0)
    }
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

/// Radial quadrature grid. Immutable after construction.
#[derive(Debug)]
pub struct RadialGrid {
    spec: GridSpec,
    /// Strictly increasing nodes in `(rho_min, rho_max)`.
    nodes: Vec<f64>,
    /// Weights for `int f drho ~ sum w_i f(rho_i)`.
    weights: Vec<f64>,
    /// Nodes in the mapped variable `u = ln rho`.
    u_nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn u_nodes(&self) -> &[f64] {
        &self.u_nodes
    }

    pub fn rho_min(&self) -> f64 {
        self.spec.rho_min
    }

    pub fn rho_max(&self) -> f64 {
        self.spec.rho_max
    }

    /// `sum w_i f_i`.
    pub fn integrate_samples(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }
}

pub fn build_grid(spec: GridSpec) -> Result<Arc<RadialGrid>> {
    if !(spec.rho_min.is_finite() && spec.rho_max.is_finite())
        || spec.rho_min <= 0.0
        || spec.rho_min >= spec.rho_max
    {
        return Err(CoreError::BadSpec(format!(
            "need 0 < rho_min < rho_max, got [{}, {}]",
            spec.rho_min, spec.rho_max
        )));
    }
    if spec.n < 16 {
        return Err(CoreError::BadSpec(format!("need n >= 16, got {}", spec.n)));
    }
    let u_lo = spec.rho_min.ln();
    let u_hi = spec.rho_max.ln();
    let mut u_nodes = Vec::with_capacity(spec.n);
    let mut du_weights = Vec::with_capacity(spec.n);
    match spec.map_kind {
        MapKind::LogUniform => {
            let h = (u_hi - u_lo) / spec.n as f64;
            for i in 0..spec.n {
                u_nodes.push(u_lo + (i as f64 + 0.5) * h);
                du_weights.push(h);
            }
        }
        MapKind::GaussLogPanels => {
            if spec.n % 4 != 0 {
                return Err(CoreError::BadSpec(format!(
                    "Gauss panels need n divisible by 4, got {}",
                    spec.n
                )));
            }
            let panels = spec.n / 4;
            let hp = (u_hi - u_lo) / panels as f64;
            for p in 0..panels {
                let c = u_lo + (p as f64 + 0.5) * hp;
                for k in 0..4 {
                    u_nodes.push(c + 0.5 * hp * GAUSS4_NODES[k]);
                    du_weights.push(0.5 * hp * GAUSS4_WEIGHTS[k]);
                }
            }
        }
    }
    let nodes: Vec<f64> = u_nodes.iter().map(|u| u.exp()).collect();
    let weights: Vec<f64> = du_weights
        .iter()
        .zip(&nodes)
        .map(|(w, r)| w * r)
        .collect();
    Ok(Arc::new(RadialGrid {
        spec,
        nodes,
        weights,
        u_nodes,
    }))
}

/// A sampled complex radial function with optional endpoint metadata.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
    /// Declared leading power at `rho -> 0`.
    origin_exponent: Option<f64>,
    /// Declared exponential decay rate at `rho -> inf`.
    decay_rate: Option<f64>,
}

impl RadialProfile {
    pub fn from_values(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CoreError::BadSpec(format!(
                "profile has {} values on a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            origin_exponent: None,
            decay_rate: None,
        })
    }

    pub fn from_real_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid
            .nodes()
            .iter()
            .map(|&r| Complex64::new(f(r), 0.0))
            .collect();
        Self {
            grid: Arc::clone(grid),
            values,
            origin_exponent: None,
            decay_rate: None,
        }
    }

    pub fn from_complex_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self {
            grid: Arc::clone(grid),
            values,
            origin_exponent: None,
            decay_rate: None,
        }
    }

    /// Declares endpoint asymptotics and validates them against the sampled
    /// values at the first and last three nodes (10% relative).
    pub fn with_asymptotics(
        mut self,
        origin_exponent: Option<f64>,
        decay_rate: Option<f64>,
    ) -> Result<Self> {
        if let Some(a) = origin_exponent {
            let r = self.grid.nodes();
            let v = &self.values;
            // compare the first nodes against a node a factor ~3 away so the
            // power-law ratio is resolvable at fine log steps
            let j = r
                .iter()
                .position(|&x| x > 3.0 * r[0])
                .unwrap_or(v.len() - 1);
            for i in 0..3.min(j) {
                let (m0, m1) = (v[i].norm(), v[j].norm());
                if m0 == 0.0 || m1 == 0.0 {
                    continue;
                }
                let expected = (r[j] / r[i]).powf(a);
                let actual = m1 / m0;
                if (actual / expected - 1.0).abs() > 0.1 {
                    return Err(CoreError::BadSpec(format!(
                        "declared origin exponent {a} does not match samples \
                         (span ratio {actual:.6e} vs {expected:.6e})"
                    )));
                }
            }
        }
        if let Some(b) = decay_rate {
            let n = self.values.len();
            let r = self.grid.nodes();
            for i in (n - 3).max(1)..n {
                let (m0, m1) = (self.values[i - 1].norm(), self.values[i].norm());
                if m0 == 0.0 || m1 == 0.0 {
                    continue;
                }
                let slope = (m1 / m0).ln() / (r[i] - r[i - 1]);
                // log-slope approaches -b up to the power-law correction A/rho
                if (slope + b).abs() > 0.1 * b.abs().max(0.05) + 0.5 / r[i - 1] {
                    return Err(CoreError::BadSpec(format!(
                        "declared decay rate {b} does not match tail samples \
                         (log-slope {slope:.6e})"
                    )));
                }
            }
        }
        self.origin_exponent = origin_exponent;
        self.decay_rate = decay_rate;
        Ok(self)
    }

    /// Declares asymptotics without the sample check (for synthetic
    /// derivative profiles whose leading coefficient may vanish).
    pub(crate) fn with_asymptotics_unchecked(
        mut self,
        origin_exponent: Option<f64>,
        decay_rate: Option<f64>,
    ) -> Self {
        self.origin_exponent = origin_exponent;
        self.decay_rate = decay_rate;
        self
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn origin_exponent(&self) -> Option<f64> {
        self.origin_exponent
    }

    pub fn decay_rate(&self) -> Option<f64> {
        self.decay_rate
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm_sqr() == 0.0)
    }

    /// Pointwise multiplication by a real function of `rho`.
    pub fn scaled_by(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, v)| v * f(r))
            .collect();
        Self {
            grid: Arc::clone(&self.grid),
            values,
            origin_exponent: None,
            decay_rate: None,
        }
    }

    /// Estimates the squared leading coefficient `C^2` of
    /// `|p| ~ C rho^A e^{-D rho}` from the first nodes.
    pub(crate) fn head_coefficient_sq(&self, a_exp: f64, decay: f64) -> f64 {
        let r = self.grid.nodes();
        let mut acc = 0.0;
        let mut n = 0;
        for i in 0..3.min(self.values.len()) {
            let m = self.values[i].norm();
            if m > 0.0 {
                let c = m * r[i].powf(-a_exp) * (decay * r[i]).exp();
                acc += c * c;
                n += 1;
            }
        }
        if n > 0 {
            acc / n as f64
        } else {
            0.0
        }
    }
}

/// Rational weight `1 / (alpha rho + beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalWeight {
    pub alpha: f64,
    pub beta: f64,
}

impl RationalWeight {
    pub const ONE: RationalWeight = RationalWeight {
        alpha: 0.0,
        beta: 1.0,
    };

    #[inline]
    pub fn eval(&self, rho: f64) -> f64 {
        1.0 / (self.alpha * rho + self.beta)
    }
}

/// Result of [`integrate_weighted`]: the completed value plus endpoint
/// diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightedIntegral {
    /// Grid quadrature plus the analytic head completion.
    pub value: f64,
    /// Contribution of `(0, rho_min)` completed from declared asymptotics.
    pub head: f64,
    /// Reported bound on the dropped `(rho_max, inf)` remainder.
    pub tail_bound: f64,
}

/// Head integral `int_0^delta rho^q e^{-2 d rho} / (alpha rho + beta) drho`
/// for `q > -1`, by a three-term expansion of the smooth factor. Accurate to
/// `O((max(2d, alpha/beta) delta)^3)` relative.
pub(crate) fn head_power_integral(q: f64, d: f64, w: RationalWeight, delta: f64) -> f64 {
    if q <= -1.0 {
        return f64::INFINITY;
    }
    let (q, inv_beta, slope) = if w.beta == 0.0 {
        // pure 1/(alpha rho): shift the power
        (q - 1.0, 1.0 / w.alpha, 2.0 * d)
    } else {
        (q, 1.0 / w.beta, 2.0 * d + w.alpha / w.beta)
    };
    if q <= -1.0 {
        return f64::INFINITY;
    }
    let curv = if w.beta == 0.0 {
        2.0 * d * d
    } else {
        2.0 * d * d + 2.0 * d * w.alpha / w.beta + (w.alpha / w.beta).powi(2)
    };
    inv_beta
        * (delta.powf(q + 1.0) / (q + 1.0) - slope * delta.powf(q + 2.0) / (q + 2.0)
            + curv * delta.powf(q + 3.0) / (q + 3.0))
}

/// `sum_i w_i |p_i|^2 rho_i^power / (alpha rho_i + beta)`, completed over
/// `(0, rho_min)` with the declared asymptotics when present and with the
/// dropped tail reported as a bound.
pub fn integrate_weighted(
    p: &RadialProfile,
    power: f64,
    rational: Option<RationalWeight>,
) -> Result<WeightedIntegral> {
    let w = rational.unwrap_or(RationalWeight::ONE);
    if w.beta < 0.0 || w.alpha < 0.0 || (w.alpha == 0.0 && w.beta == 0.0) {
        return Err(CoreError::BadSpec(format!(
            "rational weight must have alpha, beta >= 0, not both zero; got {w:?}"
        )));
    }
    let grid = p.grid();
    let mut sum = 0.0;
    // group |p|^2 rho^{power+1} before squaring: plateau profiles reach
    // magnitudes whose bare square overflows even though the weighted
    // integrand is order one
    for ((&r, &wi), v) in grid.nodes().iter().zip(grid.weights()).zip(p.values()) {
        let t = v.norm() * r.powf(0.5 * (power + 1.0));
        sum += (wi / r) * t * t * w.eval(r);
    }
    let mut head = 0.0;
    if let Some(a_exp) = p.origin_exponent() {
        let q = 2.0 * a_exp + power - if w.beta == 0.0 { 1.0 } else { 0.0 };
        if q <= -1.0 + 1e-12 {
            return Err(CoreError::NonIntegrable(format!(
                "origin exponent {a_exp} with power {power} gives endpoint \
                 exponent {q} <= -1"
            )));
        }
        let d = p.decay_rate().unwrap_or(0.0);
        let c2 = p.head_coefficient_sq(a_exp, d);
        head = c2 * head_power_integral(2.0 * a_exp + power, d, w, grid.rho_min());
    }
    // tail bound from the last sample, assuming at least the declared decay
    let n = grid.len();
    let last = p.values()[n - 1].norm_sqr() * grid.nodes()[n - 1].powf(power)
        * w.eval(grid.nodes()[n - 1]);
    let tail_bound = match p.decay_rate() {
        Some(d) if d > 0.0 => last / (2.0 * d),
        _ => last * grid.nodes()[n - 1],
    };
    Ok(WeightedIntegral {
        value: sum + head,
        head,
        tail_bound,
    })
}

/// Fornberg finite-difference weights for the m-th derivative at `x0` from
/// the stencil `x`, exact for polynomials up to degree `x.len() - 1`.
fn fornberg_weights(x0: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Derivative of the sampled values with respect to the mapped variable
/// `u = ln rho`, by `width`-point stencils (order `width - 1` on uniform
/// maps) with one-sided stencils at the ends.
pub(crate) fn differentiate_in_map_width(p: &RadialProfile, width: usize) -> Vec<Complex64> {
    let u = p.grid().u_nodes();
    let v = p.values();
    let n = v.len();
    let mut out = vec![Complex64::default(); n];
    let width = width.min(n);
    for i in 0..n {
        let lo = i.saturating_sub(width / 2).min(n - width);
        let stencil = &u[lo..lo + width];
        let wts = fornberg_weights(u[i], stencil, 1);
        let mut acc = Complex64::default();
        for (k, &wk) in wts.iter().enumerate() {
            acc += v[lo + k] * wk;
        }
        out[i] = acc;
    }
    out
}

/// Derivative in the mapped variable used by the form evaluators. A 7-point
/// stencil: the default 2000-node grid then resolves the exponential tails
/// to better than 1e-10 relative, which the equality-case tolerances need.
pub fn differentiate_in_map(p: &RadialProfile) -> Vec<Complex64> {
    differentiate_in_map_width(p, 7)
}

/// Derivative samples `dp/drho` via 4th-order finite differences in the
/// mapped variable, with one-sided end stencils.
pub fn differentiate(p: &RadialProfile) -> RadialProfile {
    let dp_du = differentiate_in_map_width(p, 5);
    let values: Vec<Complex64> = dp_du
        .iter()
        .zip(p.grid().nodes())
        .map(|(d, &r)| d / r)
        .collect();
    RadialProfile {
        grid: Arc::clone(p.grid()),
        values,
        origin_exponent: p.origin_exponent().map(|a| a - 1.0),
        decay_rate: p.decay_rate(),
    }
}

/// Like [`differentiate`] but with the 7-point stencil of the form
/// evaluators, for the identities tested at 1e-8 tolerances.
pub(crate) fn differentiate_sharp(p: &RadialProfile) -> RadialProfile {
    let dp_du = differentiate_in_map_width(p, 7);
    let values: Vec<Complex64> = dp_du
        .iter()
        .zip(p.grid().nodes())
        .map(|(d, &r)| d / r)
        .collect();
    RadialProfile {
        grid: Arc::clone(p.grid()),
        values,
        origin_exponent: p.origin_exponent().map(|a| a - 1.0),
        decay_rate: p.decay_rate(),
    }
}

/// Samples `eta*` for `(nu, a)` on the grid, with declared asymptotics.
pub fn make_eta_star(params: &CouplingParams, grid: &Arc<RadialGrid>) -> Result<RadialProfile> {
    let (a_exp, decay) = params.eta_star_profile()?;
    RadialProfile::from_real_fn(grid, |r| r.powf(a_exp) * (-decay * r).exp())
        .with_asymptotics(Some(a_exp), Some(decay))
}

/// Samples the completed-square equality profile `rho^{-mu nu} e^{-mu rho}`.
pub fn make_lemma_phi_star(
    params: &CouplingParams,
    grid: &Arc<RadialGrid>,
) -> Result<RadialProfile> {
    let mu = params.lemma_square_mu()?;
    let a_exp = -mu * params.nu();
    RadialProfile::from_real_fn(grid, |r| r.powf(a_exp) * (-mu * r).exp())
        .with_asymptotics(Some(a_exp), Some(mu))
}

/// The truncation function: 0 up to `eps/2`, a sine ramp up to `eps`, 1 up
/// to `1/eps`, a sine ramp down over `[1/eps, 1/eps + pi]`, 0 beyond.
pub fn truncation_value(rho: f64, eps: f64) -> f64 {
    if rho <= 0.5 * eps {
        0.0
    } else if rho <= eps {
        0.5 * (1.0 + (2.0 * PI / eps * rho - 1.5 * PI).sin())
    } else if rho <= 1.0 / eps {
        1.0
    } else if rho <= 1.0 / eps + PI {
        0.5 * (1.0 + (rho + 0.5 * PI - 1.0 / eps).sin())
    } else {
        0.0
    }
}

/// Multiplies a profile by the truncation function.
pub fn make_truncation(p: &RadialProfile, eps: f64) -> Result<RadialProfile> {
    if !(0.0 < eps && eps <= 1.0) {
        return Err(CoreError::BadSpec(format!("eps = {eps} outside (0, 1]")));
    }
    let grid = p.grid();
    if grid.rho_min() > eps / 8.0 || grid.rho_max() < 1.0 / eps + PI {
        return Err(CoreError::GridTooCoarse(format!(
            "grid [{}, {}] cannot resolve the ramps of the eps = {eps} truncation",
            grid.rho_min(),
            grid.rho_max()
        )));
    }
    // both ramps need several nodes; log-uniform width near rho = eps is
    // h * eps, so h <= 1/8 suffices for the inner ramp
    let h = (grid.rho_max() / grid.rho_min()).ln() / grid.len() as f64;
    if h > 0.125 {
        return Err(CoreError::GridTooCoarse(format!(
            "log step {h:.3} too wide for the truncation ramps"
        )));
    }
    let values = grid
        .nodes()
        .iter()
        .zip(p.values())
        .map(|(&r, v)| v * truncation_value(r, eps))
        .collect();
    Ok(RadialProfile {
        grid: Arc::clone(grid),
        values,
        origin_exponent: None,
        decay_rate: None,
    })
}

/// The breakdown witness: `rho^{a - 1/2} e^{-rho}` outside `rho = eps`, a
/// linear ramp inside, gradient bounded by `eps^{a - 3/2}`.
pub fn make_supercritical_witness(
    params: &CouplingParams,
    eps: f64,
    grid: &Arc<RadialGrid>,
) -> Result<RadialProfile> {
    if !(0.0 < eps && eps <= 1.0) {
        return Err(CoreError::BadSpec(format!("eps = {eps} outside (0, 1]")));
    }
    if grid.rho_min() > eps / 50.0 || grid.rho_max() < 30.0 {
        return Err(CoreError::GridTooCoarse(format!(
            "grid [{}, {}] cannot resolve the eps = {eps} witness",
            grid.rho_min(),
            grid.rho_max()
        )));
    }
    let a = params.a();
    let boundary = eps.powf(a - 0.5) * (-eps).exp();
    let slope = boundary / eps; // = eps^{a - 3/2} e^{-eps} <= eps^{a - 3/2}
    RadialProfile::from_real_fn(grid, |r| {
        if r >= eps {
            r.powf(a - 0.5) * (-r).exp()
        } else {
            slope * r
        }
    })
    .with_asymptotics(Some(1.0), Some(1.0))
}

/// Smooth plateau in the mapped variable, for sharpness sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogCutoff {
    /// Center of the plateau in `u = ln rho`.
    pub center: f64,
    /// Half-width of the flat part.
    pub plateau_half_width: f64,
    /// Width of each cosine ramp.
    pub ramp_width: f64,
}

impl LogCutoff {
    pub fn value(&self, u: f64) -> f64 {
        let d = (u - self.center).abs();
        if d <= self.plateau_half_width {
            1.0
        } else if d <= self.plateau_half_width + self.ramp_width {
            let t = (d - self.plateau_half_width) / self.ramp_width;
            0.5 * (1.0 + (PI * t).cos())
        } else {
            0.0
        }
    }

    /// Total half-support in `u`.
    pub fn extent(&self) -> f64 {
        self.plateau_half_width + self.ramp_width
    }
}

/// Near-optimizer for the homogeneous weighted inequalities:
/// `rho^exponent` modulated by a log-scale plateau.
pub fn make_near_optimizer(
    exponent: f64,
    cutoff: LogCutoff,
    grid: &Arc<RadialGrid>,
) -> Result<RadialProfile> {
    let u_lo = grid.rho_min().ln();
    let u_hi = grid.rho_max().ln();
    if cutoff.center - cutoff.extent() < u_lo + 0.5 || cutoff.center + cutoff.extent() > u_hi - 0.5
    {
        return Err(CoreError::GridTooCoarse(format!(
            "cutoff support [{:.1}, {:.1}] exceeds grid range [{u_lo:.1}, {u_hi:.1}] in u",
            cutoff.center - cutoff.extent(),
            cutoff.center + cutoff.extent()
        )));
    }
    let h = (u_hi - u_lo) / grid.len() as f64;
    if h > cutoff.ramp_width / 8.0 {
        return Err(CoreError::GridTooCoarse(format!(
            "log step {h:.3} too wide for ramp width {}",
            cutoff.ramp_width
        )));
    }
    let values = grid
        .u_nodes()
        .iter()
        .map(|&u| Complex64::new((exponent * u).exp() * cutoff.value(u), 0.0))
        .collect();
    Ok(RadialProfile {
        grid: Arc::clone(grid),
        values,
        origin_exponent: None,
        decay_rate: None,
    })
}
