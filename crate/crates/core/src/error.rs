use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "supercritical parameters: a = {a} exceeds the critical field {a_crit} for nu = {nu}"
    )]
    Supercritical { nu: f64, a: f64, a_crit: f64 },

    #[error("degenerate case: {0}")]
    Degenerate(String),

    #[error("mode ell = {ell} admits no gap eigenvalue ({reason})")]
    NoModeEigenvalue { ell: i32, reason: ModeRejection },

    #[error("bad grid spec: {0}")]
    BadSpec(String),

    #[error("non-integrable integrand: {0}")]
    NonIntegrable(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("no eigenvalue crossing in the gap for mode ell = {ell}")]
    NoCrossing { ell: i32 },

    #[error("stiff integration failure: {0}")]
    StiffIntegration(String),
}

/// Why a Fourier mode was rejected by the closed-form catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeRejection {
    /// Negative Fourier indices are outside the catalogued family.
    NegativeMode,
    /// `nu >= |c_ell(a)|`: the effective half-gap of the mode is closed.
    GapClosed,
}

impl std::fmt::Display for ModeRejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeRejection::NegativeMode => write!(f, "negative mode index"),
            ModeRejection::GapClosed => write!(f, "mode half-gap closed by the coupling"),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
