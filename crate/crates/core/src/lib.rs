//! Desk-scale spectral theory of the 2d Aharonov-Bohm Dirac-Coulomb
//! operator: closed-form ground-state data and critical field, weighted
//! per-mode quadratic forms, variational and direct eigensolvers with
//! cross-validation, sharp Hardy-type constants, and the non-relativistic
//! limit.

pub mod eigensolver;
pub mod error;
pub mod forms;
pub mod grid;
pub mod hardy;
pub mod model;
pub mod nonrel;
pub mod probes;
pub mod serialize;
pub mod variational;

pub use eigensolver::{
    assemble_mode_pencil, eigensolve_extrapolated, eigensolve_shooting,
    lowest_gap_eigenvalue_form, ode_residual_check, reconstruct_lower, shoot_radial_system,
    EigenResult, ModePencil, ShootingDefect, SolveMethod,
};
pub use error::{CoreError, ModeRejection, Result};
pub use forms::{eval_j, eval_j_mode, eval_j_positron_mode, eval_pauli_form, eval_q_mode};
pub use forms::{eval_reduced_form, FormBreakdown, JModeEvaluator};
pub use grid::{
    build_grid, differentiate, integrate_weighted, make_eta_star, make_lemma_phi_star,
    make_near_optimizer, make_supercritical_witness, make_truncation, truncation_value,
    GridSpec, LogCutoff, MapKind, RadialGrid, RadialProfile, RationalWeight, WeightedIntegral,
};
pub use hardy::{
    pauli_constant, pauli_rayleigh, rayleigh_wirtinger_mode, special_case_checks,
    wirtinger_constant, wirtinger_sharpness, CaseReport, HardyConstant, PauliConstant,
    SharpnessEstimate, SignBranch, SpecialCaseReport, WirtingerVariant,
};
pub use model::{
    critical_field, energy_slope_fd, half_gap, mode_half_gap, CouplingParams,
    GroundStateProfile, ModeEnergy, Regime, DEFAULT_CRITICALITY_TOL,
};
pub use nonrel::{
    binding_limit, convergence_sweep, limiting_profile, pauli_rayleigh_energy, pauli_residual,
    pauli_residual_on, scaled_energy, NonrelRow, NonrelSweep, ScaledEnergy,
};
pub use serialize::{profile_csv_roundtrip, profile_from_csv, profile_to_csv};
pub use variational::{
    completed_square_check, lambda_star, lambda_star_default, lambda_star_positron,
    minimize_lambda_star, positron_ground, supercritical_scan, LambdaStarOptions,
    LambdaStarResult, LambdaStarValue, MinimizeOptions, MinimizeResult, ScanRow, SquareCheck,
    SupercriticalScan, TrialFamily, TrialFamilySpec,
};
