//! Shared fixtures for the solver benchmarks.

use std::sync::Arc;

use abdirac_core::*;

pub fn bench_params() -> CouplingParams {
    CouplingParams::new(0.3, 0.1).unwrap()
}

pub fn bench_grid(params: &CouplingParams) -> Arc<RadialGrid> {
    let (_, decay) = params.eta_star_profile().unwrap();
    build_grid(GridSpec::default_for_decay(decay)).unwrap()
}
