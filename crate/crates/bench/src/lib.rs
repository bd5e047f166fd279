//! Shared fixtures for the criterion benchmarks.

use ptslab::models::{self, ModelKind};
use ptslab::{LayerStack, MediumParams};

/// Reference stacks for both models at `ω/ωc`.
pub fn reference_stacks(omega_over_omegac: f64) -> (LayerStack, LayerStack) {
    let params = MediumParams::reference();
    let build = |model| {
        models::build_stack(model, &params, omega_over_omegac, models::Arrangement::GainFirst).expect("above cutoff")
    };
    (build(ModelKind::Exact), build(ModelKind::Approximate))
}
