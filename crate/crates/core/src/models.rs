//! The two concrete models of the gain/absorber waveguide as layer stacks,
//! frequency sweeps over both, and PT diagnostics.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::helmholtz::{self, Layer, LayerStack, ScatteringAmplitudes};
use crate::medium::{self, MediumParams, RegionKind};
use crate::quantities::C;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Helmholtz equation with the full Lorentz permittivity.
    Exact,
    /// Effective Schrödinger equation (near-cutoff truncation).
    Approximate,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Exact, ModelKind::Approximate];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Exact => "exact",
            ModelKind::Approximate => "approx",
        }
    }
}

/// Order of the two active regions along the guide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arrangement {
    /// Gain on `(−l, 0)`, absorber on `(0, l)`.
    #[default]
    GainFirst,
    /// Mirror image: absorber on `(−l, 0)`, gain on `(0, l)`.
    AbsorberFirst,
}

impl Arrangement {
    pub fn regions(self) -> [RegionKind; 2] {
        match self {
            Arrangement::GainFirst => [RegionKind::Gain, RegionKind::Absorbing],
            Arrangement::AbsorberFirst => [RegionKind::Absorbing, RegionKind::Gain],
        }
    }
}

/// Exact model at angular frequency `omega` (must exceed ωc).
pub fn build_exact_stack(params: &MediumParams, omega: f64) -> Result<LayerStack> {
    build_exact_stack_arranged(params, omega, Arrangement::GainFirst)
}

pub fn build_exact_stack_arranged(params: &MediumParams, omega: f64, arrangement: Arrangement) -> Result<LayerStack> {
    if !(omega > params.omega_c) {
        return Err(Error::BelowCutoff {
            ratio: omega / params.omega_c,
        });
    }
    let k_outer = ((omega - params.omega_c) * (omega + params.omega_c)).sqrt() / C;
    let layers = arrangement
        .regions()
        .iter()
        .map(|&kind| Layer::new(medium::k_squared_exact(kind, omega, params)?, params.region_length))
        .collect::<Result<Vec<_>>>()?;
    LayerStack::new(k_outer, layers)
}

/// Effective Schrödinger model at energy `ħΔω` above cutoff.
pub fn build_approx_stack(params: &MediumParams, delta_omega: f64) -> Result<LayerStack> {
    build_approx_stack_arranged(params, delta_omega, Arrangement::GainFirst)
}

pub fn build_approx_stack_arranged(
    params: &MediumParams,
    delta_omega: f64,
    arrangement: Arrangement,
) -> Result<LayerStack> {
    if !(delta_omega > 0.0) {
        return Err(Error::BelowCutoff {
            ratio: 1.0 + delta_omega / params.omega_c,
        });
    }
    let k_outer = (2.0 * params.omega_c * delta_omega).sqrt() / C;
    let layers = arrangement
        .regions()
        .iter()
        .map(|&kind| {
            Layer::new(
                medium::k_squared_approx(kind, delta_omega, params),
                params.region_length,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    LayerStack::new(k_outer, layers)
}

/// Stack for `model` at the given `ω/ωc`. The approximate model uses
/// `Δω = (ω/ωc − 1)·ωc`.
pub fn build_stack(
    model: ModelKind,
    params: &MediumParams,
    omega_over_omegac: f64,
    arrangement: Arrangement,
) -> Result<LayerStack> {
    match model {
        ModelKind::Exact => build_exact_stack_arranged(params, omega_over_omegac * params.omega_c, arrangement),
        ModelKind::Approximate => {
            build_approx_stack_arranged(params, (omega_over_omegac - 1.0) * params.omega_c, arrangement)
        }
    }
}

/// Local PT defect `|k²(−z) − conj(k²(z))|` of the model profile at `omega`,
/// relative to the guide scale `ωc²/c²`. Identically zero for the
/// approximate model; for the exact model zero at `ω = ωc` only.
pub fn pt_defect(model: ModelKind, params: &MediumParams, omega: f64) -> Result<f64> {
    if !(omega >= params.omega_c) {
        return Err(Error::BelowCutoff {
            ratio: omega / params.omega_c,
        });
    }
    let scale = params.omega_c * params.omega_c / (C * C);
    let defect = match model {
        ModelKind::Exact => medium::exact_pt_defect(omega, params)?,
        ModelKind::Approximate => {
            let dw = omega - params.omega_c;
            let gain = medium::k_squared_approx(RegionKind::Gain, dw, params);
            let absorbing = medium::k_squared_approx(RegionKind::Absorbing, dw, params);
            (gain - absorbing.conj()).norm()
        }
    };
    Ok(defect / scale)
}

/// Outcome of one model at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelResult {
    Ok {
        amplitudes: ScatteringAmplitudes,
        s_left: f64,
        s_right: f64,
    },
    /// The transfer matrix had `m22 = 0` (spectral singularity).
    Singular,
}

impl ModelResult {
    pub fn from_stack(stack: &LayerStack) -> Result<ModelResult> {
        match helmholtz::amplitudes(stack) {
            Ok(amplitudes) => {
                let (s_left, s_right) = helmholtz::flux_sums(&amplitudes);
                Ok(ModelResult::Ok {
                    amplitudes,
                    s_left,
                    s_right,
                })
            }
            Err(Error::ResonancePole) => Ok(ModelResult::Singular),
            Err(e) => Err(e),
        }
    }

    pub fn amplitudes(&self) -> Option<&ScatteringAmplitudes> {
        match self {
            ModelResult::Ok { amplitudes, .. } => Some(amplitudes),
            ModelResult::Singular => None,
        }
    }

    /// `(s_left, s_right)` if the row is regular.
    pub fn sums(&self) -> Option<(f64, f64)> {
        match *self {
            ModelResult::Ok { s_left, s_right, .. } => Some((s_left, s_right)),
            ModelResult::Singular => None,
        }
    }

    pub fn log10_sums(&self) -> Option<(f64, f64)> {
        self.sums().map(|(l, r)| (l.log10(), r.log10()))
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, ModelResult::Singular)
    }
}

/// One abscissa of a sweep. A model that was not requested is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub omega_over_omegac: f64,
    pub exact: Option<ModelResult>,
    pub approx: Option<ModelResult>,
}

impl SweepRow {
    pub fn get(&self, model: ModelKind) -> Option<&ModelResult> {
        match model {
            ModelKind::Exact => self.exact.as_ref(),
            ModelKind::Approximate => self.approx.as_ref(),
        }
    }

    pub fn singular_count(&self) -> usize {
        [self.exact, self.approx]
            .iter()
            .flatten()
            .filter(|r| r.is_singular())
            .count()
    }
}

/// Evaluates the requested models at one `ω/ωc`.
pub fn evaluate_row(
    params: &MediumParams,
    omega_over_omegac: f64,
    models: &[ModelKind],
    arrangement: Arrangement,
) -> Result<SweepRow> {
    let run = |model: ModelKind| -> Result<Option<ModelResult>> {
        if !models.contains(&model) {
            return Ok(None);
        }
        let stack = build_stack(model, params, omega_over_omegac, arrangement)?;
        ModelResult::from_stack(&stack).map(Some)
    };
    Ok(SweepRow {
        omega_over_omegac,
        exact: run(ModelKind::Exact)?,
        approx: run(ModelKind::Approximate)?,
    })
}

/// `n` equally spaced values from `start` to `stop`, endpoints exact.
pub fn sweep_grid(start: f64, stop: f64, n: usize) -> Result<Vec<f64>> {
    if !(start > 1.0) || !(stop > start) || !stop.is_finite() {
        return Err(Error::InvalidRange(format!(
            "need 1 < start < stop, got start = {start}, stop = {stop}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidRange(format!("need at least 2 points, got {n}")));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                stop
            } else {
                start + (stop - start) * (i as f64 / last)
            }
        })
        .collect())
}

/// Frequency sweep in ascending `ω/ωc`. Rows are computed in parallel;
/// ordering and values do not depend on the thread count.
pub fn sweep(params: &MediumParams, start: f64, stop: f64, n: usize, models: &[ModelKind]) -> Result<Vec<SweepRow>> {
    sweep_arranged(params, start, stop, n, models, Arrangement::GainFirst)
}

pub fn sweep_arranged(
    params: &MediumParams,
    start: f64,
    stop: f64,
    n: usize,
    models: &[ModelKind],
    arrangement: Arrangement,
) -> Result<Vec<SweepRow>> {
    sweep_grid(start, stop, n)?
        .into_par_iter()
        .map(|x| evaluate_row(params, x, models, arrangement))
        .collect()
}

/// Single-threaded [`sweep`].
pub fn sweep_serial(
    params: &MediumParams,
    start: f64,
    stop: f64,
    n: usize,
    models: &[ModelKind],
) -> Result<Vec<SweepRow>> {
    sweep_grid(start, stop, n)?
        .into_iter()
        .map(|x| evaluate_row(params, x, models, Arrangement::GainFirst))
        .collect()
}
