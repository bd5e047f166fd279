//! Wave scattering off contiguous gain and absorbing regions in a planar
//! slab waveguide.
//!
//! Two models of the same structure are provided: the exact longitudinal
//! Helmholtz equation with Lorentz-dispersive permittivity, and its
//! near-cutoff reduction to a Schrödinger equation with a PT-symmetric
//! imaginary potential. Both are solved by transfer matrices
//! ([`helmholtz`]); the reduced model is also propagated in time
//! ([`timeprop`]).

pub mod error;
pub mod helmholtz;
pub mod medium;
pub mod models;
pub mod quantities;
pub mod timeprop;

pub use error::{Error, Result};
pub use helmholtz::{amplitudes, flux_sums, Layer, LayerStack, ScatteringAmplitudes, TransferMatrix};
pub use medium::{MediumParams, RegionKind};
pub use models::{ModelKind, ModelResult, SweepRow};
pub use quantities::Config;

pub use timeprop::{SpatialGrid, WavepacketSpec, WavepacketState};
