//! Lorentz-model gain/absorber medium filling the slab waveguide.
//!
//! The profile has three regions along the guide axis: gain on `(-l, 0)`,
//! absorber on `(0, l)` and empty guide for `|z| > l`. Both media share one
//! Lorentz resonance; the gain region has inverted sign.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantities::{self, Config, C, HBAR};

/// Relative tolerance on the `ωc = ω0` tuning enforced by [`MediumParams::new`].
pub const TUNING_TOLERANCE: f64 = 1e-9;

/// Nominal slab widths from a configuration may differ from the tuned width
/// by this much (the reference parameters are quoted to three digits).
pub const NOMINAL_WIDTH_TOLERANCE: f64 = 5e-3;

/// Level above which [`MediumParams::regime_ratio`] is considered outside the
/// weak-resonance regime.
pub const REGIME_WARNING_LEVEL: f64 = 0.1;

/// Which medium occupies a point of the guide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    Gain,
    Absorbing,
    Vacuum,
}

impl RegionKind {
    /// Population factor ξ: −1 for gain, +1 for absorber, 0 for vacuum.
    pub fn xi(self) -> i8 {
        match self {
            RegionKind::Gain => -1,
            RegionKind::Absorbing => 1,
            RegionKind::Vacuum => 0,
        }
    }

    pub fn from_xi(xi: i8) -> Option<RegionKind> {
        match xi {
            -1 => Some(RegionKind::Gain),
            1 => Some(RegionKind::Absorbing),
            0 => Some(RegionKind::Vacuum),
            _ => None,
        }
    }

    fn xi_f64(self) -> f64 {
        f64::from(self.xi())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Resonance angular frequency ω0, rad/s.
    pub omega0: f64,
    /// Plasma frequency ωp, rad/s.
    pub omega_p: f64,
    /// Damping constant δ, rad/s.
    pub delta: f64,
    /// Full plate separation 2a, m.
    pub slab_width: f64,
    /// Length l of each active region, m.
    pub region_length: f64,
    /// Cutoff cπ/2a, rad/s.
    pub omega_c: f64,
}

impl MediumParams {
    /// Builds a parameter set whose cutoff coincides with the resonance.
    /// Rejects the set if `cπ/slab_width` differs from `omega0` by more than
    /// [`TUNING_TOLERANCE`] (relative).
    pub fn new(omega0: f64, omega_p: f64, delta: f64, slab_width: f64, region_length: f64) -> Result<MediumParams> {
        let params = Self::new_unchecked(omega0, omega_p, delta, slab_width, region_length)?;
        if (params.omega_c - omega0).abs() > TUNING_TOLERANCE * omega0 {
            return Err(Error::Detuned {
                omega_c: params.omega_c,
                omega0,
            });
        }
        Ok(params)
    }

    /// Chooses the slab width so that `ωc = ω0` exactly.
    pub fn tuned(omega0: f64, omega_p: f64, delta: f64, region_length: f64) -> Result<MediumParams> {
        positive("omega0", omega0)?;
        Self::new(omega0, omega_p, delta, C * std::f64::consts::PI / omega0, region_length)
    }

    /// No tuning check. For exploring detuned guides; the reduced
    /// Schrödinger model is not meaningful for such parameters.
    pub fn new_unchecked(
        omega0: f64,
        omega_p: f64,
        delta: f64,
        slab_width: f64,
        region_length: f64,
    ) -> Result<MediumParams> {
        positive("omega0", omega0)?;
        non_negative("omega_p", omega_p)?;
        positive("delta", delta)?;
        positive("region_length", region_length)?;
        let omega_c = quantities::cutoff_frequency(slab_width)?;
        Ok(MediumParams {
            omega0,
            omega_p,
            delta,
            slab_width,
            region_length,
            omega_c,
        })
    }

    /// Parameters from a run configuration. The configured slab width is a
    /// nominal value: it must agree with the width tuned to `ħω0` within
    /// [`NOMINAL_WIDTH_TOLERANCE`], and the tuned width is used.
    ///
    /// `ħωp = 0` is allowed here (medium switched off) even though the file
    /// format rejects it; this is how the unitarity checks are driven.
    pub fn from_config(cfg: &Config) -> Result<MediumParams> {
        let omega0 = quantities::ev_to_angular(cfg.hbar_omega0_ev)?;
        let omega_p = quantities::ev_to_angular(cfg.hbar_omegap_ev)?;
        let delta = quantities::ev_to_angular(cfg.hbar_delta_ev)?;
        positive("omega0", omega0)?;
        let tuned_width = C * std::f64::consts::PI / omega0;
        let nominal = cfg.slab_width_um * 1e-6;
        if !((nominal - tuned_width).abs() <= NOMINAL_WIDTH_TOLERANCE * tuned_width) {
            return Err(Error::Validation {
                key: "slab_width_um",
                message: format!(
                    "cutoff of a {} µm slab is {:.4} eV, not the resonance {} eV (tuned width {:.6} µm)",
                    cfg.slab_width_um,
                    quantities::angular_to_ev(C * std::f64::consts::PI / nominal),
                    cfg.hbar_omega0_ev,
                    tuned_width * 1e6
                ),
            });
        }
        Self::tuned(omega0, omega_p, delta, cfg.region_length_um * 1e-6)
    }

    /// Reference parameter set (defaults of [`Config`]).
    pub fn reference() -> MediumParams {
        Self::from_config(&Config::default()).expect("default config is valid")
    }

    /// Same parameters with the plasma frequency replaced.
    pub fn with_omega_p(self, omega_p: f64) -> MediumParams {
        MediumParams { omega_p, ..self }
    }

    /// The two weak-resonance ratios `(ωp²/δ², ωp²/(δωc))`.
    pub fn regime_ratios(&self) -> (f64, f64) {
        let wp2 = self.omega_p * self.omega_p;
        (wp2 / (self.delta * self.delta), wp2 / (self.delta * self.omega_c))
    }

    /// Larger of the two [`regime_ratios`](Self::regime_ratios).
    pub fn regime_ratio(&self) -> f64 {
        let (a, b) = self.regime_ratios();
        a.max(b)
    }

    pub fn regime_warning(&self) -> bool {
        self.regime_ratio() > REGIME_WARNING_LEVEL
    }

    /// Imaginary part of k² inside the absorber at ω = ωc,
    /// `ωc ωp² / (2c²δ)`.
    pub fn resonant_k2_scale(&self) -> f64 {
        self.omega_c * self.omega_p * self.omega_p / (2.0 * C * C * self.delta)
    }
}

fn positive(quantity: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { quantity, value })
    }
}

fn non_negative(quantity: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Negative { quantity, value })
    }
}

/// Region at position `z`. Boundary points belong to the region on their
/// right.
pub fn region_at(z: f64, params: &MediumParams) -> RegionKind {
    let l = params.region_length;
    if (-l..0.0).contains(&z) {
        RegionKind::Gain
    } else if (0.0..l).contains(&z) {
        RegionKind::Absorbing
    } else {
        RegionKind::Vacuum
    }
}

/// ξ(z) ∈ {−1, 0, +1}.
pub fn xi_profile(z: f64, params: &MediumParams) -> i8 {
    region_at(z, params).xi()
}

/// Lorentz permittivity `1 − ξ ωp² / (ω² − ω0² + 2iδω)`.
pub fn permittivity(kind: RegionKind, omega: f64, params: &MediumParams) -> Result<Complex64> {
    positive("frequency", omega)?;
    let denom = Complex64::new(
        omega * omega - params.omega0 * params.omega0,
        2.0 * params.delta * omega,
    );
    let wp2 = params.omega_p * params.omega_p;
    Ok(Complex64::new(1.0, 0.0) - kind.xi_f64() * wp2 / denom)
}

/// Squared longitudinal wavenumber of the guided mode,
/// `(ω² ε(ω) − ωc²) / c²`.
pub fn k_squared_exact(kind: RegionKind, omega: f64, params: &MediumParams) -> Result<Complex64> {
    let eps = permittivity(kind, omega, params)?;
    Ok((omega * omega * eps - params.omega_c * params.omega_c) / (C * C))
}

/// Near-cutoff truncation `2ωcΔω/c² + iξ ωc ωp² / (2c²δ)`.
pub fn k_squared_approx(kind: RegionKind, delta_omega: f64, params: &MediumParams) -> Complex64 {
    Complex64::new(
        2.0 * params.omega_c * delta_omega / (C * C),
        kind.xi_f64() * params.resonant_k2_scale(),
    )
}

/// Effective Schrödinger potential `−iξ ħωp²/(4δ)`, in joules.
pub fn effective_potential(kind: RegionKind, params: &MediumParams) -> Complex64 {
    let magnitude = HBAR * params.omega_p * params.omega_p / (4.0 * params.delta);
    Complex64::new(0.0, -kind.xi_f64() * magnitude)
}

/// Auxiliary mass `ħωc/c²`, kg.
pub fn effective_mass(params: &MediumParams) -> f64 {
    HBAR * params.omega_c / (C * C)
}

/// `|k²_gain(ω) − conj(k²_absorbing(ω))|` in 1/m². Vanishes when the exact
/// profile is locally PT-symmetric.
pub fn exact_pt_defect(omega: f64, params: &MediumParams) -> Result<f64> {
    let gain = k_squared_exact(RegionKind::Gain, omega, params)?;
    let absorbing = k_squared_exact(RegionKind::Absorbing, omega, params)?;
    Ok((gain - absorbing.conj()).norm())
}
