//! Time-dependent effective Schrödinger equation
//! `iħ ∂ψ/∂t = −(ħ²/2m) ∂²ψ/∂z² + V(z) ψ` with the complex gain/loss
//! potential, propagated by Crank–Nicolson on a uniform grid with hard walls.
//!
//! Scattering a narrow-band packet and measuring the transmitted and
//! reflected norm reproduces the spectral average of the stationary
//! amplitudes of the reduced model.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::helmholtz;
use crate::medium::{self, MediumParams};
use crate::models::{self, Arrangement};
use crate::quantities::HBAR;

/// Accuracy guard on `dt·max|V|/ħ`.
pub const MAX_POTENTIAL_PHASE: f64 = 0.1;

/// `|ψ|` relative to its maximum that counts as zero near the walls.
pub const WALL_LEVEL: f64 = 1e-12;

/// Wall level used instead of [`WALL_LEVEL`] when the potential has gain.
///
/// Round-off reaches every grid mode at the 1e-16 level each step; the fast
/// short-wavelength ones cross the grid within a fraction of a picosecond
/// and the gain region amplifies them by many orders of magnitude, so a
/// stray field at 1e-11..1e-9 of the peak reaches the walls regardless of
/// grid size. 1e-6 in amplitude (1e-12 in norm) is far below the accuracy
/// of the measured fractions and still catches the packet itself.
pub const WALL_LEVEL_WITH_GAIN: f64 = 1e-6;

/// Number of grid points next to each wall that must stay empty.
pub const WALL_POINTS: usize = 5;

/// `|ψ|` relative to its maximum allowed inside the medium at the end of a
/// scattering run.
pub const MEDIUM_LEVEL: f64 = 1e-8;

/// Packet placement margin, in units of σ.
pub const PLACEMENT_SIGMAS: f64 = 6.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Uniform grid `z_i = z_min + i·dz` and time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
    pub dz: f64,
    pub dt: f64,
}

impl SpatialGrid {
    pub fn new(z_min: f64, z_max: f64, n_points: usize, dt: f64) -> Result<SpatialGrid> {
        if n_points < 2 {
            return Err(Error::Grid(format!("need at least 2 points, got {n_points}")));
        }
        if !(z_max > z_min) || !z_min.is_finite() || !z_max.is_finite() {
            return Err(Error::Grid(format!("empty interval [{z_min}, {z_max}]")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Grid(format!("time step must be positive, got {dt}")));
        }
        Ok(SpatialGrid {
            z_min,
            z_max,
            n_points,
            dz: (z_max - z_min) / (n_points - 1) as f64,
            dt,
        })
    }

    /// Grid with the step `dt = m·dz²/ħ` (half the explicit-scheme
    /// stability scale `2m·dz²/ħ`).
    pub fn with_default_dt(z_min: f64, z_max: f64, n_points: usize, mass: f64) -> Result<SpatialGrid> {
        let dz = (z_max - z_min) / (n_points.max(2) - 1) as f64;
        Self::new(z_min, z_max, n_points, mass * dz * dz / HBAR)
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.dz
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.z(i))
    }

    pub fn with_dt(self, dt: f64) -> Result<SpatialGrid> {
        Self::new(self.z_min, self.z_max, self.n_points, dt)
    }
}

/// Gaussian packet `exp(−(z−z0)²/(4σ²) + i k̄ z)`; `|ψ|²` has standard
/// deviation σ and the wavenumber spectrum `|Â(k)|²` has width `1/(2σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketSpec {
    /// Centre, m.
    pub z0: f64,
    /// Spatial width σ, m.
    pub sigma: f64,
    /// Carrier wavenumber, 1/m. Negative for packets moving left.
    pub k_bar: f64,
}

impl WavepacketSpec {
    pub fn new(z0: f64, sigma: f64, k_bar: f64) -> Result<WavepacketSpec> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::NonPositive {
                quantity: "packet width",
                value: sigma,
            });
        }
        if !k_bar.is_finite() || k_bar == 0.0 {
            return Err(Error::Placement(format!(
                "carrier wavenumber must be nonzero, got {k_bar}"
            )));
        }
        Ok(WavepacketSpec { z0, sigma, k_bar })
    }

    /// Packet with carrier energy `energy` (J) in the effective model.
    pub fn from_energy(z0: f64, sigma: f64, energy: f64, params: &MediumParams, direction: Incidence) -> Result<Self> {
        if !(energy > 0.0) {
            return Err(Error::NonPositive {
                quantity: "packet energy",
                value: energy,
            });
        }
        let k = (2.0 * medium::effective_mass(params) * energy).sqrt() / HBAR;
        let k_bar = match direction {
            Incidence::Left => k,
            Incidence::Right => -k,
        };
        Self::new(z0, sigma, k_bar)
    }

    /// Carrier energy `ħ²k̄²/2m`, J.
    pub fn energy(&self, params: &MediumParams) -> f64 {
        HBAR * HBAR * self.k_bar * self.k_bar / (2.0 * medium::effective_mass(params))
    }

    /// Frequency spread `Ω ≈ (ħ|k̄|/m)·√2/(2σ)` of the packet.
    pub fn bandwidth(&self, params: &MediumParams) -> f64 {
        let velocity = HBAR * self.k_bar.abs() / medium::effective_mass(params);
        velocity * std::f64::consts::SQRT_2 / (2.0 * self.sigma)
    }

    /// `Ω/δ`; the reduction to the effective model needs this small.
    pub fn bandwidth_ratio(&self, params: &MediumParams) -> f64 {
        self.bandwidth(params) / params.delta
    }

    pub fn incidence(&self) -> Incidence {
        if self.k_bar > 0.0 {
            Incidence::Left
        } else {
            Incidence::Right
        }
    }
}

/// Side from which a packet arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incidence {
    Left,
    Right,
}

/// Field on the grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketState {
    pub psi: Vec<Complex64>,
    pub t: f64,
}

impl WavepacketState {
    /// Discrete norm `Σ|ψ|² dz`.
    pub fn norm(&self, grid: &SpatialGrid) -> f64 {
        self.psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * grid.dz
    }

    /// `Σ|ψ|² dz` over grid points with `z` inside `range`.
    pub fn norm_where(&self, grid: &SpatialGrid, mut inside: impl FnMut(f64) -> bool) -> f64 {
        self.psi
            .iter()
            .enumerate()
            .filter(|(i, _)| inside(grid.z(*i)))
            .map(|(_, p)| p.norm_sqr())
            .sum::<f64>()
            * grid.dz
    }

    pub fn max_abs(&self) -> f64 {
        self.psi.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// `⟨k⟩ = Σ ψ*(−i∂z)ψ dz / Σ|ψ|² dz` with a central difference.
    pub fn mean_wavenumber(&self, grid: &SpatialGrid) -> f64 {
        let n = self.psi.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..n - 1 {
            let d = (self.psi[i + 1] - self.psi[i - 1]) / (2.0 * grid.dz);
            acc += self.psi[i].conj() * (-I) * d;
        }
        acc.re * grid.dz / self.norm(grid)
    }

    /// Largest `|ψ|/max|ψ|` over the `WALL_POINTS` next to each wall.
    pub fn wall_levels(&self) -> (f64, f64) {
        let max = self.max_abs();
        if max == 0.0 {
            return (0.0, 0.0);
        }
        let n = self.psi.len();
        let k = WALL_POINTS.min(n);
        let level = |s: &[Complex64]| s.iter().map(|p| p.norm()).fold(0.0, f64::max) / max;
        (level(&self.psi[..k]), level(&self.psi[n - k..]))
    }

    /// Fails if the field reached either wall ([`WALL_LEVEL`]).
    pub fn check_walls(&self) -> Result<()> {
        self.check_walls_at(WALL_LEVEL)
    }

    pub fn check_walls_at(&self, level: f64) -> Result<()> {
        let (left, right) = self.wall_levels();
        if left >= level {
            return Err(Error::Contamination {
                t: self.t,
                side: "left",
                level: left,
            });
        }
        if right >= level {
            return Err(Error::Contamination {
                t: self.t,
                side: "right",
                level: right,
            });
        }
        Ok(())
    }

    /// CSV rows `z,re_psi,im_psi,abs2` with a header line.
    pub fn write_csv<W: Write>(&self, grid: &SpatialGrid, mut out: W) -> io::Result<()> {
        writeln!(out, "z,re_psi,im_psi,abs2")?;
        for (i, p) in self.psi.iter().enumerate() {
            writeln!(
                out,
                "{:.15e},{:.15e},{:.15e},{:.15e}",
                grid.z(i),
                p.re,
                p.im,
                p.norm_sqr()
            )?;
        }
        Ok(())
    }
}

/// Normalised Gaussian packet on the grid. The packet (±6σ) must lie
/// entirely in one of the empty-guide regions and away from the walls.
pub fn initial_gaussian(spec: &WavepacketSpec, grid: &SpatialGrid, params: &MediumParams) -> Result<WavepacketState> {
    let l = params.region_length;
    let reach = PLACEMENT_SIGMAS * spec.sigma;
    let outside = spec.z0 + reach < -l || spec.z0 - reach > l;
    if !outside {
        return Err(Error::Placement(format!(
            "packet z0 = {:e} m ± {PLACEMENT_SIGMAS}σ overlaps the medium on (−{l:e}, {l:e})",
            spec.z0
        )));
    }
    if spec.z0 - reach < grid.z_min || spec.z0 + reach > grid.z_max {
        return Err(Error::Placement(format!(
            "packet z0 = {:e} m ± {PLACEMENT_SIGMAS}σ reaches the grid boundary",
            spec.z0
        )));
    }
    Ok(gaussian_on_grid(spec, grid))
}

/// Normalised Gaussian packet on the grid without placement checks.
pub fn gaussian_on_grid(spec: &WavepacketSpec, grid: &SpatialGrid) -> WavepacketState {
    let mut psi: Vec<Complex64> = grid
        .points()
        .map(|z| {
            let x = z - spec.z0;
            Complex64::from_polar((-x * x / (4.0 * spec.sigma * spec.sigma)).exp(), spec.k_bar * z)
        })
        .collect();
    let norm = psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * grid.dz;
    let scale = 1.0 / norm.sqrt();
    psi.iter_mut().for_each(|p| *p *= scale);
    WavepacketState { psi, t: 0.0 }
}

/// Potential samples for the given arrangement of the two regions: each
/// grid point carries the average of `V` over its cell `[z - dz/2, z + dz/2]`.
///
/// Cell averaging places the interfaces to second order in `dz` wherever
/// they fall relative to the grid, and a grid symmetric about `z = 0` sees a
/// mirror-symmetric sampling of a mirror-symmetric profile.
pub fn potential_on_grid(params: &MediumParams, grid: &SpatialGrid, arrangement: Arrangement) -> Vec<Complex64> {
    let l = params.region_length;
    let [left, right] = arrangement.regions();
    let v_left = medium::effective_potential(left, params);
    let v_right = medium::effective_potential(right, params);
    let overlap = |a: f64, b: f64, lo: f64, hi: f64| (b.min(hi) - a.max(lo)).max(0.0);
    grid.points()
        .map(|z| {
            let (a, b) = (z - 0.5 * grid.dz, z + 0.5 * grid.dz);
            (v_left * overlap(a, b, -l, 0.0) + v_right * overlap(a, b, 0.0, l)) / grid.dz
        })
        .collect()
}

const UNDERFLOW: f64 = 1e-250;

#[inline]
fn flush(z: Complex64) -> Complex64 {
    let cut = |x: f64| if x.abs() < UNDERFLOW { 0.0 } else { x };
    Complex64::new(cut(z.re), cut(z.im))
}

/// Crank–Nicolson propagator with the tridiagonal factorisation of
/// `1 + i dt H / 2ħ` cached.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    dt: f64,
    /// `i dt/(2ħ)·(−ħ²/(2m dz²))`, the off-diagonal of `1 + i dt H/2ħ`.
    off: Complex64,
    /// Diagonal of `1 + i dt H/2ħ`.
    diag: Vec<Complex64>,
    /// Thomas-algorithm modified upper coefficients.
    c_prime: Vec<Complex64>,
    /// Reciprocal pivots.
    inv_pivot: Vec<Complex64>,
}

impl CrankNicolson {
    pub fn new(potential: &[Complex64], mass: f64, grid: &SpatialGrid) -> Result<CrankNicolson> {
        let dt = grid.dt;
        let v_max = potential.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let ratio = dt * v_max / HBAR;
        if ratio >= MAX_POTENTIAL_PHASE {
            return Err(Error::TimeStep { ratio });
        }
        if potential.len() != grid.n_points {
            return Err(Error::Grid(format!(
                "potential has {} samples for {} grid points",
                potential.len(),
                grid.n_points
            )));
        }
        let kinetic = HBAR * HBAR / (2.0 * mass * grid.dz * grid.dz);
        let a = I * dt / (2.0 * HBAR);
        let off = a * (-kinetic);
        let diag: Vec<Complex64> = potential.iter().map(|v| 1.0 + a * (2.0 * kinetic + v)).collect();

        let n = diag.len();
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        let mut prev_c = Complex64::new(0.0, 0.0);
        for row in 0..n {
            let pivot = if row == 0 { diag[0] } else { diag[row] - off * prev_c };
            if pivot.norm() <= f64::EPSILON {
                return Err(Error::SingularSystem { row });
            }
            let inv = 1.0 / pivot;
            inv_pivot[row] = inv;
            prev_c = off * inv;
            c_prime[row] = prev_c;
        }
        Ok(CrankNicolson {
            dt,
            off,
            diag,
            c_prime,
            inv_pivot,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` by one step in place, reusing `scratch`.
    pub fn step_in_place(&self, state: &mut WavepacketState, scratch: &mut Vec<Complex64>) {
        let psi = &mut state.psi;
        let n = psi.len();
        scratch.resize(n, Complex64::new(0.0, 0.0));
        // rhs = (1 − i dt H/2ħ) ψ = (2 − A) ψ where A = 1 + i dt H/2ħ
        for i in 0..n {
            let left = if i > 0 { psi[i - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if i + 1 < n {
                psi[i + 1]
            } else {
                Complex64::new(0.0, 0.0)
            };
            scratch[i] = (2.0 - self.diag[i]) * psi[i] - self.off * (left + right);
        }
        // forward sweep
        let mut prev = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let d = if i == 0 {
                scratch[0]
            } else {
                scratch[i] - self.off * prev
            };
            prev = flush(d * self.inv_pivot[i]);
            scratch[i] = prev;
        }
        // back substitution; the far tails of a packet decay through the
        // subnormal range, where floating-point arithmetic is very slow, so
        // components below `UNDERFLOW` are flushed to zero
        psi[n - 1] = flush(scratch[n - 1]);
        for i in (0..n - 1).rev() {
            psi[i] = flush(scratch[i] - self.c_prime[i] * psi[i + 1]);
        }
        state.t += self.dt;
    }

    pub fn step(&self, state: &WavepacketState) -> WavepacketState {
        let mut next = state.clone();
        let mut scratch = Vec::with_capacity(state.psi.len());
        self.step_in_place(&mut next, &mut scratch);
        next
    }
}

/// One Crank–Nicolson step of `state` under `potential` with mass `mass`.
pub fn step_crank_nicolson(
    state: &WavepacketState,
    potential: &[Complex64],
    mass: f64,
    grid: &SpatialGrid,
) -> Result<WavepacketState> {
    Ok(CrankNicolson::new(potential, mass, grid)?.step(state))
}

/// Propagates `n_steps` steps and returns every `stride`-th state, starting
/// with the initial one.
pub fn trajectory(
    initial: &WavepacketState,
    propagator: &CrankNicolson,
    n_steps: usize,
    stride: usize,
) -> Vec<WavepacketState> {
    let stride = stride.max(1);
    let mut out = vec![initial.clone()];
    let mut state = initial.clone();
    let mut scratch = Vec::new();
    for s in 1..=n_steps {
        propagator.step_in_place(&mut state, &mut scratch);
        if s % stride == 0 {
            out.push(state.clone());
        }
    }
    out
}

/// Norm and gain/loss source term of one state, the inputs of the norm
/// balance `dN/dt = (2/ħ) Σ Im V |ψ|² dz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceSample {
    pub t: f64,
    pub norm: f64,
    pub source: f64,
}

impl BalanceSample {
    pub fn of(state: &WavepacketState, potential: &[Complex64], grid: &SpatialGrid) -> BalanceSample {
        let source = 2.0 / HBAR
            * state
                .psi
                .iter()
                .zip(potential)
                .map(|(p, v)| v.im * p.norm_sqr())
                .sum::<f64>()
            * grid.dz;
        BalanceSample {
            t: state.t,
            norm: state.norm(grid),
            source,
        }
    }
}

/// Largest violation of the norm balance over the interior states of a
/// trajectory with uniform time spacing, with `dN/dt` from central
/// differences.
///
/// The residual is made dimensionless by `N·Γ`, where `Γ` is the larger of
/// the maximal gain/loss rate `2 max|Im V|/ħ` and `1/T` for a trajectory of
/// duration `T`.
pub fn norm_balance_residual(
    trajectory: &[WavepacketState],
    potential: &[Complex64],
    grid: &SpatialGrid,
) -> Result<f64> {
    let samples: Vec<BalanceSample> = trajectory
        .iter()
        .map(|s| BalanceSample::of(s, potential, grid))
        .collect();
    balance_residual(&samples, potential)
}

/// [`norm_balance_residual`] on precomputed samples, so long runs need not
/// keep every field in memory.
pub fn balance_residual(samples: &[BalanceSample], potential: &[Complex64]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidRange(format!(
            "norm balance needs at least 3 states, got {}",
            samples.len()
        )));
    }
    let h = samples[1].t - samples[0].t;
    let duration = samples[samples.len() - 1].t - samples[0].t;
    let im_max = potential.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let rate = (2.0 * im_max / HBAR).max(1.0 / duration);
    Ok(samples
        .windows(3)
        .map(|w| {
            let dn = (w[2].norm - w[0].norm) / (2.0 * h);
            (dn - w[1].source).abs() / (w[1].norm * rate)
        })
        .fold(0.0, f64::max))
}

/// Propagates `n_steps` steps and returns the balance sample of every
/// state, the initial one included.
pub fn balance_trajectory(
    initial: &WavepacketState,
    propagator: &CrankNicolson,
    potential: &[Complex64],
    grid: &SpatialGrid,
    n_steps: usize,
) -> Vec<BalanceSample> {
    let mut state = initial.clone();
    let mut scratch = Vec::new();
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(BalanceSample::of(&state, potential, grid));
    for _ in 0..n_steps {
        propagator.step_in_place(&mut state, &mut scratch);
        out.push(BalanceSample::of(&state, potential, grid));
    }
    out
}

/// Result of a wavepacket scattering run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterOutcome {
    /// Norm beyond the medium on the far side.
    pub transmitted_fraction: f64,
    /// Norm back on the incidence side.
    pub reflected_fraction: f64,
    /// Final total norm minus one.
    pub gained_norm: f64,
    /// Norm still inside the medium.
    pub residual_in_medium: f64,
    /// Largest `|ψ|` inside the medium relative to `max|ψ|`.
    pub medium_peak_ratio: f64,
    /// Stationary-model prediction for the same packet.
    pub prediction: SpectralPrediction,
    pub final_state: WavepacketState,
    pub steps: usize,
}

impl ScatterOutcome {
    pub fn total_norm(&self) -> f64 {
        1.0 + self.gained_norm
    }

    /// `|measured − predicted| / predicted` for the transmitted fraction.
    pub fn transmission_deviation(&self) -> f64 {
        (self.transmitted_fraction - self.prediction.transmitted).abs() / self.prediction.transmitted
    }

    pub fn reflection_deviation(&self) -> f64 {
        (self.reflected_fraction - self.prediction.reflected).abs() / self.prediction.reflected
    }

    /// True when the medium has emptied to [`MEDIUM_LEVEL`].
    ///
    /// With gain present the potential can hold a growing mode that any
    /// packet seeds; the medium then never empties and the fractions are
    /// only meaningful while that mode is still small.
    pub fn is_settled(&self) -> bool {
        self.medium_peak_ratio <= MEDIUM_LEVEL
    }
}

/// Packet-averaged stationary probabilities
/// `∫|Â(k)|²|T(k)|²dk / ∫|Â(k)|²dk` (and likewise for `R`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPrediction {
    pub transmitted: f64,
    pub reflected: f64,
}

/// Spectral average of the stationary effective-model probabilities over
/// the Gaussian spectrum `|Â(k)|² ∝ exp(−2σ²(k − |k̄|)²)`, truncated to
/// `k > 0` and ±8 spectral widths; composite Simpson rule.
pub fn spectral_prediction(
    spec: &WavepacketSpec,
    params: &MediumParams,
    arrangement: Arrangement,
) -> Result<SpectralPrediction> {
    let k_bar = spec.k_bar.abs();
    let width = 1.0 / (2.0 * spec.sigma);
    let lo = (k_bar - 8.0 * width).max(k_bar * 1e-6);
    let hi = k_bar + 8.0 * width;
    let intervals = 2000;
    let h = (hi - lo) / intervals as f64;
    let mass = medium::effective_mass(params);
    let (mut w_sum, mut t_sum, mut r_sum) = (0.0, 0.0, 0.0);
    for i in 0..=intervals {
        let k = lo + h * i as f64;
        let simpson = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let weight = simpson * (-2.0 * spec.sigma * spec.sigma * (k - k_bar).powi(2)).exp();
        let delta_omega = HBAR * k * k / (2.0 * mass);
        let stack = models::build_approx_stack_arranged(params, delta_omega, arrangement)?;
        let amp = helmholtz::amplitudes(&stack)?;
        let (t, r) = match spec.incidence() {
            Incidence::Left => (amp.t_left, amp.r_left),
            Incidence::Right => (amp.t_right, amp.r_right),
        };
        w_sum += weight;
        t_sum += weight * t.norm_sqr();
        r_sum += weight * r.norm_sqr();
    }
    Ok(SpectralPrediction {
        transmitted: t_sum / w_sum,
        reflected: r_sum / w_sum,
    })
}

/// Scatters a packet off the two-region potential until `t_final` and
/// splits the final norm into transmitted and reflected parts.
///
/// Fails if the field reaches a wall during the run (checked every 64
/// steps; [`WALL_LEVEL`], or [`WALL_LEVEL_WITH_GAIN`] if any region has
/// gain). Whether the medium has emptied is reported, not enforced; see
/// [`ScatterOutcome::is_settled`].
pub fn scatter_packet(
    params: &MediumParams,
    spec: &WavepacketSpec,
    grid: &SpatialGrid,
    t_final: f64,
    arrangement: Arrangement,
) -> Result<ScatterOutcome> {
    let mass = medium::effective_mass(params);
    let potential = potential_on_grid(params, grid, arrangement);
    let propagator = CrankNicolson::new(&potential, mass, grid)?;
    let mut state = initial_gaussian(spec, grid, params)?;
    state.check_walls()?;
    let wall_level = if potential.iter().any(|v| v.im > 0.0) {
        WALL_LEVEL_WITH_GAIN
    } else {
        WALL_LEVEL
    };

    let steps = (t_final / grid.dt).round().max(0.0) as usize;
    let mut scratch = Vec::with_capacity(grid.n_points);
    for s in 1..=steps {
        propagator.step_in_place(&mut state, &mut scratch);
        if s % 64 == 0 || s == steps {
            state.check_walls_at(wall_level)?;
        }
    }

    let l = params.region_length;
    let in_medium = |z: f64| (-l..l).contains(&z);
    let max = state.max_abs();
    let medium_peak = state
        .psi
        .iter()
        .enumerate()
        .filter(|(i, _)| in_medium(grid.z(*i)))
        .map(|(_, p)| p.norm())
        .fold(0.0, f64::max);

    let right = state.norm_where(grid, |z| z >= l);
    let left = state.norm_where(grid, |z| z < -l);
    let (transmitted_fraction, reflected_fraction) = match spec.incidence() {
        Incidence::Left => (right, left),
        Incidence::Right => (left, right),
    };
    Ok(ScatterOutcome {
        transmitted_fraction,
        reflected_fraction,
        gained_norm: state.norm(grid) - 1.0,
        residual_in_medium: state.norm_where(grid, in_medium),
        medium_peak_ratio: medium_peak / max,
        prediction: spectral_prediction(spec, params, arrangement)?,
        final_state: state,
        steps,
    })
}

/// Width of the free Gaussian after time `t`:
/// `σ·sqrt(1 + (ħt/(2mσ²))²)`.
pub fn spread_width(spec: &WavepacketSpec, params: &MediumParams, t: f64) -> f64 {
    let tau = 2.0 * medium::effective_mass(params) * spec.sigma * spec.sigma / HBAR;
    spec.sigma * (1.0 + (t / tau).powi(2)).sqrt()
}

/// Packet, grid and run time for one scattering experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketExperiment {
    pub spec: WavepacketSpec,
    pub grid: SpatialGrid,
    pub t_final: f64,
}

/// Inputs to [`PacketExperiment::design`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentDesign {
    /// Packet width σ, m.
    pub sigma: f64,
    /// Carrier energy, J.
    pub energy: f64,
    pub incidence: Incidence,
    /// Grid spacing, m.
    pub dz: f64,
    /// Time step, s.
    pub dt: f64,
}

impl ExperimentDesign {
    /// σ = 3.2 µm at 0.2 eV (Ω/δ ≈ 0.01 for the reference medium), 20 nm
    /// grid and a step with `E·dt/ħ = 0.02`.
    pub fn standard() -> ExperimentDesign {
        let energy = 0.2 * crate::quantities::E_CHARGE;
        ExperimentDesign {
            sigma: 3.2e-6,
            energy,
            incidence: Incidence::Left,
            dz: 20e-9,
            dt: 0.02 * HBAR / energy,
        }
    }
}

impl PacketExperiment {
    /// Places the packet 6σ (plus 1 µm) outside the medium and runs until
    /// its centre is 8σ past the far end, plus one more crossing time so
    /// that most of the ringing inside the medium has leaked out. The grid
    /// is symmetric about the centre of the medium and keeps 13 spread
    /// widths between the packet and the walls.
    pub fn design(params: &MediumParams, d: &ExperimentDesign) -> Result<PacketExperiment> {
        let l = params.region_length;
        let start = l + PLACEMENT_SIGMAS * d.sigma + 1e-6;
        let mass = medium::effective_mass(params);
        let k = (2.0 * mass * d.energy).sqrt() / HBAR;
        let spec = match d.incidence {
            Incidence::Left => WavepacketSpec::new(-start, d.sigma, k)?,
            Incidence::Right => WavepacketSpec::new(start, d.sigma, -k)?,
        };
        let velocity = HBAR * k / mass;
        let t_final = (start + l + 8.0 * d.sigma) / velocity + 2.0 * l / velocity;
        let width = spread_width(&spec, params, t_final);
        let extent = start + velocity * t_final + 13.0 * width;
        let n_points = 2 * (extent / d.dz).ceil() as usize + 1;
        let grid = SpatialGrid::new(-extent, extent, n_points, d.dt)?;
        Ok(PacketExperiment { spec, grid, t_final })
    }

    pub fn run(&self, params: &MediumParams, arrangement: Arrangement) -> Result<ScatterOutcome> {
        scatter_packet(params, &self.spec, &self.grid, self.t_final, arrangement)
    }

    /// Time at which the reflected packet's centre is 8σ clear of the near
    /// edge of the medium. At low energies the gain region's growing mode
    /// overtakes the packet long before [`PacketExperiment::t_final`], and
    /// this is the latest time at which the scattered norm is still
    /// dominated by the packet itself.
    pub fn reflection_time(&self, params: &MediumParams) -> f64 {
        let velocity = HBAR * self.spec.k_bar.abs() / medium::effective_mass(params);
        (self.spec.z0.abs() - params.region_length + 8.0 * self.spec.sigma) / velocity
    }

    pub fn with_t_final(self, t_final: f64) -> PacketExperiment {
        PacketExperiment { t_final, ..self }
    }
}

/// Standard deviation of `|Â(k)|²`, with `Â` evaluated as a direct discrete
/// Fourier sum on 801 wavenumbers around `⟨k⟩`.
pub fn spectral_width(state: &WavepacketState, grid: &SpatialGrid) -> f64 {
    let mean_k = state.mean_wavenumber(grid);
    let width_guess = {
        let n = state.norm(grid);
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, p) in state.psi.iter().enumerate() {
            let z = grid.z(i);
            let w = p.norm_sqr() * grid.dz / n;
            m1 += w * z;
            m2 += w * z * z;
        }
        let sigma_z = (m2 - m1 * m1).sqrt();
        1.0 / (2.0 * sigma_z)
    };
    let samples = 801;
    let span = 10.0 * width_guess;
    let dk = 2.0 * span / (samples - 1) as f64;
    let (mut w, mut wk, mut wk2) = (0.0, 0.0, 0.0);
    for j in 0..samples {
        let k = mean_k - span + dk * j as f64;
        let amp: Complex64 = state
            .psi
            .iter()
            .enumerate()
            .map(|(i, p)| p * Complex64::from_polar(1.0, -k * grid.z(i)))
            .sum::<Complex64>()
            * grid.dz
            / (2.0 * PI).sqrt();
        let p = amp.norm_sqr();
        w += p;
        wk += p * k;
        wk2 += p * k * k;
    }
    let mean = wk / w;
    (wk2 / w - mean * mean).sqrt()
}
