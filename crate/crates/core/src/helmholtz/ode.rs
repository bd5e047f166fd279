//! Direct integration of `φ'' = −k²(z) φ` with an embedded Runge–Kutta
//! 5(4) pair (Dormand–Prince). Independent of the transfer-matrix path and
//! used to cross-check it.

use num_complex::Complex64;

use super::{LayerStack, ScatteringAmplitudes};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step as a fraction of the segment length.
    pub initial_step_fraction: f64,
    /// Steps shorter than this fraction of the domain abort the integration.
    pub min_step_fraction: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings {
            rtol: 1e-10,
            atol: 1e-10,
            initial_step_fraction: 1e-3,
            min_step_fraction: 1e-14,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [Complex64; 2];

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (w, k) in terms {
        out[0] += h * w * k[0];
        out[1] += h * w * k[1];
    }
    out
}

/// Integrates `(φ, φ'/k_ref)` from `z_start` to `z_end` (either direction)
/// on a segment where `k2` is smooth.
fn integrate_segment<F>(
    k2: &F,
    k_ref: f64,
    y0: State,
    z_start: f64,
    z_end: f64,
    settings: &OdeSettings,
    min_step: f64,
) -> Result<State>
where
    F: Fn(f64) -> Complex64,
{
    let span = z_end - z_start;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let (lo, hi) = if z_start < z_end {
        (z_start, z_end)
    } else {
        (z_end, z_start)
    };
    // keep evaluations strictly inside the segment
    let inset = 1e-12 * (hi - lo);
    let rhs = |z: f64, y: &State| -> State {
        let zc = z.clamp(lo + inset, hi - inset);
        [k_ref * y[1], -k2(zc) / k_ref * y[0]]
    };

    let mut z = z_start;
    let mut y = y0;
    let mut h = dir * span.abs() * settings.initial_step_fraction;
    let mut k1 = rhs(z, &y);
    loop {
        let remaining = z_end - z;
        if remaining * dir <= 0.0 {
            break;
        }
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        let k2v = rhs(z + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(z + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2v)]));
        let k4 = rhs(z + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2v), (A43, &k3)]));
        let k5 = rhs(
            z + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2v), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            z + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2v), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = rhs(z + h, &y_new);
        let err_vec = axpy(
            &[Complex64::new(0.0, 0.0); 2],
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = (0..2)
            .map(|i| {
                let scale = settings.atol + settings.rtol * y[i].norm().max(y_new[i].norm());
                (err_vec[i].norm() / scale).powi(2)
            })
            .sum::<f64>()
            / 2.0;
        let err = err.sqrt();

        if err <= 1.0 {
            z += h;
            if (z_end - z) * dir < min_step {
                z = z_end;
            }
            y = y_new;
            k1 = k7;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() < min_step && (z_end - z) * dir > min_step {
            return Err(Error::Stiffness { z });
        }
    }
    Ok(y)
}

fn integrate<F>(k2: &F, k_ref: f64, y0: State, nodes: &[f64], settings: &OdeSettings, min_step: f64) -> Result<State>
where
    F: Fn(f64) -> Complex64,
{
    nodes.windows(2).try_fold(y0, |y, w| {
        integrate_segment(k2, k_ref, y, w[0], w[1], settings, min_step)
    })
}

/// Scattering amplitudes of `φ'' + k²(z) φ = 0` by direct integration.
///
/// `k2_of_z` must equal `k_outer²` outside `[z_min, z_max]`; `breakpoints`
/// lists interior points where it jumps (the integrator stops on them).
/// Left incidence is seeded with the outgoing wave at `z_max` and integrated
/// to `z_min`, right incidence the mirror image. Phases refer to `z_min` and
/// `z_max`, matching the transfer-matrix convention.
pub fn ode_amplitudes<F>(
    k2_of_z: F,
    domain: (f64, f64),
    k_outer: f64,
    breakpoints: &[f64],
    settings: &OdeSettings,
) -> Result<ScatteringAmplitudes>
where
    F: Fn(f64) -> Complex64,
{
    let (z_min, z_max) = domain;
    if !(z_max >= z_min) {
        return Err(Error::InvalidRange(format!("empty domain [{z_min}, {z_max}]")));
    }
    if !(k_outer > 0.0) {
        return Err(Error::NonPositive {
            quantity: "outer wavenumber",
            value: k_outer,
        });
    }
    let mut nodes: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|z| *z > z_min && *z < z_max)
        .collect();
    nodes.push(z_min);
    nodes.push(z_max);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let min_step = settings.min_step_fraction * (z_max - z_min).max(1.0 / k_outer);

    // State is (φ, φ'/k_outer); e^{±ik(z−z₀)} gives (1, ±i) at z₀.
    let backward: Vec<f64> = nodes.iter().rev().copied().collect();
    let at_left = integrate(
        &k2_of_z,
        k_outer,
        [Complex64::new(1.0, 0.0), I],
        &backward,
        settings,
        min_step,
    )?;
    // at z_min: φ = A₊ + A₋, φ'/k = i(A₊ − A₋)
    let a_plus = 0.5 * (at_left[0] - I * at_left[1]);
    let a_minus = 0.5 * (at_left[0] + I * at_left[1]);

    let at_right = integrate(
        &k2_of_z,
        k_outer,
        [Complex64::new(1.0, 0.0), -I],
        &nodes,
        settings,
        min_step,
    )?;
    let c_plus = 0.5 * (at_right[0] - I * at_right[1]);
    let c_minus = 0.5 * (at_right[0] + I * at_right[1]);

    Ok(ScatteringAmplitudes {
        t_left: 1.0 / a_plus,
        r_left: a_minus / a_plus,
        t_right: 1.0 / c_minus,
        r_right: c_plus / c_minus,
    })
}

/// [`ode_amplitudes`] on the profile described by a layer stack.
pub fn ode_amplitudes_for_stack(stack: &LayerStack, settings: &OdeSettings) -> Result<ScatteringAmplitudes> {
    let edges = stack.interfaces();
    let z_max = *edges.last().expect("at least one edge");
    ode_amplitudes(|z| stack.k2_at(z), (0.0, z_max), stack.k_outer, &edges, settings)
}
