//! One-dimensional Helmholtz scattering, `φ'' + k²(z) φ = 0`, for
//! piecewise-constant complex `k²` between two identical semi-infinite
//! propagating media.
//!
//! Inside every medium the field is written as
//! `A₊ e^{ik(z−z₀)} + A₋ e^{−ik(z−z₀)}` with `z₀` the left edge of that
//! medium (for the right exterior, the right edge of the stack). Transfer
//! matrices map `(A₊, A₋)` from the left exterior to the right exterior.

mod ode;

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use ode::{ode_amplitudes, ode_amplitudes_for_stack, OdeSettings};

/// Layers with `|k|·thickness` below this are propagated with the `{1, z}`
/// basis instead of plane waves.
pub const SMALL_PHASE: f64 = 1e-8;

/// Relative size of `m22` (against the largest entry) treated as zero.
pub const POLE_THRESHOLD: f64 = 1e-14;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A uniform slab of the scattering region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    /// Squared wavenumber, 1/m².
    pub k2: Complex64,
    /// Thickness, m.
    pub thickness: f64,
}

impl Layer {
    pub fn new(k2: Complex64, thickness: f64) -> Result<Layer> {
        if !(thickness >= 0.0) || !thickness.is_finite() {
            return Err(Error::Negative {
                quantity: "layer thickness",
                value: thickness,
            });
        }
        Ok(Layer { k2, thickness })
    }

    /// Principal square root of `k2`.
    pub fn k(&self) -> Complex64 {
        self.k2.sqrt()
    }
}

/// Layers ordered from left to right, embedded in a uniform medium with real
/// wavenumber `k_outer` on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub k_outer: f64,
    pub layers: Vec<Layer>,
}

impl LayerStack {
    pub fn new(k_outer: f64, layers: Vec<Layer>) -> Result<LayerStack> {
        if !(k_outer > 0.0) || !k_outer.is_finite() {
            return Err(Error::NonPositive {
                quantity: "outer wavenumber",
                value: k_outer,
            });
        }
        for layer in &layers {
            Layer::new(layer.k2, layer.thickness)?;
        }
        Ok(LayerStack { k_outer, layers })
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// The same structure seen from the other side.
    pub fn reversed(&self) -> LayerStack {
        LayerStack {
            k_outer: self.k_outer,
            layers: self.layers.iter().rev().copied().collect(),
        }
    }

    /// `k²` at position `z` measured from the left edge of the first layer.
    /// Layer edges belong to the layer on their right.
    pub fn k2_at(&self, z: f64) -> Complex64 {
        let outer = Complex64::new(self.k_outer * self.k_outer, 0.0);
        if z < 0.0 {
            return outer;
        }
        let mut edge = 0.0;
        for layer in &self.layers {
            edge += layer.thickness;
            if z < edge {
                return layer.k2;
            }
        }
        outer
    }

    /// Positions of the layer edges, measured from the left edge.
    pub fn interfaces(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.layers.len() + 1);
        let mut z = 0.0;
        out.push(z);
        for layer in &self.layers {
            z += layer.thickness;
            out.push(z);
        }
        out
    }
}

/// 2×2 complex transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        m11: ONE,
        m12: ZERO,
        m21: ZERO,
        m22: ONE,
    };

    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        TransferMatrix { m11, m12, m21, m22 }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn max_abs(&self) -> f64 {
        self.m11
            .norm()
            .max(self.m12.norm())
            .max(self.m21.norm())
            .max(self.m22.norm())
    }

    /// Largest entrywise distance to `other`.
    pub fn distance(&self, other: &TransferMatrix) -> f64 {
        (self.m11 - other.m11)
            .norm()
            .max((self.m12 - other.m12).norm())
            .max((self.m21 - other.m21).norm())
            .max((self.m22 - other.m22).norm())
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, r: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * r.m11 + self.m12 * r.m21,
            m12: self.m11 * r.m12 + self.m12 * r.m22,
            m21: self.m21 * r.m11 + self.m22 * r.m21,
            m22: self.m21 * r.m12 + self.m22 * r.m22,
        }
    }
}

/// Scattering amplitudes for unit incidence from the left and from the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub t_left: Complex64,
    pub r_left: Complex64,
    pub t_right: Complex64,
    pub r_right: Complex64,
}

impl ScatteringAmplitudes {
    pub const FREE: ScatteringAmplitudes = ScatteringAmplitudes {
        t_left: ONE,
        r_left: ZERO,
        t_right: ONE,
        r_right: ZERO,
    };

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.t_left, self.r_left, self.t_right, self.r_right]
    }

    /// Largest amplitude-wise relative difference, each entry measured
    /// against the larger of the two magnitudes.
    pub fn max_relative_difference(&self, other: &ScatteringAmplitudes) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| {
                let scale = a.norm().max(b.norm());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    /// Generalized-unitarity diagnostics for PT-symmetric scatterers.
    pub fn pt_relations(&self) -> PtRelations {
        let t = 0.5 * (self.t_left + self.t_right);
        let cross = self.r_left.conj() * self.r_right;
        let unitarity = t.norm_sqr() + cross - ONE;
        PtRelations {
            unitarity_residual: unitarity,
            cross_imag: cross.im,
            t_r_left_real: (t.conj() * self.r_left).re,
            t_r_right_real: (t.conj() * self.r_right).re,
        }
    }
}

/// Residuals of the relations obeyed by amplitudes of a PT-symmetric
/// scatterer between identical outer media. All vanish in exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtRelations {
    /// `|t|² + conj(r_left)·r_right − 1`.
    pub unitarity_residual: Complex64,
    /// `Im(conj(r_left)·r_right)`.
    pub cross_imag: f64,
    /// `Re(conj(t)·r_left)`.
    pub t_r_left_real: f64,
    /// `Re(conj(t)·r_right)`.
    pub t_r_right_real: f64,
}

impl PtRelations {
    /// Largest absolute residual.
    pub fn max_residual(&self) -> f64 {
        self.unitarity_residual
            .re
            .abs()
            .max(self.unitarity_residual.im.abs())
            .max(self.cross_imag.abs())
            .max(self.t_r_left_real.abs())
            .max(self.t_r_right_real.abs())
    }
}

/// Matrix carrying plane-wave coefficients across an interface from a medium
/// with wavenumber `k_from` into one with `k_to`, keeping `φ` and `φ'`
/// continuous. Its determinant is `k_from / k_to`.
pub fn interface_matrix(k_from: Complex64, k_to: Complex64) -> Result<TransferMatrix> {
    if k_to == ZERO {
        return Err(Error::SingularInterface);
    }
    let ratio = k_from / k_to;
    let plus = 0.5 * (ONE + ratio);
    let minus = 0.5 * (ONE - ratio);
    Ok(TransferMatrix::new(plus, minus, minus, plus))
}

/// Propagation across a uniform layer of thickness `d`, re-referencing the
/// coefficients from its left edge to its right edge.
pub fn propagation_matrix(k: Complex64, d: f64) -> Result<TransferMatrix> {
    if !(d >= 0.0) {
        return Err(Error::Negative {
            quantity: "layer thickness",
            value: d,
        });
    }
    let phase = I * k * d;
    Ok(TransferMatrix::new(phase.exp(), ZERO, ZERO, (-phase).exp()))
}

/// Maps `(A₊, A₋)` to `(φ, φ')` at the phase origin.
fn to_field(k: Complex64) -> TransferMatrix {
    TransferMatrix::new(ONE, ONE, I * k, -I * k)
}

/// Inverse of [`to_field`]; `k` must be nonzero.
fn from_field(k: Complex64) -> TransferMatrix {
    let inv = ONE / (I * k);
    TransferMatrix::new(0.5 * ONE, 0.5 * inv, 0.5 * ONE, -0.5 * inv)
}

/// `(φ, φ')` transfer across a layer with `|k|d ≪ 1`, exact to O((kd)²).
fn short_layer_field_matrix(k2: Complex64, d: f64) -> TransferMatrix {
    TransferMatrix::new(ONE, Complex64::new(d, 0.0), -k2 * d, ONE)
}

/// One elementary factor of a stack: its transfer matrix and the
/// determinant known from its construction.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Factor {
    matrix: TransferMatrix,
    det: Complex64,
}

impl Factor {
    fn interface(k_from: Complex64, k_to: Complex64) -> Result<Factor> {
        Ok(Factor {
            matrix: interface_matrix(k_from, k_to)?,
            det: k_from / k_to,
        })
    }

    fn propagation(k: Complex64, d: f64) -> Result<Factor> {
        Ok(Factor {
            matrix: propagation_matrix(k, d)?,
            det: ONE,
        })
    }

    /// Scattering amplitudes of this factor alone.
    fn amplitudes(&self) -> Result<ScatteringAmplitudes> {
        let m = &self.matrix;
        if m.m22 == ZERO || !m.m22.is_finite() {
            return Err(Error::ResonancePole);
        }
        Ok(ScatteringAmplitudes {
            t_left: self.det / m.m22,
            r_left: -m.m21 / m.m22,
            t_right: ONE / m.m22,
            r_right: m.m12 / m.m22,
        })
    }
}

/// Decomposes a stack into interface and propagation factors, left to
/// right. Runs of small-phase layers are merged with their two bounding
/// interfaces into one factor built in the `(φ, φ')` representation.
fn factors(stack: &LayerStack) -> Result<(Vec<Factor>, Vec<usize>)> {
    let k_outer = Complex64::new(stack.k_outer, 0.0);
    let mut out = Vec::with_capacity(2 * stack.layers.len() + 1);
    let mut small_phase_layers = Vec::new();
    let mut k_cur = k_outer;
    // Some(field matrix) while crossing small-phase layers
    let mut field: Option<TransferMatrix> = None;

    let enter = |field: &mut Option<TransferMatrix>, k_cur: Complex64, k: Complex64| -> Result<Factor> {
        Ok(match field.take() {
            Some(f) => {
                let matrix = from_field(k) * f * to_field(k_cur);
                Factor {
                    matrix,
                    det: (f.m11 * f.m22 - f.m12 * f.m21) * k_cur / k,
                }
            }
            None => Factor::interface(k_cur, k)?,
        })
    };

    for (idx, layer) in stack.layers.iter().enumerate() {
        let k = layer.k();
        if k.norm() * layer.thickness < SMALL_PHASE {
            small_phase_layers.push(idx);
            let f = field.unwrap_or(TransferMatrix::IDENTITY);
            field = Some(short_layer_field_matrix(layer.k2, layer.thickness) * f);
            continue;
        }
        out.push(enter(&mut field, k_cur, k)?);
        out.push(Factor::propagation(k, layer.thickness)?);
        k_cur = k;
    }
    out.push(enter(&mut field, k_cur, k_outer)?);
    Ok((out, small_phase_layers))
}

/// Total transfer matrix together with the indices of the layers that took
/// the small-phase path.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub matrix: TransferMatrix,
    pub small_phase_layers: Vec<usize>,
}

/// Ordered product of interface and propagation matrices from the left
/// exterior to the right exterior.
///
/// Layers with `|k|·d < SMALL_PHASE` (including `k = 0`) are crossed in the
/// `(φ, φ')` representation with the `{1, z}` basis, which removes the
/// singular interface into a zero-wavenumber medium.
pub fn total_transfer(stack: &LayerStack) -> Result<TransferReport> {
    let (factors, small_phase_layers) = factors(stack)?;
    let matrix = factors.iter().fold(TransferMatrix::IDENTITY, |acc, f| f.matrix * acc);
    Ok(TransferReport {
        matrix,
        small_phase_layers,
    })
}

/// Amplitudes read off a total transfer matrix between identical outer
/// media: `r_left = −m21/m22`, `t_left = det/m22`, `t_right = 1/m22`,
/// `r_right = m12/m22`.
///
/// `det` is formed from the entries, so the result is only accurate while
/// `|m|²·ε ≪ 1`; strongly amplifying or evanescent stacks need
/// [`amplitudes`].
pub fn amplitudes_from_transfer(m: &TransferMatrix) -> Result<ScatteringAmplitudes> {
    if !(m.m22.norm() > POLE_THRESHOLD * m.max_abs()) {
        return Err(Error::ResonancePole);
    }
    Ok(ScatteringAmplitudes {
        t_left: m.det() / m.m22,
        r_left: -m.m21 / m.m22,
        t_right: ONE / m.m22,
        r_right: m.m12 / m.m22,
    })
}

/// Joins the amplitudes of a left part `a` and a right part `b`
/// (Redheffer star product).
pub fn compose(a: &ScatteringAmplitudes, b: &ScatteringAmplitudes) -> Result<ScatteringAmplitudes> {
    let denom = ONE - a.r_right * b.r_left;
    if !(denom.norm() > POLE_THRESHOLD) {
        return Err(Error::ResonancePole);
    }
    let out = ScatteringAmplitudes {
        t_left: b.t_left * a.t_left / denom,
        r_left: a.r_left + a.t_right * b.r_left * a.t_left / denom,
        t_right: a.t_right * b.t_right / denom,
        r_right: b.r_right + b.t_left * a.r_right * b.t_right / denom,
    };
    if out.as_array().iter().all(|z| z.is_finite()) {
        Ok(out)
    } else {
        Err(Error::ResonancePole)
    }
}

/// Transmission and reflection amplitudes for both incidence directions.
///
/// Left incidence: `e^{ikz} + r_left e^{−ikz}` on the left and
/// `t_left e^{ikz}` on the right; right incidence is the mirror image. Phases
/// refer to the outer edges of the stack.
///
/// The factors of [`total_transfer`] are joined as scattering matrices, so
/// the result stays accurate when the transfer matrix entries are huge
/// (long gain or evanescent sections). The two routes agree whenever
/// [`amplitudes_from_transfer`] is well conditioned.
pub fn amplitudes(stack: &LayerStack) -> Result<ScatteringAmplitudes> {
    let (factors, _) = factors(stack)?;
    factors
        .iter()
        .try_fold(ScatteringAmplitudes::FREE, |acc, f| compose(&acc, &f.amplitudes()?))
}

/// `(|t_left|² + |r_left|², |t_right|² + |r_right|²)`.
pub fn flux_sums(amp: &ScatteringAmplitudes) -> (f64, f64) {
    (
        amp.t_left.norm_sqr() + amp.r_left.norm_sqr(),
        amp.t_right.norm_sqr() + amp.r_right.norm_sqr(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_stack(rng: &mut ChaCha8Rng, k_outer: f64) -> LayerStack {
        let n = rng.gen_range(1..=5);
        let layers = (0..n)
            .map(|_| {
                let k2 = c(
                    rng.gen_range(-2.0..2.0) * k_outer * k_outer,
                    rng.gen_range(-1.0..1.0) * k_outer * k_outer,
                );
                Layer::new(k2, rng.gen_range(0.1..3.0) / k_outer).unwrap()
            })
            .collect();
        LayerStack::new(k_outer, layers).unwrap()
    }

    #[test]
    fn interface_identity_and_inverse() {
        let k = c(3.0, 0.5);
        assert_eq!(interface_matrix(k, k).unwrap(), TransferMatrix::IDENTITY);
        let a = c(1.3, -0.2);
        let b = c(-0.7, 2.1);
        let round = interface_matrix(b, a).unwrap() * interface_matrix(a, b).unwrap();
        assert!(round.distance(&TransferMatrix::IDENTITY) < 1e-14);
        assert!(matches!(interface_matrix(a, ZERO), Err(Error::SingularInterface)));
    }

    #[test]
    fn propagation_basics() {
        let k = c(2.0e6, 3.0e5);
        assert_eq!(propagation_matrix(k, 0.0).unwrap(), TransferMatrix::IDENTITY);
        assert!(propagation_matrix(k, -1.0).is_err());
        let sum = propagation_matrix(k, 1e-6).unwrap() * propagation_matrix(k, 2.5e-6).unwrap();
        let direct = propagation_matrix(k, 3.5e-6).unwrap();
        assert!(sum.distance(&direct) <= 1e-12 * direct.max_abs());
    }

    #[test]
    fn absorbing_layer_decay_factor() {
        // k² = 2.054e12 i m⁻², d = 19.7 µm: Im k · d ≈ 19.96
        let k = c(0.0, 2.054e12).sqrt();
        let p = propagation_matrix(k, 19.7e-6).unwrap();
        let decaying = p.m11.norm();
        let expected = (-19.96f64).exp();
        assert!((decaying - expected).abs() / expected < 0.02);
        assert!((p.m22.norm() * decaying - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_stack_is_free() {
        let stack = LayerStack::new(1e7, vec![]).unwrap();
        let report = total_transfer(&stack).unwrap();
        assert_eq!(report.matrix, TransferMatrix::IDENTITY);
        assert_eq!(amplitudes(&stack).unwrap(), ScatteringAmplitudes::FREE);
        assert_eq!(flux_sums(&ScatteringAmplitudes::FREE), (1.0, 1.0));
    }

    #[test]
    fn stack_rejects_bad_inputs() {
        assert!(LayerStack::new(0.0, vec![]).is_err());
        assert!(LayerStack::new(-1.0, vec![]).is_err());
        assert!(Layer::new(c(1.0, 0.0), -1e-9).is_err());
    }

    #[test]
    fn single_layer_matches_direct_matching() {
        // Solve the four continuity equations at z = 0 and z = d directly.
        let k0 = 1.0e7;
        let k2 = c(-3.0e13, 2.0e13);
        let d = 2.3e-7;
        let stack = LayerStack::new(k0, vec![Layer::new(k2, d).unwrap()]).unwrap();
        let amp = amplitudes(&stack).unwrap();

        // Unknowns r, a, b, t with φ = e^{ik0 z} + r e^{-ik0 z} (z<0),
        // a e^{ikz} + b e^{-ikz} (0<z<d), t e^{ik0 (z-d)} (z>d).
        let k = k2.sqrt();
        let k0c = c(k0, 0.0);
        let e = (I * k * d).exp();
        let rows = [
            [ONE, -ONE, -ONE, ZERO, -ONE],
            [-I * k0c, -I * k, I * k, ZERO, -I * k0c],
            [ZERO, e, ONE / e, -ONE, ZERO],
            [ZERO, I * k * e, -I * k / e, -I * k0c, ZERO],
        ];
        let sol = gauss_solve(rows);
        assert!((sol[0] - amp.r_left).norm() < 1e-12);
        assert!((sol[3] - amp.t_left).norm() < 1e-12);
    }

    fn gauss_solve(mut a: [[Complex64; 5]; 4]) -> [Complex64; 4] {
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
                .unwrap();
            a.swap(col, piv);
            for row in 0..4 {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    for k in col..5 {
                        let v = a[col][k];
                        a[row][k] -= f * v;
                    }
                }
            }
        }
        std::array::from_fn(|i| a[i][4] / a[i][i])
    }

    #[test]
    fn rectangular_barrier_closed_form() {
        let k0 = 1e7;
        let kappa2 = 1e13;
        let d = 1e-7;
        let stack = LayerStack::new(k0, vec![Layer::new(c(-kappa2, 0.0), d).unwrap()]).unwrap();
        let amp = amplitudes(&stack).unwrap();
        let kappa = kappa2.sqrt();
        let denom = c(
            (kappa * d).cosh(),
            (kappa2 - k0 * k0) / (2.0 * k0 * kappa) * (kappa * d).sinh(),
        );
        let expected = 1.0 / denom.norm_sqr();
        assert!((amp.t_left.norm_sqr() - expected).abs() < 1e-10);
        let (sl, sr) = flux_sums(&amp);
        assert!((sl - 1.0).abs() < 1e-10 && (sr - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pt_pair_satisfies_generalized_unitarity() {
        let k0 = 3.0e6;
        let k2 = c(1.5e12, 2.0e12);
        let stack = LayerStack::new(
            k0,
            vec![
                Layer::new(k2.conj(), 19.7e-6).unwrap(),
                Layer::new(k2, 19.7e-6).unwrap(),
            ],
        )
        .unwrap();
        let rel = amplitudes(&stack).unwrap().pt_relations();
        assert!(rel.max_residual() < 1e-8, "{rel:?}");
    }

    #[test]
    fn zero_wavenumber_layer_uses_linear_basis() {
        let k0 = 1e7;
        let stack = LayerStack::new(
            k0,
            vec![
                Layer::new(c(2e14, 0.0), 1e-7).unwrap(),
                Layer::new(ZERO, 3e-7).unwrap(),
                Layer::new(ZERO, 1e-7).unwrap(),
                Layer::new(c(5e13, 1e13), 2e-7).unwrap(),
            ],
        )
        .unwrap();
        let report = total_transfer(&stack).unwrap();
        assert_eq!(report.small_phase_layers, vec![1, 2]);
        // tiny but nonzero k in the same place must give the same answer
        let nudged = LayerStack::new(
            k0,
            vec![
                stack.layers[0],
                Layer::new(c(1e4, 0.0), 3e-7).unwrap(),
                Layer::new(c(0.0, 1e4), 1e-7).unwrap(),
                stack.layers[3],
            ],
        )
        .unwrap();
        let a = amplitudes(&stack).unwrap();
        let b = amplitudes(&nudged).unwrap();
        assert!(a.max_relative_difference(&b) < 1e-9);
        let oracle = ode_amplitudes_for_stack(&stack, &OdeSettings::default()).unwrap();
        assert!(a.max_relative_difference(&oracle) < 1e-6);
        assert!((report.matrix.det() - ONE).norm() < 1e-9 * det_scale(&report.matrix));
    }

    #[test]
    fn transfer_route_agrees_when_well_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let stack = random_stack(&mut rng, 2e6);
            let m = total_transfer(&stack).unwrap().matrix;
            if det_scale(&m) > 1e4 {
                continue;
            }
            let a = amplitudes(&stack).unwrap();
            let b = amplitudes_from_transfer(&m).unwrap();
            assert!(a.max_relative_difference(&b) < 1e-9, "{a:?} {b:?}");
        }
    }

    #[test]
    fn resonance_pole_is_an_error() {
        let m = TransferMatrix::new(ONE, ONE, ONE, ZERO);
        assert!(matches!(amplitudes_from_transfer(&m), Err(Error::ResonancePole)));
    }

    #[test]
    fn reversal_exchanges_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let stack = random_stack(&mut rng, 2e6);
            let fwd = amplitudes(&stack).unwrap();
            let rev = amplitudes(&stack.reversed()).unwrap();
            assert!((fwd.r_left - rev.r_right).norm() <= 1e-9 * fwd.r_left.norm().max(1.0));
            assert!((fwd.r_right - rev.r_left).norm() <= 1e-9 * fwd.r_right.norm().max(1.0));
            assert!((fwd.t_left - rev.t_left).norm() <= 1e-9 * fwd.t_left.norm());
            let mf = total_transfer(&stack).unwrap().matrix;
            let mr = total_transfer(&stack.reversed()).unwrap().matrix;
            // M_rev = S M⁻¹ S with S the exchange matrix, for unimodular M
            assert!((mr.m11 - mf.m11).norm() <= 1e-9 * mf.max_abs());
            assert!((mr.m12 + mf.m21).norm() <= 1e-9 * mf.max_abs());
            assert!((mr.m21 + mf.m12).norm() <= 1e-9 * mf.max_abs());
        }
    }

    /// Magnitude of the terms cancelling in `det`; sets the attainable
    /// precision of the determinant formed from entries.
    fn det_scale(m: &TransferMatrix) -> f64 {
        ((m.m11 * m.m22).norm() + (m.m12 * m.m21).norm()).max(1.0)
    }

    fn arb_complex() -> impl Strategy<Value = Complex64> {
        (-10.0f64..10.0, -10.0f64..10.0)
            .prop_filter("nonzero", |(a, b)| a.hypot(*b) > 1e-3)
            .prop_map(|(a, b)| c(a, b))
    }

    fn arb_stack() -> impl Strategy<Value = LayerStack> {
        let k0 = 2.0e6;
        let layer = (-2.0f64..2.0, -1.0f64..1.0, 0.1f64..3.0)
            .prop_map(move |(re, im, d)| Layer::new(c(re * k0 * k0, im * k0 * k0), d / k0).unwrap());
        prop::collection::vec(layer, 1..=5).prop_map(move |layers| LayerStack::new(k0, layers).unwrap())
    }

    proptest! {
        #[test]
        fn interface_determinant(a in arb_complex(), b in arb_complex()) {
            let m = interface_matrix(a, b).unwrap();
            prop_assert!((m.det() - a / b).norm() <= 1e-12 * (a / b).norm());
        }

        #[test]
        fn unimodular_total_transfer(stack in arb_stack()) {
            let m = total_transfer(&stack).unwrap().matrix;
            prop_assert!((m.det() - ONE).norm() <= 1e-9 * det_scale(&m));
        }

        #[test]
        fn reciprocity(stack in arb_stack()) {
            let a = amplitudes(&stack).unwrap();
            prop_assert!((a.t_left - a.t_right).norm() <= 1e-10 * a.t_left.norm());
        }

        #[test]
        fn branch_independence(stack in arb_stack(), flip in prop::collection::vec(any::<bool>(), 5)) {
            // same physics with k → −k in selected layers
            let a = amplitudes(&stack).unwrap();
            let k_outer = Complex64::new(stack.k_outer, 0.0);
            let mut fs = Vec::new();
            let mut k_cur = k_outer;
            for (layer, f) in stack.layers.iter().zip(&flip) {
                let k = if *f { -layer.k() } else { layer.k() };
                fs.push(Factor::interface(k_cur, k).unwrap());
                fs.push(Factor::propagation(k, layer.thickness).unwrap());
                k_cur = k;
            }
            fs.push(Factor::interface(k_cur, k_outer).unwrap());
            let b = fs
                .iter()
                .try_fold(ScatteringAmplitudes::FREE, |acc, f| compose(&acc, &f.amplitudes()?))
                .unwrap();
            let worst = a
                .as_array()
                .iter()
                .zip(b.as_array())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            prop_assert!(worst <= 1e-12, "{}", worst);
        }

        #[test]
        fn real_potentials_conserve_flux(
            k2s in prop::collection::vec((-3.0f64..3.0, 0.1f64..3.0), 1..=6)
        ) {
            let k0 = 1.0e6;
            let layers = k2s.iter().map(|(k2, d)| Layer::new(c(k2 * k0 * k0, 0.0), d / k0).unwrap()).collect();
            let stack = LayerStack::new(k0, layers).unwrap();
            let (sl, sr) = flux_sums(&amplitudes(&stack).unwrap());
            prop_assert!((sl - 1.0).abs() <= 1e-10 && (sr - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn pt_symmetric_stacks(
            half in prop::collection::vec((-2.0f64..2.0, -1.0f64..1.0, 0.1f64..3.0), 1..=3)
        ) {
            let k0 = 1.0e6;
            let right: Vec<Layer> = half
                .iter()
                .map(|(re, im, d)| Layer::new(c(re * k0 * k0, im * k0 * k0), d / k0).unwrap())
                .collect();
            let mut layers: Vec<Layer> = right
                .iter()
                .rev()
                .map(|l| Layer::new(l.k2.conj(), l.thickness).unwrap())
                .collect();
            layers.extend(right);
            let stack = LayerStack::new(k0, layers).unwrap();
            let amp = amplitudes(&stack).unwrap();
            let rel = amp.pt_relations();
            prop_assert!(rel.max_residual() <= 1e-8, "{:?}", rel);
        }
    }
}
