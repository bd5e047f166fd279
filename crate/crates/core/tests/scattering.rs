use num_complex::Complex64;
use proptest::prelude::*;
use ptslab::helmholtz::{self, OdeSettings};
use ptslab::models::{self, ModelKind};
use ptslab::{flux_sums, Layer, LayerStack, MediumParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_stack(rng: &mut ChaCha8Rng) -> LayerStack {
    let k = rng.gen_range(0.5..5.0);
    let layers = (0..rng.gen_range(1..=6))
        .map(|_| {
            let k2 = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)) * k * k;
            Layer::new(k2, rng.gen_range(0.1..3.0) / k).unwrap()
        })
        .collect();
    LayerStack::new(k, layers).unwrap()
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

#[test]
fn transfer_matrices_agree_with_direct_integration_on_random_stacks() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..100 {
        let stack = random_stack(&mut rng);
        let tm = helmholtz::amplitudes(&stack).unwrap();
        let ode = helmholtz::ode_amplitudes_for_stack(&stack, &OdeSettings::default()).unwrap();
        let diff = tm.max_relative_difference(&ode);
        assert!(diff <= 1e-6, "stack {i}: {diff:e}");
        assert!(relative(tm.t_left, tm.t_right) <= 1e-10, "stack {i}");
    }
}

#[test]
fn transfer_matrices_agree_with_direct_integration_on_the_reference_stack() {
    let params = MediumParams::reference();
    for x in models::sweep_grid(1.0005, 1.10, 20).unwrap() {
        let stack = models::build_exact_stack(&params, x * params.omega_c).unwrap();
        let tm = helmholtz::amplitudes(&stack).unwrap();
        let ode = helmholtz::ode_amplitudes_for_stack(&stack, &OdeSettings::default()).unwrap();
        let diff = tm.max_relative_difference(&ode);
        assert!(diff <= 1e-6, "ω/ωc = {x}: {diff:e}");
    }
}

#[test]
fn sweep_does_not_depend_on_parallelism() {
    let params = MediumParams::reference();
    let parallel = models::sweep(&params, 1.0005, 1.10, 64, &ModelKind::ALL).unwrap();
    let serial = models::sweep_serial(&params, 1.0005, 1.10, 64, &ModelKind::ALL).unwrap();
    assert_eq!(parallel, serial);
}

#[test]
fn reference_sweep_is_reciprocal() {
    let params = MediumParams::reference();
    for row in models::sweep(&params, 1.0005, 1.10, 400, &ModelKind::ALL).unwrap() {
        for model in ModelKind::ALL {
            let a = row.get(model).unwrap().amplitudes().unwrap();
            assert!(
                relative(a.t_left, a.t_right) <= 1e-10,
                "{} at {}",
                model.label(),
                row.omega_over_omegac
            );
        }
    }
}

fn layer_strategy(k: f64, real: bool) -> impl Strategy<Value = Layer> {
    let im = if real { 0.0..=0.0 } else { -1.0..=1.0 };
    (-2.0..2.0f64, im, 0.1..3.0f64)
        .prop_map(move |(re, im, d)| Layer::new(Complex64::new(re, im) * k * k, d / k).unwrap())
}

fn stack_strategy(real: bool) -> impl Strategy<Value = LayerStack> {
    (0.5..5.0f64).prop_flat_map(move |k| {
        prop::collection::vec(layer_strategy(k, real), 1..6).prop_map(move |layers| LayerStack::new(k, layers).unwrap())
    })
}

/// Layers followed by their mirror image with conjugated `k²`.
fn pt_stack_strategy() -> impl Strategy<Value = LayerStack> {
    stack_strategy(false).prop_map(|half| {
        let mut layers = half.layers.clone();
        for layer in half.layers.iter().rev() {
            layers.push(Layer::new(layer.k2.conj(), layer.thickness).unwrap());
        }
        LayerStack::new(half.k_outer, layers).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transmission_is_reciprocal(stack in stack_strategy(false)) {
        let a = helmholtz::amplitudes(&stack).unwrap();
        prop_assert!(relative(a.t_left, a.t_right) <= 1e-10);
    }

    #[test]
    fn real_profiles_conserve_flux(stack in stack_strategy(true)) {
        let (l, r) = flux_sums(&helmholtz::amplitudes(&stack).unwrap());
        prop_assert!((l - 1.0).abs() <= 1e-10 && (r - 1.0).abs() <= 1e-10, "{l} {r}");
    }

    #[test]
    fn pt_symmetric_profiles_obey_generalized_unitarity(stack in pt_stack_strategy()) {
        let a = helmholtz::amplitudes(&stack).unwrap();
        prop_assert!(a.pt_relations().max_residual() <= 1e-8);
    }

    #[test]
    fn reversing_the_stack_swaps_the_sides(stack in stack_strategy(false)) {
        let a = helmholtz::amplitudes(&stack).unwrap();
        let b = helmholtz::amplitudes(&stack.reversed()).unwrap();
        prop_assert!(relative(a.r_left, b.r_right) <= 1e-9);
        prop_assert!(relative(a.r_right, b.r_left) <= 1e-9);
        prop_assert!(relative(a.t_left, b.t_right) <= 1e-9);
    }
}
