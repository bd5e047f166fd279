use num_complex::Complex64;
use proptest::prelude::*;
use ptslab::models::Arrangement;
use ptslab::quantities::{E_CHARGE, HBAR};
use ptslab::timeprop::{
    self, CrankNicolson, ExperimentDesign, Incidence, PacketExperiment, SpatialGrid, WavepacketSpec,
};
use ptslab::{medium, MediumParams};

fn design(sigma: f64, energy_ev: f64, incidence: Incidence, dz: f64) -> ExperimentDesign {
    let energy = energy_ev * E_CHARGE;
    ExperimentDesign {
        sigma,
        energy,
        incidence,
        dz,
        dt: 0.02 * HBAR / energy,
    }
}

/// The reference medium shortened to 2l = 10 µm, which keeps grids and run
/// times small.
fn short_medium() -> MediumParams {
    MediumParams {
        region_length: 5e-6,
        ..MediumParams::reference()
    }
}

#[test]
fn switched_off_medium_transmits_everything() {
    let params = MediumParams::reference().with_omega_p(0.0);
    let exp = PacketExperiment::design(&params, &ExperimentDesign::standard()).unwrap();
    let out = exp.run(&params, Arrangement::GainFirst).unwrap();
    assert!(
        (out.transmitted_fraction - 1.0).abs() <= 1e-6,
        "{}",
        out.transmitted_fraction
    );
    assert!(out.reflected_fraction.abs() <= 1e-6);
    assert!(out.gained_norm.abs() <= 1e-6);
}

#[test]
fn region_met_first_decides_the_norm() {
    let params = MediumParams::reference();
    let total = |incidence| {
        let exp = PacketExperiment::design(&params, &design(3.2e-6, 0.05, incidence, 20e-9)).unwrap();
        let exp = exp.with_t_final(exp.reflection_time(&params));
        exp.run(&params, Arrangement::GainFirst).unwrap().total_norm()
    };
    let left = total(Incidence::Left);
    let right = total(Incidence::Right);
    assert!(left > 1.0 && right < 1.0, "left {left}, right {right}");
}

#[test]
fn mirrored_arrangement_mirrors_the_outcome() {
    let params = short_medium();
    let run = |incidence, arrangement| {
        let exp = PacketExperiment::design(&params, &design(1.6e-6, 0.2, incidence, 20e-9)).unwrap();
        let exp = exp.with_t_final(exp.reflection_time(&params));
        exp.run(&params, arrangement).unwrap()
    };
    let a = run(Incidence::Right, Arrangement::GainFirst);
    let b = run(Incidence::Left, Arrangement::AbsorberFirst);
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs());
    assert!(rel(a.transmitted_fraction, b.transmitted_fraction) <= 1e-8);
    assert!(rel(a.reflected_fraction, b.reflected_fraction) <= 1e-8);
    assert!(rel(a.total_norm(), b.total_norm()) <= 1e-8);
}

#[test]
fn transmitted_fraction_converges_at_second_order_in_dz() {
    let params = short_medium();
    let transmitted = |dz| {
        let exp = PacketExperiment::design(&params, &design(1.6e-6, 0.2, Incidence::Left, dz)).unwrap();
        exp.run(&params, Arrangement::GainFirst).unwrap().transmitted_fraction
    };
    let t40 = transmitted(40e-9);
    let t20 = transmitted(20e-9);
    let t10 = transmitted(10e-9);
    let coarse = (t20 - t40).abs();
    let fine = (t10 - t20).abs();
    let ratio = coarse / fine;
    assert!((2.5..=6.0).contains(&ratio), "T = {t40}, {t20}, {t10}; ratio {ratio}");
}

#[test]
fn short_medium_matches_stationary_transmission() {
    let params = short_medium();
    let exp = PacketExperiment::design(&params, &design(1.6e-6, 0.2, Incidence::Left, 20e-9)).unwrap();
    let out = exp.run(&params, Arrangement::GainFirst).unwrap();
    assert!(
        out.transmission_deviation() <= 1e-4,
        "{:e}",
        out.transmission_deviation()
    );
}

#[test]
fn oversized_packet_is_rejected() {
    let params = MediumParams::reference();
    let grid = SpatialGrid::with_default_dt(-60e-6, 60e-6, 6001, medium::effective_mass(&params)).unwrap();
    let spec = WavepacketSpec::new(-30e-6, 3e-6, 1e7).unwrap();
    assert!(matches!(
        timeprop::initial_gaussian(&spec, &grid, &params),
        Err(ptslab::Error::Placement(_))
    ));
}

fn small_grid() -> SpatialGrid {
    SpatialGrid::new(-1e-6, 1e-6, 201, 1e-16).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_potentials_conserve_norm(
        values in prop::collection::vec(-0.5f64..0.5, 201),
        k in -3e7f64..3e7,
    ) {
        let params = MediumParams::reference();
        let grid = small_grid();
        let potential: Vec<Complex64> = values.iter().map(|v| Complex64::new(v * E_CHARGE, 0.0)).collect();
        let spec = WavepacketSpec::new(0.0, 0.15e-6, if k == 0.0 { 1.0 } else { k }).unwrap();
        let start = timeprop::gaussian_on_grid(&spec, &grid);
        let prop = CrankNicolson::new(&potential, medium::effective_mass(&params), &grid).unwrap();
        let end = timeprop::trajectory(&start, &prop, 50, 50).pop().unwrap();
        prop_assert!((end.norm(&grid) - start.norm(&grid)).abs() <= 1e-12);
    }

    #[test]
    fn pure_gain_never_loses_and_pure_loss_never_gains(
        im in 1e-4f64..5e-3,
        sign in prop::bool::ANY,
    ) {
        let params = MediumParams::reference();
        let grid = small_grid();
        let v = Complex64::new(0.0, if sign { im } else { -im } * E_CHARGE);
        let potential = vec![v; grid.n_points];
        let spec = WavepacketSpec::new(0.0, 0.15e-6, 1e7).unwrap();
        let start = timeprop::gaussian_on_grid(&spec, &grid);
        let prop = CrankNicolson::new(&potential, medium::effective_mass(&params), &grid).unwrap();
        let norms: Vec<f64> = timeprop::trajectory(&start, &prop, 20, 1).iter().map(|s| s.norm(&grid)).collect();
        for w in norms.windows(2) {
            if sign {
                prop_assert!(w[1] > w[0]);
            } else {
                prop_assert!(w[1] < w[0]);
            }
        }
    }
}
