use std::path::Path;

use ptslab::models::Arrangement;
use ptslab::quantities::{E_CHARGE, HBAR};
use ptslab::timeprop::{ExperimentDesign, Incidence, PacketExperiment, ScatterOutcome};
use ptslab::MediumParams;

pub struct PacketArgs {
    pub sigma_um: f64,
    pub energy_ev: f64,
    pub incidence: Incidence,
    pub dz_nm: f64,
    pub until: Until,
    pub snapshot: Option<std::path::PathBuf>,
}

/// When to stop the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Until {
    /// The automatic time: transmitted packet well past the medium.
    Cleared,
    /// The reflected packet has left the medium.
    Reflected,
    Picoseconds(f64),
}

pub fn design(args: &PacketArgs) -> ExperimentDesign {
    let energy = args.energy_ev * E_CHARGE;
    ExperimentDesign {
        sigma: args.sigma_um * 1e-6,
        energy,
        incidence: args.incidence,
        dz: args.dz_nm * 1e-9,
        dt: 0.02 * HBAR / energy,
    }
}

pub fn run(params: &MediumParams, args: &PacketArgs) -> ptslab::Result<(PacketExperiment, ScatterOutcome)> {
    if !(args.sigma_um > 0.0) || !(args.energy_ev > 0.0) || !(args.dz_nm > 0.0) {
        return Err(ptslab::Error::Placement(
            "--sigma-um, --energy-ev and --dz-nm must be positive".to_string(),
        ));
    }
    let experiment = PacketExperiment::design(params, &design(args))?;
    let experiment = match args.until {
        Until::Cleared => experiment,
        Until::Reflected => experiment.with_t_final(experiment.reflection_time(params)),
        Until::Picoseconds(ps) if ps > 0.0 => experiment.with_t_final(ps * 1e-12),
        Until::Picoseconds(ps) => return Err(ptslab::Error::Placement(format!("--until must be positive, got {ps}"))),
    };
    let outcome = experiment.run(params, Arrangement::GainFirst)?;
    Ok((experiment, outcome))
}

pub fn report(params: &MediumParams, experiment: &PacketExperiment, o: &ScatterOutcome) -> String {
    let side = match experiment.spec.incidence() {
        Incidence::Left => "left",
        Incidence::Right => "right",
    };
    let g = &experiment.grid;
    let mut lines = vec![
        format!(
            "packet from the {side}: sigma = {:.3} um, energy = {:.4} eV, Omega/delta = {:.4}",
            experiment.spec.sigma * 1e6,
            experiment.spec.energy(params) / E_CHARGE,
            experiment.spec.bandwidth_ratio(params)
        ),
        format!(
            "grid [{:.1}, {:.1}] um, {} points, dt = {:.3e} s, {} steps to t = {:.4e} s",
            g.z_min * 1e6,
            g.z_max * 1e6,
            g.n_points,
            g.dt,
            o.steps,
            o.final_state.t
        ),
        format!("transmitted {:.6}", o.transmitted_fraction),
        format!("reflected   {:.6}", o.reflected_fraction),
        format!("gained      {:.6}   (total norm {:.6})", o.gained_norm, o.total_norm()),
        format!(
            "stationary prediction: transmitted {:.6}, reflected {:.6}",
            o.prediction.transmitted, o.prediction.reflected
        ),
        format!(
            "relative deviation: transmitted {:.3e}, reflected {:.3e}",
            o.transmission_deviation(),
            o.reflection_deviation()
        ),
    ];
    if !o.is_settled() {
        lines.push(format!(
            "note: |psi| inside the medium is still {:.2e} of its maximum (growing mode of the gain region)",
            o.medium_peak_ratio
        ));
    }
    lines.join("\n")
}

pub fn write_snapshot(path: &Path, experiment: &PacketExperiment, o: &ScatterOutcome) -> std::io::Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    o.final_state.write_csv(&experiment.grid, file)
}
