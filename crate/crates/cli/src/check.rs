//! `--check`: property suites on the configured sweep.

use ptslab::models::{self, ModelKind};
use ptslab::{MediumParams, SweepRow};

pub const RECIPROCITY_TOL: f64 = 1e-10;
pub const PASSIVE_UNITARITY_TOL: f64 = 1e-10;
pub const PT_TOL: f64 = 1e-8;
pub const ASYMMETRY_WINDOW: (f64, f64) = (1.0005, 1.019);

pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome { name, passed, detail }
}

pub fn run(params: &MediumParams, rows: &[SweepRow], models: &[ModelKind]) -> anyhow::Result<Vec<Outcome>> {
    let regular = || {
        rows.iter().flat_map(move |row| {
            models
                .iter()
                .filter_map(move |&m| row.get(m).and_then(|r| r.amplitudes()).map(|a| (row, m, a)))
        })
    };

    let worst_reciprocity = regular()
        .map(|(_, _, a)| (a.t_left - a.t_right).norm() / a.t_left.norm().max(a.t_right.norm()))
        .fold(0.0, f64::max);

    let (start, stop, n) = (
        rows.first().map_or(1.0005, |r| r.omega_over_omegac),
        rows.last().map_or(1.10, |r| r.omega_over_omegac),
        rows.len().max(2),
    );
    let passive = models::sweep(&params.with_omega_p(0.0), start, stop, n, models)?;
    let worst_passive = passive
        .iter()
        .flat_map(|row| models.iter().filter_map(move |&m| row.get(m).and_then(|r| r.sums())))
        .map(|(l, r)| (l - 1.0).abs().max((r - 1.0).abs()))
        .fold(0.0, f64::max);

    let worst_pt = regular()
        .filter(|(_, m, _)| *m == ModelKind::Approximate)
        .map(|(_, _, a)| a.pt_relations().max_residual())
        .fold(0.0, f64::max);

    let (lo, hi) = ASYMMETRY_WINDOW;
    let mut asymmetry_checked = 0usize;
    let mut asymmetry_violations = Vec::new();
    for (row, model, a) in regular() {
        let x = row.omega_over_omegac;
        if x < lo || x > hi {
            continue;
        }
        asymmetry_checked += 1;
        let (sl, sr) = ptslab::flux_sums(a);
        if !(sl > 1.0 && sr < 1.0) {
            asymmetry_violations.push(format!("{} at {x:.6}", model.label()));
        }
    }

    let mut out = vec![
        outcome(
            "reciprocity",
            worst_reciprocity <= RECIPROCITY_TOL,
            format!("max |t_left - t_right|/|t| = {worst_reciprocity:.3e} (tol {RECIPROCITY_TOL:e})"),
        ),
        outcome(
            "unitarity without gain/loss",
            worst_passive <= PASSIVE_UNITARITY_TOL,
            format!("max |s - 1| with omega_p = 0: {worst_passive:.3e} (tol {PASSIVE_UNITARITY_TOL:e})"),
        ),
    ];
    if models.contains(&ModelKind::Approximate) {
        out.push(outcome(
            "PT generalized unitarity",
            worst_pt <= PT_TOL,
            format!("max residual {worst_pt:.3e} over approx rows (tol {PT_TOL:e})"),
        ));
    }
    out.push(outcome(
        "low-energy asymmetry",
        asymmetry_violations.is_empty(),
        if asymmetry_violations.is_empty() {
            format!("s_left > 1 > s_right at {asymmetry_checked} rows in [{lo}, {hi}]")
        } else {
            format!("violated at {}", asymmetry_violations.join(", "))
        },
    ));
    Ok(out)
}
