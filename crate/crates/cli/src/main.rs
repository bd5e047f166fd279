//! `ptslab`: frequency sweeps and wavepacket runs for the gain/absorber
//! waveguide.
//!
//! Exit status: 0 success, 1 a `--check` property failed, 2 bad input
//! (configuration, CSV, packet placement), 3 I/O failure.

mod check;
mod csv;
mod manifest;
mod packet;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ptslab::models::{self, ModelKind};
use ptslab::timeprop::Incidence;
use ptslab::{Config, MediumParams, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Models {
    Exact,
    Approx,
    Both,
}

impl Models {
    fn kinds(self) -> &'static [ModelKind] {
        match self {
            Models::Exact => &[ModelKind::Exact],
            Models::Approx => &[ModelKind::Approximate],
            Models::Both => &ModelKind::ALL,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Models::Exact => "exact",
            Models::Approx => "approx",
            Models::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SweepSpec {
    start: f64,
    stop: f64,
    points: usize,
}

fn parse_sweep(s: &str) -> Result<SweepSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, points] = parts[..] else {
        return Err(format!("expected START:STOP:N, got `{s}`"));
    };
    Ok(SweepSpec {
        start: start.parse().map_err(|_| format!("bad START `{start}`"))?,
        stop: stop.parse().map_err(|_| format!("bad STOP `{stop}`"))?,
        points: points.parse().map_err(|_| format!("bad N `{points}`"))?,
    })
}

/// Scattering off contiguous gain and absorbing regions in a slab waveguide.
#[derive(Debug, Parser)]
#[command(name = "ptslab", version)]
struct Cli {
    /// Configuration file (`key = value` lines); defaults apply without it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Models to evaluate in a sweep.
    #[arg(long, value_enum, default_value_t = Models::Both)]
    models: Models,

    /// Sweep range in ω/ωc and number of points.
    #[arg(long, value_name = "START:STOP:N", value_parser = parse_sweep)]
    sweep: Option<SweepSpec>,

    /// CSV output path (overrides `output_path`).
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    plot: bool,

    /// Write a gnuplot script for an existing sweep CSV and exit.
    #[arg(long, value_name = "CSV", conflicts_with_all = ["packet", "check", "plot"])]
    plot_csv: Option<PathBuf>,

    /// Run the property suites on the sweep; exit 1 if any fails.
    #[arg(long)]
    check: bool,

    /// Switch the medium off (ωp = 0) after loading the configuration.
    #[arg(long)]
    passive: bool,

    /// Scatter a wavepacket instead of running a sweep.
    #[arg(long, conflicts_with_all = ["check", "plot", "sweep"])]
    packet: bool,

    /// Packet width σ in µm.
    #[arg(long, default_value_t = 3.2, requires = "packet")]
    sigma_um: f64,

    /// Packet carrier energy ħ²k̄²/2m in eV.
    #[arg(long, default_value_t = 0.2, requires = "packet")]
    energy_ev: f64,

    /// Side the packet comes from.
    #[arg(long, value_enum, default_value_t = Side::Left, requires = "packet")]
    from: Side,

    /// Grid spacing in nm.
    #[arg(long, default_value_t = 20.0, requires = "packet")]
    dz_nm: f64,

    /// Stop time in ps instead of the automatic one; `reflected` stops once
    /// the reflected packet has left the medium.
    #[arg(long, value_name = "PS|reflected", requires = "packet")]
    until: Option<String>,

    /// Write the final field as CSV (z, Re ψ, Im ψ, |ψ|²).
    #[arg(long, value_name = "PATH", requires = "packet")]
    snapshot: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Io(String),
    Check,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check => 1,
            Failure::Input(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            Config::parse(&text).map_err(|e| input(format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    for item in &cli.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| input(format!("--set expects KEY=VALUE, got `{item}`")))?;
        cfg.set(key.trim(), value.trim()).map_err(input)?;
    }
    if let Some(s) = cli.sweep {
        cfg.sweep_start = s.start;
        cfg.sweep_stop = s.stop;
        cfg.sweep_points = s.points;
    }
    if let Some(out) = &cli.output {
        cfg.output_path = out.to_string_lossy().into_owned();
    }
    cfg.validate().map_err(input)?;
    Ok(cfg)
}

fn medium(cli: &Cli, cfg: &Config) -> Result<MediumParams, Failure> {
    let params = MediumParams::from_config(cfg).map_err(input)?;
    Ok(if cli.passive { params.with_omega_p(0.0) } else { params })
}

fn plot_csv(csv_path: &Path) -> Result<PathBuf, Failure> {
    let text = std::fs::read_to_string(csv_path).map_err(|e| io_error(csv_path, e))?;
    let records = csv::parse(&text).map_err(|e| input(format!("{}: {e:#}", csv_path.display())))?;
    let name = csv_path
        .file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let script_path = csv_path.with_extension("gp");
    write_file(&script_path, &plot::script(&records, &name))?;
    Ok(script_path)
}

fn max_exact_pt_defect(params: &MediumParams, rows: &[SweepRow]) -> Option<f64> {
    rows.iter()
        .filter_map(|r| models::pt_defect(ModelKind::Exact, params, r.omega_over_omegac * params.omega_c).ok())
        .reduce(f64::max)
}

fn cmd_sweep(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let params = medium(cli, &cfg)?;
    if params.regime_warning() {
        let (a, b) = params.regime_ratios();
        eprintln!("warning: outside the near-cutoff regime (ωp²/δ² = {a:.3e}, ωp²/(δωc) = {b:.3e})");
    }
    let kinds = cli.models.kinds();
    let rows = models::sweep(&params, cfg.sweep_start, cfg.sweep_stop, cfg.sweep_points, kinds).map_err(input)?;
    let singular_rows: usize = rows.iter().map(SweepRow::singular_count).sum();

    let csv_path = PathBuf::from(&cfg.output_path);
    write_file(&csv_path, &csv::render(&rows, kinds))?;
    let manifest = manifest::RunManifest {
        config: &cfg,
        params: &params,
        models: cli.models.label(),
        rows: rows.len(),
        singular_rows,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    write_file(&manifest::path_for(&csv_path), &manifest.render())?;

    println!(
        "wrote {} ({} frequencies, models: {})",
        csv_path.display(),
        rows.len(),
        cli.models.label()
    );
    println!("singular rows: {singular_rows}");
    if let Some(defect) = max_exact_pt_defect(&params, &rows) {
        println!("max PT defect of the exact model over the range: {defect:.6e}");
    }
    if cli.plot {
        let script = plot_csv(&csv_path)?;
        println!("wrote {}", script.display());
    }
    if cli.check {
        let outcomes = check::run(&params, &rows, kinds).map_err(input)?;
        let mut failed = false;
        for o in &outcomes {
            println!(
                "check {:<30} {}  {}",
                o.name,
                if o.passed { "PASS" } else { "FAIL" },
                o.detail
            );
            failed |= !o.passed;
        }
        if failed {
            return Err(Failure::Check);
        }
    }
    Ok(())
}

fn cmd_packet(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let params = medium(cli, &cfg)?;
    let args = packet::PacketArgs {
        sigma_um: cli.sigma_um,
        energy_ev: cli.energy_ev,
        incidence: match cli.from {
            Side::Left => Incidence::Left,
            Side::Right => Incidence::Right,
        },
        dz_nm: cli.dz_nm,
        until: match cli.until.as_deref() {
            None => packet::Until::Cleared,
            Some("reflected") => packet::Until::Reflected,
            Some(ps) => packet::Until::Picoseconds(
                ps.parse()
                    .map_err(|_| input(format!("--until expects picoseconds or `reflected`, got `{ps}`")))?,
            ),
        },
        snapshot: cli.snapshot.clone(),
    };
    let (experiment, outcome) = packet::run(&params, &args).map_err(input)?;
    println!("{}", packet::report(&params, &experiment, &outcome));
    if let Some(path) = &args.snapshot {
        packet::write_snapshot(path, &experiment, &outcome).map_err(|e| io_error(path, e))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = if let Some(path) = &cli.plot_csv {
        plot_csv(path).map(|p| println!("wrote {}", p.display()))
    } else if cli.packet {
        cmd_packet(&cli)
    } else {
        cmd_sweep(&cli)
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Io(msg) => eprintln!("I/O error: {msg}"),
                Failure::Check => eprintln!("property check failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}
