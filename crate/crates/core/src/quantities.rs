//! Physical constants, the eV/rad·s⁻¹ bridge and the key = value run
//! configuration.
//!
//! Everything inside the solvers is SI. Electron-volts and micrometres only
//! appear in [`Config`].

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Exact SI values (2019 redefinition) of the constants used here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Elementary charge, C.
    pub e_charge: f64,
}

pub const SI: PhysicalConstants = PhysicalConstants {
    c: 299_792_458.0,
    hbar: 1.054_571_817e-34,
    e_charge: 1.602_176_634e-19,
};

pub const C: f64 = SI.c;
pub const HBAR: f64 = SI.hbar;
pub const E_CHARGE: f64 = SI.e_charge;

/// Converts a photon energy in eV to an angular frequency in rad/s.
pub fn ev_to_angular(energy_ev: f64) -> Result<f64> {
    if !(energy_ev >= 0.0) {
        return Err(Error::Negative {
            quantity: "energy",
            value: energy_ev,
        });
    }
    Ok(energy_ev * E_CHARGE / HBAR)
}

/// Inverse of [`ev_to_angular`].
pub fn angular_to_ev(omega: f64) -> f64 {
    omega * HBAR / E_CHARGE
}

/// Cutoff of the fundamental slab mode, `ωc = cπ / 2a`. The argument is the
/// full plate separation `2a` in metres.
pub fn cutoff_frequency(slab_width: f64) -> Result<f64> {
    if !(slab_width > 0.0) {
        return Err(Error::NonPositive {
            quantity: "slab width",
            value: slab_width,
        });
    }
    Ok(C * PI / slab_width)
}

/// Run configuration as read from a `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub slab_width_um: f64,
    pub hbar_omega0_ev: f64,
    pub hbar_omegap_ev: f64,
    pub hbar_delta_ev: f64,
    pub region_length_um: f64,
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_points: usize,
    pub output_path: String,
}

impl Default for Config {
    /// The parameter set of the reference gain/absorber waveguide: 2a = 0.124 µm,
    /// ħω0 = 5 eV, ħωp = 0.2 eV, 2ħδ = 2.5 eV, l = 19.7 µm.
    fn default() -> Self {
        Config {
            slab_width_um: 0.124,
            hbar_omega0_ev: 5.0,
            hbar_omegap_ev: 0.2,
            hbar_delta_ev: 1.25,
            region_length_um: 19.7,
            sweep_start: 1.0005,
            sweep_stop: 1.10,
            sweep_points: 400,
            output_path: "results.csv".to_string(),
        }
    }
}

pub const CONFIG_KEYS: [&str; 9] = [
    "slab_width_um",
    "hbar_omega0_ev",
    "hbar_omegap_ev",
    "hbar_delta_ev",
    "region_length_um",
    "sweep_start",
    "sweep_stop",
    "sweep_points",
    "output_path",
];

impl Config {
    /// Parses the configuration format: one `key = value` per line, `#`
    /// starts a comment, blank lines are ignored. Missing keys keep their
    /// default. The result is validated.
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|message| Error::Parse { line: line_no, message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets a single key from its textual value. Used by the parser and by
    /// command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = |v: &str| -> std::result::Result<f64, String> {
            v.parse::<f64>()
                .map_err(|_| format!("`{key}`: cannot parse `{v}` as a number"))
        };
        match key {
            "slab_width_um" => self.slab_width_um = num(value)?,
            "hbar_omega0_ev" => self.hbar_omega0_ev = num(value)?,
            "hbar_omegap_ev" => self.hbar_omegap_ev = num(value)?,
            "hbar_delta_ev" => self.hbar_delta_ev = num(value)?,
            "region_length_um" => self.region_length_um = num(value)?,
            "sweep_start" => self.sweep_start = num(value)?,
            "sweep_stop" => self.sweep_stop = num(value)?,
            "sweep_points" => {
                self.sweep_points = value
                    .parse::<usize>()
                    .map_err(|_| format!("`{key}`: cannot parse `{value}` as a count"))?
            }
            "output_path" => {
                if value.is_empty() {
                    return Err("`output_path` is empty".to_string());
                }
                self.output_path = value.to_string();
            }
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("slab_width_um", self.slab_width_um),
            ("hbar_omega0_ev", self.hbar_omega0_ev),
            ("hbar_omegap_ev", self.hbar_omegap_ev),
            ("hbar_delta_ev", self.hbar_delta_ev),
            ("region_length_um", self.region_length_um),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation {
                    key,
                    message: format!("must be strictly positive, got {v}"),
                });
            }
        }
        if !(self.sweep_start > 1.0) {
            return Err(Error::Validation {
                key: "sweep_start",
                message: format!("must exceed 1 (propagation needs ω > ωc), got {}", self.sweep_start),
            });
        }
        if !(self.sweep_stop > self.sweep_start) || !self.sweep_stop.is_finite() {
            return Err(Error::Validation {
                key: "sweep_stop",
                message: format!(
                    "must exceed sweep_start = {}, got {}",
                    self.sweep_start, self.sweep_stop
                ),
            });
        }
        if self.sweep_points < 2 {
            return Err(Error::Validation {
                key: "sweep_points",
                message: format!("need at least 2 points, got {}", self.sweep_points),
            });
        }
        Ok(())
    }
}

/// Writes the configuration back in its own file format. Floats use the
/// shortest representation that round-trips.
impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "slab_width_um = {:?}", self.slab_width_um)?;
        writeln!(f, "hbar_omega0_ev = {:?}", self.hbar_omega0_ev)?;
        writeln!(f, "hbar_omegap_ev = {:?}", self.hbar_omegap_ev)?;
        writeln!(f, "hbar_delta_ev = {:?}", self.hbar_delta_ev)?;
        writeln!(f, "region_length_um = {:?}", self.region_length_um)?;
        writeln!(f, "sweep_start = {:?}", self.sweep_start)?;
        writeln!(f, "sweep_stop = {:?}", self.sweep_stop)?;
        writeln!(f, "sweep_points = {}", self.sweep_points)?;
        writeln!(f, "output_path = {}", self.output_path)
    }
}

/// Free-function form of [`Config::parse`].
pub fn parse_config(text: &str) -> Result<Config> {
    Config::parse(text)
}
