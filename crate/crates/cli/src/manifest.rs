//! Run manifest written next to every CSV.

use std::fmt::Write as _;

use ptslab::{Config, MediumParams};

pub struct RunManifest<'a> {
    pub config: &'a Config,
    pub params: &'a MediumParams,
    pub models: &'a str,
    pub rows: usize,
    pub singular_rows: usize,
    pub timestamp: String,
}

impl RunManifest<'_> {
    pub fn render(&self) -> String {
        let (ratio_delta, ratio_cutoff) = self.params.regime_ratios();
        let mut out = String::new();
        writeln!(out, "# ptslab run manifest").unwrap();
        writeln!(out, "tool = ptslab {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "timestamp = {}", self.timestamp).unwrap();
        writeln!(out, "models = {}", self.models).unwrap();
        writeln!(out, "rows = {}", self.rows).unwrap();
        writeln!(out, "singular_rows = {}", self.singular_rows).unwrap();
        writeln!(out, "omega_p2_over_delta2 = {ratio_delta:?}").unwrap();
        writeln!(out, "omega_p2_over_delta_omega_c = {ratio_cutoff:?}").unwrap();
        writeln!(out, "regime_warning = {}", self.params.regime_warning()).unwrap();
        writeln!(out, "slab_width_used_m = {:?}", self.params.slab_width).unwrap();
        writeln!(out, "\n[config]").unwrap();
        out.push_str(&self.config.to_string());
        out
    }
}

/// `results.csv` → `results.csv.manifest`.
pub fn path_for(csv: &std::path::Path) -> std::path::PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest");
    name.into()
}
