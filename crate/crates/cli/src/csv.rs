//! Sweep CSV: one line per (frequency, model), amplitudes plus flux sums.

use std::fmt::Write as _;

use anyhow::{bail, Context};
use ptslab::{ModelKind, ModelResult, SweepRow};

pub const HEADER: [&str; 15] = [
    "omega_over_omegac",
    "model",
    "t_left_re",
    "t_left_im",
    "r_left_re",
    "r_left_im",
    "t_right_re",
    "t_right_im",
    "r_right_re",
    "r_right_im",
    "sum_left",
    "sum_right",
    "log10_sum_left",
    "log10_sum_right",
    "status",
];

/// 15 significant digits, fixed exponent form: stable across platforms and
/// round-trips well beyond the 12 digits downstream checks rely on.
fn num(out: &mut String, x: f64) {
    write!(out, "{x:.14e}").expect("writing to a String cannot fail");
}

pub fn render(rows: &[SweepRow], models: &[ModelKind]) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for row in rows {
        for &model in models {
            let Some(result) = row.get(model) else { continue };
            num(&mut out, row.omega_over_omegac);
            out.push(',');
            out.push_str(model.label());
            match result {
                ModelResult::Ok {
                    amplitudes,
                    s_left,
                    s_right,
                } => {
                    for z in amplitudes.as_array() {
                        out.push(',');
                        num(&mut out, z.re);
                        out.push(',');
                        num(&mut out, z.im);
                    }
                    for x in [*s_left, *s_right, s_left.log10(), s_right.log10()] {
                        out.push(',');
                        num(&mut out, x);
                    }
                    out.push_str(",ok\n");
                }
                ModelResult::Singular => {
                    out.push_str(&",".repeat(12));
                    out.push_str(",singular\n");
                }
            }
        }
    }
    out
}

/// A parsed CSV line. Numeric fields are `None` for singular rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub omega_over_omegac: f64,
    pub model: ModelKind,
    pub values: Option<[f64; 12]>,
}

impl Record {
    pub fn log10_sums(&self) -> Option<(f64, f64)> {
        self.values.map(|v| (v[10], v[11]))
    }
}

/// Parses and validates a sweep CSV. Rejects a wrong header, malformed
/// lines and files without data rows.
pub fn parse(text: &str) -> anyhow::Result<Vec<Record>> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        bail!("empty CSV");
    };
    if header.trim_end() != HEADER.join(",") {
        bail!("unexpected CSV header `{header}`");
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != HEADER.len() {
            bail!("line {line_no}: expected {} fields, got {}", HEADER.len(), fields.len());
        }
        let omega_over_omegac: f64 = fields[0]
            .parse()
            .with_context(|| format!("line {line_no}: bad omega_over_omegac `{}`", fields[0]))?;
        let model = match fields[1] {
            "exact" => ModelKind::Exact,
            "approx" => ModelKind::Approximate,
            other => bail!("line {line_no}: unknown model `{other}`"),
        };
        let values = match fields[14] {
            "ok" => {
                let mut v = [0.0; 12];
                for (slot, field) in v.iter_mut().zip(&fields[2..14]) {
                    *slot = field
                        .parse()
                        .with_context(|| format!("line {line_no}: bad number `{field}`"))?;
                }
                Some(v)
            }
            "singular" => {
                if fields[2..14].iter().any(|f| !f.is_empty()) {
                    bail!("line {line_no}: singular row carries numeric fields");
                }
                None
            }
            other => bail!("line {line_no}: unknown status `{other}`"),
        };
        records.push(Record {
            omega_over_omegac,
            model,
            values,
        });
    }
    if records.is_empty() {
        bail!("CSV has no data rows");
    }
    Ok(records)
}
