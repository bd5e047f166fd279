//! Gnuplot script for the flux-sum figure. The data are embedded as
//! datablocks so the script is self-contained and depends only on the CSV.

use std::fmt::Write as _;

use ptslab::ModelKind;

use crate::csv::Record;

fn block(out: &mut String, name: &str, records: &[Record], model: ModelKind) {
    writeln!(out, "${name} << EOD").unwrap();
    for r in records.iter().filter(|r| r.model == model) {
        match r.log10_sums() {
            Some((left, right)) => writeln!(out, "{:.14e} {:.14e} {:.14e}", r.omega_over_omegac, left, right).unwrap(),
            // blank line: gnuplot breaks the curve at a singular row
            None => out.push('\n'),
        }
    }
    out.push_str("EOD\n\n");
}

pub fn script(records: &[Record], title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "# log10 of |T|^2 + |R|^2 versus omega/omega_c").unwrap();
    writeln!(out, "# source: {title}").unwrap();
    out.push('\n');
    block(&mut out, "exact", records, ModelKind::Exact);
    block(&mut out, "approx", records, ModelKind::Approximate);
    out.push_str(
        "set xlabel 'omega / omega_c'\n\
         set ylabel 'log10 (|T|^2 + |R|^2)'\n\
         set key top right\n\
         set grid\n\
         plot $exact using 1:2 with lines lw 2 dt 1 lc rgb 'black' title 'exact, from left', \\\n\
         \x20    $exact using 1:3 with lines lw 2 dt 2 lc rgb 'black' title 'exact, from right', \\\n\
         \x20    $approx using 1:2 with points pt 7 ps 0.6 lc rgb 'black' title 'approx, from left', \\\n\
         \x20    $approx using 1:3 with points pt 6 ps 0.6 lc rgb 'black' title 'approx, from right'\n",
    );
    out
}
