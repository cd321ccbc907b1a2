use std::fmt::Write as _;
use std::path::Path;

use super::{ConvergenceReport, OrderAxis};
use crate::error::{Error, Result};

fn num(out: &mut String, v: f64) {
    // 17 significant digits: enough to recover every f64 exactly.
    write!(out, ",{v:.16e}").expect("writing to a String");
}

/// Renders the report as CSV: a header, one line per row, then one line per
/// fitted order. Every line ends in `\n`.
pub fn render_csv(report: &ConvergenceReport) -> String {
    let study = report.config.study;
    let (errs, dev) = (study.reports_errors(), study.reports_norm_deviation());
    let mut out = String::from("k,h,steps,intervals");
    if errs {
        out.push_str(",linf,l2,h1");
    }
    if dev {
        out.push_str(",norm_deviation");
    }
    out.push_str(",seconds\n");

    for row in &report.rows {
        let s = row.spec;
        write!(out, "{:.16e},{:.16e},{},{}", s.k, s.h, s.steps, s.intervals).expect("writing to a String");
        if errs {
            let e = row.errors.unwrap_or(crate::norms::NormTriple { linf: f64::NAN, l2: f64::NAN, h1: f64::NAN });
            num(&mut out, e.linf);
            num(&mut out, e.l2);
            num(&mut out, e.h1);
        }
        if dev {
            num(&mut out, row.norm_deviation.unwrap_or(f64::NAN));
        }
        num(&mut out, row.seconds);
        out.push('\n');
    }

    for o in &report.orders {
        out.push_str(match o.against {
            OrderAxis::K => "order_k,,,",
            OrderAxis::H => "order_h,,,",
        });
        num(&mut out, o.orders.linf);
        num(&mut out, o.orders.l2);
        num(&mut out, o.orders.h1);
        if dev {
            out.push(',');
        }
        out.push_str(",\n");
    }
    out
}

pub fn write_csv(report: &ConvergenceReport, path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(report)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
