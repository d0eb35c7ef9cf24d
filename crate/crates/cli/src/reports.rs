//! Output writers. Every float in a CSV is printed with 17 significant
//! digits so parsing the file reproduces the exact bit pattern.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use halving_lab::experiments::{ExperimentReport, TrialRecord};
use halving_lab::moments::MomentRow;

use crate::CliError;

pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::config(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out =
        String::from("trial,stream,max_deviation,fixed_direction_support,certificate\n");
    for r in records {
        let certificate = r.certificate.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.trial,
            r.stream,
            fmt_f64(r.max_deviation),
            fmt_f64(r.fixed_direction_support),
            certificate
        );
    }
    out
}

pub fn moments_csv(rows: &[MomentRow]) -> String {
    let mut out = String::from("d,m_d,var_d,m_d_sqrt_d,d_var_d\n");
    for row in rows {
        let d = row.d as f64;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.d,
            fmt_f64(row.mean_abs),
            fmt_f64(row.var_abs),
            fmt_f64(row.mean_abs * d.sqrt()),
            fmt_f64(d * row.var_abs)
        );
    }
    out
}

pub fn complexity_csv(report: &ExperimentReport) -> Result<String, CliError> {
    let summary = report
        .complexity
        .as_ref()
        .ok_or_else(|| CliError::config("report carries no complexity summary".to_string()))?;
    let mut out = String::from(
        "site_policy,site_count,trace_size,sup_error,probe_count,\
         hausdorff_lo,hausdorff_hi,approx_lower,bronshteyn_lower_eighth\n",
    );
    let trace = summary
        .trace_size
        .map(|t| t.to_string())
        .unwrap_or_default();
    let policy = match summary.site_policy {
        halving_lab::kdistance::SitePolicy::Witnessed => "witnessed",
        halving_lab::kdistance::SitePolicy::FullEnumeration => "full_enumeration",
    };
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        policy,
        summary.site_count,
        trace,
        fmt_f64(summary.sup_error),
        summary.probe_count,
        fmt_f64(summary.hausdorff.lo),
        fmt_f64(summary.hausdorff.hi),
        fmt_f64(summary.approx_lower),
        fmt_f64(summary.bronshteyn_lower_eighth)
    );
    Ok(out)
}

pub fn kdist_csv(dim: usize, rows: &[(Vec<f64>, f64)]) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..dim)
        .map(|i| format!("x{i}"))
        .chain(std::iter::once("kdistance".to_string()))
        .collect();
    let _ = writeln!(out, "{}", header.join(","));
    for (query, value) in rows {
        let mut fields: Vec<String> = query.iter().copied().map(fmt_f64).collect();
        fields.push(fmt_f64(*value));
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}
