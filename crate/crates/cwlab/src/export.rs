//! Plot-ready CSV emission. One writer per report type, fixed schemas:
//! header row always present, rows terminated with "\n", floats printed
//! with 17 significant digits via `{:.16e}` so a reread round-trips the
//! exact f64. Zero probabilities export their log as "-inf".

use std::fmt::Write as _;
use std::path::Path;

use crate::bounds::MarginRow;
use crate::definetti::{ConcentrationReport, DeFinettiDensity};
use crate::error::Result;
use crate::exactdist::{LcltReport, PmfTable};

/// 17-significant-digit float formatting shared by every CSV column.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

/// Magnetization pmf: `s_1,...,s_d,log_prob`, one row per state in
/// enumeration order.
pub fn write_pmf_csv(path: &Path, table: &PmfTable) -> Result<()> {
    write_pmf_csv_inner(path, table, None)
}

/// Pmf schema plus a leading `#`-prefixed metadata comment line recording
/// the sampler provenance.
pub fn write_pmf_csv_with_meta(path: &Path, table: &PmfTable, meta: &str) -> Result<()> {
    write_pmf_csv_inner(path, table, Some(meta))
}

fn write_pmf_csv_inner(path: &Path, table: &PmfTable, meta: Option<&str>) -> Result<()> {
    let d = table.groups().dim();
    let mut out = String::new();
    if let Some(meta) = meta {
        let _ = writeln!(out, "# {meta}");
    }
    for a in 1..=d {
        let _ = write!(out, "s_{a},");
    }
    out.push_str("log_prob\n");
    for i in 0..table.len() {
        let state = table.state(i);
        for &s in state.sums() {
            let _ = write!(out, "{s},");
        }
        let _ = writeln!(out, "{}", fmt_float(table.log_prob(i)));
    }
    write_file(path, &out)
}

/// Local limit sweep: `n,d,sup_error,cov_error,argmax_1..argmax_d`, one row
/// per report in input order.
pub fn write_lclt_csv(path: &Path, reports: &[LcltReport]) -> Result<()> {
    let d = reports.first().map_or(1, |r| r.dim);
    let mut out = String::from("n,d,sup_error,cov_error");
    for a in 1..=d {
        let _ = write!(out, ",argmax_{a}");
    }
    out.push('\n');
    for r in reports {
        let _ = write!(out, "{},{},{},{}", r.n, r.dim, fmt_float(r.sup_error), fmt_float(r.cov_error));
        for &x in &r.argmax {
            let _ = write!(out, ",{}", fmt_float(x));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Normalized mixing density profile on its quadrature grid:
/// `m_1,...,m_k,log_density_normalized`, one row per cell, grid order.
pub fn write_density_csv(path: &Path, density: &DeFinettiDensity) -> Result<()> {
    let k = density.dim();
    let mut out = String::new();
    for a in 1..=k {
        let _ = write!(out, "m_{a},");
    }
    out.push_str("log_density_normalized\n");
    let q = density.points_per_axis();
    let cells = q.pow(k as u32);
    let w = 2.0 * density.half_width() / q as f64;
    for flat in 0..cells {
        let mut rem = flat;
        let mut m = vec![0.0; k];
        for a in (0..k).rev() {
            m[a] = -density.half_width() + (rem % q) as f64 * w + 0.5 * w;
            rem /= q;
        }
        for &ma in &m {
            let _ = write!(out, "{},", fmt_float(ma));
        }
        let _ = writeln!(out, "{}", fmt_float(density.log_density(&m)));
    }
    write_file(path, &out)
}

/// Concentration sweep: `n,delta,tail_mass`, one row per report.
pub fn write_concentration_csv(path: &Path, reports: &[ConcentrationReport]) -> Result<()> {
    let mut out = String::from("n,delta,tail_mass\n");
    for r in reports {
        let _ = writeln!(out, "{},{},{}", r.n, fmt_float(r.delta), fmt_float(r.tail_mass));
    }
    write_file(path, &out)
}

/// Bound scan: `m,u,charfn_modulus,bound,margin`, row-major grid order.
pub fn write_bound_scan_csv(path: &Path, rows: &[MarginRow]) -> Result<()> {
    let mut out = String::from("m,u,charfn_modulus,bound,margin\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(r.m),
            fmt_float(r.u),
            fmt_float(r.charfn_modulus),
            fmt_float(r.bound),
            fmt_float(r.margin)
        );
    }
    write_file(path, &out)
}
