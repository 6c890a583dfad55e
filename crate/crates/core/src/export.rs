//! CSV writers for regions, phase diagrams and simulation batches.
//!
//! Numbers are written with 10 significant digits in plain decimal notation
//! and trailing zeros trimmed, so equal inputs give byte-identical files.

use std::io::Write;

use thiserror::Error;

use crate::regions::{Membership, PhaseCell, RateRegion};
use crate::sim::BatchResult;

/// Significant digits of every real number written.
pub const SIGNIFICANT_DIGITS: usize = 10;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("regions of dimension {first} and {other} cannot share one file")]
    MixedDimensions { first: usize, other: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] digits, without exponent or trailing zeros.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).expect("scientific notation");
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// One row per boundary point of every region:
/// `region_name,param_or_vertex_index,R1,…,RL`.
pub fn write_regions<W: Write>(out: W, regions: &[&RateRegion]) -> Result<(), ExportError> {
    let dim = regions.first().map_or(2, |r| r.dim());
    for r in regions {
        let d = r.dim();
        if d != dim {
            return Err(ExportError::MixedDimensions { first: dim, other: d });
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["region_name".to_string(), "param_or_vertex_index".to_string()];
    header.extend((1..=dim).map(|i| format!("R{i}")));
    w.write_record(&header)?;
    for r in regions {
        for (i, p) in r.polyline().iter().enumerate() {
            let mut row = vec![r.name().to_string(), i.to_string()];
            row.extend(p.iter().map(|&x| format_sig(x)));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `rho1,rho2,fdf_sep_opt,cdf_opt` with flags written as 1 or 0.
pub fn write_phase<W: Write>(out: W, cells: &[PhaseCell]) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rho1", "rho2", "fdf_sep_opt", "cdf_opt"])?;
    for c in cells {
        w.write_record([
            format_sig(c.rho1).as_str(),
            format_sig(c.rho2).as_str(),
            flag(c.fdf_separate_optimal),
            flag(c.cdf_optimal),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per `(scheme, n)` batch.
pub fn write_batches<W: Write>(out: W, batches: &[BatchResult]) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scheme",
        "L",
        "field",
        "n",
        "trials",
        "rate_tuple",
        "p_e",
        "ci_low",
        "ci_high",
        "relay_err",
        "user_err",
        "seed",
    ])?;
    for b in batches {
        let (lo, hi) = b.ci();
        w.write_record([
            b.scheme.to_string(),
            b.users.to_string(),
            b.field.clone(),
            b.n.to_string(),
            b.trials.to_string(),
            b.rates.clone(),
            format_sig(b.p_e()),
            format_sig(lo),
            format_sig(hi),
            format_sig(b.relay_err()),
            format_sig(b.user_err()),
            b.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
