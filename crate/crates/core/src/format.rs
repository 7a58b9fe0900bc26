//! CSV output for error tables, overshoot reports and sampled curves.

use std::fmt::Write as _;

use crate::experiments::{CurvePoint, ErrorReport, OvershootReport};

/// Scientific notation with five significant digits and a two-digit
/// exponent, e.g. `4.0219e-04`.
pub fn sci5(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn full(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    format!("{v:.16e}")
}

pub fn rate(v: f64) -> String {
    format!("{v:.4}")
}

/// `level,N,h,mae,rate`; the rate is empty on the first level.
pub fn error_report_csv(report: &ErrorReport) -> String {
    let mut out = String::from("level,N,h,mae,rate\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.level,
            row.n,
            sci5(row.h),
            sci5(row.mae),
            row.rate.map(rate).unwrap_or_default()
        );
    }
    out
}

pub const OVERSHOOT_HEADER: &str =
    "method,kernel,degree,max_overshoot,smooth_region_mae,exclusion_radius";

pub fn overshoot_row(r: &OvershootReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        r.method,
        r.kernel,
        r.degree,
        sci5(r.max_overshoot),
        sci5(r.smooth_region_mae),
        sci5(r.exclusion_radius)
    )
}

pub fn overshoot_csv<'a>(reports: impl IntoIterator<Item = &'a OvershootReport>) -> String {
    let mut out = format!("{OVERSHOOT_HEADER}\n");
    for r in reports {
        out.push_str(&overshoot_row(r));
        out.push('\n');
    }
    out
}

/// Two-column `x,value` dump.
pub fn curve_csv(points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = String::from("x,value\n");
    for (x, v) in points {
        let _ = writeln!(out, "{},{}", full(x), full(v));
    }
    out
}

pub fn curve_csv_for(curve: &[CurvePoint], pick: impl Fn(&CurvePoint) -> f64) -> String {
    curve_csv(curve.iter().map(|p| (p.x, pick(p))))
}
