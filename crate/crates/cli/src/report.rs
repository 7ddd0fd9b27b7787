//! CSV and SVG emission.
//!
//! CSV is the canonical output: numbers are serialized with 17 significant
//! digits so every f64 round-trips, and rows come straight from the
//! deterministic estimators, so a (config, seed) pair reproduces files
//! byte for byte. The SVG renderer is a dependency-free log-log plot and
//! never feeds back into the CSV content.

use sdelab::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits: enough to reconstruct the exact f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

/// One named series of (N, value) points on the log-log canvas.
pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
    pub color: &'a str,
    pub dashed: bool,
}

/// Minimal log-log SVG: decade grid on y, power-of-two grid on x.
pub fn log_log_svg(title: &str, series: &[Series]) -> String {
    const W: f64 = 760.0;
    const H: f64 = 560.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;

    let finite_points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .copied()
        .collect();
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &finite_points {
        x_lo = x_lo.min(x.log2());
        x_hi = x_hi.max(x.log2());
        y_lo = y_lo.min(y.log10());
        y_hi = y_hi.max(y.log10());
    }
    if !x_lo.is_finite() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, -1.0, 0.0);
    }
    y_lo = y_lo.floor();
    y_hi = y_hi.ceil();
    if y_hi - y_lo < 1.0 {
        y_hi = y_lo + 1.0;
    }
    let px = |lx: f64| ML + (lx - x_lo) / (x_hi - x_lo).max(1e-9) * (W - ML - MR);
    let py = |ly: f64| H - MB - (ly - y_lo) / (y_hi - y_lo) * (H - MT - MB);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="monospace" font-size="16" text-anchor="middle">{title}</text>"#,
        W / 2.0
    );

    // y decades
    let mut dec = y_lo;
    while dec <= y_hi + 1e-9 {
        let y = py(dec);
        let _ = writeln!(
            svg,
            r##"<line x1="{ML}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
            W - MR
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="11" text-anchor="end">1e{}</text>"#,
            ML - 6.0,
            y + 4.0,
            dec as i64
        );
        dec += 1.0;
    }
    // x powers of two
    let k_lo = x_lo.ceil() as i64;
    let k_hi = x_hi.floor() as i64;
    let step = (((k_hi - k_lo) / 10).max(1)) as usize;
    for k in (k_lo..=k_hi).step_by(step) {
        let x = px(k as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{MT}" x2="{x:.1}" y2="{:.1}" stroke="#eee"/>"##,
            H - MB
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="monospace" font-size="11" text-anchor="middle">2^{k}</text>"#,
            H - MB + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="12" text-anchor="middle">N (steps)</text>"#,
        (ML + W - MR) / 2.0,
        H - 14.0
    );

    // axes
    let _ = writeln!(
        svg,
        r#"<rect x="{ML}" y="{MT}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        W - ML - MR,
        H - MT - MB
    );

    for (i, s) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|&(x, y)| (px(x.log2()), py(y.log10())))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            path.join(" "),
            s.color
        );
        if !s.dashed {
            for (x, y) in &pts {
                let _ = writeln!(svg, r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.5" fill="{}"/>"#, s.color);
            }
        }
        // legend
        let ly = MT + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            ML + 12.0,
            ML + 44.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="11">{}</text>"#,
            ML + 50.0,
            ly + 4.0,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    svg
}
