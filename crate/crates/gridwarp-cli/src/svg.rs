//! Minimal self-contained SVG plotting (log-log scatter plus a fitted line).

use std::path::Path;

use crate::CliError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Write a log-log scatter of `(n, seconds)` with an optional fitted power
/// law drawn through the data.
pub fn write_loglog_plot(
    path: &Path,
    points: &[(usize, f64)],
    fit: Option<(f64, f64)>, // (slope, intercept) in log10 space
    title: &str,
) -> Result<(), CliError> {
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).log10()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, s)| s.max(1e-12).log10()).collect();
    let (x_lo, x_hi) = padded_range(&xs);
    let (y_lo, y_hi) = padded_range(&ys);

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{title}</text>\n",
        WIDTH / 2.0
    ));

    // Axes.
    let (ox, oy) = (MARGIN, HEIGHT - MARGIN);
    svg.push_str(&format!(
        "<line x1=\"{ox}\" y1=\"{oy}\" x2=\"{}\" y2=\"{oy}\" stroke=\"black\"/>\n",
        WIDTH - MARGIN
    ));
    svg.push_str(&format!(
        "<line x1=\"{ox}\" y1=\"{oy}\" x2=\"{ox}\" y2=\"{MARGIN}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">log10 N</text>\n",
        WIDTH / 2.0,
        HEIGHT - 18.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\" transform=\"rotate(-90 18 {})\">log10 seconds</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));

    // Fitted line across the x range.
    if let Some((slope, intercept)) = fit {
        let (x1, y1) = to_px(x_lo, slope * x_lo + intercept);
        let (x2, y2) = to_px(x_hi, slope * x_hi + intercept);
        svg.push_str(&format!(
            "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" \
             stroke=\"#888\" stroke-dasharray=\"6 3\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"44\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"12\">slope {slope:.3}</text>\n",
            WIDTH / 2.0
        ));
    }

    // Data points with tick labels.
    for (&(n, secs), (&x, &y)) in points.iter().zip(xs.iter().zip(&ys)) {
        let (px, py) = to_px(x, y);
        svg.push_str(&format!(
            "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"4\" fill=\"#1f77b4\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"10\">N={n}, {secs:.2e}s</text>\n",
            py - 8.0
        ));
    }

    svg.push_str("</svg>\n");
    std::fs::write(path, svg)
        .map_err(|e| CliError::pipeline(format!("cannot write {}: {e}", path.display())))
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-6);
    (lo - 0.08 * span, hi + 0.08 * span)
}
