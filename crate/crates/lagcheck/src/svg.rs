//! Hand-emitted SVG scatter of scaled roots over the limiting curve.
//!
//! Primitives only (polyline, circle, line, text) with fixed styling and
//! four-decimal coordinates, so the output is byte-identical across runs.

use num_complex::Complex64;
use std::fmt::Write as _;

const SIZE: f64 = 800.0;
const RANGE: f64 = 1.15; // plot window [-RANGE, RANGE]^2

fn map_x(x: f64) -> f64 {
    (x + RANGE) / (2.0 * RANGE) * SIZE
}

fn map_y(y: f64) -> f64 {
    (RANGE - y) / (2.0 * RANGE) * SIZE
}

/// Scatter plot: curve polyline plus one dot per scaled root.
pub fn scaled_roots_plot(curve: &[Complex64], roots: &[(u32, Complex64)]) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"#ffffff\"/>"
    );
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#999999\" stroke-width=\"1\"/>",
        map_x(-RANGE),
        map_y(0.0),
        map_x(RANGE),
        map_y(0.0)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#999999\" stroke-width=\"1\"/>",
        map_x(0.0),
        map_y(-RANGE),
        map_x(0.0),
        map_y(RANGE)
    );
    // limiting curve
    let mut points = String::new();
    for z in curve {
        let _ = write!(points, "{:.4},{:.4} ", map_x(z.re), map_y(z.im));
    }
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>",
        points.trim_end()
    );
    // scaled roots
    for (n, z) in roots {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"2.2\" fill=\"#d62728\" fill-opacity=\"0.75\"><title>n={n}</title></circle>",
            map_x(z.re),
            map_y(z.im)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"12\" y=\"24\" font-family=\"monospace\" font-size=\"14\" fill=\"#333333\">scaled roots x/n over |z exp(1-z)| = 1</text>"
    );
    svg.push_str("</svg>\n");
    svg
}
