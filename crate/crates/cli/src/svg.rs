//! SVG scatter of zeros over the attractor.

use std::fmt::Write;

use euler_attractor::C64;

/// Fixed window: `x` and `y` in `[-0.4, 0.4]`.
pub const VIEW_BOX: &str = "-0.4 -0.4 0.8 0.8";
const PIXELS: f64 = 800.0;

fn px(v: f64) -> f64 {
    v * 0.8 / PIXELS
}

fn path(points: &[C64]) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{:.6} {:.6} ", p.re, -p.im);
    }
    d.trim_end().to_string()
}

/// Arcs as paths, the interval as a line, zeros as 1.5px circles. The
/// imaginary axis points up.
pub fn render(roots: &[C64], lower_arc: &[C64], upper_arc: &[C64], interval_half: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PIXELS}\" height=\"{PIXELS}\" viewBox=\"{VIEW_BOX}\">"
    );
    let _ = writeln!(
        s,
        "<rect x=\"-0.4\" y=\"-0.4\" width=\"0.8\" height=\"0.8\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "<g fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"{:.6}\">",
        px(1.5)
    );
    let _ = writeln!(s, "<path d=\"{}\"/>", path(lower_arc));
    let _ = writeln!(s, "<path d=\"{}\"/>", path(upper_arc));
    let _ = writeln!(
        s,
        "<line x1=\"{:.6}\" y1=\"0\" x2=\"{:.6}\" y2=\"0\"/>",
        -interval_half, interval_half
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "<g fill=\"#d62728\">");
    for r in roots {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\"/>",
            r.re,
            -r.im,
            px(1.5)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_axis_is_flipped() {
        let svg = render(&[C64::new(0.1, 0.2)], &[], &[], 0.1);
        assert!(svg.contains("cx=\"0.100000\" cy=\"-0.200000\""));
        assert!(svg.contains("r=\"0.001500\""));
    }
}
