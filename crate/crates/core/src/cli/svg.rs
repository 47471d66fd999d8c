//! SVG drawing of a plane embedding: points on the unit circle, edges as
//! chords.

use std::fmt::Write;

use crate::graphs::Graph;

pub const SIZE: f64 = 512.0;
pub const RADIUS: f64 = 230.0;
const NODE_RADIUS: f64 = 6.0;

fn to_canvas(p: [f64; 2]) -> (f64, f64) {
    (SIZE / 2.0 + RADIUS * p[0], SIZE / 2.0 - RADIUS * p[1])
}

/// One `<line>` per edge, one `<circle>` per node, one `<text>` label per
/// node (1-based).
pub fn render_svg(g: &Graph, points: &[[f64; 2]]) -> String {
    assert_eq!(points.len(), g.n(), "one point per node");
    let mut s = String::new();
    let c = SIZE / 2.0;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r##"  <ellipse cx="{c}" cy="{c}" rx="{RADIUS}" ry="{RADIUS}" fill="none" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##)
        .unwrap();
    for &(i, j) in g.edges() {
        let (x1, y1) = to_canvas(points[i]);
        let (x2, y2) = to_canvas(points[j]);
        writeln!(s, r#"  <line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="black" stroke-width="1.5"/>"#)
            .unwrap();
    }
    for (v, &p) in points.iter().enumerate() {
        let (x, y) = to_canvas(p);
        writeln!(s, r##"  <circle cx="{x:.3}" cy="{y:.3}" r="{NODE_RADIUS}" fill="#1f5fa8"/>"##).unwrap();
        // labels sit just outside the circle
        let (lx, ly) = to_canvas([p[0] * 1.09, p[1] * 1.09]);
        writeln!(
            s,
            r#"  <text x="{lx:.3}" y="{ly:.3}" font-family="sans-serif" font-size="14" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
            v + 1
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
