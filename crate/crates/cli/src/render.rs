//! SVG rendering of tilings.

use std::fmt::Write as _;

use lgl_core::{LozengeKind, Tiling, TriVertex};

/// Length of a unit lattice edge in SVG user units.
pub const UNIT: f64 = 20.0;

/// Lattice to screen: `x` runs down-right at 30 degrees below horizontal,
/// `y` runs up, and the SVG `y` axis points down.
pub fn screen(v: TriVertex) -> (f64, f64) {
    let (x, y) = (f64::from(v.x), f64::from(v.y));
    (UNIT * x * 3f64.sqrt() / 2.0, UNIT * (x / 2.0 - y))
}

fn color(kind: LozengeKind) -> &'static str {
    match kind {
        LozengeKind::Type1 => "#e4572e",
        LozengeKind::Type2 => "#f3a712",
        LozengeKind::Type3 => "#29335c",
    }
}

/// The tiling as an SVG 1.1 document, one polygon per lozenge and one
/// colour per lozenge type.
pub fn render_svg(t: &Tiling) -> String {
    let pts: Vec<(f64, f64)> = t.domain().boundary().iter().map(|&v| screen(v)).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let pad = UNIT / 2.0;
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.1}" height="{h:.1}" viewBox="{:.3} {:.3} {w:.3} {h:.3}">"#,
        x0 - pad,
        y0 - pad
    );
    let _ = writeln!(s, r##"<g stroke="#000000" stroke-width="0.8" stroke-linejoin="round">"##);
    for l in t.lozenges() {
        let corners: Vec<String> = l
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = screen(v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(s, r#"<polygon class="type{}" fill="{}" points="{}"/>"#, l.kind.number(), color(l.kind), corners.join(" "));
    }
    let outline: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    let _ = writeln!(s, r##"</g><polygon fill="none" stroke="#000000" stroke-width="2" points="{}"/>"##, outline.join(" "));
    s.push_str("</svg>\n");
    s
}
