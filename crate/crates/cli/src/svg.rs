//! Minimal SVG scatter plots of node sets on the square.

use std::fmt::Write;

const SIZE: f64 = 480.0;
const PAD: f64 = 24.0;

/// Maps `[-lim, lim]` onto the drawing area; `y` points up.
struct Frame {
    lim: f64,
}

impl Frame {
    fn new(points: &[[f64; 2]]) -> Self {
        let reach = points.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
        Self { lim: reach * 1.04 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x + self.lim) / (2.0 * self.lim) * (SIZE - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - self.px(y)
    }
}

/// One circle of class `node` per point, the square outline, and an
/// optional polyline of class `curve`.
pub fn render(title: &str, points: &[[f64; 2]], curve: Option<&[[f64; 2]]>) -> String {
    let fr = Frame::new(points);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "  <title>{}</title>", escape(title));
    let _ = writeln!(s, r#"  <rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (a, b) = (fr.px(-1.0), fr.px(1.0));
    let _ = writeln!(
        s,
        r#"  <rect class="square" x="{a:.2}" y="{a:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
        b - a,
        b - a
    );
    if let Some(c) = curve {
        let pts: Vec<String> = c.iter().map(|p| format!("{:.2},{:.2}", fr.px(p[0]), fr.py(p[1]))).collect();
        let _ = writeln!(
            s,
            r##"  <polyline class="curve" points="{}" fill="none" stroke="#7a9cc6" stroke-width="0.8"/>"##,
            pts.join(" ")
        );
    }
    for p in points {
        let _ = writeln!(
            s,
            r##"  <circle class="node" cx="{:.2}" cy="{:.2}" r="3" fill="#c0392b"/>"##,
            fr.px(p[0]),
            fr.py(p[1])
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
