//! Minimal polyline SVG rendering for phase portraits and time series.

use std::fmt::Write;

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 260.0;
const MARGIN: f64 = 46.0;
const MAX_POINTS: usize = 4000;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Vec<(f64, f64)>>,
    pub markers: Vec<(f64, f64)>,
}

impl Panel {
    pub fn new(title: impl Into<String>, x_label: &str, y_label: &str) -> Self {
        Panel {
            title: title.into(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
            markers: Vec::new(),
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self.series.iter().flatten().chain(&self.markers);
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            return (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let w = hi - lo;
            let w = if w > 0.0 {
                w
            } else {
                lo.abs().max(1e-12) * 1e-3
            };
            (lo - 0.05 * w, hi + 0.05 * w)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        (x0, x1, y0, y1)
    }

    fn render(&self, out: &mut String, ox: f64, oy: f64) {
        let (x0, x1, y0, y1) = self.bounds();
        let w = PANEL_W - 2.0 * MARGIN;
        let h = PANEL_H - 2.0 * MARGIN;
        let sx = |x: f64| ox + MARGIN + (x - x0) / (x1 - x0) * w;
        let sy = |y: f64| oy + PANEL_H - MARGIN - (y - y0) / (y1 - y0) * h;

        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#444"/>"##,
            ox + MARGIN,
            oy + MARGIN
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
            ox + PANEL_W / 2.0,
            oy + MARGIN - 12.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
            ox + PANEL_W / 2.0,
            oy + PANEL_H - 8.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            ox + 12.0,
            oy + PANEL_H / 2.0,
            ox + 12.0,
            oy + PANEL_H / 2.0,
            escape(&self.y_label)
        );
        for (v, x, y, anchor) in [
            (x0, sx(x0), oy + PANEL_H - MARGIN + 12.0, "start"),
            (x1, sx(x1), oy + PANEL_H - MARGIN + 12.0, "end"),
        ] {
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-size="9">{}</text>"#,
                tick(v)
            );
        }
        for (v, y) in [(y0, sy(y0)), (y1, sy(y1) + 8.0)] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-size="9">{}</text>"#,
                ox + MARGIN - 3.0,
                tick(v)
            );
        }

        for (k, s) in self.series.iter().enumerate() {
            let stride = s.len().div_ceil(MAX_POINTS).max(1);
            let mut pts = String::new();
            for (i, &(x, y)) in s.iter().enumerate() {
                if (i % stride == 0 || i + 1 == s.len()) && x.is_finite() && y.is_finite() {
                    let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
                }
            }
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="0.8" stroke-opacity="0.8" points="{}"/>"#,
                PALETTE[k % PALETTE.len()],
                pts.trim_end()
            );
        }
        for &(x, y) in &self.markers {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#,
                sx(x),
                sy(y)
            );
        }
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Lays panels out row-major in `cols` columns.
pub fn render(panels: &[Panel], cols: usize) -> String {
    let cols = cols.max(1);
    let rows = panels.len().div_ceil(cols).max(1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        PANEL_W * cols as f64,
        PANEL_H * rows as f64
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        let ox = (i % cols) as f64 * PANEL_W;
        let oy = (i / cols) as f64 * PANEL_H;
        p.render(&mut out, ox, oy);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_polyline_per_series() {
        let mut p = Panel::new("t", "x", "y");
        p.series.push(vec![(0.0, 0.0), (1.0, 1.0)]);
        p.series.push(vec![(0.0, 1.0), (1.0, 0.0)]);
        p.markers.push((0.5, 0.5));
        let svg = render(&[p], 1);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn degenerate_ranges_stay_finite() {
        let mut p = Panel::new("flat", "x", "y");
        p.series.push(vec![(2.0, 3.0); 4]);
        let svg = render(&[p], 3);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
