//! Minimal SVG line plots: axes, ticks, labels, polylines.

use std::fmt::Write as _;

const WIDTH: f64 = 440.0;
const HEIGHT: f64 = 320.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 34.0;
const BOTTOM: f64 = 48.0;
const TICKS: usize = 5;
const PALETTE: [&str; 5] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d35400"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.to_string(), points, dashed: false }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub series: Vec<Series>,
    /// Labelled points drawn as small circles.
    pub markers: Vec<(f64, f64, String)>,
}

impl Panel {
    pub fn new(title: &str, xlabel: &str, ylabel: &str) -> Self {
        Panel { title: title.to_string(), xlabel: xlabel.to_string(), ylabel: ylabel.to_string(), series: Vec::new(), markers: Vec::new() }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn mark(mut self, x: f64, y: f64, label: &str) -> Self {
        self.markers.push((x, y, label.to_string()));
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let mut visit = |x: f64, y: f64| {
            if x.is_finite() && y.is_finite() {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        };
        for &(x, y) in self.series.iter().flat_map(|s| s.points.iter()) {
            visit(x, y);
        }
        for &(x, y, _) in &self.markers {
            visit(x, y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 <= 0.0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        let span = y1 - y0;
        if span <= 1e-300 {
            y0 -= 0.5 * y0.abs().max(1.0);
            y1 += 0.5 * y1.abs().max(1.0);
        } else {
            y0 -= 0.05 * span;
            y1 += 0.05 * span;
        }
        (x0, x1, y0, y1)
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw(out: &mut String, p: &Panel, ox: f64, oy: f64) {
    let (x0, x1, y0, y1) = p.bounds();
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| ox + LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| oy + TOP + (y1 - y) / (y1 - y0) * ph;
    let _ = writeln!(out, r##"<rect x="{:.2}" y="{:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#000"/>"##, ox + LEFT, oy + TOP);
    let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"##, ox + LEFT + pw / 2.0, oy + 20.0, escape(&p.title));
    let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"##, ox + LEFT + pw / 2.0, oy + HEIGHT - 8.0, escape(&p.xlabel));
    let (lx, ly) = (ox + 14.0, oy + TOP + ph / 2.0);
    let _ = writeln!(out, r##"<text x="{lx:.2}" y="{ly:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"##, escape(&p.ylabel));
    for k in 0..TICKS {
        let t = k as f64 / (TICKS - 1) as f64;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let base = oy + TOP + ph;
        let _ = writeln!(out, r##"<line x1="{px:.2}" y1="{base:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000"/>"##, base + 4.0);
        let _ = writeln!(out, r##"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"##, base + 16.0, tick(xv));
        let left = ox + LEFT;
        let _ = writeln!(out, r##"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="#000"/>"##, left - 4.0);
        let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"##, left - 6.0, py + 3.0, tick(yv));
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(out, r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="3 3"/>"##, ox + LEFT, sy(0.0), ox + LEFT + pw, sy(0.0));
    }
    for (i, s) in p.series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let dash = if s.dashed { r##" stroke-dasharray="6 4""## } else { "" };
        // NaN splits the curve
        for run in s.points.split(|(x, y)| !(x.is_finite() && y.is_finite())) {
            if run.len() < 2 {
                continue;
            }
            let pts: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(out, r##"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"##, pts.join(" "));
        }
        if p.series.len() > 1 {
            let (tx, ty) = (ox + LEFT + pw - 110.0, oy + TOP + 14.0 + 14.0 * i as f64);
            let _ = writeln!(out, r##"<line x1="{tx:.2}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="{colour}" stroke-width="1.5"{dash}/>"##, tx + 18.0);
            let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"##, tx + 22.0, ty + 3.0, escape(&s.label));
        }
    }
    for (x, y, label) in &p.markers {
        let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#000"/>"##, sx(*x), sy(*y));
        let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"##, sx(*x) + 5.0, sy(*y) - 5.0, escape(label));
    }
}

/// Lays panels out row by row, `cols` per row.
pub fn render(panels: &[Panel], cols: usize) -> String {
    let cols = cols.max(1).min(panels.len().max(1));
    let rows = panels.len().div_ceil(cols).max(1);
    let (w, h) = (WIDTH * cols as f64, HEIGHT * rows as f64);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"#fff\"/>\n"
    );
    for (i, p) in panels.iter().enumerate() {
        draw(&mut out, p, WIDTH * (i % cols) as f64, HEIGHT * (i / cols) as f64);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_axes_and_curves() {
        let p = Panel::new("u <a>", "x", "u").with(Series::new("u", vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]));
        let s = render(&[p], 1);
        assert!(s.starts_with("<svg"));
        assert!(s.contains("u &lt;a&gt;"));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert!(s.contains(">0.5<"));
    }

    #[test]
    fn nan_breaks_the_line() {
        let p = Panel::new("t", "x", "y").with(Series::new("y", vec![(0.0, 1.0), (1.0, 2.0), (2.0, f64::NAN), (3.0, 1.0), (4.0, 0.0)]));
        assert_eq!(render(&[p], 1).matches("<polyline").count(), 2);
    }

    #[test]
    fn grid_layout() {
        let ps: Vec<Panel> = (0..4).map(|i| Panel::new(&i.to_string(), "x", "y")).collect();
        let s = render(&ps, 2);
        assert!(s.contains(r##"width="880" height="640""##));
    }
}
