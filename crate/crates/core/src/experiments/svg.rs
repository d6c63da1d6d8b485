//! Minimal SVG line and step charts.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStyle {
    Line,
    Step,
    Markers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: SeriesStyle,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>, style: SeriesStyle) -> Self {
        Self {
            name: name.into(),
            points,
            style,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Labelled vertical reference lines.
    pub markers: Vec<(String, f64)>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    pixel_lo: f64,
    pixel_hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool, pixel_lo: f64, pixel_hi: f64) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.04 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            log,
            pixel_lo,
            pixel_hi,
        }
    }

    fn map(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some(self.pixel_lo + (v - self.lo) / (self.hi - self.lo) * (self.pixel_hi - self.pixel_lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        (0..=5)
            .map(|i| {
                let t = self.lo + (self.hi - self.lo) * i as f64 / 5.0;
                let label = if self.log {
                    format!("{:.3}", 10f64.powf(t))
                } else {
                    format!("{t:.3}")
                };
                (self.pixel_lo + (self.pixel_hi - self.pixel_lo) * i as f64 / 5.0, label)
            })
            .collect()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart {
    pub fn render(&self) -> String {
        let plot_right = WIDTH - MARGIN_RIGHT;
        let plot_bottom = HEIGHT - MARGIN_BOTTOM;
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .chain(self.markers.iter().map(|m| m.1));
        let x_axis = Axis::new(xs, self.log_x, MARGIN_LEFT, plot_right);
        let ys = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
        let y_axis = Axis::new(ys, self.log_y, plot_bottom, MARGIN_TOP);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            (MARGIN_LEFT + plot_right) / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            plot_right - MARGIN_LEFT,
            plot_bottom - MARGIN_TOP
        );
        for (px, label) in x_axis.ticks() {
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{plot_bottom}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{label}</text>"#,
                plot_bottom + 5.0,
                plot_bottom + 19.0
            );
        }
        for (py, label) in y_axis.ticks() {
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#,
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT - 8.0,
                py + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (MARGIN_LEFT + plot_right) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
            (MARGIN_TOP + plot_bottom) / 2.0,
            escape(&self.y_label)
        );

        for (name, x) in &self.markers {
            if let Some(px) = x_axis.map(*x) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{px:.2}" y1="{MARGIN_TOP}" x2="{px:.2}" y2="{plot_bottom}" stroke="#555" stroke-dasharray="5,4"/><text x="{:.2}" y="{}" font-size="10" fill="#555">{}</text>"##,
                    px + 3.0,
                    MARGIN_TOP + 12.0,
                    escape(name)
                );
            }
        }

        for (idx, series) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let mapped: Vec<(f64, f64)> = series
                .points
                .iter()
                .filter_map(|&(x, y)| Some((x_axis.map(x)?, y_axis.map(y)?)))
                .collect();
            match series.style {
                SeriesStyle::Markers => {
                    for (px, py) in &mapped {
                        let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="2.5" fill="{color}"/>"#);
                    }
                }
                SeriesStyle::Line | SeriesStyle::Step => {
                    let mut path = String::new();
                    for (i, (px, py)) in mapped.iter().enumerate() {
                        if i == 0 {
                            let _ = write!(path, "M{px:.2},{py:.2}");
                        } else if series.style == SeriesStyle::Step {
                            let _ = write!(path, " H{px:.2} V{py:.2}");
                        } else {
                            let _ = write!(path, " L{px:.2},{py:.2}");
                        }
                    }
                    if !path.is_empty() {
                        let _ = writeln!(
                            out,
                            r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="1.6"/>"#
                        );
                    }
                }
            }
            let ly = MARGIN_TOP + 10.0 + 18.0 * idx as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{2}" y="{3}">{4}</text>"#,
                plot_right + 10.0,
                plot_right + 30.0,
                plot_right + 35.0,
                ly + 4.0,
                escape(&series.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
