//! Dependency-free SVG 1.1 plots: scatter with a diagonal reference line and
//! corner metrics, and multi-series line charts with optional log axes.

use std::fmt::Write;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 48.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Linear or log10 mapping of a data range onto a pixel range.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            lo -= pad;
            hi += pad;
        }
        Self {
            lo,
            hi,
            log,
            px_lo,
            px_hi,
        }
    }

    fn shared(a: Axis, b: Axis) -> (Axis, Axis) {
        let (lo, hi) = (a.lo.min(b.lo), a.hi.max(b.hi));
        (Axis { lo, hi, ..a }, Axis { lo, hi, ..b })
    }

    fn px(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some(self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        (0..=TICKS)
            .map(|i| {
                let t = self.lo + (self.hi - self.lo) * i as f64 / TICKS as f64;
                let value = if self.log { 10f64.powf(t) } else { t };
                let px =
                    self.px_lo + (t - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo);
                (px, format_tick(value))
            })
            .collect()
    }
}

fn format_tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else if a >= 10.0 {
        format!("{v:.1}")
    } else if a >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

fn header(svg: &mut String, title: &str) {
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(svg: &mut String, x: &Axis, y: &Axis, x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r#"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for (px, label) in x.ticks() {
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y0 + 4.0,
            y0 + 16.0,
            escape(&label)
        );
    }
    for (py, label) in y.ticks() {
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            x0 - 6.0,
            py + 4.0,
            escape(&label)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let (cx, cy) = (14.0, (y0 + y1) / 2.0);
    let _ = writeln!(
        svg,
        r#"<text x="{cx:.1}" y="{cy:.1}" text-anchor="middle" transform="rotate(-90 {cx:.1} {cy:.1})">{}</text>"#,
        escape(y_label)
    );
}

/// Reference frequency on x, generated frequency on y, the line y = x, and
/// `corner` lines printed in the top left of the plot area.
pub fn scatter(
    points: &[(f64, f64)],
    title: &str,
    x_label: &str,
    y_label: &str,
    corner: &[String],
) -> String {
    let x = Axis::new(points.iter().map(|p| p.0), false, LEFT, WIDTH - RIGHT);
    let y = Axis::new(points.iter().map(|p| p.1), false, HEIGHT - BOTTOM, TOP);
    let (x, y) = Axis::shared(x, y);
    let mut svg = String::new();
    header(&mut svg, title);
    axes(&mut svg, &x, &y, x_label, y_label);
    let (lo, hi) = (x.lo, x.hi);
    if let (Some(ax), Some(ay), Some(bx), Some(by)) = (x.px(lo), y.px(lo), x.px(hi), y.px(hi)) {
        let _ = writeln!(
            svg,
            r##"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="#888888" stroke-dasharray="4 3"/>"##
        );
    }
    let _ = writeln!(svg, r#"<g fill="{}" fill-opacity="0.6">"#, PALETTE[0]);
    for &(px, py) in points {
        if let (Some(cx), Some(cy)) = (x.px(px), y.px(py)) {
            let _ = writeln!(svg, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="2"/>"#);
        }
    }
    svg.push_str("</g>\n");
    for (i, line) in corner.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            LEFT + 8.0,
            TOP + 16.0 + 14.0 * i as f64,
            escape(line)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// One polyline per series with a legend; points that cannot be placed on a
/// log axis are skipped.
pub fn line_chart(
    series: &[Series],
    title: &str,
    x_label: &str,
    y_label: &str,
    log_x: bool,
    log_y: bool,
) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter().copied());
    let x = Axis::new(all().map(|p| p.0), log_x, LEFT, WIDTH - RIGHT);
    let y = Axis::new(all().map(|p| p.1), log_y, HEIGHT - BOTTOM, TOP);
    let mut svg = String::new();
    header(&mut svg, title);
    axes(&mut svg, &x, &y, x_label, y_label);
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .filter_map(|&(a, b)| Some(format!("{:.2},{:.2}", x.px(a)?, y.px(b)?)))
            .collect();
        if !coords.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = TOP + 14.0 + 14.0 * i as f64;
        let lx = WIDTH - RIGHT - 110.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{ly:.1}">{}</text>"#,
            ly - 4.0,
            lx + 16.0,
            ly - 4.0,
            lx + 20.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
