//! Minimal self-contained SVG scatter plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct Scatter<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: Vec<Series<'a>>,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Scatter<'_> {
    pub fn render(&self) -> String {
        let all = || self.series.iter().flat_map(|s| s.points.iter());
        let (x0, x1) = bounds(all().map(|p| p.0));
        let (y0, y1) = bounds(all().map(|p| p.1));
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(self.title)
        )
        .unwrap();
        writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        )
        .unwrap();
        for (value, anchor_y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
            writeln!(
                out,
                r#"<text x="{}" y="{:.1}" text-anchor="end">{value:.3e}</text>"#,
                MARGIN - 4.0,
                anchor_y + 4.0
            )
            .unwrap();
        }
        for (value, anchor_x) in [(x0, MARGIN), (x1, WIDTH - MARGIN)] {
            writeln!(
                out,
                r#"<text x="{anchor_x:.1}" y="{}" text-anchor="middle">{value}</text>"#,
                HEIGHT - MARGIN + 16.0
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 16.0,
            escape(self.x_label)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(self.y_label)
        )
        .unwrap();
        for (k, s) in self.series.iter().enumerate() {
            writeln!(out, r#"<g fill="{}" fill-opacity="0.7">"#, s.color).unwrap();
            for &(x, y) in s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
            {
                writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="1.6"/>"#,
                    sx(x),
                    sy(y)
                )
                .unwrap();
            }
            writeln!(out, "</g>").unwrap();
            let ly = MARGIN + 16.0 + 16.0 * k as f64;
            writeln!(
                out,
                r#"<circle cx="{}" cy="{ly}" r="4" fill="{}"/><text x="{}" y="{}">{}</text>"#,
                WIDTH - MARGIN - 130.0,
                s.color,
                WIDTH - MARGIN - 120.0,
                ly + 4.0,
                escape(s.name)
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}
