//! Self-contained SVG line plots and heatmaps.

use std::fmt::Write;

use crate::output::Manifest;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn map(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        }
    }

    fn admits(self, v: f64) -> bool {
        v.is_finite() && (self == Scale::Linear || v > 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
    /// Dashed, in the colour of the preceding series.
    Fit,
}

#[derive(Debug, Clone)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, manifest: &Manifest) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    out.push_str("<metadata>\n");
    for line in manifest.lines() {
        let _ = writeln!(out, "{}", escape(&line));
    }
    out.push_str("</metadata>\n");
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn title_and_labels(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="22" y="{:.1}" text-anchor="middle" transform="rotate(-90 22 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );
}

/// Tick positions in mapped coordinates together with their labels.
fn ticks(lo: f64, hi: f64, scale: Scale) -> Vec<(f64, String)> {
    match scale {
        Scale::Log => {
            let (a, b) = (lo.floor() as i32, hi.ceil() as i32);
            let step = ((b - a) / 6).max(1);
            (a..=b)
                .step_by(step as usize)
                .map(|e| e as f64)
                .filter(|&e| e >= lo - 1e-9 && e <= hi + 1e-9)
                .map(|e| (e, format!("1e{e}")))
                .collect()
        }
        Scale::Linear => {
            let span = (hi - lo).max(f64::MIN_POSITIVE);
            let raw = span / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| span / s <= 7.0)
                .unwrap_or(10.0 * mag);
            let first = (lo / step).ceil() as i64;
            let last = (hi / step).floor() as i64;
            (first..=last)
                .map(|k| {
                    let v = k as f64 * step;
                    (v, trim(v, step))
                })
                .collect()
        }
    }
}

fn trim(v: f64, step: f64) -> String {
    let digits = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    let s = format!("{v:.digits$}");
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

impl LinePlot {
    pub fn render(&self, manifest: &Manifest) -> String {
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let mapped: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter(|(x, y)| self.x_scale.admits(*x) && self.y_scale.admits(*y))
                    .map(|&(x, y)| (self.x_scale.map(x), self.y_scale.map(y)))
                    .collect()
            })
            .collect();
        let all = mapped.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let (x0, x1) = padded(x0, x1);
        let (y0, y1) = padded(y0, y1);
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let py = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        header(&mut out, manifest);
        title_and_labels(&mut out, &self.title, &self.x_label, &self.y_label);
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for (v, label) in ticks(x0, x1, self.x_scale) {
            let x = px(v);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{TOP}" stroke="#e0e0e0"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"##,
                TOP + ph,
                TOP + ph + 16.0
            );
        }
        for (v, label) in ticks(y0, y1, self.y_scale) {
            let y = py(v);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                y + 4.0
            );
        }
        let mut slot = 0;
        for (i, (s, pts)) in self.series.iter().zip(&mapped).enumerate() {
            if s.style != Style::Fit || i == 0 {
                slot += 1;
            }
            let color = PALETTE[(slot - 1) % PALETTE.len()];
            let dash = if s.style == Style::Fit {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            if s.style == Style::Markers {
                for &(x, y) in pts {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                        px(x),
                        py(y)
                    );
                }
            } else if !pts.is_empty() {
                let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                    path.join(" ")
                );
            }
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 16.0,
                lx + 22.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        for (i, note) in self.notes.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
                LEFT + 10.0,
                TOP + 16.0 + 15.0 * i as f64,
                escape(note)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Rows are steps `t = 0..`, columns positions `x = -T..=T`.
pub struct Heatmap {
    pub title: String,
    pub values: Vec<Vec<f64>>,
    pub steps: usize,
}

/// Perceptually ordered ramp from dark blue through green to yellow.
fn color(v: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.25, [59.0, 82.0, 139.0]),
        (0.5, [33.0, 145.0, 140.0]),
        (0.75, [94.0, 201.0, 98.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let v = v.clamp(0.0, 1.0);
    let i = STOPS
        .iter()
        .rposition(|(s, _)| *s <= v)
        .unwrap_or(0)
        .min(STOPS.len() - 2);
    let (s0, c0) = STOPS[i];
    let (s1, c1) = STOPS[i + 1];
    let f = (v - s0) / (s1 - s0);
    let c: Vec<u8> = (0..3).map(|k| (c0[k] + f * (c1[k] - c0[k])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

impl Heatmap {
    /// Colour is `sqrt(p / p_max)` so the spreading front stays visible.
    pub fn render(&self, manifest: &Manifest) -> String {
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let cols = 2 * self.steps + 1;
        let rows = self.values.len().max(1);
        let (cw, rh) = (pw / cols as f64, ph / rows as f64);
        let max = self.values.iter().flatten().copied().fold(0.0, f64::max);

        let mut out = String::new();
        header(&mut out, manifest);
        title_and_labels(&mut out, &self.title, "position x", "step t");
        for (t, row) in self.values.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                let v = if max > 0.0 { (p / max).sqrt() } else { 0.0 };
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    LEFT + j as f64 * cw,
                    TOP + t as f64 * rh,
                    cw + 0.05,
                    rh + 0.05,
                    color(v)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let t = self.steps as i64;
        for (x, label) in [(-t, format!("{}", -t)), (0, "0".to_string()), (t, format!("{t}"))] {
            let cx = LEFT + ((x + t) as f64 + 0.5) * cw;
            let _ = writeln!(
                out,
                r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                TOP + ph + 16.0
            );
        }
        for s in [0, rows - 1] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{s}</text>"#,
                LEFT - 6.0,
                TOP + (s as f64 + 0.5) * rh + 4.0
            );
        }
        let bx = LEFT + pw + 30.0;
        for k in 0..50 {
            let v = 1.0 - k as f64 / 49.0;
            let _ = writeln!(
                out,
                r#"<rect x="{bx:.2}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#,
                TOP + k as f64 * ph / 50.0,
                ph / 50.0 + 0.05,
                color(v)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{:.3e}</text><text x="{:.2}" y="{:.2}">0</text><text x="{:.2}" y="{:.2}" font-size="11">sqrt scale</text>"#,
            bx + 22.0,
            TOP + 10.0,
            max,
            bx + 22.0,
            TOP + ph,
            bx - 4.0,
            TOP + ph + 20.0
        );
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qwalk::disorder::Semantics;

    fn manifest() -> Manifest {
        Manifest::new(
            "test",
            &serde_json::json!({}),
            Some(0),
            Some(Semantics::BernoulliUniform),
        )
    }

    #[test]
    fn line_plot_is_deterministic_svg() {
        let plot = LinePlot {
            title: "F <t>".to_string(),
            x_label: "t".to_string(),
            y_label: "F".to_string(),
            x_scale: Scale::Log,
            y_scale: Scale::Log,
            series: vec![Series {
                label: "a".to_string(),
                points: (0..20).map(|t| (t as f64, (t * t) as f64)).collect(),
                style: Style::Line,
            }],
            notes: vec!["alpha = 2".to_string()],
        };
        let a = plot.render(&manifest());
        assert_eq!(a, plot.render(&manifest()));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("F &lt;t&gt;"));
        assert!(a.contains("<polyline"));
        assert!(a.contains("config_sha256"));
    }

    #[test]
    fn heatmap_draws_nonzero_cells_only() {
        let h = Heatmap {
            title: "p".to_string(),
            values: vec![vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5]],
            steps: 1,
        };
        let svg = h.render(&manifest());
        assert_eq!(svg.matches("height=\"185.05\"").count(), 3);
    }

    #[test]
    fn linear_ticks_are_round() {
        let t = ticks(0.0, 100.0, Scale::Linear);
        let labels: Vec<&str> = t.iter().map(|(_, l)| l.as_str()).collect();
        assert_eq!(labels, ["0", "20", "40", "60", "80", "100"]);
        let t = ticks(0.0, 2.0, Scale::Log);
        assert_eq!(t.len(), 3);
    }
}
