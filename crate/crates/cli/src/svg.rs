//! Minimal self-contained SVG line/scatter plots.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub label: String,
    pub scale: Scale,
    pub min: f64,
    pub max: f64,
}

impl Axis {
    /// An axis spanning the finite (and, for log scales, positive) values,
    /// with a little padding.
    pub fn fit<'a>(label: &str, scale: Scale, values: impl IntoIterator<Item = &'a f64>) -> Self {
        let usable = values
            .into_iter()
            .copied()
            .filter(|v| v.is_finite() && (scale == Scale::Linear || *v > 0.0));
        let (lo, hi) = usable.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let (min, max) = match scale {
            _ if !lo.is_finite() => match scale {
                Scale::Linear => (0.0, 1.0),
                Scale::Log => (1.0, 10.0),
            },
            Scale::Linear => {
                let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
                (lo - 0.05 * span, hi + 0.05 * span)
            }
            Scale::Log => {
                let (l, h) = (lo.log10(), hi.log10());
                let pad = ((h - l) * 0.08).max(0.1);
                (10f64.powf(l - pad), 10f64.powf(h + pad))
            }
        };
        Self {
            label: label.to_owned(),
            scale,
            min,
            max,
        }
    }

    pub fn with_range(mut self, min: f64, max: f64) -> Self {
        self.min = min;
        self.max = max;
        self
    }

    fn unit(&self, v: f64) -> Option<f64> {
        let u = match self.scale {
            Scale::Linear => (v - self.min) / (self.max - self.min),
            Scale::Log if v > 0.0 => (v.log10() - self.min.log10()) / (self.max.log10() - self.min.log10()),
            Scale::Log => return None,
        };
        u.is_finite().then_some(u)
    }

    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => {
                let span = self.max - self.min;
                let raw = span / 8.0;
                let mag = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 5.0, 10.0]
                    .iter()
                    .map(|m| m * mag)
                    .find(|s| *s >= raw)
                    .unwrap_or(10.0 * mag);
                let first = (self.min / step).ceil() as i64;
                let last = (self.max / step).floor() as i64;
                (first..=last).map(|k| k as f64 * step).collect()
            }
            Scale::Log => {
                let (l, h) = (self.min.log10().floor() as i32, self.max.log10().ceil() as i32);
                let mantissas: &[f64] = if h - l <= 2 { &[1.0, 2.0, 5.0] } else { &[1.0] };
                (l..=h)
                    .flat_map(|e| mantissas.iter().map(move |m| m * 10f64.powi(e)))
                    .filter(|v| *v >= self.min && *v <= self.max)
                    .collect()
            }
        }
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        format!("{v:.0e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Line,
    Dashed,
    Dots,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub mark: Mark,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Symmetric vertical error bars for `Mark::Dots`.
    pub errors: Option<Vec<f64>>,
}

impl Series {
    pub fn new(label: &str, color: &'static str, mark: Mark, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self {
            label: label.to_owned(),
            color,
            mark,
            xs,
            ys,
            errors: None,
        }
    }

    pub fn with_errors(mut self, errors: Vec<f64>) -> Self {
        self.errors = Some(errors);
        self
    }
}

/// A vertical or horizontal reference line.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub at: f64,
    pub color: &'static str,
    pub dashed: bool,
    pub vertical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x: Axis,
    pub y: Axis,
    pub series: Vec<Series>,
    pub rules: Vec<Rule>,
}

impl Panel {
    pub fn new(title: &str, x: Axis, y: Axis) -> Self {
        Self {
            title: title.to_owned(),
            x,
            y,
            series: Vec::new(),
            rules: Vec::new(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 380.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;

/// Renders panels side by side into one SVG document.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_H}" viewBox="0 0 {width} {PANEL_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, i as f64 * PANEL_W);
    }
    out.push_str("</svg>\n");
    out
}

fn render_panel(out: &mut String, p: &Panel, x0: f64) {
    let (pl, pr) = (x0 + LEFT, x0 + PANEL_W - RIGHT);
    let (pt, pb) = (TOP, PANEL_H - BOTTOM);
    let px = |v: f64| p.x.unit(v).map(|u| pl + u * (pr - pl));
    let py = |v: f64| p.y.unit(v).map(|u| pb - u * (pb - pt));
    let inside = |x: f64, y: f64| x >= pl - 0.5 && x <= pr + 0.5 && y >= pt - 0.5 && y <= pb + 0.5;

    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        (pl + pr) / 2.0,
        escape(&p.title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{pl:.2}" y="{pt:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        pr - pl,
        pb - pt
    );
    for t in p.x.ticks() {
        if let Some(x) = px(t) {
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{pb:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                pb + 5.0,
                pb + 18.0,
                tick_label(t)
            );
        }
    }
    for t in p.y.ticks() {
        if let Some(y) = py(t) {
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{pl:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                pl - 5.0,
                pl - 8.0,
                y + 4.0,
                tick_label(t)
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (pl + pr) / 2.0,
        PANEL_H - 14.0,
        escape(&p.x.label)
    );
    let (lx, ly) = (x0 + 18.0, (pt + pb) / 2.0);
    let _ = writeln!(
        out,
        r#"<text x="{lx:.2}" y="{ly:.2}" text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"#,
        escape(&p.y.label)
    );

    for r in &p.rules {
        let dash = if r.dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let line = if r.vertical {
            px(r.at).map(|x| (x, pt, x, pb))
        } else {
            py(r.at).map(|y| (pl, y, pr, y))
        };
        if let Some((a, b, c, d)) = line {
            if inside(a, b) && inside(c, d) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{a:.2}" y1="{b:.2}" x2="{c:.2}" y2="{d:.2}" stroke="{}" stroke-width="0.8"{dash}/>"#,
                    r.color
                );
            }
        }
    }

    for s in &p.series {
        let pts: Vec<(usize, f64, f64)> = s
            .xs
            .iter()
            .zip(&s.ys)
            .enumerate()
            .filter_map(|(i, (&x, &y))| Some((i, px(x)?, py(y)?)))
            .filter(|&(_, x, y)| inside(x, y))
            .collect();
        match s.mark {
            Mark::Line | Mark::Dashed => {
                if pts.len() >= 2 {
                    let path: Vec<String> = pts.iter().map(|(_, x, y)| format!("{x:.2},{y:.2}")).collect();
                    let dash = if s.mark == Mark::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                        path.join(" "),
                        s.color
                    );
                }
            }
            Mark::Dots => {
                for &(i, x, y) in &pts {
                    if let Some(e) = s.errors.as_ref().and_then(|e| e.get(i)).filter(|e| e.is_finite()) {
                        let top = py(s.ys[i] + e).unwrap_or(pt).clamp(pt, pb);
                        let bottom = py(s.ys[i] - e).unwrap_or(pb).clamp(pt, pb);
                        let _ = writeln!(
                            out,
                            r#"<line x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{bottom:.2}" stroke="{}"/>"#,
                            s.color
                        );
                    }
                    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{}"/>"#, s.color);
                }
            }
        }
    }

    let legend: Vec<&Series> = p.series.iter().filter(|s| !s.label.is_empty()).collect();
    for (k, s) in legend.iter().enumerate() {
        let y = pt + 14.0 + 16.0 * k as f64;
        let x = pr - 150.0;
        let swatch = match s.mark {
            Mark::Dots => format!(r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{}"/>"#, x + 9.0, y - 4.0, s.color),
            Mark::Line | Mark::Dashed => format!(
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="1.5"{}/>"#,
                y - 4.0,
                x + 18.0,
                y - 4.0,
                s.color,
                if s.mark == Mark::Dashed { r#" stroke-dasharray="6 4""# } else { "" }
            ),
        };
        let _ = writeln!(
            out,
            r#"{swatch}<text x="{:.2}" y="{y:.2}">{}</text>"#,
            x + 24.0,
            escape(&s.label)
        );
    }
}
