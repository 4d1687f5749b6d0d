//! Minimal deterministic SVG figures.
//!
//! Every coordinate is written with two decimals and there is no timestamp,
//! so identical inputs give identical files. The only `rect` elements are
//! data rectangles.

use std::fmt::Write as _;

use ivf_core::{CenterRadius, Error, IntervalFrame, Result};

const MARGIN_FRACTION: f64 = 0.05;

/// Linear map from a data range (padded by 5% per side) to pixels.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(min: f64, max: f64, px_lo: f64, px_hi: f64) -> Self {
        let span = max - min;
        let pad = if span > 0.0 {
            MARGIN_FRACTION * span
        } else {
            0.5 * min.abs().max(1.0)
        };
        Axis {
            lo: min - pad,
            hi: max + pad,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..5).map(|i| self.lo + (self.hi - self.lo) * i as f64 / 4.0).collect()
    }
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> Result<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo.is_finite() && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(Error::EmptySample("nothing to plot".into()))
    }
}

struct Panel {
    x: Axis,
    y: Axis,
}

impl Panel {
    fn frame(&self, out: &mut String, x_label: &str, y_label: &str, title: Option<&str>) {
        let (x0, x1) = (self.x.px_lo, self.x.px_hi);
        let (y0, y1) = (self.y.px_lo, self.y.px_hi);
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#
        );
        for t in self.x.ticks() {
            let px = self.x.map(t);
            let _ = writeln!(
                out,
                r#"<text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                y0 + 16.0,
                label(t)
            );
        }
        for t in self.y.ticks() {
            let py = self.y.map(t);
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                x0 - 6.0,
                py + 4.0,
                label(t)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
            0.5 * (x0 + x1),
            y0 + 36.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            x0 - 44.0,
            0.5 * (y0 + y1),
            x0 - 44.0,
            0.5 * (y0 + y1),
            escape(y_label)
        );
        if let Some(t) = title {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
                0.5 * (x0 + x1),
                y1 - 6.0,
                escape(t)
            );
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(w: u32, h: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    )
}

/// Observation rectangles: predictor `x` span horizontally, response span
/// vertically, with a dot at each center.
pub fn rectangles(frame: &IntervalFrame, x: usize) -> Result<String> {
    let xs = frame.predictor(x);
    let ys = frame.response();
    let span = |c: &CenterRadius| {
        let (a, b) = (c.lower(), c.upper());
        (a.min(b), a.max(b))
    };
    let (x_lo, x_hi) = bounds(xs.iter().flat_map(|c| [c.lower(), c.upper()]))?;
    let (y_lo, y_hi) = bounds(ys.iter().flat_map(|c| [c.lower(), c.upper()]))?;
    let panel = Panel {
        x: Axis::new(x_lo, x_hi, 70.0, 620.0),
        y: Axis::new(y_lo, y_hi, 420.0, 20.0),
    };
    let mut out = header(640, 480);
    panel.frame(&mut out, &frame.predictor_names()[x], frame.response_name(), None);
    let _ = writeln!(out, r##"<g fill="#bdbdbd" fill-opacity="0.5" stroke="#636363" stroke-width="0.5">"##);
    for (cx, cy) in xs.iter().zip(ys) {
        let (xa, xb) = span(cx);
        let (ya, yb) = span(cy);
        let (px0, px1) = (panel.x.map(xa), panel.x.map(xb));
        let (py0, py1) = (panel.y.map(yb), panel.y.map(ya));
        let _ = writeln!(
            out,
            r#"<rect x="{px0:.2}" y="{py0:.2}" width="{:.2}" height="{:.2}"/>"#,
            px1 - px0,
            py1 - py0
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g fill="#e6b800">"##);
    for (cx, cy) in xs.iter().zip(ys) {
        let _ = writeln!(
            out,
            r#"<circle class="center" cx="{:.2}" cy="{:.2}" r="2"/>"#,
            panel.x.map(cx.center),
            panel.y.map(cy.center)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

fn triangle(px: f64, py: f64) -> String {
    format!(
        r#"<polygon class="predicted" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}"/>"#,
        px,
        py - 3.5,
        px - 3.0,
        py + 2.0,
        px + 3.0,
        py + 2.0
    )
}

/// Side-by-side center and radius panels over the test-row index.
pub fn pred_scatter(truth: &[CenterRadius], pred: &[CenterRadius]) -> Result<String> {
    if truth.len() != pred.len() {
        return Err(Error::Dimension {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptySample("nothing to plot".into()));
    }
    let n = truth.len();
    let mut out = header(960, 420);
    let parts: [(&str, fn(&CenterRadius) -> f64, f64); 2] =
        [("center", |c| c.center, 70.0), ("radius", |c| c.radius, 550.0)];
    for (name, get, left) in parts {
        let (lo, hi) = bounds(truth.iter().chain(pred).map(get))?;
        let panel = Panel {
            x: Axis::new(0.0, (n - 1) as f64, left, left + 380.0),
            y: Axis::new(lo, hi, 360.0, 30.0),
        };
        panel.frame(&mut out, "test row", name, Some(name));
        let _ = writeln!(out, r#"<g fill="none" stroke="black" stroke-width="0.8">"#);
        for (i, t) in truth.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<circle class="observed" cx="{:.2}" cy="{:.2}" r="2.5"/>"#,
                panel.x.map(i as f64),
                panel.y.map(get(t))
            );
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(out, r#"<g fill="red">"#);
        for (i, p) in pred.iter().enumerate() {
            let _ = writeln!(out, "{}", triangle(panel.x.map(i as f64), panel.y.map(get(p))));
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
