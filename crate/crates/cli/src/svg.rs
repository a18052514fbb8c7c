//! Minimal deterministic SVG line charts: no display dependency, plain text
//! output that can be diffed and parsed.

use std::fmt::Write as _;
use std::path::Path;

use cogcap_core::{Error, Result};

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    /// Fitted log-log slope, drawn as an annotation on scaling plots.
    pub slope_annotation: Option<f64>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 50.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn axis_value(v: f64, log: bool) -> Result<f64> {
    if log {
        if v <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "log axis needs positive values, got {v}"
            )));
        }
        Ok(v.log10())
    } else {
        Ok(v)
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let t = s.trim_end_matches('0').trim_end_matches('.');
        t.to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Render the series as a standalone SVG line chart.
pub fn emit_plot(series: &[Series], spec: &PlotSpec, path: &Path) -> Result<()> {
    if series.is_empty() {
        return Err(Error::InvalidParameter("plot needs at least one series".into()));
    }
    for s in series {
        if s.points.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "series {:?} needs at least 2 points",
                s.label
            )));
        }
        if s.points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "series {:?} contains non-finite points",
                s.label
            )));
        }
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            xs.push(axis_value(x, spec.log_x)?);
            ys.push(axis_value(y, spec.log_y)?);
        }
    }
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut y_min = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut y_max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if x_max <= x_min {
        return Err(Error::InvalidParameter("degenerate x range".into()));
    }
    if y_max <= y_min {
        // flat series: pad the range so the line sits mid-plot
        let pad = if y_min == 0.0 { 1.0 } else { y_min.abs() * 0.1 };
        y_min -= pad;
        y_max += pad;
    }

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |v: f64| MARGIN_L + (v - x_min) / (x_max - x_min) * plot_w;
    let sy = move |v: f64| MARGIN_T + plot_h - (v - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(svg, "  <desc>cogcap v{} line chart</desc>", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(svg, r#"  <rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"  <text x="{}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        xml_escape(&spec.title)
    )
    .unwrap();

    // axes
    writeln!(
        svg,
        r#"  <line x1="{MARGIN_L}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        MARGIN_T + plot_h,
        MARGIN_L + plot_w,
        MARGIN_T + plot_h
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{}" stroke="black"/>"#,
        MARGIN_T + plot_h
    )
    .unwrap();

    // ticks: 5 per axis, labels in data units
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let label_x = if spec.log_x { 10f64.powf(fx) } else { fx };
        let px = sx(fx);
        writeln!(
            svg,
            r#"  <line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/>"#,
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"  <text x="{px:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            MARGIN_T + plot_h + 20.0,
            fmt_tick(label_x)
        )
        .unwrap();

        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let label_y = if spec.log_y { 10f64.powf(fy) } else { fy };
        let py = sy(fy);
        writeln!(
            svg,
            r#"  <line x1="{}" y1="{py:.2}" x2="{MARGIN_L}" y2="{py:.2}" stroke="black"/>"#,
            MARGIN_L - 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"  <text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN_L - 9.0,
            py + 4.0,
            fmt_tick(label_y)
        )
        .unwrap();
    }

    // axis labels
    writeln!(
        svg,
        r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 14.0,
        xml_escape(&spec.x_label)
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <text x="20" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        xml_escape(&spec.y_label)
    )
    .unwrap();

    // series
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for &(x, y) in &s.points {
            let px = sx(axis_value(x, spec.log_x)?);
            let py = sy(axis_value(y, spec.log_y)?);
            write!(pts, "{px:.2},{py:.2} ").unwrap();
        }
        writeln!(
            svg,
            r#"  <polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.trim_end()
        )
        .unwrap();
        let ly = MARGIN_T + 16.0 + 18.0 * i as f64;
        writeln!(
            svg,
            r#"  <line x1="{}" y1="{ly:.2}" x2="{}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            MARGIN_L + plot_w + 10.0,
            MARGIN_L + plot_w + 34.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"  <text x="{}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            MARGIN_L + plot_w + 40.0,
            ly + 4.0,
            xml_escape(&s.label)
        )
        .unwrap();
    }

    if let Some(slope) = spec.slope_annotation {
        writeln!(
            svg,
            r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="13">slope = {slope:.2}</text>"#,
            MARGIN_L + 12.0,
            MARGIN_T + 18.0
        )
        .unwrap();
    }

    writeln!(svg, "</svg>").unwrap();
    std::fs::write(path, svg)
        .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tiny well-formedness check used by the test suite: tags balance and the
/// document has a single svg root.
pub fn looks_like_xml(text: &str) -> bool {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text.trim();
    if !rest.starts_with("<svg") {
        return false;
    }
    while let Some(open) = rest.find('<') {
        let Some(close_rel) = rest[open..].find('>') else { return false };
        let tag = &rest[open + 1..open + close_rel];
        rest = &rest[open + close_rel + 1..];
        if tag.starts_with('!') || tag.starts_with('?') || tag.ends_with('/') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            match stack.pop() {
                Some(top) if top == name => {}
                _ => return false,
            }
        } else {
            let name = tag.split_whitespace().next().unwrap_or("");
            stack.push(name.to_string());
        }
    }
    stack.is_empty()
}
