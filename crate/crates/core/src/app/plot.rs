//! Minimal static SVG line plots with a logarithmic y axis.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stroke {
    Solid,
    Dashed,
    Dotted,
    Markers,
}

#[derive(Debug, Clone)]
pub struct Series<'a> {
    pub name: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub color: &'a str,
    pub stroke: Stroke,
}

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
    #[error("series `{0}` has mismatched x and y lengths")]
    Length(String),
}

const W: f64 = 800.0;
const H: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Renders the series on shared axes. Non-positive y values are skipped.
pub fn log_y_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<String, PlotError> {
    let mut x_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y_range = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        if s.x.len() != s.y.len() {
            return Err(PlotError::Length(s.name.to_string()));
        }
        for (&x, &y) in s.x.iter().zip(s.y) {
            if x.is_finite() && y.is_finite() && y > 0.0 {
                x_range = (x_range.0.min(x), x_range.1.max(x));
                y_range = (y_range.0.min(y), y_range.1.max(y));
            }
        }
    }
    if !(x_range.0 <= x_range.1) {
        return Err(PlotError::Empty);
    }
    if x_range.0 == x_range.1 {
        x_range = (x_range.0 - 0.5, x_range.1 + 0.5);
    }
    let decades = (y_range.0.log10().floor(), y_range.1.log10().ceil().max(y_range.0.log10().floor() + 1.0));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_range.0) / (x_range.1 - x_range.0) * pw;
    let py = |y: f64| TOP + (decades.1 - y.log10()) / (decades.1 - decades.0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);

    for d in decades.0 as i32..=decades.1 as i32 {
        let y = py(10f64.powi(d));
        let _ = writeln!(svg, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#, LEFT - 6.0, y + 4.0);
    }
    for i in 0..=5 {
        let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / 5.0;
        let sx = px(x);
        let _ = writeln!(svg, r##"<line x1="{sx:.2}" y1="{TOP}" x2="{sx:.2}" y2="{:.2}" stroke="#ddd"/>"##, TOP + ph);
        let _ = writeln!(svg, r#"<text x="{sx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, tick(x));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 15.0, escape(x_label));
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s
            .x
            .iter()
            .zip(s.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite() && **y > 0.0)
            .map(|(&x, &y)| (px(x), py(y)))
            .collect();
        if s.stroke == Stroke::Markers {
            for (x, y) in &pts {
                let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="{}"/>"#, s.color);
            }
        } else {
            let dash = match s.stroke {
                Stroke::Dashed => r#" stroke-dasharray="8 4""#,
                Stroke::Dotted => r#" stroke-dasharray="2 3""#,
                _ => "",
            };
            let mut d = String::new();
            for (i, (x, y)) in pts.iter().enumerate() {
                let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
            }
            let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.4"{dash}/>"#, d.trim_end(), s.color);
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/>"#, lx + 24.0, s.color);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(s.name));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_and_rejects_empty() {
        let x = [1.0, 2.0, 3.0];
        let y = [1e-18, 1e-19, 2e-18];
        let s = Series { name: "a<b", x: &x, y: &y, color: "red", stroke: Stroke::Dashed };
        let svg = log_y_plot("t", "f", "asd", &[s]).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("a&lt;b") && svg.contains("stroke-dasharray"));
        let z = [0.0, 0.0, 0.0];
        let s = Series { name: "z", x: &x, y: &z, color: "red", stroke: Stroke::Solid };
        assert!(matches!(log_y_plot("t", "f", "asd", &[s]), Err(PlotError::Empty)));
    }
}
