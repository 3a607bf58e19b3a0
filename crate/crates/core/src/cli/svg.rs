//! Minimal self-contained SVG 1.1 plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// `(rate, intercept)` of `ln y = intercept + rate ln x`.
    pub fit: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptyPlot;

impl std::fmt::Display for EmptyPlot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("nothing to plot: no series with data")
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        (WIDTH - RIGHT + LEFT) / 2.0,
        escape(title)
    )
    .unwrap();
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, xlabel: &str, ylabel: &str) {
    let (l, r) = (LEFT, WIDTH - RIGHT);
    let (t, b) = (TOP, HEIGHT - BOTTOM);
    writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 15.0,
        escape(xlabel)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    )
    .unwrap();
}

fn tick_x(out: &mut String, frame: &Frame, v: f64, label: &str) {
    let x = frame.px(v);
    let b = HEIGHT - BOTTOM;
    writeln!(
        out,
        r#"<line x1="{x:.1}" y1="{b}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
        b + 5.0,
        b + 20.0
    )
    .unwrap();
}

fn tick_y(out: &mut String, frame: &Frame, v: f64, label: &str) {
    let y = frame.py(v);
    writeln!(
        out,
        r#"<line x1="{:.1}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#,
        LEFT - 5.0,
        LEFT - 8.0,
        y + 4.0
    )
    .unwrap();
}

fn legend(out: &mut String, labels: &[(String, &str)]) {
    let x = WIDTH - RIGHT + 15.0;
    for (i, (label, color)) in labels.iter().enumerate() {
        let y = TOP + 15.0 + 20.0 * i as f64;
        writeln!(
            out,
            r#"<line x1="{x}" y1="{y}" x2="{:.1}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 20.0,
            x + 26.0,
            y + 4.0,
            escape(label)
        )
        .unwrap();
    }
}

fn decade_label(e: i32) -> String {
    format!("1e{e}")
}

/// Log-log scatter with optional fitted lines and a legend.
pub fn loglog_scatter(title: &str, xlabel: &str, ylabel: &str, series: &[ScatterSeries]) -> Result<String, EmptyPlot> {
    let positive: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .collect();
    if positive.is_empty() {
        return Err(EmptyPlot);
    }
    let lx: Vec<f64> = positive.iter().map(|p| p.0.log10()).collect();
    let ly: Vec<f64> = positive.iter().map(|p| p.1.log10()).collect();
    let fold = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let (xmin, xmax) = fold(&lx);
    let (ymin, ymax) = fold(&ly);
    let frame = Frame {
        x0: (xmin - 0.1).floor().min(xmin - 0.1),
        x1: (xmax + 0.1).ceil().max(xmax + 0.1),
        y0: (ymin - 0.1).floor(),
        y1: (ymax + 0.1).ceil(),
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, xlabel, ylabel);
    for e in frame.x0.ceil() as i32..=frame.x1.floor() as i32 {
        tick_x(&mut out, &frame, e as f64, &decade_label(e));
    }
    for e in frame.y0.ceil() as i32..=frame.y1.floor() as i32 {
        tick_y(&mut out, &frame, e as f64, &decade_label(e));
    }
    let mut labels = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for &(x, y) in s.points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0) {
            writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                frame.px(x.log10()),
                frame.py(y.log10())
            )
            .unwrap();
        }
        let mut label = s.label.clone();
        if let Some((rate, intercept)) = s.fit {
            let xs: Vec<f64> = s.points.iter().filter(|p| p.0 > 0.0).map(|p| p.0.log10()).collect();
            let (a, b) = fold(&xs);
            let line_y = |lx: f64| (intercept + rate * lx * std::f64::consts::LN_10) / std::f64::consts::LN_10;
            writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="6 3"/>"#,
                frame.px(a),
                frame.py(line_y(a)),
                frame.px(b),
                frame.py(line_y(b))
            )
            .unwrap();
            label = format!("{label} (rate {rate:.2})");
        }
        labels.push((label, color));
    }
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Linear plot of one polyline per series.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[LineSeries]) -> Result<String, EmptyPlot> {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if all.is_empty() {
        return Err(EmptyPlot);
    }
    let fold = |it: &mut dyn Iterator<Item = f64>| it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (xmin, xmax) = fold(&mut all.iter().map(|p| p.0));
    let (mut ymin, mut ymax) = fold(&mut all.iter().map(|p| p.1));
    if ymax - ymin < 1e-300 {
        ymin -= 1.0;
        ymax += 1.0;
    }
    let pad = 0.05 * (ymax - ymin);
    let frame = Frame {
        x0: xmin,
        x1: if xmax > xmin { xmax } else { xmin + 1.0 },
        y0: ymin - pad,
        y1: ymax + pad,
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, xlabel, ylabel);
    for i in 0..=4 {
        let v = frame.x0 + (frame.x1 - frame.x0) * i as f64 / 4.0;
        tick_x(&mut out, &frame, v, &format!("{v:.3}"));
        let w = frame.y0 + (frame.y1 - frame.y0) * i as f64 / 4.0;
        tick_y(&mut out, &frame, w, &format!("{w:.3e}"));
    }
    let mut labels = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts = String::new();
        for &(x, y) in &s.points {
            write!(pts, "{:.2},{:.2} ", frame.px(x), frame.py(y)).unwrap();
        }
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.trim_end()
        )
        .unwrap();
        labels.push((s.label.clone(), color));
    }
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_series_with_fits() {
        let mk = |label: &str, rate: f64| ScatterSeries {
            label: label.into(),
            points: (3..7).map(|k| {
                let e = 0.5f64.powi(k);
                (e, e.powf(rate))
            }).collect(),
            fit: Some((rate, 0.0)),
        };
        let svg = loglog_scatter("rates", "eps", "error", &[mk("raw", 1.0), mk("corrected", 2.0)]).unwrap();
        assert_eq!(svg.matches("<circle").count(), 8);
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert!(svg.contains("raw (rate 1.00)") && svg.contains("corrected (rate 2.00)"));
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(loglog_scatter("t", "x", "y", &[]), Err(EmptyPlot));
        let zeros = ScatterSeries {
            label: "exact".into(),
            points: vec![(0.1, 0.0)],
            fit: None,
        };
        assert_eq!(loglog_scatter("t", "x", "y", &[zeros]), Err(EmptyPlot));
        assert_eq!(line_plot("t", "x", "y", &[]), Err(EmptyPlot));
    }

    #[test]
    fn overlay_has_one_polyline_per_series() {
        let s = |label: &str, k: f64| LineSeries {
            label: label.into(),
            points: (0..=10).map(|i| (i as f64 / 10.0, k * i as f64)).collect(),
        };
        let svg = line_plot("solutions", "x", "u", &[s("u_eps", 1.0), s("u_hom", 2.0), s("average", 3.0)]).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
    }
}
