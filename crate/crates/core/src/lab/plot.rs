//! Minimal SVG line charts.
//!
//! A chart is a set of named series over a shared x axis, drawn as polylines
//! inside a 720×440 canvas with five ticks per axis and a legend.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::thresholds::{alpha_k, h_k, zeta_choice};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Vertical guide lines, such as the kink at `α_k`.
    pub markers: Vec<(f64, String)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        (lo - pad, hi + pad)
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

impl Chart {
    /// Renders the chart; errors when there is nothing finite to draw.
    pub fn to_svg(&self) -> Result<String> {
        let finite: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if finite.is_empty() {
            return Err(invalid("chart has no finite points"));
        }
        let fold = |f: fn(&(f64, f64)) -> f64| {
            finite.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (x0, x1) = {
            let (lo, hi) = fold(|p| p.0);
            span(lo, hi)
        };
        let (y0, y1) = {
            let (lo, hi) = fold(|p| p.1);
            span(lo, hi)
        };
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let fx = x0 + (x1 - x0) * i as f64 / 4.0;
            let fy = y0 + (y1 - y0) * i as f64 / 4.0;
            let (px, py) = (sx(fx), sy(fy));
            let _ = writeln!(
                svg,
                r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 20.0,
                tick(fx)
            );
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                py + 4.0,
                tick(fy)
            );
        }
        if y0 < 0.0 && y1 > 0.0 {
            let z = sy(0.0);
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{z:.2}" x2="{}" y2="{z:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
                LEFT + pw
            );
        }
        for (x, label) in &self.markers {
            if *x >= x0 && *x <= x1 {
                let px = sx(*x);
                let _ = writeln!(
                    svg,
                    r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{}" stroke="#999" stroke-dasharray="2 3"/><text x="{px:.2}" y="{}" text-anchor="middle" fill="#555">{}</text>"##,
                    TOP + ph,
                    TOP - 4.0,
                    escape(label)
                );
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline class="series" data-name="{}" fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
                escape(&s.name),
                pts.join(" ")
            );
            let ly = TOP + 12.0 + 18.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

/// Which columns of a campaign CSV to draw.
fn columns_for(header: &[String]) -> (String, Vec<String>, String) {
    let has = |c: &str| header.iter().any(|h| h == c);
    let pick = |cols: &[&str]| cols.iter().filter(|c| has(c)).map(|c| c.to_string()).collect::<Vec<_>>();
    if has("alpha") {
        let ys = header.iter().filter(|h| h.as_str() != "alpha").cloned().collect();
        ("alpha".into(), ys, "H_k".into())
    } else if has("offset") {
        ("m".into(), pick(&["sat_fraction", "unsat_fraction", "envelope"]), "fraction".into())
    } else if has("sat_fraction") {
        ("c".into(), pick(&["sat_fraction", "core_vars_frac", "core_eqs_frac"]), "fraction".into())
    } else if has("mean_x") {
        ("m".into(), pick(&["mean_x", "mean_nullity", "zero_fraction"]), "value".into())
    } else if has("predicted_vars_frac") {
        let ys = pick(&["mean_vars_frac", "predicted_vars_frac", "mean_eqs_frac", "predicted_eqs_frac"]);
        ("c".into(), ys, "fraction of n".into())
    } else if has("gamma") {
        ("m".into(), pick(&["mean", "gamma", "accept_rate", "exp_neg_gamma"]), "value".into())
    } else {
        let x = header.first().cloned().unwrap_or_default();
        (x.clone(), header.iter().skip(1).cloned().collect(), "value".into())
    }
}

/// Chart of a campaign CSV, choosing axes from its header.
pub fn chart_from_csv(text: &str, title: &str) -> Result<Chart> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let records: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
    if header.is_empty() || records.is_empty() {
        return Err(Error::Malformed("CSV has no data rows".into()));
    }
    let (x, ys, y_label) = columns_for(&header);
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Malformed(format!("missing column {name}")))
    };
    let xi = col(&x)?;
    let parse = |r: &csv::StringRecord, i: usize| -> Result<f64> {
        let cell = r.get(i).unwrap_or("");
        match cell {
            "" => Ok(f64::NAN),
            "true" => Ok(1.0),
            "false" => Ok(0.0),
            _ => cell.parse().map_err(|_| Error::Malformed(format!("non-numeric cell {cell:?}"))),
        }
    };
    let mut series = Vec::new();
    for y in ys {
        let yi = col(&y)?;
        let points = records.iter().map(|r| Ok((parse(r, xi)?, parse(r, yi)?))).collect::<Result<Vec<_>>>()?;
        series.push(Series { name: y, points });
    }
    if series.is_empty() {
        return Err(Error::Malformed("no plottable columns".into()));
    }
    Ok(Chart {
        title: title.to_string(),
        x_label: x,
        y_label,
        series,
        markers: Vec::new(),
    })
}

/// Reads a campaign CSV and writes an SVG chart. Nothing is written on error.
pub fn emit_plot(csv_path: &Path, out_svg: &Path) -> Result<()> {
    let text = std::fs::read_to_string(csv_path)?;
    let title = csv_path.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment");
    let svg = chart_from_csv(&text, title)?.to_svg()?;
    std::fs::write(out_svg, svg)?;
    Ok(())
}

/// `H_k(α, ζ(α); c)` on `steps + 1` evenly spaced `α` in `[lo, hi]`, one
/// series per `c`.
pub fn h_k_series(k: usize, cs: &[f64], lo: f64, hi: f64, steps: usize) -> Result<Vec<Series>> {
    if !(0.0 < lo && lo < hi && hi < 1.0) || steps == 0 {
        return Err(invalid(format!("need 0 < lo < hi < 1 and steps > 0, got [{lo}, {hi}] steps={steps}")));
    }
    cs.iter()
        .map(|&c| {
            let points = (0..=steps)
                .map(|i| {
                    let a = lo + (hi - lo) * i as f64 / steps as f64;
                    Ok((a, h_k(a, zeta_choice(k, c, a)?, c, k)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Series {
                name: format!("c={c}"),
                points,
            })
        })
        .collect()
}

/// CSV with an `alpha` column and one `H_k` column per `c`.
pub fn h_k_csv(series: &[Series]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["alpha".to_string()];
    header.extend(series.iter().map(|s| s.name.clone()));
    w.write_record(&header)?;
    let rows = series.first().map_or(0, |s| s.points.len());
    for i in 0..rows {
        let mut rec = vec![series[0].points[i].0.to_string()];
        rec.extend(series.iter().map(|s| s.points[i].1.to_string()));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

/// Chart of `H_k` against `α` with a marker at `α_k`.
pub fn h_k_chart(k: usize, cs: &[f64], lo: f64, hi: f64, steps: usize) -> Result<Chart> {
    Ok(Chart {
        title: format!("H_{k}(alpha, zeta; c)"),
        x_label: "alpha".into(),
        y_label: format!("H_{k}"),
        series: h_k_series(k, cs, lo, hi, steps)?,
        markers: vec![(alpha_k(k)?, format!("alpha_{k}"))],
    })
}
