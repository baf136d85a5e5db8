//! SVG line charts of trace files: one mean curve per optimizer with a
//! shaded band of one standard deviation over seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::experiment::mean_std;
use crate::trace::{parse_trace_file_name, write_atomic, CsvTable};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    /// Trace column on the y axis.
    pub metric: String,
    pub title: Option<String>,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            metric: "p_x".into(),
            title: None,
            width: 800,
            height: 500,
        }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

/// Mean and spread of one optimizer's metric at each iteration where every
/// seed reports a finite value.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub optimizer: String,
    pub seeds: usize,
    /// `(iter, mean, std)`.
    pub points: Vec<(f64, f64, f64)>,
}

/// Trace files of `dir`, sorted by name.
pub fn trace_files(dir: &Path) -> Result<Vec<(String, u64, PathBuf)>> {
    let io = |source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut found = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_string();
        if let Some((opt, seed)) = parse_trace_file_name(&name) {
            found.push((name, opt, seed, path));
        }
    }
    found.sort();
    Ok(found
        .into_iter()
        .map(|(_, opt, seed, path)| (opt, seed, path))
        .collect())
}

/// Reads every trace in `dir` and aggregates `metric` per optimizer.
pub fn load_series(dir: &Path, metric: &str) -> Result<Vec<Series>> {
    let files = trace_files(dir)?;
    if files.is_empty() {
        return Err(HarnessError::Unsupported(format!(
            "no trace_*.csv files in {}",
            dir.display()
        )));
    }
    let mut by_opt: BTreeMap<String, Vec<BTreeMap<usize, f64>>> = BTreeMap::new();
    for (opt, _, path) in &files {
        let table = CsvTable::read(path)?;
        let iter = table.column("iter")?;
        let col = table.column(metric)?;
        let mut values = BTreeMap::new();
        for row in 0..table.rows.len() {
            if let Some(v) = table.opt_f64(row, col)? {
                values.insert(table.usize(row, iter)?, v);
            }
        }
        by_opt.entry(opt.clone()).or_default().push(values);
    }
    Ok(by_opt
        .into_iter()
        .map(|(optimizer, runs)| {
            let points = runs[0]
                .keys()
                .filter_map(|&i| {
                    let vals: Option<Vec<f64>> = runs.iter().map(|r| r.get(&i).copied()).collect();
                    let vals = vals.filter(|v| v.iter().all(|x| x.is_finite()))?;
                    let (m, s) = mean_std(&vals);
                    Some((i as f64, m, s))
                })
                .collect();
            Series {
                optimizer,
                seeds: runs.len(),
                points,
            }
        })
        .collect())
}

/// Renders `series` as a standalone SVG document.
pub fn render_svg(series: &[Series], spec: &PlotSpec) -> String {
    let (w, h) = (spec.width as f64, spec.height as f64);
    let pw = w - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = h - MARGIN_TOP - MARGIN_BOTTOM;
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, m, s) in all {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(m - s);
        y_hi = y_hi.max(m + s);
    }
    if !x_lo.is_finite() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x_ticks, x_lo, x_hi) = nice_ticks(x_lo, x_hi);
    let (y_ticks, y_lo, y_hi) = nice_ticks(y_lo, y_hi);
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    if let Some(title) = &spec.title {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            w / 2.0,
            escape(title)
        );
    }
    let _ = writeln!(out, r##"<g stroke="#dddddd" stroke-width="1">"##);
    for &t in &x_ticks {
        let _ = writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}"/>"#,
            sx(t),
            MARGIN_TOP,
            MARGIN_TOP + ph
        );
    }
    for &t in &y_ticks {
        let _ = writeln!(
            out,
            r#"<line x1="{1:.2}" y1="{0:.2}" x2="{2:.2}" y2="{0:.2}"/>"#,
            sy(t),
            MARGIN_LEFT,
            MARGIN_LEFT + pw
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for &t in &x_ticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(t),
            MARGIN_TOP + ph + 18.0,
            tick_label(t)
        );
    }
    for &t in &y_ticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(t) + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        MARGIN_LEFT + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0:.2}" text-anchor="middle" transform="rotate(-90 16 {0:.2})">{1}</text>"#,
        MARGIN_TOP + ph / 2.0,
        escape(&spec.metric)
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if s.points.is_empty() {
            continue;
        }
        let upper = s
            .points
            .iter()
            .map(|&(x, m, d)| format!("{:.2},{:.2}", sx(x), sy(m + d)));
        let lower = s
            .points
            .iter()
            .rev()
            .map(|&(x, m, d)| format!("{:.2},{:.2}", sx(x), sy(m - d)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = s
            .points
            .iter()
            .map(|&(x, m, _)| format!("{:.2},{:.2}", sx(x), sy(m)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        );
    }

    let lx = MARGIN_LEFT + pw - 150.0;
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let ly = MARGIN_TOP + 16.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{} ({} seed{})</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&s.optimizer),
            s.seeds,
            if s.seeds == 1 { "" } else { "s" }
        );
    }
    out.push_str("</svg>\n");
    out
}

/// About five evenly spaced round ticks covering `[lo, hi]`, with the
/// widened range they span.
fn nice_ticks(lo: f64, hi: f64) -> (Vec<f64>, f64, f64) {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5 * lo.abs().max(1.0), hi + 0.5 * hi.abs().max(1.0))
    };
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).floor();
    let end = (hi / step).ceil();
    let ticks = (0..=(end - start) as i64)
        .map(|k| (start + k as f64) * step)
        .collect();
    (ticks, start * step, end * step)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Plots `spec.metric` from every trace in `in_dir` into `out_file`.
pub fn emit_plot(in_dir: &Path, out_file: &Path, spec: &PlotSpec) -> Result<Vec<Series>> {
    let series = load_series(in_dir, &spec.metric)?;
    write_atomic(out_file, render_svg(&series, spec).as_bytes())?;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_cover_range() {
        let (t, lo, hi) = nice_ticks(0.0, 1999.0);
        assert_eq!(lo, 0.0);
        assert!(hi >= 1999.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        let (t, lo, hi) = nice_ticks(3.0, 3.0);
        assert!(lo < 3.0 && hi > 3.0 && t.len() >= 2);
    }

    #[test]
    fn labels() {
        assert_eq!(tick_label(0.25), "0.25");
        assert_eq!(tick_label(2000.0), "2000");
        assert_eq!(tick_label(1e-6), "1.00e-6");
    }
}
