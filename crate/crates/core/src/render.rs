//! PNG heatmaps of CSMs and SVG line charts of metric series.
//!
//! Both outputs are pure functions of their inputs: no timestamps, fixed
//! palette, fixed 6-decimal SVG coordinates.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::csm::{normalized_offdiag, ClassSimilarityMatrix};
use crate::error::{Error, Result};
use crate::palette::VIRIDIS;
use crate::scalar::Real;
use crate::series::MetricSeries;

/// Minimum heatmap width in pixels.
pub const MIN_HEATMAP_WIDTH: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatmapScale {
    /// Raw values; [-1, 1] for network/template kinds, [0, 1] otherwise.
    Raw,
    /// Off-diagonal min-max normalized onto [0, 1].
    Normalized,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    /// Row-major 8-bit RGB.
    pub rgb: Vec<u8>,
}

impl Heatmap {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let k = (y * self.width + x) * 3;
        [self.rgb[k], self.rgb[k + 1], self.rgb[k + 2]]
    }
}

pub fn palette_color(index: u8) -> [u8; 3] {
    VIRIDIS[index as usize]
}

/// Palette index of `v` on the range `[lo, hi]`, clamped at both ends.
pub fn palette_index(v: f64, lo: f64, hi: f64) -> u8 {
    let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    (t * 255.0).round() as u8
}

/// Pixels per matrix cell so that the image is at least 512 pixels wide.
pub fn block_size(n: usize) -> usize {
    MIN_HEATMAP_WIDTH.div_ceil(n.max(1))
}

pub fn heatmap<T: Real>(m: &ClassSimilarityMatrix<T>, scale: HeatmapScale) -> Heatmap {
    let (source, (lo, hi)) = match scale {
        HeatmapScale::Raw => (m.clone(), m.kind().raw_range()),
        HeatmapScale::Normalized => (normalized_offdiag(m), (0.0, 1.0)),
    };
    let n = source.n();
    let k = block_size(n);
    let side = n * k;
    let mut rgb = vec![0u8; side * side * 3];
    for i in 0..n {
        let colors: Vec<[u8; 3]> = (0..n)
            .map(|j| palette_color(palette_index(source.get(i, j).as_f64(), lo, hi)))
            .collect();
        for y in i * k..(i + 1) * k {
            let line = &mut rgb[y * side * 3..(y + 1) * side * 3];
            for (x, px) in line.chunks_exact_mut(3).enumerate() {
                px.copy_from_slice(&colors[x / k]);
            }
        }
    }
    Heatmap {
        width: side,
        height: side,
        rgb,
    }
}

pub fn encode_png(h: &Heatmap) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, h.width as u32, h.height as u32);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().expect("in-memory PNG header");
        writer.write_image_data(&h.rgb).expect("in-memory PNG data");
    }
    out
}

pub fn render_heatmap<T: Real>(
    m: &ClassSimilarityMatrix<T>,
    scale: HeatmapScale,
    out: impl AsRef<Path>,
) -> Result<()> {
    let out = out.as_ref();
    fs::write(out, encode_png(&heatmap(m, scale))).map_err(|e| Error::io(out, e))
}

const CHART_WIDTH: f64 = 800.0;
const CHART_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 230.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

const SERIES_COLORS: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Splits a series' points into runs not interrupted by a gap epoch.
fn runs(series: &MetricSeries) -> Vec<&[(u64, f64)]> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..series.points.len() {
        let (prev, next) = (series.points[k - 1].0, series.points[k].0);
        if series.gaps.iter().any(|&g| g > prev && g < next) {
            out.push(&series.points[start..k]);
            start = k;
        }
    }
    if start < series.points.len() {
        out.push(&series.points[start..]);
    }
    out
}

/// Standalone SVG line chart, one polyline per uninterrupted run of each
/// series, with a legend.
pub fn curves_svg(series: &[MetricSeries]) -> Result<String> {
    if series.is_empty() {
        return Err(Error::Domain("no series to plot".into()));
    }
    if let Some(empty) = series.iter().find(|s| s.points.is_empty()) {
        return Err(Error::Domain(format!(
            "series {} has no points",
            empty.name
        )));
    }
    let (x_lo, x_hi) = extent(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0 as f64)),
    );
    let (y_lo, y_hi) = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let plot_w = CHART_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = CHART_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h;

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CHART_WIDTH}" height="{CHART_HEIGHT}" viewBox="0 0 {CHART_WIDTH} {CHART_HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let (left, right) = (MARGIN_LEFT, MARGIN_LEFT + plot_w);
    let (top, bottom) = (MARGIN_TOP, MARGIN_TOP + plot_h);
    let _ = writeln!(w, r##"<g stroke="#333333" stroke-width="1">"##);
    let _ = writeln!(
        w,
        r#"<line x1="{left:.6}" y1="{bottom:.6}" x2="{right:.6}" y2="{bottom:.6}"/>"#
    );
    let _ = writeln!(
        w,
        r#"<line x1="{left:.6}" y1="{top:.6}" x2="{left:.6}" y2="{bottom:.6}"/>"#
    );
    let _ = writeln!(w, "</g>");

    let _ = writeln!(w, r##"<g fill="#333333">"##);
    for t in 0..TICKS {
        let f = t as f64 / (TICKS - 1) as f64;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let _ = writeln!(
            w,
            r#"<text x="{:.6}" y="{:.6}" text-anchor="middle">{}</text>"#,
            px(xv),
            bottom + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.6}" y="{:.6}" text-anchor="end">{}</text>"#,
            left - 6.0,
            py(yv) + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.6}" y="{:.6}" text-anchor="middle">epoch</text>"#,
        left + plot_w / 2.0,
        bottom + 38.0
    );
    let _ = writeln!(w, "</g>");

    for (k, s) in series.iter().enumerate() {
        let color = SERIES_COLORS[k % SERIES_COLORS.len()];
        let _ = writeln!(w, r#"<g stroke="{color}" fill="none" stroke-width="1.5">"#);
        for run in runs(s) {
            let coords: Vec<String> = run
                .iter()
                .map(|&(e, v)| format!("{:.6},{:.6}", px(e as f64), py(v)))
                .collect();
            let _ = writeln!(w, r#"<polyline points="{}"/>"#, coords.join(" "));
            if run.len() == 1 {
                let (e, v) = run[0];
                let _ = writeln!(
                    w,
                    r#"<circle cx="{:.6}" cy="{:.6}" r="2" fill="{color}"/>"#,
                    px(e as f64),
                    py(v)
                );
            }
        }
        let _ = writeln!(w, "</g>");

        let ly = MARGIN_TOP + 14.0 * k as f64;
        let lx = right + 16.0;
        let _ = writeln!(
            w,
            r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="{color}" stroke-width="2"/>"#,
            lx,
            ly,
            lx + 18.0,
            ly
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.6}" y="{:.6}">{}</text>"#,
            lx + 24.0,
            ly + 4.0,
            escape_xml(&s.name)
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

pub fn render_curves(series: &[MetricSeries], out: impl AsRef<Path>) -> Result<()> {
    let out = out.as_ref();
    let svg = curves_svg(series)?;
    fs::write(out, svg).map_err(|e| Error::io(out, e))
}
