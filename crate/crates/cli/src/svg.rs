//! Four-panel SVG figure: embedding scatter (upper left), stress trace in
//! decibels (lower left) and the two distance-pattern heat maps (right
//! column). Output bytes are deterministic for a given report: fixed float
//! precision, index-ordered elements, no timestamps.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use geomds::stress::DistanceMatrix;

use crate::dataio::RunReport;
use crate::error::{io_err, CliError, Result};

const WIDTH: f64 = 980.0;
const HEIGHT: f64 = 860.0;

struct Panel {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

const SCATTER: Panel = Panel { x: 60.0, y: 50.0, w: 380.0, h: 330.0 };
const TRACE: Panel = Panel { x: 60.0, y: 470.0, w: 380.0, h: 330.0 };
const HEAT_IN: Panel = Panel { x: 540.0, y: 50.0, w: 380.0, h: 330.0 };
const HEAT_OUT: Panel = Panel { x: 540.0, y: 470.0, w: 380.0, h: 330.0 };

/// Renders the figure for a report. Deterministic: the same report yields
/// the same bytes.
pub fn render_svg(report: &RunReport) -> Result<String> {
    if report.trace.values.is_empty() {
        return Err(CliError::Usage(
            "report has an empty stress trace; nothing to plot".to_string(),
        ));
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

    scatter_panel(&mut svg, report);
    trace_panel(&mut svg, report);
    let vmax = report
        .dist_in
        .max_off_diagonal()
        .max(report.dist_out.max_off_diagonal());
    heat_panel(&mut svg, &HEAT_IN, &report.dist_in, vmax, "input distance pattern");
    heat_panel(&mut svg, &HEAT_OUT, &report.dist_out, vmax, "embedded distance pattern");

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes the figure to disk.
pub fn emit_svg(report: &RunReport, path: &Path) -> Result<()> {
    let svg = render_svg(report)?;
    fs::write(path, svg).map_err(io_err(path))
}

fn frame(svg: &mut String, p: &Panel, title: &str) {
    let _ = writeln!(
        svg,
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        p.x, p.y, p.w, p.h
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\">{title}</text>",
        p.x,
        p.y - 10.0
    );
}

/// Projects a coordinate row to 2 display axes: identity for p = 2 (and the
/// single axis for p = 1), a fixed isometric view for p = 3, the first two
/// axes otherwise.
fn project(row: &[f64]) -> (f64, f64) {
    match row.len() {
        0 => (0.0, 0.0),
        1 => (row[0], 0.0),
        2 => (row[0], row[1]),
        _ if row.len() == 3 => {
            let c30 = 0.8660254037844387;
            (c30 * (row[0] - row[1]), 0.5 * (row[0] + row[1]) - row[2])
        }
        _ => (row[0], row[1]),
    }
}

fn scatter_panel(svg: &mut String, report: &RunReport) {
    let p = &SCATTER;
    frame(svg, p, "embedding");
    let pts: Vec<(f64, f64)> = (0..report.coords.n())
        .map(|i| project(report.coords.row(i)))
        .collect();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let spanx = (xmax - xmin).max(1e-12);
    let spany = (ymax - ymin).max(1e-12);
    // equal-aspect mapping with a margin; svg y grows downward
    let scale = (p.w * 0.88 / spanx).min(p.h * 0.88 / spany);
    let cx = p.x + p.w / 2.0;
    let cy = p.y + p.h / 2.0;
    let map = |(x, y): (f64, f64)| {
        (
            cx + scale * (x - (xmin + xmax) / 2.0),
            cy - scale * (y - (ymin + ymax) / 2.0),
        )
    };
    if report.trajectory && pts.len() > 1 {
        let mut path = String::from("<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"");
        for &pt in &pts {
            let (sx, sy) = map(pt);
            let _ = write!(path, "{sx:.2},{sy:.2} ");
        }
        path.push_str("\"/>");
        let _ = writeln!(svg, "{path}");
    }
    for (i, &pt) in pts.iter().enumerate() {
        let (sx, sy) = map(pt);
        let _ = writeln!(
            svg,
            "<circle cx=\"{sx:.2}\" cy=\"{sy:.2}\" r=\"3\" fill=\"none\" stroke=\"black\"/>"
        );
        let _ = writeln!(
            svg,
            "<text class=\"label\" x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">{}</text>",
            sx + 5.0,
            sy - 4.0,
            report.labels[i]
        );
    }
}

fn trace_panel(svg: &mut String, report: &RunReport) {
    let p = &TRACE;
    let (series, title): (&[f64], &str) = if report.trace.db.is_empty() {
        (&report.trace.values, "stress per iteration")
    } else {
        (&report.trace.db, "stress per iteration (dB, relative to start)")
    };
    frame(svg, p, title);
    let k = series.len();
    let mut lo = series.iter().cloned().fold(f64::MAX, f64::min);
    let mut hi = series.iter().cloned().fold(f64::MIN, f64::max);
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let map = |i: usize, v: f64| {
        let fx = if k > 1 { i as f64 / (k - 1) as f64 } else { 0.5 };
        (
            p.x + 8.0 + fx * (p.w - 16.0),
            p.y + 8.0 + (hi - v) / (hi - lo) * (p.h - 16.0),
        )
    };
    let mut path = String::from("<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"");
    for (i, &v) in series.iter().enumerate() {
        let (sx, sy) = map(i, v);
        let _ = write!(path, "{sx:.2},{sy:.2} ");
    }
    path.push_str("\"/>");
    let _ = writeln!(svg, "{path}");
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">final {:.3} after {} iterations</text>",
        p.x + 6.0,
        p.y + p.h - 6.0,
        series.last().copied().unwrap_or(0.0),
        report.outer_iterations
    );
}

fn heat_panel(svg: &mut String, p: &Panel, d: &DistanceMatrix, vmax: f64, title: &str) {
    frame(svg, p, title);
    let n = d.n();
    let cell = (p.w.min(p.h) - 10.0) / n as f64;
    let ox = p.x + 5.0;
    let oy = p.y + 5.0;
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            let shade = if vmax > 0.0 {
                (255.0 * (1.0 - v / vmax)).round().clamp(0.0, 255.0) as u8
            } else {
                255
            };
            let _ = writeln!(
                svg,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({shade},{shade},{shade})\"/>",
                ox + j as f64 * cell,
                oy + i as f64 * cell,
                cell,
                cell
            );
        }
    }
}
