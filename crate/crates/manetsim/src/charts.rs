//! Static SVG charts of aggregated results.
//!
//! One file per (metric, mobility model): metric mean on the y axis
//! against receiver count on the x axis, one polyline series per
//! (node count, algorithm) pair. Output is plain deterministic text so
//! identical results produce identical files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{CellResult, Metric};
use crate::mobility::MobilityModel;
use crate::session::Algorithm;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Render every (metric, model) chart into `out_dir`, returning the
/// written paths. Cells without a defined mean contribute no point.
pub fn emit_charts(cells: &[CellResult], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if cells.is_empty() {
        return Err(Error::input("no results to chart"));
    }
    fs::create_dir_all(out_dir)?;
    let models: BTreeSet<MobilityModel> = cells.iter().map(|c| c.key.model).collect();
    let mut written = Vec::new();
    for metric in Metric::ALL {
        for &model in &models {
            let svg = render_chart(cells, model, metric);
            let path = out_dir.join(format!("{}_{}.svg", metric.as_str(), model));
            fs::write(&path, svg)?;
            written.push(path);
        }
    }
    Ok(written)
}

struct Series {
    label: String,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

fn render_chart(cells: &[CellResult], model: MobilityModel, metric: Metric) -> String {
    let node_counts: BTreeSet<usize> = cells
        .iter()
        .filter(|c| c.key.model == model)
        .map(|c| c.key.nodes)
        .collect();
    let receiver_counts: BTreeSet<usize> = cells
        .iter()
        .filter(|c| c.key.model == model)
        .map(|c| c.key.receivers)
        .collect();

    let mut series = Vec::new();
    for (i, &nodes) in node_counts.iter().enumerate() {
        for algorithm in Algorithm::ALL {
            let mut points = Vec::new();
            for &receivers in &receiver_counts {
                let cell = cells.iter().find(|c| {
                    c.key.model == model
                        && c.key.nodes == nodes
                        && c.key.receivers == receivers
                        && c.key.algorithm == algorithm
                });
                if let Some(mean) = cell.and_then(|c| c.aggregate(metric).mean) {
                    points.push((receivers as f64, mean));
                }
            }
            series.push(Series {
                label: format!("{nodes} nodes, {algorithm}"),
                color: PALETTE[(i * 2 + (algorithm == Algorithm::MinEdge) as usize) % PALETTE.len()],
                dashed: algorithm == Algorithm::MinEdge,
                points,
            });
        }
    }

    let xs: Vec<f64> = receiver_counts.iter().map(|&r| r as f64).collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .collect();
    let (x_min, x_max) = bounds(&xs, 1.0);
    let (mut y_min, y_max) = bounds(&ys, 1.0);
    if y_min > 0.0 {
        y_min = 0.0; // anchor magnitude charts at zero
    }

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |v: f64| MARGIN_LEFT + (v - x_min) / (x_max - x_min) * plot_w;
    let to_y = |v: f64| MARGIN_TOP + plot_h - (v - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" font-size="15" text-anchor="middle">{} — {} model</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        metric.axis_label(),
        model
    );

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.2}" y1="{:.2}" x2="{x0:.2}" y2="{y0:.2}" stroke="black"/>"#,
        MARGIN_TOP
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="black"/>"#,
        MARGIN_LEFT + plot_w
    );

    // X ticks at each receiver count.
    for &r in &receiver_counts {
        let x = to_x(r as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{r}</text>"#,
            y0 + 20.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">receivers per multicast group</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );

    // Y ticks: five divisions.
    for i in 0..=5 {
        let v = y_min + (y_max - y_min) * f64::from(i) / 5.0;
        let y = to_y(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{v:.1}</text>"#,
            x0 - 9.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        metric.axis_label()
    );

    // Series.
    for (i, s) in series.iter().enumerate() {
        if !s.points.is_empty() {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", to_x(x), to_y(y)))
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="6 3""# } else { "" };
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
                s.color,
                path.join(" ")
            );
            for &(x, y) in &s.points {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                    to_x(x),
                    to_y(y),
                    s.color
                );
            }
        }
        // Legend row (also drawn for empty series so gaps are visible).
        let ly = MARGIN_TOP + 14.0 + i as f64 * 18.0;
        let lx = WIDTH - MARGIN_RIGHT + 14.0;
        let dash = if s.dashed { r#" stroke-dasharray="6 3""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"{dash}/>"#,
            lx + 22.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64], fallback_span: f64) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        return (0.0, fallback_span);
    }
    if (max - min).abs() < 1e-12 {
        return (min - fallback_span / 2.0, max + fallback_span / 2.0);
    }
    (min, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_matrix, ExperimentConfig};

    #[test]
    fn charts_are_deterministic_and_labeled() {
        let config = ExperimentConfig {
            models: vec![MobilityModel::RandomWaypoint],
            node_counts: vec![10],
            v_max_values: vec![25.0],
            receiver_counts: vec![2, 4],
            runs_per_cell: 1,
            duration: 5.0,
            ..ExperimentConfig::default()
        };
        let outcome = run_matrix(&config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let first = emit_charts(&outcome.cells, dir.path()).unwrap();
        assert_eq!(first.len(), 4, "four metrics, one model");
        let bytes: Vec<Vec<u8>> = first.iter().map(|p| fs::read(p).unwrap()).collect();
        let second = emit_charts(&outcome.cells, dir.path()).unwrap();
        for (path, prev) in second.iter().zip(&bytes) {
            assert_eq!(&fs::read(path).unwrap(), prev, "chart output changed");
        }
        let svg = String::from_utf8(bytes[0].clone()).unwrap();
        assert!(svg.contains("receivers per multicast group"));
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn empty_results_are_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_charts(&[], dir.path()).is_err());
    }
}
