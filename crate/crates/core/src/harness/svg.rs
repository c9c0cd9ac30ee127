//! Static SVG line chart of mean best-so-far energy against generation.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::AggregateTrace;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 220.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// Renders the chart as SVG text. Output depends only on the aggregates.
pub fn render_convergence_plot(aggs: &[AggregateTrace]) -> Result<String> {
    let first = aggs
        .first()
        .ok_or_else(|| Error::usage("nothing to plot: no aggregates"))?;
    let gens = aggs
        .iter()
        .flat_map(|a| a.records.iter().map(|r| r.generation as f64));
    let (x_lo, x_hi) = gens.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
        (lo.min(g), hi.max(g))
    });
    if !x_lo.is_finite() {
        return Err(Error::usage(
            "nothing to plot: aggregates have no generations",
        ));
    }
    let y_hi = aggs
        .iter()
        .flat_map(|a| a.records.iter().map(|r| r.best_so_far_mean))
        .fold(0.0f64, f64::max);
    let (x_lo, x_hi) = span(x_lo, x_hi);
    let (y_lo, y_hi) = span(0.0, y_hi * 1.05);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let objective = first.entry.engine.objective;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="25" text-anchor="middle" font-size="15">{}: mean best-so-far energy over {} runs</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        objective,
        first.runs
    );

    // axes
    let (x0, y0) = (MARGIN_LEFT, MARGIN_TOP + plot_h);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2},{MARGIN_TOP:.2} L{x0:.2},{y0:.2} L{:.2},{y0:.2}" fill="none" stroke="black"/>"#,
        MARGIN_LEFT + plot_w
    );
    for k in 0..=TICKS {
        let frac = k as f64 / TICKS as f64;
        let xv = x_lo + frac * (x_hi - x_lo);
        let yv = y_lo + frac * (y_hi - y_lo);
        let (tx, ty) = (px(xv), py(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{tx:.2}" y1="{y0:.2}" x2="{tx:.2}" y2="{:.2}" stroke="black"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{:.0}</text>"#,
            y0 + 5.0,
            y0 + 20.0,
            xv
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ty:.2}" x2="{x0:.2}" y2="{ty:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            ty + 4.0,
            yv
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">generation</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">best-so-far energy</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    for (k, agg) in aggs.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = agg
            .records
            .iter()
            .map(|r| {
                format!(
                    "{:.2},{:.2}",
                    px(r.generation as f64),
                    py(r.best_so_far_mean)
                )
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = MARGIN_TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            escape(&agg.label())
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders and writes the chart to `path`.
pub fn write_convergence_plot(aggs: &[AggregateTrace], path: &Path) -> Result<()> {
    let svg = render_convergence_plot(aggs)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
