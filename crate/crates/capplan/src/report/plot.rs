//! Self-contained SVG line charts of sweep results.
//!
//! One metric per chart, user count on the x axis. Infinite values cannot be
//! placed on a linear axis, so they are pinned just above the largest finite
//! value and flagged with a triangle marker; the marker carries
//! `class="clipped"` so the substitution stays visible in the markup.

use crate::error::Error;
use crate::model::PerformanceMetrics;
use crate::scenario::SweepResult;

type Accessor = fn(&PerformanceMetrics) -> f64;

const METRICS: &[(&str, &str, Accessor)] = &[
    ("rho", "dimensionless", |p| p.rho),
    ("r_total_rps", "requests/s", |p| p.r_total_rps),
    ("r_served_rps", "requests/s", |p| p.r_served_rps),
    ("d_queue_s", "s", |p| p.delays.queue_s),
    ("d_processing_s", "s", |p| p.delays.processing_s),
    ("d_transmission_s", "s", |p| p.delays.transmission_s),
    ("d_propagation_s", "s", |p| p.delays.propagation_s),
    ("d_total_s", "s", |p| p.delays.total_s),
    ("utilization_pct", "%", |p| p.utilization_pct),
    ("throughput_bps", "bits/s", |p| p.throughput_bps),
    ("queue_drops_pps", "packets/s", |p| p.queue_drops_pps),
    ("server_drops_rps", "requests/s", |p| p.server_drops_rps),
];

/// Names accepted by [`render_plot`], in column order.
pub fn metric_names() -> Vec<&'static str> {
    METRICS.iter().map(|(name, _, _)| *name).collect()
}

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 850.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 500.0;

const BASELINE_COLOR: &str = "#2563eb";
const UPGRADED_COLOR: &str = "#ea580c";

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.abs() >= 10_000.0 || v.abs() < 0.01 {
        return format!("{v:.2e}");
    }
    let mut s = format!("{v:.4}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

struct Frame {
    n_from: u32,
    n_to: u32,
    y_max: f64,
}

impl Frame {
    fn x(&self, n: u32) -> f64 {
        let span = f64::from(self.n_to - self.n_from);
        if span == 0.0 {
            return (LEFT + RIGHT) / 2.0;
        }
        LEFT + f64::from(n - self.n_from) / span * (RIGHT - LEFT)
    }

    fn y(&self, v: f64) -> f64 {
        BOTTOM - v / self.y_max * (BOTTOM - TOP)
    }
}

fn draw_series(svg: &mut String, frame: &Frame, series: &SweepResult, accessor: Accessor, color: &str) {
    let mut points = String::new();
    let mut clipped = String::new();
    for p in &series.points {
        let v = accessor(p);
        if v.is_nan() {
            continue;
        }
        let x = frame.x(p.n_users);
        let y = frame.y(if v.is_finite() { v } else { frame.y_max });
        points.push_str(&format!("{x:.2},{y:.2} "));
        if v.is_infinite() {
            clipped.push_str(&format!(
                "<path class=\"clipped\" d=\"M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z\" fill=\"{color}\"/>\n",
                x,
                y - 7.0,
                x - 5.0,
                y + 3.0,
                x + 5.0,
                y + 3.0,
            ));
        }
    }
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
        points.trim_end()
    ));
    svg.push_str(&clipped);
}

/// Renders one metric of a sweep, and optionally of a second sweep over the
/// same user counts, as an SVG document.
pub fn render_plot(
    baseline: &SweepResult,
    upgraded: Option<&SweepResult>,
    metric: &str,
) -> Result<String, Error> {
    let (name, unit, accessor) = METRICS
        .iter()
        .find(|(name, _, _)| *name == metric)
        .copied()
        .ok_or_else(|| Error::UnknownMetric {
            given: metric.to_string(),
            valid: metric_names().join(", "),
        })?;
    if let Some(up) = upgraded {
        if up.n_from != baseline.n_from || up.n_to != baseline.n_to {
            return Err(Error::SweepMismatch {
                left: format!("{}..={}", baseline.n_from, baseline.n_to),
                right: format!("{}..={}", up.n_from, up.n_to),
            });
        }
    }

    let max_finite = baseline
        .points
        .iter()
        .chain(upgraded.into_iter().flat_map(|u| u.points.iter()))
        .map(accessor)
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max);
    let y_max = if max_finite > 0.0 {
        1.05 * max_finite
    } else {
        1.0
    };
    let frame = Frame {
        n_from: baseline.n_from,
        n_to: baseline.n_to,
        y_max,
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"system-ui, sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.0}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{name} vs users</text>\n",
        (LEFT + RIGHT) / 2.0
    ));

    // Horizontal gridlines and y tick labels at quarters of the axis.
    for i in 0..=4 {
        let v = y_max * f64::from(i) / 4.0;
        let y = frame.y(v);
        svg.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{RIGHT}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            LEFT - 8.0,
            y + 4.0,
            tick_label(v)
        ));
    }

    // X ticks on whole user counts.
    let span = frame.n_to - frame.n_from;
    let step = (span / 8).max(1);
    let mut n = frame.n_from;
    while n <= frame.n_to {
        let x = frame.x(n);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{BOTTOM}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#111111\"/>\n",
            BOTTOM + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{n}</text>\n",
            BOTTOM + 20.0
        ));
        match n.checked_add(step) {
            Some(next) => n = next,
            None => break,
        }
    }

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"#111111\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"#111111\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.0}\" y=\"{:.0}\" text-anchor=\"middle\">users</text>\n",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 45.0
    ));
    svg.push_str(&format!(
        "<text x=\"22\" y=\"{:.0}\" text-anchor=\"middle\" transform=\"rotate(-90 22 {:.0})\">{name} ({unit})</text>\n",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    ));

    draw_series(&mut svg, &frame, baseline, accessor, BASELINE_COLOR);
    if let Some(up) = upgraded {
        draw_series(&mut svg, &frame, up, accessor, UPGRADED_COLOR);

        let lx = RIGHT - 150.0;
        svg.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{:.0}\" x2=\"{:.0}\" y2=\"{:.0}\" stroke=\"{BASELINE_COLOR}\" stroke-width=\"2\"/>\n",
            TOP + 14.0,
            lx + 24.0,
            TOP + 14.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.0}\" y=\"{:.0}\">baseline</text>\n",
            lx + 32.0,
            TOP + 18.0
        ));
        svg.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{:.0}\" x2=\"{:.0}\" y2=\"{:.0}\" stroke=\"{UPGRADED_COLOR}\" stroke-width=\"2\"/>\n",
            TOP + 34.0,
            lx + 24.0,
            TOP + 34.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.0}\" y=\"{:.0}\">upgraded</text>\n",
            lx + 32.0,
            TOP + 38.0
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
