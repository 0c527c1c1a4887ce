//! Minimal self-contained SVG line plots of trajectories.

use std::fmt::Write as _;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::Compartment;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 130.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 45.0;
const TICKS: usize = 5;

const COLOURS: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Smallest "nice" number (1, 2 or 5 times a power of ten) that is `≥ v`.
fn nice_ceil(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&c| c >= v * (1.0 - 1e-12))
        .unwrap_or(10.0 * mag)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Renders one polyline per compartment in `selection`, with linear axes,
/// five labelled ticks each and a legend.
pub fn emit_svg(traj: &Trajectory, selection: &[Compartment]) -> Result<String> {
    if selection.is_empty() {
        return Err(Error::InvalidArgument("empty compartment selection".into()));
    }
    if traj.times.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let t0 = traj.times[0];
    let t1 = *traj.times.last().expect("non-empty");
    let t_span = if t1 > t0 { t1 - t0 } else { 1.0 };
    let data_max = selection
        .iter()
        .flat_map(|c| traj.states.iter().map(move |s| s[*c]))
        .fold(0.0, f64::max);
    let y_max = nice_ceil(data_max);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x = |t: f64| MARGIN_LEFT + (t - t0) / t_span * plot_w;
    let y = |v: f64| MARGIN_TOP + (1.0 - v / y_max) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{b}" x2="{l}" y2="{t}"/></g>"#,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        b = MARGIN_TOP + plot_h,
        t = MARGIN_TOP,
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let tv = t0 + f * t_span;
        let yv = f * y_max;
        let _ = writeln!(
            s,
            r#"<g class="tick"><line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{b2}" stroke="black"/><text x="{px:.2}" y="{ty}" text-anchor="middle">{label}</text></g>"#,
            px = x(tv),
            b = MARGIN_TOP + plot_h,
            b2 = MARGIN_TOP + plot_h + 5.0,
            ty = MARGIN_TOP + plot_h + 18.0,
            label = tick_label(tv),
        );
        let _ = writeln!(
            s,
            r#"<g class="tick"><line x1="{l2}" y1="{py:.2}" x2="{l}" y2="{py:.2}" stroke="black"/><text x="{tx}" y="{py:.2}" text-anchor="end" dominant-baseline="middle">{label}</text></g>"#,
            l = MARGIN_LEFT,
            l2 = MARGIN_LEFT - 5.0,
            tx = MARGIN_LEFT - 8.0,
            py = y(yv),
            label = tick_label(yv),
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{cx}" y="{by}" text-anchor="middle">time (years)</text>"#,
        cx = MARGIN_LEFT + plot_w / 2.0,
        by = HEIGHT - 8.0,
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {cy}) rotate(-90)" text-anchor="middle">individuals</text>"#,
        cy = MARGIN_TOP + plot_h / 2.0,
    );

    for (k, c) in selection.iter().enumerate() {
        let colour = COLOURS[c.index() % COLOURS.len()];
        let mut points = String::new();
        for (t, st) in traj.times.iter().zip(&traj.states) {
            let _ = write!(points, "{:.2},{:.2} ", x(*t), y(st[*c]));
        }
        let _ = writeln!(
            s,
            r#"<polyline data-compartment="{label}" fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>"#,
            label = c.label(),
            pts = points.trim_end(),
        );
        let ly = MARGIN_TOP + 10.0 + 18.0 * k as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{lx2}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{tx}" y="{ly}" dominant-baseline="middle">{label}</text></g>"#,
            lx2 = lx + 20.0,
            tx = lx + 26.0,
            label = c.label(),
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
