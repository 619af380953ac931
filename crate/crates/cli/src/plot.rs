//! Deterministic SVG rendering of a spectrum: the real-part trace over a
//! Hz axis, with the comb slots ticked when the comb is known.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use spinmem::Spectrum;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 48.0;

fn fmt2(x: f64) -> String {
    // Fixed two-decimal coordinates keep the output byte-stable.
    format!("{:.2}", x)
}

/// Largest of 1/2/5·10^k not exceeding `raw`; the usual axis-tick rounding.
fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.abs().log10().floor());
    let m = raw / mag;
    let f = if m >= 5.0 {
        5.0
    } else if m >= 2.0 {
        2.0
    } else {
        1.0
    };
    f * mag
}

fn axis_label(value: f64) -> String {
    if value == value.trunc() {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}

/// Render the real part of the spectrum to a self-contained SVG document.
///
/// `comb_offsets_hz`, when non-empty, adds one dashed marker line per slot.
pub fn render_spectrum_svg(spec: &Spectrum, comb_offsets_hz: &[f64]) -> Result<String> {
    if spec.values.is_empty() {
        bail!("spectrum has no rows to plot");
    }
    let f_lo = spec.freqs_hz[0];
    let f_hi = *spec.freqs_hz.last().expect("non-empty");
    if f_hi <= f_lo {
        bail!("spectrum frequency axis is degenerate");
    }
    let reals: Vec<f64> = spec.values.iter().map(|v| v.re).collect();
    let mut y_lo = reals.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut y_hi = reals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if y_hi - y_lo < 1e-300 {
        // Flat trace: open a symmetric band so the line sits mid-plot.
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |f: f64| MARGIN_LEFT + (f - f_lo) / (f_hi - f_lo) * plot_w;
    let to_y = |v: f64| MARGIN_TOP + (y_hi - v) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );

    // Frame.
    let _ = writeln!(
        svg,
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        fmt2(MARGIN_LEFT),
        fmt2(MARGIN_TOP),
        fmt2(plot_w),
        fmt2(plot_h)
    );

    // Zero line when visible.
    if y_lo < 0.0 && y_hi > 0.0 {
        let y0 = to_y(0.0);
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>",
            fmt2(MARGIN_LEFT),
            fmt2(y0),
            fmt2(MARGIN_LEFT + plot_w),
            fmt2(y0)
        );
    }

    // Frequency ticks.
    let step = nice_step((f_hi - f_lo) / 8.0);
    let mut tick = (f_lo / step).ceil() * step;
    while tick <= f_hi + 1e-9 {
        let x = to_x(tick);
        let _ = writeln!(
            svg,
            "  <line x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"black\" stroke-width=\"1\"/>",
            x = fmt2(x),
            y1 = fmt2(MARGIN_TOP + plot_h),
            y2 = fmt2(MARGIN_TOP + plot_h + 6.0)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            fmt2(x),
            fmt2(MARGIN_TOP + plot_h + 20.0),
            axis_label(tick)
        );
        tick += step;
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">frequency offset (Hz)</text>",
        fmt2(MARGIN_LEFT + plot_w / 2.0),
        fmt2(HEIGHT - 10.0)
    );

    // Amplitude extremes on the y axis.
    for (v, anchor_y) in [(y_hi, MARGIN_TOP + 12.0), (y_lo, MARGIN_TOP + plot_h)] {
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">{:.3e}</text>",
            fmt2(MARGIN_LEFT - 6.0),
            fmt2(anchor_y),
            v
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">Re[spectrum]</text>",
        fmt2(MARGIN_TOP + plot_h / 2.0),
        fmt2(MARGIN_TOP + plot_h / 2.0)
    );

    // Comb slot markers.
    for &off in comb_offsets_hz {
        if off < f_lo || off > f_hi {
            continue;
        }
        let x = to_x(off);
        let _ = writeln!(
            svg,
            "  <line class=\"comb-tick\" x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"#cc3333\" stroke-width=\"1\" stroke-dasharray=\"3,4\"/>",
            x = fmt2(x),
            y1 = fmt2(MARGIN_TOP),
            y2 = fmt2(MARGIN_TOP + plot_h)
        );
    }

    // The trace itself.
    let mut points = String::new();
    for (f, v) in spec.freqs_hz.iter().zip(&reals) {
        let _ = write!(points, "{},{} ", fmt2(to_x(*f)), fmt2(to_y(*v)));
    }
    let _ = writeln!(
        svg,
        "  <polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"{}\"/>",
        points.trim_end()
    );

    svg.push_str("</svg>\n");
    Ok(svg)
}
