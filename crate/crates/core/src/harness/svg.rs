//! Minimal hand-written SVG for benchmark curves: axes, one polyline per
//! method and a ±1σ band.

use std::fmt::Write;

use super::bench::{Abscissa, BenchSummary};
use crate::solvers::Method;

/// The only line that may differ between builds.
pub const GENERATOR: &str = concat!("dgda ", env!("CARGO_PKG_VERSION"));

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const Y_FLOOR: f64 = -30.0;

fn color(m: Method) -> &'static str {
    match m {
        Method::Gda => "#d62728",
        Method::Eg => "#1f77b4",
        Method::Ogda => "#2ca02c",
        Method::Dgda => "#000000",
    }
}

/// Tick spacing of the form {1, 2, 5}·10ᵏ giving at most `max_ticks` ticks.
fn nice_step(span: f64, max_ticks: usize) -> f64 {
    let raw = span / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|f| f * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

pub fn render(summary: &BenchSummary) -> String {
    let curves: Vec<_> = summary.methods.iter().filter(|m| !m.curve.is_empty()).collect();
    let x_max = curves.iter().filter_map(|m| m.x_end()).max().unwrap_or(1).max(1) as f64;
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in curves.iter().flat_map(|m| &m.curve) {
        y_lo = y_lo.min(p.mean_log10 - p.std_log10);
        y_hi = y_hi.max(p.mean_log10 + p.std_log10);
    }
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (-1.0, 1.0);
    }
    let y_lo = y_lo.max(Y_FLOOR).floor();
    let y_hi = y_hi.ceil().max(y_lo + 1.0);

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + pw * x / x_max;
    let sy = |y: f64| TOP + ph * (y_hi - y.clamp(y_lo, y_hi)) / (y_hi - y_lo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- generator: {GENERATOR} -->");
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let spec = &summary.spec;
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{} n={} m={} kappa={} trials={}</text>"#,
        LEFT + pw / 2.0,
        spec.kind,
        spec.n,
        spec.m,
        spec.kappa,
        spec.trials
    );

    // axes and ticks
    let _ = writeln!(
        s,
        r#"<path d="M{:.2} {:.2} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        LEFT,
        TOP,
        TOP + ph,
        LEFT + pw
    );
    let xs = nice_step(x_max, 6);
    let mut x = 0.0;
    while x <= x_max + 1e-9 {
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0
        );
        x += xs;
    }
    let ys = nice_step(y_hi - y_lo, 8).max(1.0);
    let mut y = y_lo;
    while y <= y_hi + 1e-9 {
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="black"/><line x1="{LEFT:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{y}</text>"##,
            LEFT - 5.0,
            LEFT + pw,
            LEFT - 8.0,
            py + 4.0
        );
        y += ys;
    }
    let xlabel = match spec.abscissa {
        Abscissa::GradEvals => "gradient evaluations",
        Abscissa::Iterations => "iterations",
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xlabel}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">mean squared distance to saddle (log scale)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for m in &curves {
        let c = color(m.method);
        let mut band = String::new();
        for p in &m.curve {
            let _ = write!(band, "{:.2},{:.2} ", sx(p.x as f64), sy(p.mean_log10 + p.std_log10));
        }
        for p in m.curve.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", sx(p.x as f64), sy(p.mean_log10 - p.std_log10));
        }
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{c}" fill-opacity="0.15" stroke="none"/>"#,
            band.trim_end()
        );
        let mut line = String::new();
        for p in &m.curve {
            let _ = write!(line, "{:.2},{:.2} ", sx(p.x as f64), sy(p.mean_log10));
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#,
            line.trim_end()
        );
    }

    // legend
    for (i, m) in summary.methods.iter().enumerate() {
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let lx = WIDTH - RIGHT + 20.0;
        let total = m.converged + m.max_iters + m.diverged;
        let label = if m.curve.is_empty() {
            format!("{} (diverged {}/{})", m.method.as_str().to_uppercase(), m.diverged, total)
        } else if m.diverged > 0 {
            format!("{} ({}/{} diverged)", m.method.as_str().to_uppercase(), m.diverged, total)
        } else {
            m.method.as_str().to_uppercase()
        };
        let dash = if m.curve.is_empty() { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            lx + 24.0,
            color(m.method),
            lx + 30.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
