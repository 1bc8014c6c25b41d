//! Static SVG rendering of a chart trace.
//!
//! The output depends only on the trace and the options (coordinates are
//! printed with two decimals), so identical input gives identical bytes.

use std::fmt::Write as _;

use crate::chart::{ChartPoint, PointPhase};
use crate::distributions::{inverted_beta_quantile, InvertedBetaParams};
use crate::error::{Error, Result};
use crate::posterior::ratio_pdf;

const WIDTH: f64 = 760.0;
const CHART_HEIGHT: f64 = 380.0;
const INSET_HEIGHT: f64 = 260.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 45.0;
const DENSITY_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlotOptions {
    /// Adds a panel with the ratio density at the first and last Phase I
    /// steps; needs the sample size to recover `kn`.
    pub density_overlay: Option<usize>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    top: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = if self.x1 > self.x0 { self.x1 - self.x0 } else { 1.0 };
        MARGIN_L + (x - self.x0) / span * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        let span = if self.y1 > self.y0 { self.y1 - self.y0 } else { 1.0 };
        self.top + self.height - MARGIN_B - (y - self.y0) / span * (self.height - MARGIN_T - MARGIN_B)
    }

    fn axes(&self, svg: &mut String, x_label: &str, y_label: &str) {
        let (l, r) = (MARGIN_L, WIDTH - MARGIN_R);
        let (t, b) = (self.top + MARGIN_T, self.top + self.height - MARGIN_B);
        let _ = writeln!(
            svg,
            r##"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
            r - l,
            b - t
        );
        for i in 0..=4 {
            let fy = self.y0 + (self.y1 - self.y0) * i as f64 / 4.0;
            let y = self.py(fy);
            let _ = writeln!(
                svg,
                r##"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"##,
                l - 6.0,
                y + 4.0,
                tick(fy)
            );
            let fx = self.x0 + (self.x1 - self.x0) * i as f64 / 4.0;
            let _ = writeln!(
                svg,
                r##"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"##,
                self.px(fx),
                b + 16.0,
                tick(fx)
            );
        }
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{x_label}</text>"##,
            (l + r) / 2.0,
            b + 34.0
        );
        let _ = writeln!(
            svg,
            r##"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{y_label}</text>"##,
            (t + b) / 2.0,
            (t + b) / 2.0
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = lo.abs().max(1.0) * 0.05;
        (lo - pad, hi + pad)
    }
}

/// Renders `points` as an SVG document.
pub fn render_svg(points: &[ChartPoint], options: PlotOptions) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Usage("cannot plot an empty trace".into()));
    }
    let overlay = match options.density_overlay {
        Some(n) => Some(density_curves(points, n)?),
        None => None,
    };
    let total_height = CHART_HEIGHT + if overlay.is_some() { INSET_HEIGHT } else { 0.0 };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{total_height:.0}" viewBox="0 0 {WIDTH:.0} {total_height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let lo = points.iter().map(|p| p.u_hat.min(p.lcl)).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.u_hat.max(p.ucl)).fold(f64::NEG_INFINITY, f64::max);
    let (y0, y1) = padded(lo, hi);
    let first = points[0].index as f64;
    let last = points[points.len() - 1].index as f64;
    let frame = Frame {
        x0: first - 0.5,
        x1: last + 0.5,
        y0,
        y1,
        top: 0.0,
        height: CHART_HEIGHT,
    };
    frame.axes(&mut svg, "sample k", "u estimate");

    // Limits as steps centred on each index.
    for (name, colour, get) in [
        ("lcl", "#c0392b", (|p: &ChartPoint| p.lcl) as fn(&ChartPoint) -> f64),
        ("ucl", "#c0392b", |p: &ChartPoint| p.ucl),
        ("u_hat", "#1f4e79", |p: &ChartPoint| p.u_hat),
    ] {
        let mut d = String::new();
        for (i, p) in points.iter().enumerate() {
            let x = p.index as f64;
            let (xl, xr) = (frame.px(x - 0.5), frame.px(x + 0.5));
            let y = frame.py(get(p));
            if i == 0 {
                let _ = write!(d, "M{xl:.2},{y:.2}");
            } else {
                let _ = write!(d, " L{xl:.2},{y:.2}");
            }
            let _ = write!(d, " L{xr:.2},{y:.2}");
        }
        let dash = if name == "u_hat" { "" } else { r#" stroke-dasharray="6,3""# };
        let _ = writeln!(
            svg,
            r##"<path id="{name}" d="{d}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>"##
        );
    }

    if let Some(boundary) = points.iter().find(|p| p.phase == PointPhase::Phase2) {
        let x = frame.px(boundary.index as f64 - 0.5);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="2,3"/>"##,
            MARGIN_T,
            CHART_HEIGHT - MARGIN_B
        );
    }
    for p in points {
        let (cx, cy) = (frame.px(p.index as f64), frame.py(p.u_hat));
        if p.signal {
            let _ = writeln!(
                svg,
                r##"<circle class="signal" cx="{cx:.2}" cy="{cy:.2}" r="5" fill="none" stroke="#c0392b" stroke-width="2"/>"##
            );
        } else {
            let _ = writeln!(svg, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="2.5" fill="#1f4e79"/>"##);
        }
    }

    if let Some(curves) = overlay {
        let (umin, umax, dmax) = curves.iter().flat_map(|c| c.points.iter()).fold(
            (f64::INFINITY, f64::NEG_INFINITY, 0.0f64),
            |(a, b, c), &(u, d)| (a.min(u), b.max(u), c.max(d)),
        );
        let inset = Frame {
            x0: umin,
            x1: umax,
            y0: 0.0,
            y1: dmax * 1.05,
            top: CHART_HEIGHT,
            height: INSET_HEIGHT,
        };
        inset.axes(&mut svg, "u", "density");
        for (curve, colour) in curves.iter().zip(["#7f8c8d", "#1f4e79"]) {
            let mut d = String::new();
            for (i, &(u, dens)) in curve.points.iter().enumerate() {
                let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, inset.px(u), inset.py(dens));
            }
            let _ = writeln!(
                svg,
                r##"<path id="density-k{}" d="{d}" fill="none" stroke="{colour}" stroke-width="1.5"/>"##,
                curve.k
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

struct Curve {
    k: usize,
    points: Vec<(f64, f64)>,
}

/// Ratio densities at the first and last Phase I rows. The scale factor is
/// recovered from the plotted estimate: for equal sample counts the
/// posterior ratio estimate satisfies `û^β̄ = 1 / c`.
fn density_curves(points: &[ChartPoint], n: usize) -> Result<Vec<Curve>> {
    if n == 0 {
        return Err(Error::Usage("density overlay needs n >= 1".into()));
    }
    let phase1: Vec<&ChartPoint> = points.iter().filter(|p| p.phase == PointPhase::Phase1).collect();
    let (Some(first), Some(last)) = (phase1.first(), phase1.last()) else {
        return Err(Error::Usage("density overlay needs Phase I rows in the trace".into()));
    };
    let mut rows = vec![*first];
    if last.index != first.index {
        rows.push(*last);
    }
    rows.iter()
        .map(|p| {
            let kn = (p.index * n) as u64;
            let beta = p.beta_bar;
            let c = p.u_hat.powf(-beta);
            let ib = InvertedBetaParams::new(kn + 1);
            let v_lo = inverted_beta_quantile(1e-4, ib)?;
            let v_hi = inverted_beta_quantile(1.0 - 1e-4, ib)?;
            let (u_lo, u_hi) = ((v_lo / c).powf(1.0 / beta), (v_hi / c).powf(1.0 / beta));
            let pts = (0..DENSITY_POINTS)
                .map(|i| {
                    let u = u_lo + (u_hi - u_lo) * i as f64 / (DENSITY_POINTS - 1) as f64;
                    Ok((u, ratio_pdf(u, c, beta, kn)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Curve { k: p.index, points: pts })
        })
        .collect()
}
