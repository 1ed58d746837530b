//! Hand-written SVG for numerical-range plots. The imaginary axis points up.

use std::fmt::Write;

use semihilbert::linalg::ConvexPolygon;
use semihilbert::C64;

use crate::output::num;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;
const MARKER_RADIUS: f64 = 4.0;

pub struct Plot<'a> {
    pub inner: &'a ConvexPolygon,
    pub outer: &'a ConvexPolygon,
    pub spectrum: &'a [C64],
}

struct Frame {
    center: C64,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = C64>) -> Frame {
        let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        let mut any = false;
        for p in points {
            any = true;
            lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        if !any {
            return Frame { center: C64::new(0.0, 0.0), scale: 1.0 };
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im);
        let span = if span > 1e-12 * (1.0 + hi.norm().max(lo.norm())) { span } else { 1.0 };
        Frame {
            center: (lo + hi) * 0.5,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, z: C64) -> (f64, f64) {
        let d = z - self.center;
        (SIZE / 2.0 + d.re * self.scale, SIZE / 2.0 - d.im * self.scale)
    }
}

fn path(frame: &Frame, polygon: &ConvexPolygon) -> String {
    let mut d = String::new();
    for (k, &v) in polygon.vertices.iter().enumerate() {
        let (x, y) = frame.map(v);
        let _ = write!(d, "{}{},{} ", if k == 0 { "M" } else { "L" }, num(x), num(y));
    }
    d.push('Z');
    d
}

pub fn render(plot: &Plot<'_>) -> String {
    let frame = Frame::fit(
        plot.outer
            .vertices
            .iter()
            .chain(&plot.inner.vertices)
            .chain(plot.spectrum)
            .copied(),
    );
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- semihilbert {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"  <rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (ox, oy) = frame.map(C64::new(0.0, 0.0));
    if (0.0..=SIZE).contains(&oy) {
        let _ = writeln!(s, r##"  <line class="axis" x1="0" y1="{0}" x2="{SIZE}" y2="{0}" stroke="#bbbbbb"/>"##, num(oy));
    }
    if (0.0..=SIZE).contains(&ox) {
        let _ = writeln!(s, r##"  <line class="axis" x1="{0}" y1="0" x2="{0}" y2="{SIZE}" stroke="#bbbbbb"/>"##, num(ox));
    }
    let _ = writeln!(
        s,
        r##"  <path id="outer" d="{}" fill="none" stroke="#d62728" stroke-dasharray="4 2"/>"##,
        path(&frame, plot.outer)
    );
    let _ = writeln!(
        s,
        r##"  <path id="inner" d="{}" fill="#1f77b4" fill-opacity="0.25" stroke="#1f77b4"/>"##,
        path(&frame, plot.inner)
    );
    for &z in plot.spectrum {
        let (x, y) = frame.map(z);
        let _ = writeln!(
            s,
            r#"  <circle class="spectrum" cx="{}" cy="{}" r="{MARKER_RADIUS}" fill="black"/>"#,
            num(x),
            num(y)
        );
    }
    s.push_str("</svg>\n");
    s
}
