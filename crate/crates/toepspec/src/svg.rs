//! Static SVG plots: eigenvalue scatter over the symbol curve, and the
//! region raster.

use std::fmt::Write;

use toepspec_core::{RegionLabel, C64};

use crate::harness::RegionMap;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[C64]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in points.iter().filter(|p| p.re.is_finite() && p.im.is_finite()) {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        let cx = 0.5 * (x0 + x1);
        let cy = 0.5 * (y0 + y1);
        Self {
            x0: cx - span / 2.0,
            y1: cy + span / 2.0,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn px(&self, z: C64) -> (f64, f64) {
        (
            MARGIN + (z.re - self.x0) * self.scale,
            MARGIN + (self.y1 - z.im) * self.scale,
        )
    }
}

fn header(out: &mut String, w: f64, h: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Eigenvalue cloud (dots) with the closed curve `a(S^1)` (polyline).
pub fn scatter_svg(points: &[C64], curve: &[C64], title: &str) -> String {
    let all: Vec<C64> = points.iter().chain(curve).copied().collect();
    let f = Frame::fit(&all);
    let mut out = String::new();
    header(&mut out, SIZE, SIZE, title);
    if !curve.is_empty() {
        let mut path = String::new();
        for (i, &z) in curve.iter().chain(curve.first()).enumerate() {
            let (x, y) = f.px(z);
            let _ = write!(path, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" });
        }
        let _ = writeln!(out, r#"<path d="{path}" fill="none" stroke="gray" stroke-width="1"/>"#);
    }
    for &z in points {
        let (x, y) = f.px(z);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="black"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

/// `ℛ_0` black, `ℛ_1` grey, `ℛ_2` white, higher indices in blues, boundary
/// nodes red.
pub fn region_color(label: &RegionLabel) -> &'static str {
    match label {
        RegionLabel::Boundary => "#d62728",
        RegionLabel::Interior { d0, .. } => match d0 {
            0 => "#000000",
            1 => "#808080",
            2 => "#ffffff",
            3 => "#9ecae1",
            4 => "#4292c6",
            _ => "#08519c",
        },
    }
}

/// One cell per grid node; runs of equal color in a row are merged.
pub fn region_svg(map: &RegionMap, title: &str) -> String {
    let cell = ((SIZE - 2.0 * MARGIN) / map.res as f64).max(1.0);
    let side = 2.0 * MARGIN + cell * map.res as f64;
    let mut out = String::new();
    header(&mut out, side, side, title);
    for r in 0..map.res {
        let mut c = 0;
        while c < map.res {
            let color = region_color(&map.label_at(r, c));
            let start = c;
            while c < map.res && region_color(&map.label_at(r, c)) == color {
                c += 1;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                MARGIN + start as f64 * cell,
                MARGIN + r as f64 * cell,
                (c - start) as f64 * cell,
                cell
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{0:.2}" height="{0:.2}" fill="none" stroke="black"/>"#,
        cell * map.res as f64
    );
    out.push_str("</svg>\n");
    out
}
