//! SVG drawings of HN polygons.

use std::fmt::Write;
use std::str::FromStr;

use crate::bundle::Bundle;

/// Pixels per unit of rank and per unit of degree.
pub const SCALE: i64 = 40;
const MARGIN: i64 = 40;
const COLORS: [&str; 6] = ["#c0392b", "#2471a3", "#1e8449", "#7d3c98", "#b9770e", "#424949"];

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Alignment {
    /// Left endpoints at the origin, as in the dominance pictures.
    #[default]
    Left,
    /// Right endpoints at the origin, as in the quotient pictures.
    Right,
}

impl FromStr for Alignment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "left" => Ok(Alignment::Left),
            "right" => Ok(Alignment::Right),
            _ => Err(format!("unknown alignment {s:?}; expected left or right")),
        }
    }
}

/// Polygon vertices `(rank, degree)` in the chosen alignment.
pub fn polygon_vertices(b: &Bundle, align: Alignment) -> Vec<(i64, i64)> {
    let mut pts = vec![(0i64, 0i64)];
    let (mut x, mut y) = (0i64, 0i64);
    for v in b.hn_vectors() {
        x += v.x;
        y += v.y;
        pts.push((x, y));
    }
    if align == Alignment::Right {
        for p in &mut pts {
            p.0 -= x;
            p.1 -= y;
        }
    }
    pts
}

pub fn render_svg(bundles: &[Bundle], align: Alignment) -> String {
    let polys: Vec<Vec<(i64, i64)>> = bundles.iter().map(|b| polygon_vertices(b, align)).collect();
    let pts = polys.iter().flatten();
    let (x0, x1) = pts.clone().fold((0, 0), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let (y0, y1) = pts.fold((0, 0), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    // SVG y grows downwards, so degree y is drawn at -y.
    let vx = x0 * SCALE - MARGIN;
    let vy = -y1 * SCALE - MARGIN;
    let w = (x1 - x0) * SCALE + 2 * MARGIN;
    let h = (y1 - y0) * SCALE + 2 * MARGIN;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{vx} {vy} {w} {h}" width="{w}" height="{h}">"#
    );
    let _ = writeln!(
        s,
        r##"  <g stroke="#bbbbbb" stroke-width="1"><line x1="{vx}" y1="0" x2="{}" y2="0"/><line x1="0" y1="{vy}" x2="0" y2="{}"/></g>"##,
        vx + w,
        vy + h
    );
    for (k, (poly, b)) in polys.iter().zip(bundles).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> =
            poly.iter().map(|&(x, y)| format!("{},{}", x * SCALE, -y * SCALE)).collect();
        let _ = writeln!(s, r#"  <g id="polygon-{k}">"#);
        let _ = writeln!(s, "    <title>{b}</title>");
        let _ = writeln!(
            s,
            r#"    <polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        for &(x, y) in poly {
            let (px, py) = (x * SCALE, -y * SCALE);
            let _ = writeln!(s, r#"    <circle cx="{px}" cy="{py}" r="3" fill="{color}"/>"#);
            let _ = writeln!(
                s,
                r#"    <text x="{}" y="{}" font-size="10" fill="{color}">({x}, {y})</text>"#,
                px + 4,
                py - 4
            );
        }
        let _ = writeln!(s, "  </g>");
    }
    s.push_str("</svg>\n");
    s
}
