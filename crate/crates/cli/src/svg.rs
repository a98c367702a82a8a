//! Deterministic SVG 1.1 output. Coordinates are printed with six decimals.

use std::fmt::Write as _;

use revnet_core::geom::{self, v2};
use revnet_core::isotess::{TilingPatch, Window};
use revnet_core::reversible::DoubleChain;
use revnet_core::unfold::Net;
use revnet_core::{Motion2, Vec2};

#[derive(Clone, Debug)]
pub struct RenderStyle {
    /// Width of the drawing in pixels.
    pub width: f64,
    /// Margin in pixels.
    pub margin: f64,
    pub stroke: f64,
    pub thin: f64,
    /// Fill colours, cycled.
    pub palette: Vec<&'static str>,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            width: 800.0,
            margin: 16.0,
            stroke: 1.5,
            thin: 0.5,
            palette: vec!["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd"],
        }
    }
}

impl RenderStyle {
    fn color(&self, k: usize) -> &'static str {
        self.palette[k % self.palette.len()]
    }
}

fn f6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

struct Canvas {
    lo: Vec2,
    hi: Vec2,
    scale: f64,
    margin: f64,
    out: String,
}

impl Canvas {
    fn new(lo: Vec2, hi: Vec2, style: &RenderStyle) -> Canvas {
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let scale = (style.width - 2.0 * style.margin) / span;
        let w = (hi.x - lo.x) * scale + 2.0 * style.margin;
        let h = (hi.y - lo.y) * scale + 2.0 * style.margin;
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
            f6(w),
            f6(h),
            f6(w),
            f6(h)
        );
        Canvas { lo, hi, scale, margin: style.margin, out }
    }

    fn fit(pts: impl Iterator<Item = Vec2>, style: &RenderStyle) -> Canvas {
        let pts: Vec<Vec2> = pts.collect();
        let (lo, hi) = if pts.is_empty() { (v2(0.0, 0.0), v2(1.0, 1.0)) } else { geom::bbox(&pts) };
        Canvas::new(lo, hi, style)
    }

    fn map(&self, p: Vec2) -> String {
        format!("{},{}", f6((p.x - self.lo.x) * self.scale + self.margin), f6((self.hi.y - p.y) * self.scale + self.margin))
    }

    fn points(&self, pts: &[Vec2]) -> String {
        pts.iter().map(|&p| self.map(p)).collect::<Vec<_>>().join(" ")
    }

    fn polygon(&mut self, pts: &[Vec2], fill: &str, stroke: &str, width: f64) {
        let p = self.points(pts);
        let _ = writeln!(self.out, "<polygon points=\"{p}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{}\" stroke-linejoin=\"round\"/>", f6(width));
    }

    fn polyline(&mut self, pts: &[Vec2], stroke: &str, width: f64, dash: bool) {
        let p = self.points(pts);
        let dash = if dash { " stroke-dasharray=\"4 3\"" } else { "" };
        let _ = writeln!(self.out, "<polyline points=\"{p}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{}\"{dash}/>", f6(width));
    }

    fn dot(&mut self, p: Vec2, r: f64, fill: &str) {
        let xy = self.map(p);
        let (x, y) = xy.split_once(',').unwrap();
        let _ = writeln!(self.out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"{}\" fill=\"{fill}\"/>", f6(r));
    }

    fn group(&mut self, class: &str) {
        let _ = writeln!(self.out, "<g class=\"{class}\">");
    }

    fn end_group(&mut self) {
        self.out.push_str("</g>\n");
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Net with cells tinted by polyhedron face, the cut boundary and vertex copies.
pub fn net_svg(net: &Net, style: &RenderStyle) -> String {
    let mut c = Canvas::fit(net.cells.iter().flat_map(|c| c.polygon.iter().copied()), style);
    c.group("cells");
    for cell in &net.cells {
        c.polygon(&cell.polygon, style.color(cell.face), style.color(cell.face), style.thin);
    }
    c.end_group();
    c.group("boundary");
    for s in &net.boundary {
        c.polyline(&[s.a, s.b], "#000000", style.stroke, false);
    }
    c.end_group();
    c.group("vertices");
    for v in 0..net.mesh.num_vertices() {
        for p in net.vertex_positions(v) {
            c.dot(p, 2.5, "#000000");
        }
    }
    c.end_group();
    c.finish()
}

/// Chain pieces placed by `motions`, with the hinges marked.
pub fn chain_svg(chain: &DoubleChain, motions: &[Motion2], style: &RenderStyle) -> String {
    let placed: Vec<Vec<Vec2>> = chain.pieces.iter().zip(motions).map(|(p, m)| p.polygon.iter().map(|&q| m.apply(q)).collect()).collect();
    let mut c = Canvas::fit(placed.iter().flatten().copied(), style);
    c.group("pieces");
    for (p, pts) in chain.pieces.iter().zip(&placed) {
        if p.is_empty() {
            c.polyline(pts, "#d62728", style.stroke * 2.0, true);
        } else {
            c.polygon(pts, style.color(p.index), "#000000", style.stroke);
        }
    }
    c.end_group();
    c.group("hinges");
    for (k, &h) in chain.hinges.iter().enumerate() {
        c.dot(motions[k].apply(h), 3.0, "#d62728");
    }
    c.end_group();
    c.finish()
}

/// Copies of the net inside `window`; upright copies and half-turned copies
/// get different colours.
pub fn tiling_svg(net: &Net, patch: &TilingPatch, window: &Window, style: &RenderStyle) -> String {
    let boundary = net.boundary_polygon();
    let (nlo, nhi) = geom::bbox(&boundary);
    let corners = [nlo, v2(nhi.x, nlo.y), nhi, v2(nlo.x, nhi.y)];
    let mut c = Canvas::new(window.min, window.max, style);
    c.group("copies");
    for (k, m) in patch.motions.iter().enumerate() {
        let moved: Vec<Vec2> = corners.iter().map(|&p| m.apply(p)).collect();
        if !geom::boxes_overlap(geom::bbox(&moved), (window.min, window.max), 0.0) {
            continue;
        }
        let class = if m.cos > 0.0 { 0 } else { 1 };
        let pts: Vec<Vec2> = boundary.iter().map(|&p| m.apply(p)).collect();
        let fill = if k == 0 { style.color(3) } else { style.color(class) };
        c.polygon(&pts, fill, "#333333", style.thin);
    }
    c.end_group();
    let w = [window.min, v2(window.max.x, window.min.y), window.max, v2(window.min.x, window.max.y), window.min];
    c.polyline(&w, "#000000", style.stroke, true);
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use revnet_core::dissection::DissectionTree;
    use revnet_core::mesh::regular_tetrahedron;
    use revnet_core::unfold::cut_and_unfold;

    #[test]
    fn net_svg_is_stable() {
        let m = regular_tetrahedron();
        let t = DissectionTree::from_vertex_edges(&m, &[(3, 0), (3, 1), (3, 2)]).unwrap();
        let net = cut_and_unfold(&m, &t).unwrap();
        let a = net_svg(&net, &RenderStyle::default());
        let b = net_svg(&cut_and_unfold(&m, &t).unwrap(), &RenderStyle::default());
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml") && a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<polygon").count(), net.cells.len());
        assert!(!a.contains("-0.000000"));
    }
}
