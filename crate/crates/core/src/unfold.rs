//! Cutting the surface along a tree and developing it into the plane.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dissection::{self, contacts, tree_length, validate_tree, CrossingWitness, DissectionTree, Violation};
use crate::geom::{self, Motion2, Vec2};
use crate::mesh::PolyhedronMesh;
use crate::overlay::{Overlay, OverlayError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// A cell of the refined surface placed in the plane.
#[derive(Clone, Debug)]
pub struct PlacedCell {
    pub tri: usize,
    /// Mesh face this cell belongs to.
    pub face: usize,
    /// Sends the triangle chart to the plane.
    pub motion: Motion2,
    pub polygon: Vec<Vec2>,
}

/// One segment of the net boundary, net interior on its left.
#[derive(Clone, Copy, Debug)]
pub struct BoundarySeg {
    pub a: Vec2,
    pub b: Vec2,
    /// Refined vertices at both ends (mesh vertex `v` is refined vertex `v`).
    pub ra: usize,
    pub rb: usize,
    pub cell: usize,
    pub cell_edge: usize,
    pub tree_edge: usize,
    pub side: Side,
}

#[derive(Clone, Debug)]
pub struct Net {
    pub mesh: PolyhedronMesh,
    pub tree: DissectionTree,
    pub overlay: Overlay,
    /// Overlay layers cut open in this net.
    pub cut_mask: u8,
    /// Overlay layer carrying `tree`.
    pub tree_layer: usize,
    /// Indexed like `overlay.cells`.
    pub cells: Vec<PlacedCell>,
    pub boundary: Vec<BoundarySeg>,
    /// Boundary segment indices starting at each copy of each mesh vertex.
    pub vertex_images: Vec<Vec<usize>>,
    /// Images of a second tree's edges, if drawn.
    pub interior_marks: Vec<Vec<Vec2>>,
    pub marks_tree: Option<DissectionTree>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum UnfoldError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error(transparent)]
    Overlay(#[from] OverlayError),
    #[error("trees cross: {0}")]
    Crossing(CrossingWitness),
    #[error("tree edge {edge} leaves the net")]
    ExitsNet { edge: usize },
}

pub(crate) fn describe(v: &[Violation]) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str("; ");
        }
        let _ = write!(s, "{x}");
    }
    s
}

/// Cuts `mesh` along `tree` and develops the result.
pub fn cut_and_unfold(mesh: &PolyhedronMesh, tree: &DissectionTree) -> Result<Net, UnfoldError> {
    let report = validate_tree(mesh, tree);
    if !report.is_valid() {
        return Err(UnfoldError::InvalidTree(describe(&report.violations)));
    }
    let overlay = Overlay::new(mesh, &[tree])?;
    Ok(Net::develop(mesh, tree, overlay, 0, None))
}

impl Net {
    /// Develops `overlay` cut along layer `layer` (carrying `tree`).
    pub fn develop(mesh: &PolyhedronMesh, tree: &DissectionTree, overlay: Overlay, layer: usize, root: Option<usize>) -> Net {
        let mask = 1u8 << layer;
        let root = root.unwrap_or_else(|| overlay.root_cell(mesh));
        let motions: Vec<Motion2> = overlay.develop(mesh, mask, root, Motion2::IDENTITY).into_iter().map(|m| m.expect("cut surface is connected")).collect();
        Net::from_motions(mesh, tree, overlay, layer, &motions)
    }

    /// Net with the given chart-to-plane motion per overlay cell.
    pub fn from_motions(mesh: &PolyhedronMesh, tree: &DissectionTree, overlay: Overlay, layer: usize, motions: &[Motion2]) -> Net {
        let mask = 1u8 << layer;
        let cells: Vec<PlacedCell> = overlay
            .cells
            .iter()
            .zip(motions)
            .map(|(c, &m)| PlacedCell { tri: c.tri, face: mesh.triangle_face(c.tri), motion: m, polygon: c.chart.iter().map(|&p| m.apply(p)).collect() })
            .collect();
        // start at a cut edge leaving vertex 0
        let mut start = None;
        for (ci, c) in overlay.cells.iter().enumerate() {
            for i in 0..c.edges.len() {
                if overlay.is_cut(ci, i, mask) {
                    let key = (c.rverts[i], ci, i);
                    if start.is_none_or(|s: (usize, usize, usize)| key < s) {
                        start = Some(key);
                    }
                }
            }
        }
        let (_, sc, si) = start.expect("tree has edges");
        let walk = overlay.walk_from(mask, (sc, si));
        let boundary: Vec<BoundarySeg> = walk
            .iter()
            .map(|&(c, i)| {
                let cell = &overlay.cells[c];
                let n = cell.rverts.len();
                let (te, fwd) = cell.edges[i].refs[layer].expect("cut edge carries its tree edge");
                BoundarySeg {
                    a: cells[c].polygon[i],
                    b: cells[c].polygon[(i + 1) % n],
                    ra: cell.rverts[i],
                    rb: cell.rverts[(i + 1) % n],
                    cell: c,
                    cell_edge: i,
                    tree_edge: te,
                    side: if fwd { Side::Left } else { Side::Right },
                }
            })
            .collect();
        let mut vertex_images = vec![Vec::new(); mesh.num_vertices()];
        for (i, s) in boundary.iter().enumerate() {
            if s.ra < mesh.num_vertices() {
                vertex_images[s.ra].push(i);
            }
        }
        Net {
            mesh: mesh.clone(),
            tree: tree.clone(),
            overlay,
            cut_mask: mask,
            tree_layer: layer,
            cells,
            boundary,
            vertex_images,
            interior_marks: Vec::new(),
            marks_tree: None,
        }
    }

    /// Boundary as a closed polygon (one point per boundary segment).
    pub fn boundary_polygon(&self) -> Vec<Vec2> {
        self.boundary.iter().map(|s| s.a).collect()
    }

    /// Planar positions of every boundary copy of vertex `v`.
    pub fn vertex_positions(&self, v: usize) -> Vec<Vec2> {
        self.vertex_images[v].iter().map(|&i| self.boundary[i].a).collect()
    }

    pub fn diameter(&self) -> f64 {
        let pts = self.boundary_polygon();
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max(pts[i].dist(pts[j]));
            }
        }
        d
    }

    /// Area-weighted centroid of the placed cells.
    pub fn centroid(&self) -> Vec2 {
        let mut s = Vec2::ZERO;
        let mut a = 0.0;
        for c in &self.cells {
            let ar = geom::signed_area(&c.polygon);
            s += geom::centroid(&c.polygon) * ar;
            a += ar;
        }
        s / a
    }

    /// Placed cells of mesh face `f`.
    pub fn face_cells(&self, f: usize) -> Vec<(usize, &[Vec2])> {
        self.cells.iter().enumerate().filter(|(_, c)| c.face == f).map(|(i, c)| (i, c.polygon.as_slice())).collect()
    }

    /// Boundary segments grouped into maximal runs along one tree edge side.
    pub fn boundary_runs(&self) -> Vec<(usize, usize)> {
        let n = self.boundary.len();
        let mut runs = Vec::new();
        let first = (0..n)
            .find(|&i| {
                let p = &self.boundary[(i + n - 1) % n];
                let q = &self.boundary[i];
                (p.tree_edge, p.side) != (q.tree_edge, q.side)
            })
            .unwrap_or(0);
        let mut i = 0;
        while i < n {
            let s = (first + i) % n;
            let key = (self.boundary[s].tree_edge, self.boundary[s].side);
            let mut len = 1;
            while i + len < n && {
                let q = &self.boundary[(first + i + len) % n];
                (q.tree_edge, q.side) == key
            } {
                len += 1;
            }
            runs.push((s, len));
            i += len;
        }
        runs
    }
}

pub fn net_area(net: &Net) -> f64 {
    net.cells.iter().map(|c| geom::signed_area(&c.polygon)).sum()
}

pub fn net_perimeter(net: &Net) -> f64 {
    net.boundary.iter().map(|s| s.a.dist(s.b)).sum()
}

/// Result of the self-overlap test.
#[derive(Clone, Debug, PartialEq)]
pub struct Overlap {
    pub overlaps: bool,
    /// `(cell, cell, intersection area)` for the largest offending pair.
    pub witness: Option<(usize, usize, f64)>,
    pub total_area: f64,
}

/// Whether two placed cells intersect in positive area.
pub fn self_overlaps(net: &Net) -> Overlap {
    let area = net_area(net);
    let tol = 1e-10 * area;
    let tris: Vec<Vec<[usize; 3]>> = net.cells.iter().map(|c| geom::triangulate(&c.polygon).unwrap_or_default()).collect();
    let boxes: Vec<_> = net.cells.iter().map(|c| geom::bbox(&c.polygon)).collect();
    let mut best: Option<(usize, usize, f64)> = None;
    let mut total = 0.0;
    for i in 0..net.cells.len() {
        for j in i + 1..net.cells.len() {
            if !geom::boxes_overlap(boxes[i], boxes[j], 0.0) {
                continue;
            }
            let a = geom::polygon_overlap_area(&net.cells[i].polygon, &tris[i], &net.cells[j].polygon, &tris[j]);
            if a > tol {
                total += a;
                if best.is_none_or(|b| a > b.2) {
                    best = Some((i, j, a));
                }
            }
        }
    }
    Overlap { overlaps: best.is_some(), witness: best, total_area: total }
}

/// Draws `d2` into the net of its partner tree. The result carries one
/// planar polyline per `d2` edge in `interior_marks`.
pub fn draw_tree_in_net(net: &Net, d2: &DissectionTree) -> Result<Net, UnfoldError> {
    let mesh = &net.mesh;
    let report = validate_tree(mesh, d2);
    if !report.is_valid() {
        return Err(UnfoldError::InvalidTree(describe(&report.violations)));
    }
    let con = contacts(mesh, &net.tree, d2).map_err(UnfoldError::Crossing)?;
    let overlay = Overlay::new(mesh, &[&net.tree, d2])?;
    let fine = Net::develop(mesh, &net.tree, overlay, 0, None);
    let marks = trace_marks(&fine, d2, &con)?;
    let mut out = net.clone();
    out.interior_marks = marks;
    out.marks_tree = Some(d2.clone());
    Ok(out)
}

/// Planar images of layer-1 tree edges in a net developed from a two-layer
/// overlay with layer 0 cut.
pub(crate) fn trace_marks(fine: &Net, d2: &DissectionTree, con: &dissection::Contacts) -> Result<Vec<Vec<Vec2>>, UnfoldError> {
    let ov = &fine.overlay;
    let mut marks = Vec::with_capacity(d2.edges.len());
    for (ei, e) in d2.edges.iter().enumerate() {
        if let Some((e1, left)) = con.shared_in_d2(ei) {
            // shared edge: the chosen copy on the boundary
            let side = if left { Side::Left } else { Side::Right };
            let segs: Vec<&BoundarySeg> = fine.boundary.iter().filter(|s| s.tree_edge == e1 && s.side == side).collect();
            let mut pts: Vec<Vec2> = Vec::new();
            // boundary runs along the copy; left copies follow the D1 direction
            for s in &segs {
                if pts.is_empty() {
                    pts.push(s.a);
                }
                pts.push(s.b);
            }
            let d1e = &fine.tree.edges[e1];
            let same_dir = fine.tree.nodes[d1e.a].vertex == d2.nodes[e.a].vertex;
            // a left copy runs with the D1 edge; a right copy against it
            if (side == Side::Left) != same_dir {
                pts.reverse();
            }
            marks.push(pts);
            continue;
        }
        let start = ov.node_rverts[1][e.a];
        let end = ov.node_rverts[1][e.b];
        let mut by_start = alloc::collections::BTreeMap::new();
        for (ci, c) in ov.cells.iter().enumerate() {
            for (i, ce) in c.edges.iter().enumerate() {
                if ce.refs[1] == Some((ei, true)) {
                    if ce.labels & 1 != 0 {
                        return Err(UnfoldError::ExitsNet { edge: ei });
                    }
                    by_start.insert(c.rverts[i], (ci, i));
                }
            }
        }
        let mut pts = Vec::new();
        let mut r = start;
        let mut guard = 0;
        while r != end {
            let &(ci, i) = by_start.get(&r).ok_or(UnfoldError::ExitsNet { edge: ei })?;
            let poly = &fine.cells[ci].polygon;
            if pts.is_empty() {
                pts.push(poly[i]);
            }
            pts.push(poly[(i + 1) % poly.len()]);
            let c = &ov.cells[ci];
            r = c.rverts[(i + 1) % c.rverts.len()];
            guard += 1;
            if guard > by_start.len() {
                return Err(UnfoldError::ExitsNet { edge: ei });
            }
        }
        marks.push(pts);
    }
    Ok(marks)
}

/// Checks the net invariants: closed boundary, isometric cells, matching
/// developed edges, paired boundary copies of equal length, area.
pub fn check_net(net: &Net) -> Result<(), String> {
    let mesh = &net.mesh;
    let eps = 10.0 * mesh.snap_eps();
    let ov = &net.overlay;
    for (ci, c) in ov.cells.iter().enumerate() {
        let placed = &net.cells[ci].polygon;
        for i in 0..c.chart.len() {
            for j in i + 1..c.chart.len() {
                let d0 = c.chart[i].dist(c.chart[j]);
                let d1 = placed[i].dist(placed[j]);
                if (d0 - d1).abs() > 1e-9 * mesh.diameter() {
                    return Err(alloc::format!("cell {ci} is not congruent to its chart"));
                }
            }
        }
        for (i, e) in c.edges.iter().enumerate() {
            if e.labels & net.cut_mask != 0 {
                continue;
            }
            let (c2, j) = e.twin;
            let n2 = ov.cells[c2].rverts.len();
            let q = &net.cells[c2].polygon;
            let n = c.rverts.len();
            if placed[i].dist(q[(j + 1) % n2]) > eps || placed[(i + 1) % n].dist(q[j]) > eps {
                return Err(alloc::format!("cells {ci} and {c2} disagree on their shared edge"));
            }
        }
    }
    let b = &net.boundary;
    for i in 0..b.len() {
        if b[i].b.dist(b[(i + 1) % b.len()].a) > eps {
            return Err(alloc::format!("boundary is not closed at segment {i}"));
        }
    }
    for te in 0..net.tree.edges.len() {
        let l: f64 = b.iter().filter(|s| s.tree_edge == te && s.side == Side::Left).map(|s| s.a.dist(s.b)).sum();
        let r: f64 = b.iter().filter(|s| s.tree_edge == te && s.side == Side::Right).map(|s| s.a.dist(s.b)).sum();
        let len = net.tree.edges[te].path.length;
        if (l - len).abs() > 1e-9 * len || (r - len).abs() > 1e-9 * len {
            return Err(alloc::format!("tree edge {te} sides have lengths {l} and {r}, expected {len}"));
        }
    }
    let a = net_area(net);
    let s = mesh.surface_area();
    if (a - s).abs() > 1e-9 * s {
        return Err(alloc::format!("net area {a} differs from surface area {s}"));
    }
    if let Ok(tl) = tree_length(&net.tree) {
        let p = net_perimeter(net);
        if (p - 2.0 * tl).abs() > 1e-9 * p {
            return Err(alloc::format!("perimeter {p} is not twice the tree length {tl}"));
        }
    }
    Ok(())
}

/// Rigid motion carrying net `a` onto net `b` cell by cell, with the largest
/// vertex residual. Both nets must unfold the same mesh; `a` may be a
/// refinement of `b`. `None` if some cell of `a` has no counterpart.
pub fn align_nets(a: &Net, b: &Net) -> Option<(Motion2, f64)> {
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for (ci, c) in a.overlay.cells.iter().enumerate() {
        let x = match geom::triangulate(&c.chart).as_deref() {
            Some([t, ..]) => (c.chart[t[0]] + c.chart[t[1]] + c.chart[t[2]]) / 3.0,
            _ => geom::centroid(&c.chart),
        };
        let cb = b
            .overlay
            .cells
            .iter()
            .position(|d| d.tri == c.tri && geom::point_in_polygon(x, &d.chart, 1e-12) != geom::Containment::Outside)?;
        for &p in &c.chart {
            src.push(a.cells[ci].motion.apply(p));
            dst.push(b.cells[cb].motion.apply(p));
        }
    }
    let m = Motion2::fit(&src, &dst);
    let err = src.iter().zip(&dst).map(|(&p, &q)| m.apply(p).dist(q)).fold(0.0, f64::max);
    Some((m, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v2;
    use crate::mesh::{regular_tetrahedron, unit_cube};

    fn cross_tree(m: &PolyhedronMesh) -> DissectionTree {
        DissectionTree::from_vertex_edges(m, &[(0, 1), (1, 2), (2, 3), (0, 4), (1, 5), (2, 6), (3, 7)]).unwrap()
    }

    #[test]
    fn tetra_star_gives_big_triangle() {
        let m = regular_tetrahedron();
        let t = DissectionTree::from_vertex_edges(&m, &[(3, 0), (3, 1), (3, 2)]).unwrap();
        let net = cut_and_unfold(&m, &t).unwrap();
        check_net(&net).unwrap();
        assert!((net_area(&net) - 3f64.sqrt()).abs() < 1e-12);
        assert!((net_perimeter(&net) - 6.0).abs() < 1e-12);
        assert_eq!(net.vertex_images[3].len(), 3);
        for v in 0..3 {
            assert_eq!(net.vertex_images[v].len(), 1);
        }
        // the three copies of vertex 3 are the corners of a side-2 triangle
        let p = net.vertex_positions(3);
        for i in 0..3 {
            assert!((p[i].dist(p[(i + 1) % 3]) - 2.0).abs() < 1e-12);
        }
        assert!(!self_overlaps(&net).overlaps);
    }

    #[test]
    fn cube_cross_net() {
        let m = unit_cube();
        let net = cut_and_unfold(&m, &cross_tree(&m)).unwrap();
        check_net(&net).unwrap();
        assert!((net_area(&net) - 6.0).abs() < 1e-12);
        assert!((net_perimeter(&net) - 14.0).abs() < 1e-12);
        assert!(!self_overlaps(&net).overlaps);
        // root convention: vertex 0 at the origin
        assert!(net.vertex_positions(0).iter().any(|p| p.norm() < 1e-12));
    }

    #[test]
    fn dihedron_three_edges_gives_rectangle() {
        let sq = [v2(0.0, 0.0), v2(1.0, 0.0), v2(1.0, 1.0), v2(0.0, 1.0)];
        let m = PolyhedronMesh::make_dihedron(&sq).unwrap();
        let t = DissectionTree::from_vertex_edges(&m, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let net = cut_and_unfold(&m, &t).unwrap();
        check_net(&net).unwrap();
        assert!((net_area(&net) - 2.0).abs() < 1e-12);
        assert!((net_perimeter(&net) - 6.0).abs() < 1e-12);
        let (lo, hi) = geom::bbox(&net.boundary_polygon());
        let d = hi - lo;
        assert!(((d.x - 1.0).abs() < 1e-12 && (d.y - 2.0).abs() < 1e-12) || ((d.x - 2.0).abs() < 1e-12 && (d.y - 1.0).abs() < 1e-12));
    }

    #[test]
    fn tetra_marks_touch_boundary_at_vertex_copies() {
        let m = regular_tetrahedron();
        let d1 = DissectionTree::from_vertex_edges(&m, &[(3, 0), (3, 1), (3, 2)]).unwrap();
        let d2 = DissectionTree::from_vertex_edges(&m, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let net = cut_and_unfold(&m, &d1).unwrap();
        let drawn = draw_tree_in_net(&net, &d2).unwrap();
        assert_eq!(drawn.interior_marks.len(), 3);
        for (ei, mark) in drawn.interior_marks.iter().enumerate() {
            let e = &d2.edges[ei];
            let va = d2.nodes[e.a].vertex.unwrap();
            let vb = d2.nodes[e.b].vertex.unwrap();
            let first = mark[0];
            let last = *mark.last().unwrap();
            assert!(net.vertex_positions(va).iter().any(|p| p.dist(first) < 1e-9), "edge {ei}");
            assert!(net.vertex_positions(vb).iter().any(|p| p.dist(last) < 1e-9), "edge {ei}");
            let len: f64 = mark.windows(2).map(|w| w[0].dist(w[1])).sum();
            assert!((len - 1.0).abs() < 1e-12);
        }
    }
}
