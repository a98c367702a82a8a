//! Isotetrahedra and plane tilings by their nets.
//!
//! Every vertex of an isotetrahedron has angle sum π, so the half-turns
//! about the boundary vertex copies of any net generate a group for which
//! the net is a fundamental domain.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geom::{self, v2, v3, Motion2, Vec2};
use crate::hull::convex_hull;
use crate::mesh::PolyhedronMesh;
use crate::unfold::Net;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TileError {
    #[error("sides {0}, {1}, {2} do not form an acute triangle")]
    NotAcute(f64, f64, f64),
    #[error("net does not come from an isotetrahedron")]
    NotIsotetrahedral,
    #[error("window needs a covered radius of {required}, patch guarantees {available}")]
    WindowTooLarge { required: f64, available: f64 },
}

/// A tetrahedron with four congruent faces.
#[derive(Clone, Debug)]
pub struct IsoTetrahedron {
    pub mesh: PolyhedronMesh,
    /// Side lengths of the face triangle.
    pub sides: [f64; 3],
}

/// Isotetrahedron whose faces are the acute triangle with sides `a`, `b`, `c`.
/// Opposite edges `v0v1`, `v2v3` have length `a`; `v0v2`, `v1v3` have `b`.
pub fn isotetra_from_triangle(a: f64, b: f64, c: f64) -> Result<IsoTetrahedron, TileError> {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let p2 = (b2 + c2 - a2) / 8.0;
    let q2 = (a2 + c2 - b2) / 8.0;
    let r2 = (a2 + b2 - c2) / 8.0;
    let scale = a2.max(b2).max(c2);
    if !(p2 > 1e-12 * scale && q2 > 1e-12 * scale && r2 > 1e-12 * scale) || !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(TileError::NotAcute(a, b, c));
    }
    let (p, q, r) = (p2.sqrt(), q2.sqrt(), r2.sqrt());
    let pts = [v3(p, q, r), v3(p, -q, -r), v3(-p, q, -r), v3(-p, -q, r)];
    let mesh = convex_hull(&pts).map_err(|_| TileError::NotAcute(a, b, c))?;
    Ok(IsoTetrahedron { mesh, sides: [a, b, c] })
}

/// Whether every vertex of `mesh` has angle sum π and it has four vertices.
pub fn is_isotetrahedral(mesh: &PolyhedronMesh) -> bool {
    mesh.num_vertices() == 4 && (0..4).all(|v| (mesh.angle_sum(v) - core::f64::consts::PI).abs() < 1e-9)
}

/// Copies of one net placed by a group of motions.
#[derive(Clone, Debug)]
pub struct TilingPatch {
    pub motions: Vec<Motion2>,
    /// Longest generator word used.
    pub radius: usize,
    /// Half-turn centres generating the group.
    pub generators: Vec<Vec2>,
    /// Centre of the covered disk (net centroid).
    pub center: Vec2,
    /// Every point within this distance of `center` lies in some copy.
    pub guaranteed_radius: f64,
}

struct MotionSet {
    probe: [Vec2; 2],
    eps: f64,
    keys: BTreeSet<(i64, i64, i64, i64)>,
    cell: f64,
}

impl MotionSet {
    fn key(&self, m: &Motion2) -> (i64, i64, i64, i64) {
        let a = m.apply(self.probe[0]);
        let b = m.apply(self.probe[1]);
        let q = |x: f64| (x / self.cell).round() as i64;
        (q(a.x), q(a.y), q(b.x), q(b.y))
    }

    /// Inserts `m` unless a motion within `eps` is present.
    fn insert(&mut self, m: &Motion2) -> bool {
        let k = self.key(m);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    for dw in -1..=1 {
                        if self.keys.contains(&(k.0 + dx, k.1 + dy, k.2 + dz, k.3 + dw)) {
                            return false;
                        }
                    }
                }
            }
        }
        self.keys.insert(k);
        true
    }

    fn contains(&self, m: &Motion2) -> bool {
        let k = self.key(m);
        let _ = self.eps;
        (-1..=1).any(|dx| (-1..=1).any(|dy| (-1..=1).any(|dz| (-1..=1).any(|dw| self.keys.contains(&(k.0 + dx, k.1 + dy, k.2 + dz, k.3 + dw))))))
    }
}

/// Copies of `net` under all words of length at most `k` in the half-turns
/// about its boundary vertex copies.
pub fn tile_patch(net: &Net, k: usize) -> Result<TilingPatch, TileError> {
    if !is_isotetrahedral(&net.mesh) {
        return Err(TileError::NotIsotetrahedral);
    }
    let diam = net.diameter();
    let eps = net.mesh.snap_eps().max(1e-9 * diam);
    let mut generators: Vec<Vec2> = Vec::new();
    for v in 0..4 {
        for p in net.vertex_positions(v) {
            if generators.iter().all(|g| g.dist(p) > eps) {
                generators.push(p);
            }
        }
    }
    let center = net.centroid();
    let probe = [center, center + v2(diam, 0.0)];
    let mut set = MotionSet { probe, eps, keys: BTreeSet::new(), cell: eps * 4.0 };
    let mut motions = vec![Motion2::IDENTITY];
    set.insert(&Motion2::IDENTITY);
    let mut frontier = vec![Motion2::IDENTITY];
    for _ in 0..k {
        let mut next = Vec::new();
        for g in &frontier {
            for &c in &generators {
                let m = Motion2::half_turn(c).compose(g);
                let m = normalize_half_turn(m);
                if set.insert(&m) {
                    next.push(m);
                }
            }
        }
        motions.extend(next.iter().copied());
        frontier = next;
    }
    let guaranteed_radius = covered_radius(net, &generators, &set, center);
    Ok(TilingPatch { motions, radius: k, generators, center, guaranteed_radius })
}

/// Snaps the rotation of a product of half-turns to exactly ±1.
fn normalize_half_turn(m: Motion2) -> Motion2 {
    let [[c, _, tx], [_, _, ty]] = m.matrix();
    let c = if c > 0.0 { 1.0 } else { -1.0 };
    let base = if c > 0.0 { Motion2::IDENTITY } else { Motion2::half_turn(Vec2::ZERO) };
    Motion2::translation(v2(tx, ty)).compose(&base)
}

/// Radius of the disk about `center` that the patch provably covers: every
/// group element whose copy can reach the disk is in the patch.
fn covered_radius(net: &Net, gens: &[Vec2], set: &MotionSet, center: Vec2) -> f64 {
    let rho = net.boundary_polygon().iter().map(|p| p.dist(center)).fold(0.0, f64::max);
    // translation lattice spanned by 2 (a_i − a_0)
    let trans: Vec<Vec2> = gens.iter().skip(1).map(|&a| (a - gens[0]) * 2.0).collect();
    let Some((u, v)) = lattice_basis(&trans) else { return 0.0 };
    let (lu, lv) = (u.norm(), v.norm());
    let area = u.cross(v).abs();
    let reach = 64.0 * (lu + lv) + 4.0 * rho;
    let n = ((reach * lu.max(lv) / area).ceil() as i64).max(2);
    let boundary = net.boundary_polygon();
    let mut cands: Vec<(f64, Motion2)> = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let t = u * i as f64 + v * j as f64;
            for m in [Motion2::translation(t), Motion2::translation(t).compose(&Motion2::half_turn(gens[0]))] {
                cands.push((m.apply(center).dist(center), m));
            }
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    // exact distance from the centre to the nearest copy left out
    let mut best = reach - rho;
    for (d, m) in cands {
        if d - rho >= best {
            break;
        }
        if set.contains(&m) {
            continue;
        }
        let poly: Vec<Vec2> = boundary.iter().map(|&p| m.apply(p)).collect();
        let dist = if geom::point_in_polygon(center, &poly, 0.0) != geom::Containment::Outside {
            0.0
        } else {
            (0..poly.len()).map(|k| geom::dist_point_segment(center, poly[k], poly[(k + 1) % poly.len()])).fold(f64::INFINITY, f64::min)
        };
        best = best.min(dist);
    }
    best.max(0.0)
}

/// Reduced basis of the lattice generated by `vs`, verified to contain them.
fn lattice_basis(vs: &[Vec2]) -> Option<(Vec2, Vec2)> {
    let scale = vs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let tol = 1e-9 * scale;
    // integer combinations of small coefficients suffice for few generators
    let mut cands: Vec<Vec2> = Vec::new();
    let coeffs = [-2i32, -1, 0, 1, 2];
    let k = vs.len().min(4);
    let mut idx = vec![0usize; k];
    loop {
        let mut s = Vec2::ZERO;
        for (t, &c) in idx.iter().enumerate() {
            s += vs[t] * coeffs[c] as f64;
        }
        if s.norm() > tol {
            cands.push(s);
        }
        let mut t = 0;
        while t < k {
            idx[t] += 1;
            if idx[t] < coeffs.len() {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
        if t == k {
            break;
        }
    }
    cands.sort_by(|a, b| a.norm2().total_cmp(&b.norm2()));
    let u = *cands.first()?;
    let v = *cands.iter().find(|w| u.cross(**w).abs() > 1e-6 * u.norm() * w.norm())?;
    let (mut u, mut v) = (u, v);
    // Gauss reduction
    for _ in 0..64 {
        if v.norm2() < u.norm2() {
            core::mem::swap(&mut u, &mut v);
        }
        let m = (u.dot(v) / u.norm2()).round();
        if m == 0.0 {
            break;
        }
        v = v - u * m;
    }
    let det = u.cross(v);
    for w in vs {
        let a = w.cross(v) / det;
        let b = u.cross(*w) / det;
        if (a - a.round()).abs() > 1e-6 || (b - b.round()).abs() > 1e-6 {
            return None;
        }
    }
    Some((u, v))
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub min: Vec2,
    pub max: Vec2,
}

impl Window {
    pub fn centered(c: Vec2, w: f64, h: f64) -> Window {
        Window { min: c - v2(w / 2.0, h / 2.0), max: c + v2(w / 2.0, h / 2.0) }
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }

    fn polygon(&self) -> [Vec2; 4] {
        [self.min, v2(self.max.x, self.min.y), self.max, v2(self.min.x, self.max.y)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TilingReport {
    pub window_area: f64,
    /// Sum of copy areas inside the window.
    pub covered_area: f64,
    /// Sum of pairwise intersections inside the window.
    pub overlap_area: f64,
    /// Window area not covered by any copy.
    pub gap_area: f64,
    pub overlap_fraction: f64,
    pub gap_fraction: f64,
    /// Copies meeting the window.
    pub copies_used: usize,
}

impl TilingReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.overlap_fraction < tol && self.gap_fraction < tol
    }
}

/// Measures overlap and gap of the patch inside `window`.
pub fn verify_tiling(net: &Net, patch: &TilingPatch, window: &Window) -> Result<TilingReport, TileError> {
    let wpoly = window.polygon();
    let required = wpoly.iter().map(|p| p.dist(patch.center)).fold(0.0, f64::max);
    if required > patch.guaranteed_radius {
        return Err(TileError::WindowTooLarge { required, available: patch.guaranteed_radius });
    }
    // convex pieces of the net
    let mut tris: Vec<[Vec2; 3]> = Vec::new();
    for c in &net.cells {
        if let Some(ts) = geom::triangulate(&c.polygon) {
            for t in ts {
                tris.push([c.polygon[t[0]], c.polygon[t[1]], c.polygon[t[2]]]);
            }
        }
    }
    let (nlo, nhi) = geom::bbox(&net.boundary_polygon());
    let ncorners = [nlo, v2(nhi.x, nlo.y), nhi, v2(nlo.x, nhi.y)];
    let wbox = (window.min, window.max);
    let mut pieces: Vec<(Vec<Vec2>, (Vec2, Vec2))> = Vec::new();
    let mut copies_used = 0;
    for m in &patch.motions {
        let moved: Vec<Vec2> = ncorners.iter().map(|&p| m.apply(p)).collect();
        if !geom::boxes_overlap(geom::bbox(&moved), wbox, 0.0) {
            continue;
        }
        let before = pieces.len();
        for t in &tris {
            let tt: Vec<Vec2> = t.iter().map(|&p| m.apply(p)).collect();
            let tt = if geom::signed_area(&tt) < 0.0 { tt.into_iter().rev().collect() } else { tt };
            let clipped = geom::clip_convex(&tt, &wpoly);
            if clipped.len() >= 3 && geom::signed_area(&clipped) > 0.0 {
                let bb = geom::bbox(&clipped);
                pieces.push((clipped, bb));
            }
        }
        if pieces.len() > before {
            copies_used += 1;
        }
    }
    let covered_area: f64 = pieces.iter().map(|p| geom::signed_area(&p.0)).sum();
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by(|&a, &b| pieces[a].1 .0.x.total_cmp(&pieces[b].1 .0.x));
    let mut overlap_area = 0.0;
    for (oi, &i) in order.iter().enumerate() {
        for &j in &order[oi + 1..] {
            if pieces[j].1 .0.x >= pieces[i].1 .1.x {
                break;
            }
            if geom::boxes_overlap(pieces[i].1, pieces[j].1, 0.0) {
                overlap_area += geom::convex_overlap_area(&pieces[i].0, &pieces[j].0);
            }
        }
    }
    let window_area = window.area();
    let gap_area = (window_area - (covered_area - overlap_area)).max(0.0);
    Ok(TilingReport {
        window_area,
        covered_area,
        overlap_area,
        gap_area,
        overlap_fraction: overlap_area / window_area,
        gap_fraction: gap_area / window_area,
        copies_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissection::{edge_spanning_tree, DissectionTree};
    use crate::unfold::{cut_and_unfold, net_area};

    fn sides(m: &PolyhedronMesh, t: usize) -> [f64; 3] {
        let tri = m.triangles()[t];
        let mut s = [0.0; 3];
        for k in 0..3 {
            s[k] = m.vertex(tri[k]).dist(m.vertex(tri[(k + 1) % 3]));
        }
        s.sort_by(f64::total_cmp);
        s
    }

    #[test]
    fn regular_case() {
        let t = isotetra_from_triangle(1.0, 1.0, 1.0).unwrap();
        let p = (1.0f64 / 8.0).sqrt();
        for v in t.mesh.vertices() {
            assert!((v.x.abs() - p).abs() < 1e-15 && (v.y.abs() - p).abs() < 1e-15 && (v.z.abs() - p).abs() < 1e-15);
        }
        assert!(is_isotetrahedral(&t.mesh));
    }

    #[test]
    fn right_triangle_rejected() {
        assert!(matches!(isotetra_from_triangle(3.0, 4.0, 5.0), Err(TileError::NotAcute(..))));
        assert!(isotetra_from_triangle(2.0, 3.0, 4.0).is_err());
    }

    #[test]
    fn four_five_six() {
        let t = isotetra_from_triangle(4.0, 5.0, 6.0).unwrap();
        let v = t.mesh.vertex(0);
        assert!((v.x * v.x - 45.0 / 8.0).abs() < 1e-12);
        assert!((v.y * v.y - 27.0 / 8.0).abs() < 1e-12);
        assert!((v.z * v.z - 5.0 / 8.0).abs() < 1e-12);
        for f in 0..t.mesh.num_triangles() {
            let s = sides(&t.mesh, f);
            assert!((s[0] - 4.0).abs() < 1e-12 && (s[1] - 5.0).abs() < 1e-12 && (s[2] - 6.0).abs() < 1e-12);
        }
        for vtx in 0..4 {
            assert!((t.mesh.angle_sum(vtx) - core::f64::consts::PI).abs() < 1e-12);
        }
    }

    fn star_net() -> Net {
        let t = isotetra_from_triangle(1.0, 1.0, 1.0).unwrap();
        let d = DissectionTree::from_vertex_edges(&t.mesh, &[(3, 0), (3, 1), (3, 2)]).unwrap();
        cut_and_unfold(&t.mesh, &d).unwrap()
    }

    #[test]
    fn big_triangle_patch() {
        let net = star_net();
        let p1 = tile_patch(&net, 1).unwrap();
        // identity plus three half-turns about the edge midpoints and three about the corners
        assert!(p1.motions.contains(&Motion2::IDENTITY));
        assert_eq!(p1.generators.len(), 6);
        let p3 = tile_patch(&net, 3).unwrap();
        let w = Window::centered(p3.center, 2.0, 2.0);
        let r = verify_tiling(&net, &p3, &w).unwrap();
        assert!(r.passes(1e-6), "{r:?}");
    }

    #[test]
    fn half_turn_products_are_translations() {
        let net = star_net();
        let p = tile_patch(&net, 2).unwrap();
        for &a in &p.generators {
            for &b in &p.generators {
                let m = Motion2::half_turn(a).compose(&Motion2::half_turn(b));
                assert!(m.angle().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn missing_copy_leaves_gap() {
        let net = star_net();
        let mut p = tile_patch(&net, 3).unwrap();
        // inscribed radius of the big triangle is 1/√3
        let w = Window::centered(p.center, 0.8, 0.8);
        assert!(verify_tiling(&net, &p, &w).unwrap().gap_fraction < 1e-9);
        p.motions.retain(|m| *m != Motion2::IDENTITY);
        let r = verify_tiling(&net, &p, &w).unwrap();
        assert!((r.gap_fraction - 1.0).abs() < 1e-9, "{}", r.gap_fraction);
        let full = tile_patch(&net, 3).unwrap();
        let big = Window::centered(full.center, 2.0, 2.0);
        let mut holed = full.clone();
        holed.motions.retain(|m| *m != Motion2::IDENTITY);
        let a = verify_tiling(&net, &holed, &big).unwrap().gap_area;
        assert!(a > 0.5 * net_area(&net) && a <= net_area(&net) + 1e-9);
    }

    #[test]
    fn edge_tree_on_scalene() {
        let t = isotetra_from_triangle(4.0, 5.0, 6.0).unwrap();
        for seed in 0..4 {
            let net = cut_and_unfold(&t.mesh, &edge_spanning_tree(&t.mesh, seed)).unwrap();
            let p = tile_patch(&net, 3).unwrap();
            let d = net.diameter();
            let w = Window::centered(p.center, d, d);
            let r = verify_tiling(&net, &p, &w).unwrap();
            assert!(r.passes(1e-6), "seed {seed}: {r:?}");
        }
    }
}
