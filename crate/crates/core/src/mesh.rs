//! Closed polyhedral surfaces with half-edge connectivity, including flat
//! doubly covered polygons (dihedra).
//!
//! Polygonal faces are kept as given; internally every face is triangulated
//! (a fan when the face is convex) and all surface positions live on that
//! triangle mesh. For triangle meshes triangle ids and face ids coincide.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::geom::{self, orient, v2, Vec2, Vec3};

/// Relative tolerance for planarity and convexity checks.
pub const SHAPE_TOL: f64 = 1e-7;
/// Incidence snapping, relative to the mesh diameter.
pub const SNAP_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("face {face} has fewer than 3 vertices")]
    FaceTooSmall { face: usize },
    #[error("face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("open edge {a}-{b}: no opposite half-edge")]
    OpenEdge { a: usize, b: usize },
    #[error("inverted orientation: half-edge {a}->{b} appears twice")]
    InconsistentOrientation { a: usize, b: usize },
    #[error("vertex {vertex} is not used by any face")]
    UnusedVertex { vertex: usize },
    #[error("vertex {vertex} is not a manifold vertex")]
    NonManifoldVertex { vertex: usize },
    #[error("Euler characteristic is {chi}, expected 2")]
    EulerCharacteristic { chi: i64 },
    #[error("face {face} is not planar (deviation {deviation:e})")]
    NonPlanarFace { face: usize, deviation: f64 },
    #[error("face {face} is not a simple polygon")]
    NonSimpleFace { face: usize },
    #[error("inverted orientation: faces wind clockwise seen from outside")]
    InvertedOrientation,
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(&'static str),
}

/// Position on the surface: a triangle of the internal triangulation and
/// barycentric weights of its three corners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub face: usize,
    pub bary: [f64; 3],
}

/// Canonical, snapped location of a surface point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Loc {
    Vertex(usize),
    /// Interior of mesh edge `edge`, parameter `t ∈ (0, 1)` from `v[0]` to `v[1]`.
    Edge { edge: usize, t: f64 },
    Face { tri: usize, bary: [f64; 3] },
}

#[derive(Clone, Debug)]
pub struct HalfEdges {
    pub origin: Vec<usize>,
    pub twin: Vec<usize>,
    pub next: Vec<usize>,
    pub face: Vec<usize>,
}

/// Edge of the internal triangulation.
#[derive(Clone, Copy, Debug)]
pub struct MeshEdge {
    pub v: [usize; 2],
    /// `(triangle, local edge)`; the first runs `v[0] → v[1]`, the second `v[1] → v[0]`.
    pub sides: [(usize, usize); 2],
    /// Part of the polygonal skeleton (false for triangulation diagonals).
    pub skeleton: bool,
}

#[derive(Clone, Debug)]
pub struct PolyhedronMesh {
    vertices: Vec<Vec3>,
    faces: Vec<Vec<usize>>,
    halfedges: HalfEdges,
    tris: Vec<[usize; 3]>,
    tri_face: Vec<usize>,
    tri_edges: Vec<[usize; 3]>,
    edges: Vec<MeshEdge>,
    charts: Vec<[Vec2; 3]>,
    fans: Vec<Vec<(usize, usize)>>,
    is_dihedron: bool,
    convex: bool,
    diameter: f64,
}

impl PolyhedronMesh {
    /// Builds and validates a closed oriented surface. Faces are
    /// counterclockwise seen from outside.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        Self::build(vertices, faces, None)
    }

    fn build(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>, dihedron: Option<bool>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(MeshError::FaceTooSmall { face: fi });
            }
            for (k, &i) in f.iter().enumerate() {
                if i >= nv {
                    return Err(MeshError::IndexOutOfRange { face: fi, index: i, count: nv });
                }
                if f[..k].contains(&i) {
                    return Err(MeshError::RepeatedVertex { face: fi, vertex: i });
                }
            }
        }

        // half-edges
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut he = HalfEdges { origin: Vec::new(), twin: Vec::new(), next: Vec::new(), face: Vec::new() };
        for (fi, f) in faces.iter().enumerate() {
            let base = he.origin.len();
            let n = f.len();
            for k in 0..n {
                let (a, b) = (f[k], f[(k + 1) % n]);
                if directed.insert((a, b), base + k).is_some() {
                    return Err(MeshError::InconsistentOrientation { a, b });
                }
                he.origin.push(a);
                he.next.push(base + (k + 1) % n);
                he.face.push(fi);
                he.twin.push(usize::MAX);
            }
        }
        for (&(a, b), &h) in &directed {
            match directed.get(&(b, a)) {
                Some(&t) => he.twin[h] = t,
                None => return Err(MeshError::OpenEdge { a, b }),
            }
        }
        let mut used = vec![false; nv];
        for &o in &he.origin {
            used[o] = true;
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(MeshError::UnusedVertex { vertex: v });
        }
        let ne = he.origin.len() / 2;
        let chi = nv as i64 - ne as i64 + faces.len() as i64;
        if chi != 2 {
            return Err(MeshError::EulerCharacteristic { chi });
        }
        // manifold vertices: the ring of outgoing half-edges is a single cycle
        let mut out_count = vec![0usize; nv];
        let mut first_out = vec![usize::MAX; nv];
        for (h, &o) in he.origin.iter().enumerate() {
            out_count[o] += 1;
            if first_out[o] == usize::MAX {
                first_out[o] = h;
            }
        }
        for v in 0..nv {
            let start = first_out[v];
            let mut h = start;
            let mut steps = 0;
            loop {
                // previous half-edge in face, its twin leaves v
                h = he.next[he.twin[h]];
                steps += 1;
                if h == start || steps > out_count[v] {
                    break;
                }
            }
            if steps != out_count[v] || h != start {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
        }

        let mut diameter: f64 = 0.0;
        for i in 0..nv {
            for j in i + 1..nv {
                diameter = diameter.max(vertices[i].dist(vertices[j]));
            }
        }
        let tol = SHAPE_TOL * diameter.max(1e-300);

        // planarity, simplicity, triangulation
        let mut tris = Vec::new();
        let mut tri_face = Vec::new();
        let mut normals = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            let n = newell_normal(&vertices, f);
            let nn = n.norm();
            if nn <= tol * tol {
                return Err(MeshError::NonSimpleFace { face: fi });
            }
            let n = n / nn;
            let c = f.iter().fold(Vec3::default(), |s, &i| s + vertices[i]) / f.len() as f64;
            let dev = f.iter().map(|&i| (vertices[i] - c).dot(n).abs()).fold(0.0, f64::max);
            if dev > tol {
                return Err(MeshError::NonPlanarFace { face: fi, deviation: dev });
            }
            normals.push((n, c));
            let (e1, e2) = plane_basis(n);
            let poly: Vec<Vec2> = f.iter().map(|&i| v2((vertices[i] - c).dot(e1), (vertices[i] - c).dot(e2))).collect();
            if !polygon_is_simple(&poly, tol) || geom::signed_area(&poly) <= 0.0 {
                return Err(MeshError::NonSimpleFace { face: fi });
            }
            let fan_ok = (1..f.len() - 1).all(|k| orient(poly[0], poly[k], poly[k + 1]) > tol * tol);
            if fan_ok {
                for k in 1..f.len() - 1 {
                    tris.push([f[0], f[k], f[k + 1]]);
                    tri_face.push(fi);
                }
            } else {
                let t = geom::triangulate(&poly).ok_or(MeshError::NonSimpleFace { face: fi })?;
                for t in t {
                    tris.push([f[t[0]], f[t[1]], f[t[2]]]);
                    tri_face.push(fi);
                }
            }
        }

        // triangulation edges
        let mut edge_key: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut tri_edges = vec![[usize::MAX; 3]; tris.len()];
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let skeleton = directed.get(&(a, b)).is_some_and(|&h| he.face[h] == tri_face[t]);
                let key = if skeleton { (usize::MAX, a.min(b), a.max(b)) } else { (tri_face[t], a.min(b), a.max(b)) };
                match edge_key.get(&key) {
                    Some(&e) => {
                        let me = &mut edges[e];
                        if me.sides[1].0 != usize::MAX || me.v != [b, a] {
                            return Err(MeshError::InconsistentOrientation { a, b });
                        }
                        me.sides[1] = (t, k);
                        tri_edges[t][k] = e;
                    }
                    None => {
                        edge_key.insert(key, edges.len());
                        tri_edges[t][k] = edges.len();
                        edges.push(MeshEdge { v: [a, b], sides: [(t, k), (usize::MAX, 0)], skeleton });
                    }
                }
            }
        }
        if let Some(e) = edges.iter().find(|e| e.sides[1].0 == usize::MAX) {
            return Err(MeshError::OpenEdge { a: e.v[0], b: e.v[1] });
        }

        let charts: Vec<[Vec2; 3]> = tris.iter().map(|t| triangle_chart(vertices[t[0]], vertices[t[1]], vertices[t[2]])).collect();

        let mut mesh = PolyhedronMesh {
            vertices,
            faces,
            halfedges: he,
            tris,
            tri_face,
            tri_edges,
            edges,
            charts,
            fans: Vec::new(),
            is_dihedron: false,
            convex: false,
            diameter,
        };
        mesh.fans = (0..nv).map(|v| mesh.build_fan(v)).collect::<Result<Vec<_>, _>>()?;

        let volume = mesh.signed_volume();
        let flat = volume.abs() <= tol * diameter * diameter;
        mesh.is_dihedron = dihedron.unwrap_or(flat && mesh.faces.len() == 2);
        if !mesh.is_dihedron && volume < 0.0 {
            return Err(MeshError::InvertedOrientation);
        }
        let mut convex = (0..nv).all(|v| mesh.angle_sum(v) <= 2.0 * PI + SHAPE_TOL);
        if convex {
            for (n, c) in &normals {
                if mesh.vertices.iter().any(|&p| (p - *c).dot(*n) > tol) {
                    convex = false;
                    break;
                }
            }
        }
        mesh.convex = convex;
        Ok(mesh)
    }

    /// Doubly covered polygon: a front copy (counterclockwise from +z) and a
    /// reflected back copy glued along every boundary edge.
    pub fn make_dihedron(polygon: &[Vec2]) -> Result<Self, MeshError> {
        let n = polygon.len();
        if n < 3 {
            return Err(MeshError::DegeneratePolygon("fewer than 3 vertices"));
        }
        let area = geom::signed_area(polygon);
        let (lo, hi) = geom::bbox(polygon);
        let scale = (hi - lo).norm();
        if area.abs() <= 1e-12 * scale * scale {
            return Err(MeshError::DegeneratePolygon("zero area"));
        }
        if !polygon_is_simple(polygon, 1e-12 * scale) {
            return Err(MeshError::DegeneratePolygon("self-intersecting"));
        }
        let pts: Vec<Vec2> = if area > 0.0 { polygon.to_vec() } else { polygon.iter().rev().copied().collect() };
        let vertices = pts.iter().map(|p| Vec3 { x: p.x, y: p.y, z: 0.0 }).collect();
        let front: Vec<usize> = (0..n).collect();
        let back: Vec<usize> = (0..n).rev().collect();
        Self::build(vertices, vec![front, back], Some(true))
    }

    fn build_fan(&self, v: usize) -> Result<Vec<(usize, usize)>, MeshError> {
        let mut start = None;
        for (t, tri) in self.tris.iter().enumerate() {
            if let Some(c) = tri.iter().position(|&x| x == v) {
                start = Some((t, c));
                break;
            }
        }
        let start = start.ok_or(MeshError::UnusedVertex { vertex: v })?;
        let mut fan = vec![start];
        let mut cur = start;
        loop {
            let (t, c) = cur;
            let (nt, nk) = self.tri_neighbor(t, (c + 2) % 3);
            // in the neighbor, the shared edge runs v → x, so v sits at corner nk
            let next = (nt, nk);
            if next == start {
                break;
            }
            if fan.len() > self.tris.len() {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
            fan.push(next);
            cur = next;
        }
        Ok(fan)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }
    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }
    pub fn halfedges(&self) -> &HalfEdges {
        &self.halfedges
    }
    pub fn num_edges(&self) -> usize {
        self.halfedges.origin.len() / 2
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.tris
    }
    pub fn num_triangles(&self) -> usize {
        self.tris.len()
    }
    pub fn triangle_face(&self, t: usize) -> usize {
        self.tri_face[t]
    }
    pub fn tri_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }
    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }
    pub fn edge(&self, e: usize) -> &MeshEdge {
        &self.edges[e]
    }
    pub fn chart(&self, t: usize) -> &[Vec2; 3] {
        &self.charts[t]
    }
    /// Triangles around `v` in counterclockwise order, as `(triangle, corner)`.
    pub fn vertex_fan(&self, v: usize) -> &[(usize, usize)] {
        &self.fans[v]
    }
    pub fn is_dihedron(&self) -> bool {
        self.is_dihedron
    }
    pub fn is_convex(&self) -> bool {
        self.convex
    }
    pub fn diameter(&self) -> f64 {
        self.diameter
    }
    pub fn snap_eps(&self) -> f64 {
        SNAP_REL * self.diameter
    }

    /// Skeleton edges as vertex pairs `(min, max)`, one per polygon edge.
    pub fn skeleton_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.edges.iter().filter(|e| e.skeleton).map(|e| (e.v[0].min(e.v[1]), e.v[0].max(e.v[1]))).collect();
        out.sort_unstable();
        out
    }

    /// Triangulation edge joining two vertices, preferring one incident to `hint`.
    pub fn edge_between(&self, a: usize, b: usize, hint: Option<usize>) -> Option<usize> {
        let mut found = None;
        for &(t, c) in &self.fans[a] {
            let e_out = self.tri_edges[t][c];
            let e_in = self.tri_edges[t][(c + 2) % 3];
            for e in [e_out, e_in] {
                let me = &self.edges[e];
                if (me.v[0] == a && me.v[1] == b) || (me.v[0] == b && me.v[1] == a) {
                    if hint.is_some_and(|h| me.sides[0].0 == h || me.sides[1].0 == h) {
                        return Some(e);
                    }
                    found = found.or(Some(e));
                }
            }
        }
        found
    }

    /// Neighbor across local edge `k` of triangle `t`, as `(triangle, local edge)`.
    pub fn tri_neighbor(&self, t: usize, k: usize) -> (usize, usize) {
        let e = &self.edges[self.tri_edges[t][k]];
        if e.sides[0] == (t, k) {
            e.sides[1]
        } else {
            e.sides[0]
        }
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let c = &self.charts[t];
        0.5 * orient(c[0], c[1], c[2])
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.tris.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn corner_angle(&self, t: usize, c: usize) -> f64 {
        let ch = &self.charts[t];
        let a = ch[(c + 1) % 3] - ch[c];
        let b = ch[(c + 2) % 3] - ch[c];
        a.cross(b).atan2(a.dot(b))
    }

    /// Intrinsic angle of direction `dir` (in the chart of `t`) leaving vertex
    /// `v`, measured counterclockwise through the fan from its first triangle.
    pub fn direction_angle(&self, v: usize, t: usize, dir: Vec2) -> Option<f64> {
        let mut offset = 0.0;
        for &(ft, c) in &self.fans[v] {
            if ft == t {
                let ch = &self.charts[t];
                let e = ch[(c + 1) % 3] - ch[c];
                let a = e.cross(dir).atan2(e.dot(dir));
                let a = a.max(0.0).min(self.corner_angle(t, c));
                let total = self.angle_sum(v);
                let mut r = offset + a;
                if r >= total {
                    r -= total;
                }
                return Some(r);
            }
            offset += self.corner_angle(ft, c);
        }
        None
    }

    /// Total face angle at a vertex.
    pub fn angle_sum(&self, v: usize) -> f64 {
        self.fans[v].iter().map(|&(t, c)| self.corner_angle(t, c)).sum()
    }

    fn signed_volume(&self) -> f64 {
        let mut s = 0.0;
        for t in &self.tris {
            let (a, b, c) = (self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]);
            s += a.dot(b.cross(c));
        }
        s / 6.0
    }

    pub fn point3(&self, sp: &SurfacePoint) -> Vec3 {
        let t = &self.tris[sp.face];
        self.vertices[t[0]] * sp.bary[0] + self.vertices[t[1]] * sp.bary[1] + self.vertices[t[2]] * sp.bary[2]
    }

    pub fn loc_point3(&self, loc: &Loc) -> Vec3 {
        match *loc {
            Loc::Vertex(v) => self.vertices[v],
            Loc::Edge { edge, t } => {
                let e = &self.edges[edge];
                self.vertices[e.v[0]].lerp(self.vertices[e.v[1]], t)
            }
            Loc::Face { tri, bary } => self.point3(&SurfacePoint { face: tri, bary }),
        }
    }

    pub fn chart_point(&self, sp: &SurfacePoint) -> Vec2 {
        let c = &self.charts[sp.face];
        c[0] * sp.bary[0] + c[1] * sp.bary[1] + c[2] * sp.bary[2]
    }

    /// Surface point at chart position `p` of triangle `t`.
    pub fn from_chart(&self, t: usize, p: Vec2) -> SurfacePoint {
        let c = &self.charts[t];
        let area = orient(c[0], c[1], c[2]);
        let b0 = orient(p, c[1], c[2]) / area;
        let b1 = orient(c[0], p, c[2]) / area;
        SurfacePoint { face: t, bary: [b0, b1, 1.0 - b0 - b1] }
    }

    /// Snaps a surface point to a vertex, an edge interior or a face interior.
    pub fn locate(&self, sp: &SurfacePoint) -> Loc {
        self.locate_with(sp, self.snap_eps())
    }

    pub fn locate_with(&self, sp: &SurfacePoint, eps: f64) -> Loc {
        let t = sp.face;
        let ch = &self.charts[t];
        let area2 = orient(ch[0], ch[1], ch[2]);
        let mut b = sp.bary;
        for i in 0..3 {
            let base = ch[(i + 1) % 3].dist(ch[(i + 2) % 3]);
            let height = area2 / base;
            if b[i] * height <= eps {
                b[i] = 0.0;
            }
        }
        let s: f64 = b.iter().sum();
        if s <= 0.0 {
            // all weights vanished: the triangle is tiny compared to eps
            let i = (0..3).max_by(|&x, &y| sp.bary[x].partial_cmp(&sp.bary[y]).unwrap()).unwrap();
            return Loc::Vertex(self.tris[t][i]);
        }
        for x in b.iter_mut() {
            *x /= s;
        }
        let zeros = b.iter().filter(|&&x| x == 0.0).count();
        match zeros {
            2 => {
                let i = (0..3).find(|&i| b[i] > 0.0).unwrap();
                Loc::Vertex(self.tris[t][i])
            }
            1 => {
                let i = (0..3).find(|&i| b[i] == 0.0).unwrap();
                let k = (i + 1) % 3; // local edge opposite corner i
                let e = self.tri_edges[t][k];
                let forward = self.edges[e].sides[0] == (t, k);
                let param = if forward { b[(k + 1) % 3] } else { b[k] };
                Loc::Edge { edge: e, t: param }
            }
            _ => Loc::Face { tri: t, bary: b },
        }
    }

    /// Triangles whose closure contains `loc`.
    pub fn loc_tris(&self, loc: &Loc) -> Vec<usize> {
        match *loc {
            Loc::Vertex(v) => self.fans[v].iter().map(|&(t, _)| t).collect(),
            Loc::Edge { edge, .. } => {
                let e = &self.edges[edge];
                vec![e.sides[0].0, e.sides[1].0]
            }
            Loc::Face { tri, .. } => vec![tri],
        }
    }

    /// Chart coordinates of `loc` in triangle `t`, if incident.
    pub fn loc_chart(&self, t: usize, loc: &Loc) -> Option<Vec2> {
        let ch = &self.charts[t];
        match *loc {
            Loc::Vertex(v) => self.tris[t].iter().position(|&x| x == v).map(|c| ch[c]),
            Loc::Edge { edge, t: param } => {
                let k = (0..3).find(|&k| self.tri_edges[t][k] == edge)?;
                let forward = self.edges[edge].sides[0] == (t, k);
                let (a, b) = if forward { (ch[k], ch[(k + 1) % 3]) } else { (ch[(k + 1) % 3], ch[k]) };
                Some(a.lerp(b, param))
            }
            Loc::Face { tri, bary } => {
                if tri == t {
                    Some(ch[0] * bary[0] + ch[1] * bary[1] + ch[2] * bary[2])
                } else {
                    None
                }
            }
        }
    }

    /// A surface point representing `loc` (in its lowest incident triangle).
    pub fn surface_point(&self, loc: &Loc) -> SurfacePoint {
        match *loc {
            Loc::Face { tri, bary } => SurfacePoint { face: tri, bary },
            _ => {
                let t = self.loc_tris(loc).into_iter().min().unwrap();
                self.surface_point_in(t, loc).unwrap()
            }
        }
    }

    pub fn surface_point_in(&self, t: usize, loc: &Loc) -> Option<SurfacePoint> {
        let tri = &self.tris[t];
        match *loc {
            Loc::Vertex(v) => {
                let c = tri.iter().position(|&x| x == v)?;
                let mut bary = [0.0; 3];
                bary[c] = 1.0;
                Some(SurfacePoint { face: t, bary })
            }
            Loc::Edge { edge, t: param } => {
                let k = (0..3).find(|&k| self.tri_edges[t][k] == edge)?;
                let forward = self.edges[edge].sides[0] == (t, k);
                let mut bary = [0.0; 3];
                if forward {
                    bary[k] = 1.0 - param;
                    bary[(k + 1) % 3] = param;
                } else {
                    bary[(k + 1) % 3] = 1.0 - param;
                    bary[k] = param;
                }
                Some(SurfacePoint { face: t, bary })
            }
            Loc::Face { tri: ft, bary } => (ft == t).then_some(SurfacePoint { face: t, bary }),
        }
    }

    /// Vertex surface point in the first triangle of its fan.
    pub fn vertex_point(&self, v: usize) -> SurfacePoint {
        self.surface_point(&Loc::Vertex(v))
    }

    /// Surface point of face `f` at the average of its corners.
    pub fn face_centroid(&self, f: usize) -> SurfacePoint {
        let face = &self.faces[f];
        let c = face.iter().fold(Vec3::default(), |a, &v| a + self.vertices[v]) / face.len() as f64;
        let mut best = (f64::NEG_INFINITY, SurfacePoint { face: 0, bary: [1.0 / 3.0; 3] });
        for t in (0..self.num_triangles()).filter(|&t| self.triangle_face(t) == f) {
            let [a, b, d] = self.triangles()[t].map(|v| self.vertices[v]);
            let x = (b - a).normalized();
            let y = (b - a).cross(d - a).cross(b - a).normalized();
            let sp = self.from_chart(t, v2((c - a).dot(x), (c - a).dot(y)));
            let m = sp.bary.iter().copied().fold(f64::INFINITY, f64::min);
            if m > best.0 {
                best = (m, sp);
            }
        }
        best.1
    }

    /// Centroid of triangle `t`.
    pub fn tri_centroid(&self, t: usize) -> SurfacePoint {
        SurfacePoint { face: t, bary: [1.0 / 3.0; 3] }
    }

    /// Whether two locations denote the same surface point.
    pub fn same_loc(&self, a: &Loc, b: &Loc) -> bool {
        let eps = self.snap_eps();
        match (a, b) {
            (Loc::Vertex(x), Loc::Vertex(y)) => x == y,
            (Loc::Edge { edge: e1, t: t1 }, Loc::Edge { edge: e2, t: t2 }) => {
                let e = &self.edges[*e1];
                e1 == e2 && (t1 - t2).abs() * self.vertices[e.v[0]].dist(self.vertices[e.v[1]]) <= eps
            }
            (Loc::Face { tri: t1, .. }, Loc::Face { tri: t2, .. }) => {
                t1 == t2 && self.loc_chart(*t1, a).unwrap().dist(self.loc_chart(*t1, b).unwrap()) <= eps
            }
            _ => false,
        }
    }
}

/// Chart of a triangle: first corner at the origin, second on the +x axis.
pub fn triangle_chart(a: Vec3, b: Vec3, c: Vec3) -> [Vec2; 3] {
    let ab = b - a;
    let ac = c - a;
    let l = ab.norm();
    let x = ac.dot(ab) / l;
    let y = (ac.norm2() - x * x).max(0.0).sqrt();
    [v2(0.0, 0.0), v2(l, 0.0), v2(x, y)]
}

fn newell_normal(vs: &[Vec3], f: &[usize]) -> Vec3 {
    let mut n = Vec3::default();
    for k in 0..f.len() {
        let p = vs[f[k]];
        let q = vs[f[(k + 1) % f.len()]];
        n.x += (p.y - q.y) * (p.z + q.z);
        n.y += (p.z - q.z) * (p.x + q.x);
        n.z += (p.x - q.x) * (p.y + q.y);
    }
    n
}

fn plane_basis(n: Vec3) -> (Vec3, Vec3) {
    let a = if n.x.abs() < 0.9 { Vec3 { x: 1.0, y: 0.0, z: 0.0 } } else { Vec3 { x: 0.0, y: 1.0, z: 0.0 } };
    let e1 = a.cross(n).normalized();
    let e1 = -e1;
    let e2 = n.cross(e1);
    (e1, e2)
}

/// No two non-adjacent edges touch.
pub fn polygon_is_simple(poly: &[Vec2], eps: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if a.dist(b) <= eps {
            return false;
        }
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if geom::segments_touch(a, b, c, d, eps) {
                return false;
            }
        }
    }
    // adjacent edges folding back onto each other
    for i in 0..n {
        let (a, b, c) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
        let u = a - b;
        let w = c - b;
        if u.cross(w).abs() <= eps * (u.norm() + w.norm()) && u.dot(w) > 0.0 {
            return false;
        }
    }
    true
}

/// Unit cube `[0,1]³` with quad faces.
pub fn unit_cube() -> PolyhedronMesh {
    let v = |x: f64, y: f64, z: f64| Vec3 { x, y, z };
    let vertices = vec![
        v(0.0, 0.0, 0.0),
        v(1.0, 0.0, 0.0),
        v(1.0, 1.0, 0.0),
        v(0.0, 1.0, 0.0),
        v(0.0, 0.0, 1.0),
        v(1.0, 0.0, 1.0),
        v(1.0, 1.0, 1.0),
        v(0.0, 1.0, 1.0),
    ];
    let faces = vec![
        vec![0, 3, 2, 1],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![1, 2, 6, 5],
        vec![2, 3, 7, 6],
        vec![3, 0, 4, 7],
    ];
    PolyhedronMesh::new(vertices, faces).expect("cube is valid")
}

/// Regular tetrahedron with unit edges.
pub fn regular_tetrahedron() -> PolyhedronMesh {
    let s = 1.0 / (2.0 * 2f64.sqrt());
    let vertices = vec![
        Vec3 { x: s, y: s, z: s },
        Vec3 { x: s, y: -s, z: -s },
        Vec3 { x: -s, y: s, z: -s },
        Vec3 { x: -s, y: -s, z: s },
    ];
    let faces = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
    PolyhedronMesh::new(vertices, faces).expect("tetrahedron is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn cube_counts_and_area() {
        let m = unit_cube();
        assert_eq!(m.num_vertices(), 8);
        assert_eq!(m.num_edges(), 12);
        assert_eq!(m.faces().len(), 6);
        assert_eq!(m.num_vertices() as i64 - m.num_edges() as i64 + m.faces().len() as i64, 2);
        assert!((m.surface_area() - 6.0).abs() < 1e-12);
        assert!(m.is_convex());
        for v in 0..8 {
            assert!((m.angle_sum(v) - 1.5 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn tetra_area_and_angles() {
        let m = regular_tetrahedron();
        assert!((m.surface_area() - 3f64.sqrt()).abs() < 1e-12);
        assert!(m.is_convex());
        for v in 0..4 {
            assert!((m.angle_sum(v) - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn dihedron_square() {
        let sq = [v2(0.0, 0.0), v2(1.0, 0.0), v2(1.0, 1.0), v2(0.0, 1.0)];
        let m = PolyhedronMesh::make_dihedron(&sq).unwrap();
        assert!(m.is_dihedron());
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.faces().len(), 2);
        assert!((m.surface_area() - 2.0).abs() < 1e-12);
        assert!(m.is_convex());
        for v in 0..4 {
            assert!((m.angle_sum(v) - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn dihedron_rejects_collinear() {
        let p = [v2(0.0, 0.0), v2(1.0, 0.0), v2(2.0, 0.0)];
        assert!(matches!(PolyhedronMesh::make_dihedron(&p), Err(MeshError::DegeneratePolygon(_))));
    }

    #[test]
    fn dihedron_rejects_bowtie() {
        let p = [v2(0.0, 0.0), v2(1.0, 1.0), v2(1.0, 0.0), v2(0.0, 1.0)];
        assert!(matches!(PolyhedronMesh::make_dihedron(&p), Err(MeshError::DegeneratePolygon(_))));
    }

    #[test]
    fn rejects_open_and_inverted() {
        let v = |x: f64, y: f64, z: f64| Vec3 { x, y, z };
        let verts = vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0)];
        let open = PolyhedronMesh::new(verts.clone(), vec![vec![0, 2, 1], vec![0, 1, 3], vec![0, 3, 2]]);
        assert!(matches!(open, Err(MeshError::OpenEdge { .. })));
        let one_flipped = PolyhedronMesh::new(verts.clone(), vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 3, 2], vec![1, 2, 3]]);
        assert!(matches!(one_flipped, Err(MeshError::InconsistentOrientation { .. })));
        let all_inverted = PolyhedronMesh::new(verts, vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]]);
        assert!(matches!(all_inverted, Err(MeshError::InvertedOrientation)));
    }

    #[test]
    fn rejects_index_out_of_range() {
        let m = PolyhedronMesh::new(vec![Vec3::default(); 3], vec![vec![0, 1, 99]]);
        assert_eq!(m.unwrap_err(), MeshError::IndexOutOfRange { face: 0, index: 99, count: 3 });
    }

    #[test]
    fn locate_snaps() {
        let m = unit_cube();
        let t = 0;
        let sp = SurfacePoint { face: t, bary: [1.0 - 1e-14, 1e-14, 0.0] };
        assert!(matches!(m.locate(&sp), Loc::Vertex(_)));
        let sp = SurfacePoint { face: t, bary: [0.5, 0.5, 0.0] };
        match m.locate(&sp) {
            Loc::Edge { edge, t: p } => {
                let e = m.edge(edge);
                let q = m.vertex(e.v[0]).lerp(m.vertex(e.v[1]), p);
                assert!(q.dist(m.point3(&sp)) < 1e-12);
                for &tt in &m.loc_tris(&Loc::Edge { edge, t: p }) {
                    let sp2 = m.surface_point_in(tt, &Loc::Edge { edge, t: p }).unwrap();
                    assert!(m.point3(&sp2).dist(q) < 1e-12);
                }
            }
            other => panic!("expected edge, got {:?}", other),
        }
    }

    #[test]
    fn fan_is_cyclic() {
        let m = unit_cube();
        for v in 0..8 {
            let fan = m.vertex_fan(v);
            // quads fan-triangulate, so corners see 3..=4 triangles
            assert!(fan.len() >= 3 && fan.len() <= 6);
            for &(t, c) in fan {
                assert_eq!(m.triangles()[t][c], v);
            }
        }
    }
}
