//! Straight polylines on the surface, exact shortest paths, star unfolding
//! and cut loci.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geom::{self, dist_point_segment, v2, Motion2, Vec2};
use crate::mesh::{Loc, PolyhedronMesh, SurfacePoint};
use crate::dissection::{DissectionTree, TreeEdge, TreeNode};
use crate::overlay::hinge;
use crate::unfold::{cut_and_unfold, Net, UnfoldError};
use alloc::format;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Piecewise straight path on the surface. Consecutive points lie in a
/// common triangle; interior points on mesh edges are recorded in
/// `crossed_edges`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPolyline {
    pub points: Vec<SurfacePoint>,
    pub crossed_edges: Vec<usize>,
    pub length: f64,
}

/// A polyline piece inside one triangle, in that triangle's chart.
#[derive(Clone, Copy, Debug)]
pub struct PathSeg {
    pub tri: usize,
    pub a: Loc,
    pub b: Loc,
    pub pa: Vec2,
    pub pb: Vec2,
    /// Mesh edge the segment runs along, if any.
    pub along: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PathError {
    #[error("polyline points {index} and {next} share no triangle", next = index + 1)]
    Disconnected { index: usize },
    #[error("polyline has fewer than two points")]
    TooShort,
}

impl GeodesicPolyline {
    pub fn new(mesh: &PolyhedronMesh, points: Vec<SurfacePoint>) -> Result<Self, PathError> {
        if points.len() < 2 {
            return Err(PathError::TooShort);
        }
        let segs = segments_of(mesh, &points)?;
        let length = segs.iter().map(|s| s.pa.dist(s.pb)).sum();
        let crossed_edges = points[1..points.len() - 1]
            .iter()
            .filter_map(|p| match mesh.locate(p) {
                Loc::Edge { edge, .. } => Some(edge),
                _ => None,
            })
            .collect();
        Ok(GeodesicPolyline { points, crossed_edges, length })
    }

    /// Triangle-local pieces; degenerate (zero-length) pieces are skipped.
    pub fn segments(&self, mesh: &PolyhedronMesh) -> Vec<PathSeg> {
        segments_of(mesh, &self.points).unwrap_or_default()
    }

    pub fn reversed(&self) -> GeodesicPolyline {
        let mut points = self.points.clone();
        points.reverse();
        let mut crossed_edges = self.crossed_edges.clone();
        crossed_edges.reverse();
        GeodesicPolyline { points, crossed_edges, length: self.length }
    }

    pub fn start(&self) -> SurfacePoint {
        self.points[0]
    }

    pub fn end(&self) -> SurfacePoint {
        *self.points.last().unwrap()
    }
}

fn segments_of(mesh: &PolyhedronMesh, points: &[SurfacePoint]) -> Result<Vec<PathSeg>, PathError> {
    let mut out = Vec::with_capacity(points.len());
    for i in 0..points.len() - 1 {
        let (p, q) = (&points[i], &points[i + 1]);
        let (la, lb) = (mesh.locate(p), mesh.locate(q));
        if mesh.same_loc(&la, &lb) {
            continue;
        }
        let ta = mesh.loc_tris(&la);
        let tb = mesh.loc_tris(&lb);
        let common: Vec<usize> = ta.iter().copied().filter(|t| tb.contains(t)).collect();
        let tri = if common.contains(&q.face) {
            q.face
        } else if common.contains(&p.face) {
            p.face
        } else {
            *common.iter().min().ok_or(PathError::Disconnected { index: i })?
        };
        out.push(make_seg(mesh, tri, la, lb));
    }
    Ok(out)
}

pub(crate) fn make_seg(mesh: &PolyhedronMesh, tri: usize, a: Loc, b: Loc) -> PathSeg {
    let pa = mesh.loc_chart(tri, &a).unwrap();
    let pb = mesh.loc_chart(tri, &b).unwrap();
    let along = (0..3).find_map(|k| (on_local_edge(mesh, tri, k, &a) && on_local_edge(mesh, tri, k, &b)).then(|| mesh.tri_edges(tri)[k]));
    PathSeg { tri, a, b, pa, pb, along }
}

fn on_local_edge(mesh: &PolyhedronMesh, t: usize, k: usize, loc: &Loc) -> bool {
    let tri = mesh.triangles()[t];
    match *loc {
        Loc::Vertex(v) => tri[k] == v || tri[(k + 1) % 3] == v,
        Loc::Edge { edge, .. } => mesh.tri_edges(t)[k] == edge,
        Loc::Face { .. } => false,
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GeodesicError {
    #[error("mesh is not convex")]
    NonConvex,
    #[error("search budget exceeded (depth {depth}, {nodes} states)")]
    Budget { depth: usize, nodes: usize },
    #[error("source lies on a mesh vertex")]
    VertexSource,
    #[error("source lies on the cut locus of vertex {vertex}")]
    Tie { vertex: usize },
    #[error("no path found")]
    NoPath,
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error("degenerate cut locus: {0}")]
    Degenerate(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Longest edge sequence explored.
    pub max_depth: usize,
    /// Total states expanded before giving up.
    pub max_states: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_depth: 32, max_states: 4_000_000 }
    }
}

/// A shortest path with the edge sequence it crosses. `tie` is set when a
/// different sequence reaches the same length within 1e-9 relative.
#[derive(Clone, Debug)]
pub struct PathSearch {
    pub path: GeodesicPolyline,
    pub sequence: Vec<usize>,
    pub tie: bool,
}

/// Globally shortest path from `s` to `t` on a convex surface.
pub fn shortest_path(mesh: &PolyhedronMesh, s: &SurfacePoint, t: &SurfacePoint) -> Result<GeodesicPolyline, GeodesicError> {
    shortest_path_with(mesh, s, t, SearchLimits::default()).map(|r| r.path)
}

#[derive(Clone)]
struct Window {
    tri: usize,
    /// Chart of `tri` into the unfolding plane.
    motion: Motion2,
    entry: usize,
    a: Vec2,
    b: Vec2,
    /// Crossed edges with the images of their endpoints `v[0]`, `v[1]`.
    seq: Vec<(usize, Vec2, Vec2)>,
}

/// Upper bound on `d(s, t)` from paths along mesh edges.
fn edge_graph_bound(mesh: &PolyhedronMesh, ls: &Loc, lt: &Loc) -> f64 {
    let n = mesh.num_vertices();
    // nodes: vertices, then s, then t
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + 2];
    for e in mesh.edges() {
        let d = mesh.vertex(e.v[0]).dist(mesh.vertex(e.v[1]));
        adj[e.v[0]].push((e.v[1], d));
        adj[e.v[1]].push((e.v[0], d));
    }
    for (node, loc) in [(n, ls), (n + 1, lt)] {
        for t in mesh.loc_tris(loc) {
            let p = mesh.loc_chart(t, loc).unwrap();
            for k in 0..3 {
                let v = mesh.triangles()[t][k];
                let d = p.dist(mesh.chart(t)[k]);
                adj[node].push((v, d));
                adj[v].push((node, d));
            }
        }
    }
    for t in mesh.loc_tris(ls) {
        if let (Some(p), Some(q)) = (mesh.loc_chart(t, ls), mesh.loc_chart(t, lt)) {
            adj[n].push((n + 1, p.dist(q)));
        }
    }
    let mut dist = vec![f64::INFINITY; n + 2];
    let mut done = vec![false; n + 2];
    dist[n] = 0.0;
    for _ in 0..n + 2 {
        let Some(u) = (0..n + 2).filter(|&u| !done[u] && dist[u].is_finite()).min_by(|&a, &b| dist[a].total_cmp(&dist[b])) else { break };
        done[u] = true;
        for &(v, d) in &adj[u] {
            if dist[u] + d < dist[v] {
                dist[v] = dist[u] + d;
            }
        }
    }
    dist[n + 1]
}

/// Interval of `p + u (q − p)`, `u ∈ [0, 1]`, inside the cone at `s`
/// spanned by `a` then `b` counterclockwise.
fn clip_to_cone(s: Vec2, a: Vec2, b: Vec2, p: Vec2, q: Vec2, tol: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // f(u) = f0 + u (f1 − f0) ≥ −tol for each bounding ray
    for (f0, f1) in [(geom::orient(s, a, p), geom::orient(s, a, q)), (geom::orient(s, p, b), geom::orient(s, q, b))] {
        let d = f1 - f0;
        if d.abs() < 1e-300 {
            if f0 < -tol {
                return None;
            }
            continue;
        }
        let u = (-tol - f0) / d;
        if d > 0.0 {
            lo = lo.max(u);
        } else {
            hi = hi.min(u);
        }
    }
    (hi >= lo).then_some((lo, hi))
}

/// Branch-and-bound over unfolded edge sequences.
pub fn shortest_path_with(mesh: &PolyhedronMesh, s: &SurfacePoint, t: &SurfacePoint, limits: SearchLimits) -> Result<PathSearch, GeodesicError> {
    if !mesh.is_convex() {
        return Err(GeodesicError::NonConvex);
    }
    let ls = mesh.locate(s);
    let lt = mesh.locate(t);
    if mesh.same_loc(&ls, &lt) {
        let path = GeodesicPolyline { points: vec![*s, *t], crossed_edges: Vec::new(), length: 0.0 };
        return Ok(PathSearch { path, sequence: Vec::new(), tie: false });
    }
    let diam = mesh.diameter();
    let otol = 1e-12 * diam * diam;
    let target_tris = mesh.loc_tris(&lt);
    let mut best = edge_graph_bound(mesh, &ls, &lt) * (1.0 + 1e-9) + 1e-12 * diam;
    let mut found: Option<(f64, Vec2, Vec2, Vec<(usize, Vec2, Vec2)>)> = None;
    let mut tie = false;
    let mut depth_hit = false;
    let mut states = 0usize;
    let same = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.max(y).max(1e-300);

    let mut stack: Vec<(Vec2, Window)> = Vec::new();
    let consider = |sp: Vec2, tp: Vec2, seq: &Vec<(usize, Vec2, Vec2)>, best: &mut f64, found: &mut Option<(f64, Vec2, Vec2, Vec<(usize, Vec2, Vec2)>)>, tie: &mut bool| {
        let len = sp.dist(tp);
        let key: Vec<usize> = seq.iter().map(|x| x.0).collect();
        match found {
            Some((bl, _, _, bs)) if same(len, *bl) => {
                let bkey: Vec<usize> = bs.iter().map(|x| x.0).collect();
                if bkey != key {
                    *tie = true;
                    if key < bkey {
                        *found = Some((len.min(*bl), sp, tp, seq.clone()));
                    }
                }
            }
            _ if len < *best => {
                *tie = matches!(found, Some((bl, ..)) if same(len, *bl));
                *best = len;
                *found = Some((len, sp, tp, seq.clone()));
            }
            _ => {}
        }
    };

    for t0 in mesh.loc_tris(&ls) {
        let sp = mesh.loc_chart(t0, &ls).unwrap();
        let c = mesh.chart(t0);
        if target_tris.contains(&t0) {
            let tp = mesh.loc_chart(t0, &lt).unwrap();
            consider(sp, tp, &Vec::new(), &mut best, &mut found, &mut tie);
        }
        for k in (0..3).rev() {
            let (a, b) = (c[k], c[(k + 1) % 3]);
            if geom::orient(a, b, sp).abs() <= otol {
                continue;
            }
            stack.push((sp, Window { tri: t0, motion: Motion2::IDENTITY, entry: k, a, b, seq: Vec::new() }));
        }
    }
    while let Some((sp, w)) = stack.pop() {
        states += 1;
        if states > limits.max_states {
            return Err(GeodesicError::Budget { depth: limits.max_depth, nodes: states });
        }
        // w.entry is the edge of w.tri to cross next
        let (t2, k2) = mesh.tri_neighbor(w.tri, w.entry);
        let e = mesh.tri_edges(w.tri)[w.entry];
        let m2 = w.motion.compose(&hinge(mesh, w.tri, t2, e));
        let mut seq = w.seq.clone();
        let ev = mesh.edge(e).v;
        let tri = mesh.triangles()[w.tri];
        let (ia, ib) = (w.motion.apply(mesh.chart(w.tri)[w.entry]), w.motion.apply(mesh.chart(w.tri)[(w.entry + 1) % 3]));
        let (p0, p1) = if tri[w.entry] == ev[0] { (ia, ib) } else { (ib, ia) };
        seq.push((e, p0, p1));
        if dist_point_segment(sp, w.a, w.b) >= best {
            continue;
        }
        if target_tris.contains(&t2) {
            let tp = m2.apply(mesh.loc_chart(t2, &lt).unwrap());
            let beyond = geom::orient(w.a, w.b, tp) <= otol;
            // a target on the last crossed edge, or a crossing through a
            // vertex, repeats a path found along a shorter sequence
            let (_, q0, q1) = *seq.last().unwrap();
            let proper = dist_point_segment(tp, q0, q1) > 1e-9 * diam
                && seq.iter().all(|&(_, p0, p1)| geom::line_params(sp, tp, p0, p1).is_some_and(|(_, u)| u > 1e-9 && u < 1.0 - 1e-9));
            if proper && beyond && geom::orient(sp, w.a, tp) >= -otol && geom::orient(sp, tp, w.b) >= -otol {
                consider(sp, tp, &seq, &mut best, &mut found, &mut tie);
            }
        }
        if seq.len() >= limits.max_depth {
            depth_hit = true;
            continue;
        }
        let c2 = mesh.chart(t2);
        for k in (0..3).rev() {
            if k == k2 {
                continue;
            }
            let (p, q) = (m2.apply(c2[k]), m2.apply(c2[(k + 1) % 3]));
            let Some((u0, u1)) = clip_to_cone(sp, w.a, w.b, p, q, 0.0) else { continue };
            if (u1 - u0) * p.dist(q) <= 1e-12 * diam {
                continue;
            }
            // the source sees every edge it crosses from the inner side
            let (na, nb) = (p.lerp(q, u0), p.lerp(q, u1));
            if dist_point_segment(sp, na, nb) >= best {
                continue;
            }
            stack.push((sp, Window { tri: t2, motion: m2, entry: k, a: na, b: nb, seq: seq.clone() }));
        }
    }
    let Some((len, sp, tp, seq)) = found else {
        return Err(if depth_hit { GeodesicError::Budget { depth: limits.max_depth, nodes: states } } else { GeodesicError::NoPath });
    };
    let mut points = Vec::with_capacity(seq.len() + 2);
    points.push(*s);
    for &(e, p0, p1) in &seq {
        let u = geom::line_params(sp, tp, p0, p1).map_or(0.5, |(_, u)| u.clamp(0.0, 1.0));
        let loc = if u <= 1e-12 {
            Loc::Vertex(mesh.edge(e).v[0])
        } else if u >= 1.0 - 1e-12 {
            Loc::Vertex(mesh.edge(e).v[1])
        } else {
            Loc::Edge { edge: e, t: u }
        };
        points.push(mesh.surface_point(&loc));
    }
    points.push(*t);
    let mut path = GeodesicPolyline::new(mesh, points)?;
    path.length = len;
    Ok(PathSearch { path, sequence: seq.iter().map(|x| x.0).collect(), tie })
}

/// The star unfolding of a source point.
#[derive(Clone, Debug)]
pub struct SourceImages {
    pub net: Net,
    /// Source actually used, after any perturbation.
    pub source: SurfacePoint,
    /// Distance the source was moved to escape ties.
    pub displacement: f64,
    /// Planar images of the source in boundary order.
    pub images: Vec<Vec2>,
    /// Shortest path from the source to each mesh vertex.
    pub paths: Vec<GeodesicPolyline>,
    /// The star of shortest paths; the source is the last node.
    pub star: DissectionTree,
}

const PERTURB_SEED: u64 = 0x5eed_cafe;

fn perturbed(mesh: &PolyhedronMesh, s: &SurfacePoint, attempt: u64) -> SurfacePoint {
    let mut rng = ChaCha8Rng::seed_from_u64(PERTURB_SEED ^ attempt);
    let p = mesh.chart_point(s);
    let d = 1e-6 * mesh.diameter();
    loop {
        let a: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
        let q = mesh.from_chart(s.face, p + v2(a.cos(), a.sin()) * d);
        if q.bary.iter().all(|&b| b > 1e-9) {
            return q;
        }
    }
}

/// Cuts the surface along shortest paths from `s` to every vertex.
pub fn star_unfold(mesh: &PolyhedronMesh, s: &SurfacePoint) -> Result<SourceImages, GeodesicError> {
    star_unfold_with(mesh, s, true)
}

/// As [`star_unfold`]; with `perturb` off a tie is an error.
pub fn star_unfold_with(mesh: &PolyhedronMesh, s: &SurfacePoint, perturb: bool) -> Result<SourceImages, GeodesicError> {
    if !mesh.is_convex() {
        return Err(GeodesicError::NonConvex);
    }
    if matches!(mesh.locate(s), Loc::Vertex(_)) {
        return Err(GeodesicError::VertexSource);
    }
    let mut src = *s;
    let mut attempt = 0;
    let paths = loop {
        let mut paths = Vec::with_capacity(mesh.num_vertices());
        let mut tie = None;
        for v in 0..mesh.num_vertices() {
            let r = shortest_path_with(mesh, &src, &mesh.vertex_point(v), SearchLimits::default())?;
            if r.tie {
                tie = Some(v);
                break;
            }
            paths.push(r.path);
        }
        match tie {
            None => break paths,
            Some(vertex) if !perturb || attempt >= 16 => return Err(GeodesicError::Tie { vertex }),
            Some(_) => {
                src = perturbed(mesh, s, attempt);
                attempt += 1;
            }
        }
    };
    let n = mesh.num_vertices();
    let mut nodes: Vec<TreeNode> = (0..n).map(|v| TreeNode { point: mesh.vertex_point(v), vertex: Some(v) }).collect();
    nodes.push(TreeNode { point: src, vertex: None });
    let edges = paths.iter().enumerate().map(|(v, p)| TreeEdge { a: n, b: v, path: p.clone() }).collect();
    let star = DissectionTree { nodes, edges };
    let net = cut_and_unfold(mesh, &star)?;
    let r = net.overlay.node_rverts[0][n];
    let images = net.boundary.iter().filter(|b| b.ra == r).map(|b| b.a).collect();
    let displacement = mesh.chart_point(s).dist(mesh.chart_point(&src));
    Ok(SourceImages { net, source: src, displacement, images, paths, star })
}

/// Cut locus of `s`: the tree of points with more than one shortest path
/// from `s`, spanning all vertices.
pub fn cut_locus(mesh: &PolyhedronMesh, s: &SurfacePoint) -> Result<DissectionTree, GeodesicError> {
    cut_locus_of(&star_unfold(mesh, s)?)
}

/// Voronoi diagram of the source images inside the star unfolding, folded
/// back onto the surface.
pub fn cut_locus_of(star: &SourceImages) -> Result<DissectionTree, GeodesicError> {
    let net = &star.net;
    let mesh = &net.mesh;
    let poly = net.boundary_polygon();
    let diam = net.diameter();
    let eps = 1e-9 * diam;
    let merge = 1e-5 * diam;
    let imgs = &star.images;
    let (lo, hi) = geom::bbox(&poly);
    let pad = v2(diam, diam);
    let bx = [lo - pad, v2(hi.x + diam, lo.y - diam), hi + pad, v2(lo.x - diam, hi.y + diam)];
    let mut segs: Vec<(Vec2, Vec2)> = Vec::new();
    for i in 0..imgs.len() {
        let mut cell = bx.to_vec();
        for j in 0..imgs.len() {
            if j != i && imgs[i].dist(imgs[j]) > eps {
                let m = (imgs[i] + imgs[j]) * 0.5;
                let u = (imgs[j] - imgs[i]).perp();
                cell = geom::clip_half_plane(&cell, m, m + u);
            }
        }
        for k in 0..cell.len() {
            let (a, b) = (cell[k], cell[(k + 1) % cell.len()]);
            let mid = (a + b) * 0.5;
            let di = mid.dist(imgs[i]);
            let Some(j) = (0..imgs.len()).filter(|&j| j != i).min_by(|&x, &y| (mid.dist(imgs[x]) - di).abs().total_cmp(&(mid.dist(imgs[y]) - di).abs())) else { continue };
            if j < i || (mid.dist(imgs[j]) - di).abs() > 1e-7 * diam {
                continue;
            }
            for (t0, t1) in geom::clip_segment_to_polygon(a, b, &poly, eps) {
                if (t1 - t0) * a.dist(b) > eps {
                    segs.push((a.lerp(b, t0), a.lerp(b, t1)));
                }
            }
        }
    }
    // graph on merged endpoints
    let n = mesh.num_vertices();
    let mut pts: Vec<(Vec2, Option<usize>)> = Vec::new();
    for v in 0..n {
        let pos = net.vertex_positions(v);
        if pos.len() != 1 {
            return Err(GeodesicError::Degenerate(format!("vertex {v} has {} copies in the star unfolding", pos.len())));
        }
        pts.push((pos[0], Some(v)));
    }
    let node_of = |p: Vec2, pts: &mut Vec<(Vec2, Option<usize>)>| -> usize {
        if let Some(k) = (0..pts.len()).filter(|&k| pts[k].0.dist(p) <= merge).min_by(|&x, &y| pts[x].0.dist(p).total_cmp(&pts[y].0.dist(p))) {
            return k;
        }
        pts.push((p, None));
        pts.len() - 1
    };
    let mut links: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in &segs {
        let (x, y) = (node_of(a, &mut pts), node_of(b, &mut pts));
        if x != y && !links.contains(&(x, y)) && !links.contains(&(y, x)) {
            links.push((x, y));
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for &(x, y) in &links {
        adj[x].push(y);
        adj[y].push(x);
    }
    let key = |k: usize| pts[k].1.is_some() || adj[k].len() != 2;
    // surface point of every key node
    let fold = |p: Vec2| -> Option<SurfacePoint> {
        net.cells.iter().find(|c| geom::point_in_polygon(p, &c.polygon, eps) != geom::Containment::Outside).map(|c| mesh.from_chart(c.tri, c.motion.inverse().apply(p)))
    };
    let mut node_index = vec![usize::MAX; pts.len()];
    let mut nodes: Vec<TreeNode> = Vec::new();
    for v in 0..n {
        node_index[v] = v;
        nodes.push(TreeNode { point: mesh.vertex_point(v), vertex: Some(v) });
    }
    for k in n..pts.len() {
        if key(k) {
            let point = fold(pts[k].0).ok_or_else(|| GeodesicError::Degenerate(String::from("Voronoi vertex outside the net")))?;
            node_index[k] = nodes.len();
            nodes.push(TreeNode { point, vertex: None });
        }
    }
    let mut used = vec![false; links.len()];
    let link_of = |x: usize, y: usize| links.iter().position(|&l| l == (x, y) || l == (y, x)).unwrap();
    let mut edges = Vec::new();
    for start in 0..pts.len() {
        if !key(start) {
            continue;
        }
        for &next in &adj[start] {
            if used[link_of(start, next)] {
                continue;
            }
            let mut chain = vec![start];
            let (mut prev, mut cur) = (start, next);
            used[link_of(prev, cur)] = true;
            while !key(cur) {
                chain.push(cur);
                let nx = *adj[cur].iter().find(|&&w| w != prev).unwrap();
                used[link_of(cur, nx)] = true;
                prev = cur;
                cur = nx;
            }
            chain.push(cur);
            let planar: Vec<Vec2> = chain.iter().map(|&k| pts[k].0).collect();
            let (a, b) = (node_index[start], node_index[cur]);
            let path = fold_polyline(net, &planar, nodes[a].point, nodes[b].point, eps)?;
            edges.push(TreeEdge { a, b, path });
        }
    }
    if edges.len() + 1 != nodes.len() {
        return Err(GeodesicError::Degenerate(format!("{} edges on {} nodes", edges.len(), nodes.len())));
    }
    Ok(DissectionTree { nodes, edges })
}

/// Folds a planar polyline inside `net` back onto the surface.
fn fold_polyline(net: &Net, planar: &[Vec2], first: SurfacePoint, last: SurfacePoint, eps: f64) -> Result<GeodesicPolyline, GeodesicError> {
    let mesh = &net.mesh;
    let mut pts: Vec<SurfacePoint> = vec![first];
    for w in planar.windows(2) {
        let (p, q) = (w[0], w[1]);
        let mut hits: Vec<(f64, SurfacePoint)> = Vec::new();
        for c in &net.cells {
            let inv = c.motion.inverse();
            for (t0, t1) in geom::clip_segment_to_polygon(p, q, &c.polygon, eps) {
                for u in [t0, t1] {
                    hits.push((u, mesh.from_chart(c.tri, inv.apply(p.lerp(q, u)))));
                }
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, sp) in hits {
            let l = mesh.locate(&sp);
            if !mesh.same_loc(&l, &mesh.locate(pts.last().unwrap())) {
                pts.push(mesh.surface_point_in(sp.face, &l).unwrap_or(sp));
            }
        }
    }
    // the last hit sits on the end node
    if pts.len() > 1 && mesh.same_loc(&mesh.locate(pts.last().unwrap()), &mesh.locate(&last)) {
        pts.pop();
    }
    pts.push(last);
    let mut path = GeodesicPolyline::new(mesh, pts)?;
    path.length = planar.windows(2).map(|w| w[0].dist(w[1])).sum();
    Ok(path)
}

/// Cuts the surface along the cut locus of `s`.
pub fn source_unfold(mesh: &PolyhedronMesh, s: &SurfacePoint) -> Result<Net, GeodesicError> {
    Ok(cut_and_unfold(mesh, &cut_locus(mesh, s)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{regular_tetrahedron, unit_cube};

    fn face_center(m: &PolyhedronMesh, f: usize) -> SurfacePoint {
        m.face_centroid(f)
    }

    #[test]
    fn same_point_is_zero() {
        let m = unit_cube();
        let s = m.tri_centroid(3);
        assert_eq!(shortest_path(&m, &s, &s).unwrap().length, 0.0);
    }

    #[test]
    fn same_face_is_straight() {
        let m = regular_tetrahedron();
        let s = SurfacePoint { face: 0, bary: [0.6, 0.2, 0.2] };
        let t = SurfacePoint { face: 0, bary: [0.1, 0.3, 0.6] };
        let p = shortest_path(&m, &s, &t).unwrap();
        assert!((p.length - m.chart_point(&s).dist(m.chart_point(&t))).abs() < 1e-12);
    }

    #[test]
    fn cube_opposite_corners() {
        let m = unit_cube();
        let r = shortest_path_with(&m, &m.vertex_point(0), &m.vertex_point(6), SearchLimits::default()).unwrap();
        assert!((r.path.length - 5f64.sqrt()).abs() < 1e-12, "{}", r.path.length);
        assert!(r.tie);
    }

    #[test]
    fn cube_opposite_face_centers() {
        let m = unit_cube();
        let p = shortest_path(&m, &face_center(&m, 0), &face_center(&m, 1)).unwrap();
        assert!((p.length - 2.0).abs() < 1e-12, "{}", p.length);
    }

    #[test]
    fn tetra_vertex_to_opposite_face_center() {
        let m = regular_tetrahedron();
        // centroid of face [0,1,2] to vertex 3 crosses one edge
        let s = face_center(&m, 0);
        let r = shortest_path_with(&m, &s, &m.vertex_point(3), SearchLimits::default()).unwrap();
        let expect = 3f64.sqrt() / 6.0 + 3f64.sqrt() / 2.0;
        assert!((r.path.length - expect).abs() < 1e-12);
        assert!(r.tie);
        assert_eq!(r.sequence.len(), 1);
    }

    fn random_hull(seed: u64) -> Option<PolyhedronMesh> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(6..=12);
        let pts: Vec<_> = (0..k)
            .map(|_| {
                let z: f64 = rng.gen_range(-1.0..1.0);
                let t: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
                let r = (1.0 - z * z).sqrt();
                crate::geom::v3(r * t.cos(), r * t.sin(), z)
            })
            .collect();
        crate::hull::convex_hull(&pts).ok()
    }

    #[test]
    fn tetra_star_unfolding() {
        let m = regular_tetrahedron();
        let st = star_unfold(&m, &m.face_centroid(0)).unwrap();
        assert_eq!(st.images.len(), 4);
        assert!(st.displacement > 0.0 && st.displacement <= 1.0001e-6 * m.diameter());
        assert!((crate::unfold::net_area(&st.net) - 3f64.sqrt()).abs() < 1e-12);
        assert!(!crate::unfold::self_overlaps(&st.net).overlaps);
        let total: f64 = st.paths.iter().map(|p| p.length).sum();
        assert!((crate::unfold::net_perimeter(&st.net) - 2.0 * total).abs() < 1e-9 * total);
        assert!(matches!(star_unfold_with(&m, &m.face_centroid(0), false), Err(GeodesicError::Tie { vertex: 3 })));
    }

    #[test]
    fn images_flank_vertex_copies() {
        let m = unit_cube();
        let s = SurfacePoint { face: 0, bary: [0.21, 0.33, 0.46] };
        let st = star_unfold(&m, &s).unwrap();
        let b = &st.net.boundary;
        let r = st.net.overlay.node_rverts[0][m.num_vertices()];
        let nv = m.num_vertices();
        let mut seen = 0;
        for i in 0..b.len() {
            if b[i].ra != r {
                continue;
            }
            // walk to the vertex copy, then on to the next source image
            let mut j = i;
            while b[j].rb >= nv {
                j = (j + 1) % b.len();
            }
            let v = b[j].rb;
            let mut k = (j + 1) % b.len();
            while b[k].rb != r {
                k = (k + 1) % b.len();
            }
            let d = st.paths[v].length;
            assert!((b[i].a.dist(b[j].b) - d).abs() < 1e-9 * d);
            assert!((b[k].b.dist(b[j].b) - d).abs() < 1e-9 * d);
            seen += 1;
        }
        assert_eq!(seen, nv);
    }

    #[test]
    fn tetra_cut_locus() {
        let m = regular_tetrahedron();
        let cl = cut_locus(&m, &m.face_centroid(0)).unwrap();
        assert!(crate::dissection::validate_tree(&m, &cl).is_valid());
        assert_eq!(cl.degree(cl.vertex_node(3).unwrap()), 3);
    }

    #[test]
    fn square_dihedron_star_and_locus() {
        let sq = [v2(0.0, 0.0), v2(1.0, 0.0), v2(1.0, 1.0), v2(0.0, 1.0)];
        let m = PolyhedronMesh::make_dihedron(&sq).unwrap();
        let s = SurfacePoint { face: 0, bary: [0.3, 0.3, 0.4] };
        let st = star_unfold(&m, &s).unwrap();
        assert_eq!(st.star.edges.len(), 4);
        assert!((crate::unfold::net_area(&st.net) - 2.0).abs() < 1e-12);
        let cl = cut_locus_of(&st).unwrap();
        assert!(crate::dissection::validate_tree(&m, &cl).is_valid());
        let net = cut_and_unfold(&m, &cl).unwrap();
        assert!(!crate::unfold::self_overlaps(&net).overlaps);
    }

    #[test]
    fn source_unfoldings_of_random_hulls() {
        for seed in 0..20 {
            let Some(m) = random_hull(seed) else { continue };
            let s = m.face_centroid(0);
            let cl = cut_locus(&m, &s).unwrap();
            assert!(crate::dissection::validate_tree(&m, &cl).is_valid(), "seed {seed}");
            let net = cut_and_unfold(&m, &cl).unwrap();
            assert!(!crate::unfold::self_overlaps(&net).overlaps, "seed {seed}");
            assert!((crate::unfold::net_area(&net) - m.surface_area()).abs() < 1e-6 * m.surface_area());
        }
    }
}
