//! Refinement of the triangulated surface along one or two trees.
//!
//! Every triangle is split by the tree segments crossing it into convex or
//! non-convex cells. Cell edges carry a bitmask of the layers (trees) lying
//! on them, so nets can be developed by cutting any subset of layers.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dissection::DissectionTree;
use crate::geom::{self, Motion2, Vec2, Vec3};
use crate::mesh::{Loc, PolyhedronMesh, SurfacePoint};

#[derive(Clone, Debug)]
pub struct RVert {
    pub loc: Loc,
    pub pos: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellEdge {
    pub twin: (usize, usize),
    /// Bit `i` set when layer `i` runs along this edge.
    pub labels: u8,
    /// Per layer: tree edge and whether this cell edge follows its direction.
    pub refs: [Option<(usize, bool)>; 2],
    pub mesh_edge: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub tri: usize,
    /// Counterclockwise corners; edge `i` runs from corner `i` to `i + 1`.
    pub rverts: Vec<usize>,
    pub chart: Vec<Vec2>,
    pub edges: Vec<CellEdge>,
    pub area: f64,
}

#[derive(Clone, Debug)]
pub struct Overlay {
    pub rverts: Vec<RVert>,
    pub cells: Vec<Cell>,
    /// Rvert of each tree node, per layer.
    pub node_rverts: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OverlayError {
    #[error("tree segments cross inside triangle {tri}")]
    Crossing { tri: usize },
    #[error("a tree point lies inside another segment in triangle {tri}")]
    TJunction { tri: usize },
    #[error("dangling tree segment in triangle {tri}")]
    Dangling { tri: usize },
    #[error("a tree edge doubles back along itself in triangle {tri}")]
    Duplicate { tri: usize },
    #[error("degenerate sliver of area {area:e} in triangle {tri}")]
    Sliver { tri: usize, area: f64 },
    #[error("unmatched cell edge in triangle {tri}")]
    Unmatched { tri: usize },
}

struct Interner<'m> {
    mesh: &'m PolyhedronMesh,
    rverts: Vec<RVert>,
    on_edge: BTreeMap<usize, Vec<(f64, usize)>>,
    in_face: BTreeMap<usize, Vec<(Vec2, usize)>>,
    eps: f64,
}

impl<'m> Interner<'m> {
    fn intern(&mut self, loc: Loc) -> usize {
        match loc {
            Loc::Vertex(v) => v,
            Loc::Edge { edge, t } => {
                let e = self.mesh.edge(edge);
                let len = self.mesh.vertex(e.v[0]).dist(self.mesh.vertex(e.v[1]));
                let list = self.on_edge.entry(edge).or_default();
                if let Some(&(_, r)) = list.iter().find(|(t2, _)| (t2 - t).abs() * len <= self.eps) {
                    return r;
                }
                let r = self.rverts.len();
                list.push((t, r));
                self.rverts.push(RVert { loc, pos: self.mesh.loc_point3(&loc) });
                r
            }
            Loc::Face { tri, .. } => {
                let p = self.mesh.loc_chart(tri, &loc).unwrap();
                let list = self.in_face.entry(tri).or_default();
                if let Some(&(_, r)) = list.iter().find(|(q, _)| q.dist(p) <= self.eps) {
                    return r;
                }
                let r = self.rverts.len();
                list.push((p, r));
                self.rverts.push(RVert { loc, pos: self.mesh.loc_point3(&loc) });
                r
            }
        }
    }
}

struct SegInfo {
    layer: usize,
    edge: usize,
    ra: usize,
    rb: usize,
}

fn edge_param(mesh: &PolyhedronMesh, e: usize, loc: &Loc) -> f64 {
    match *loc {
        Loc::Vertex(v) => {
            if mesh.edge(e).v[0] == v {
                0.0
            } else {
                1.0
            }
        }
        Loc::Edge { t, .. } => t,
        Loc::Face { .. } => f64::NAN,
    }
}

impl Overlay {
    /// Refines `mesh` along the given trees (layer `i` is `trees[i]`, at most two).
    pub fn new(mesh: &PolyhedronMesh, trees: &[&DissectionTree]) -> Result<Overlay, OverlayError> {
        assert!(trees.len() <= 2);
        let eps = mesh.snap_eps();
        let mut int = Interner {
            mesh,
            rverts: (0..mesh.num_vertices()).map(|v| RVert { loc: Loc::Vertex(v), pos: mesh.vertex(v) }).collect(),
            on_edge: BTreeMap::new(),
            in_face: BTreeMap::new(),
            eps,
        };
        // (mesh edge) -> along segments as (t_a, t_b, info)
        let mut along: BTreeMap<usize, Vec<(f64, f64, SegInfo)>> = BTreeMap::new();
        let mut inside: Vec<Vec<SegInfo>> = (0..mesh.num_triangles()).map(|_| Vec::new()).collect();
        let mut node_rverts = Vec::new();
        for (layer, tree) in trees.iter().enumerate() {
            node_rverts.push(tree.nodes.iter().map(|n| int.intern(mesh.locate(&n.point))).collect());
            for (ei, e) in tree.edges.iter().enumerate() {
                for s in e.path.segments(mesh) {
                    let ra = int.intern(s.a);
                    let rb = int.intern(s.b);
                    if ra == rb {
                        continue;
                    }
                    let info = SegInfo { layer, edge: ei, ra, rb };
                    match s.along {
                        Some(me) => {
                            let ta = edge_param(mesh, me, &s.a);
                            let tb = edge_param(mesh, me, &s.b);
                            along.entry(me).or_default().push((ta, tb, info));
                        }
                        None => inside[s.tri].push(info),
                    }
                }
            }
        }

        // split mesh edges at their rverts
        struct Sub {
            r: [usize; 2],
            labels: u8,
            refs: [Option<(usize, bool)>; 2],
        }
        let mut subs: Vec<Vec<Sub>> = Vec::with_capacity(mesh.edges().len());
        for (ei, e) in mesh.edges().iter().enumerate() {
            let mut pts: Vec<(f64, usize)> = vec![(0.0, e.v[0]), (1.0, e.v[1])];
            if let Some(l) = int.on_edge.get(&ei) {
                pts.extend(l.iter().copied());
            }
            pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut list: Vec<Sub> = pts.windows(2).map(|w| Sub { r: [w[0].1, w[1].1], labels: 0, refs: [None, None] }).collect();
            if let Some(segs) = along.get(&ei) {
                let pos = |r: usize| pts.iter().position(|p| p.1 == r).unwrap();
                for (ta, tb, info) in segs {
                    let (ia, ib) = (pos(info.ra), pos(info.rb));
                    let (lo, hi) = (ia.min(ib), ia.max(ib));
                    for sub in &mut list[lo..hi] {
                        sub.labels |= 1 << info.layer;
                        sub.refs[info.layer] = Some((info.edge, tb > ta));
                    }
                }
            }
            subs.push(list);
        }

        let mut cells: Vec<Cell> = Vec::new();
        for t in 0..mesh.num_triangles() {
            let area_t = mesh.triangle_area(t);
            // local vertex table
            let mut local: Vec<usize> = Vec::new();
            let mut pos: Vec<Vec2> = Vec::new();
            let lid = |r: usize, local: &mut Vec<usize>, pos: &mut Vec<Vec2>| -> usize {
                if let Some(i) = local.iter().position(|&x| x == r) {
                    return i;
                }
                local.push(r);
                pos.push(mesh.loc_chart(t, &int.rverts[r].loc).unwrap());
                local.len() - 1
            };
            // undirected edges: (u, v) local, labels, refs as seen from u->v, mesh edge
            struct PEdge {
                u: usize,
                v: usize,
                labels: u8,
                refs: [Option<(usize, bool)>; 2],
                mesh_edge: Option<usize>,
            }
            let mut pedges: Vec<PEdge> = Vec::new();
            for k in 0..3 {
                let me = mesh.tri_edges(t)[k];
                let forward = mesh.edge(me).sides[0] == (t, k);
                let list = &subs[me];
                let order: Vec<usize> = if forward { (0..list.len()).collect() } else { (0..list.len()).rev().collect() };
                for i in order {
                    let s = &list[i];
                    let (a, b) = if forward { (s.r[0], s.r[1]) } else { (s.r[1], s.r[0]) };
                    let u = lid(a, &mut local, &mut pos);
                    let v = lid(b, &mut local, &mut pos);
                    let refs = s.refs.map(|r| r.map(|(te, fwd)| (te, fwd == forward)));
                    pedges.push(PEdge { u, v, labels: s.labels, refs, mesh_edge: Some(me) });
                }
            }
            let nb = pedges.len();
            for info in &inside[t] {
                let u = lid(info.ra, &mut local, &mut pos);
                let v = lid(info.rb, &mut local, &mut pos);
                if let Some(pe) = pedges[nb..].iter_mut().find(|p| (p.u == u && p.v == v) || (p.u == v && p.v == u)) {
                    if pe.labels & (1 << info.layer) != 0 {
                        return Err(OverlayError::Duplicate { tri: t });
                    }
                    pe.labels |= 1 << info.layer;
                    pe.refs[info.layer] = Some((info.edge, pe.u == u));
                } else {
                    let mut refs = [None, None];
                    refs[info.layer] = Some((info.edge, true));
                    pedges.push(PEdge { u, v, labels: 1 << info.layer, refs, mesh_edge: None });
                }
            }
            // interior segments must not cross or touch other than at endpoints
            for i in nb..pedges.len() {
                let (a, b) = (pos[pedges[i].u], pos[pedges[i].v]);
                for j in i + 1..pedges.len() {
                    let (pu, pv) = (pedges[j].u, pedges[j].v);
                    let shared = [pedges[i].u, pedges[i].v].iter().any(|&x| x == pu || x == pv);
                    if !shared && geom::segments_touch(a, b, pos[pu], pos[pv], eps) {
                        return Err(OverlayError::Crossing { tri: t });
                    }
                }
                for (w, &pw) in pos.iter().enumerate() {
                    if w != pedges[i].u && w != pedges[i].v && geom::dist_point_segment(pw, a, b) <= eps {
                        return Err(OverlayError::TJunction { tri: t });
                    }
                }
            }
            // half-edges: 2i is u->v, 2i+1 is v->u
            let nv = local.len();
            let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
            let from = |h: usize, pe: &[PEdge]| if h.is_multiple_of(2) { pe[h / 2].u } else { pe[h / 2].v };
            let to = |h: usize, pe: &[PEdge]| if h.is_multiple_of(2) { pe[h / 2].v } else { pe[h / 2].u };
            for h in 0..2 * pedges.len() {
                out[from(h, &pedges)].push(h);
            }
            for (u, list) in out.iter_mut().enumerate() {
                list.sort_by(|&x, &y| {
                    let ax = (pos[to(x, &pedges)] - pos[u]).angle();
                    let ay = (pos[to(y, &pedges)] - pos[u]).angle();
                    ax.partial_cmp(&ay).unwrap()
                });
            }
            let next = |h: usize| -> usize {
                let v = to(h, &pedges);
                let back = h ^ 1;
                let list = &out[v];
                let i = list.iter().position(|&x| x == back).unwrap();
                list[(i + list.len() - 1) % list.len()]
            };
            let mut used = vec![false; 2 * pedges.len()];
            let mut negative = 0;
            for h0 in 0..2 * pedges.len() {
                if used[h0] {
                    continue;
                }
                let mut cyc = Vec::new();
                let mut h = h0;
                while !used[h] {
                    used[h] = true;
                    cyc.push(h);
                    h = next(h);
                }
                if h != h0 {
                    return Err(OverlayError::Dangling { tri: t });
                }
                let poly: Vec<Vec2> = cyc.iter().map(|&h| pos[from(h, &pedges)]).collect();
                let area = geom::signed_area(&poly);
                if cyc.iter().any(|&h| cyc.contains(&(h ^ 1))) {
                    return Err(OverlayError::Dangling { tri: t });
                }
                if area <= 0.0 {
                    negative += 1;
                    continue;
                }
                if area < 1e-12 * area_t {
                    return Err(OverlayError::Sliver { tri: t, area });
                }
                let edges = cyc
                    .iter()
                    .map(|&h| {
                        let pe = &pedges[h / 2];
                        let refs = if h % 2 == 0 { pe.refs } else { pe.refs.map(|r| r.map(|(te, f)| (te, !f))) };
                        CellEdge { twin: (usize::MAX, 0), labels: pe.labels, refs, mesh_edge: pe.mesh_edge }
                    })
                    .collect();
                cells.push(Cell { tri: t, rverts: cyc.iter().map(|&h| local[from(h, &pedges)]).collect(), chart: poly, edges, area });
            }
            if negative != 1 {
                return Err(OverlayError::Dangling { tri: t });
            }
        }

        // twins
        let mut keys: BTreeMap<(usize, usize, usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, c) in cells.iter().enumerate() {
            let n = c.rverts.len();
            for i in 0..n {
                let (a, b) = (c.rverts[i], c.rverts[(i + 1) % n]);
                let key = match c.edges[i].mesh_edge {
                    Some(me) => (0, me, a.min(b), a.max(b)),
                    None => (1, c.tri, a.min(b), a.max(b)),
                };
                keys.entry(key).or_default().push((ci, i));
            }
        }
        for (_, v) in keys {
            if v.len() != 2 {
                return Err(OverlayError::Unmatched { tri: cells[v[0].0].tri });
            }
            cells[v[0].0].edges[v[0].1].twin = v[1];
            cells[v[1].0].edges[v[1].1].twin = v[0];
        }
        Ok(Overlay { rverts: int.rverts, cells, node_rverts })
    }

    pub fn is_cut(&self, c: usize, i: usize, mask: u8) -> bool {
        self.cells[c].edges[i].labels & mask != 0
    }

    /// Cell of triangle 0 containing a fixed generic reference point.
    pub fn root_cell(&self, mesh: &PolyhedronMesh) -> usize {
        let p = mesh.chart_point(&SurfacePoint { face: 0, bary: [0.4183, 0.3247, 0.2570] });
        self.cells
            .iter()
            .position(|c| c.tri == 0 && geom::point_in_polygon(p, &c.chart, 0.0) != geom::Containment::Outside)
            .or_else(|| self.cells.iter().position(|c| c.tri == 0))
            .unwrap()
    }

    /// Breadth-first development of the component of `root` across edges not
    /// in `mask`. Unreached cells get `None`.
    pub fn develop(&self, mesh: &PolyhedronMesh, mask: u8, root: usize, root_motion: Motion2) -> Vec<Option<Motion2>> {
        let mut motion: Vec<Option<Motion2>> = vec![None; self.cells.len()];
        motion[root] = Some(root_motion);
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            let m = motion[c].unwrap();
            let cell = &self.cells[c];
            for (i, e) in cell.edges.iter().enumerate() {
                if e.labels & mask != 0 {
                    continue;
                }
                let (c2, _) = e.twin;
                if motion[c2].is_some() {
                    continue;
                }
                let t2 = self.cells[c2].tri;
                let m2 = if t2 == cell.tri { m } else { m.compose(&hinge(mesh, cell.tri, t2, e.mesh_edge.unwrap())) };
                let _ = i;
                motion[c2] = Some(m2.renormalized());
                queue.push_back(c2);
            }
        }
        motion
    }

    /// Connected components of cells under cuts `mask`, each sorted, ordered
    /// by smallest cell.
    pub fn components(&self, mask: u8) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.cells.len()];
        let mut out = Vec::new();
        for s in 0..self.cells.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut list = vec![s];
            comp[s] = id;
            let mut k = 0;
            while k < list.len() {
                let c = list[k];
                k += 1;
                for e in &self.cells[c].edges {
                    if e.labels & mask == 0 && comp[e.twin.0] == usize::MAX {
                        comp[e.twin.0] = id;
                        list.push(e.twin.0);
                    }
                }
            }
            list.sort_unstable();
            out.push(list);
        }
        out
    }

    /// Closed boundary walk (interior on the left) of the component holding
    /// cut edge `(c, i)`, as `(cell, edge)` pairs.
    pub fn walk_from(&self, mask: u8, start: (usize, usize)) -> Vec<(usize, usize)> {
        let mut out = vec![start];
        let mut cur = start;
        loop {
            let (mut c, mut i) = cur;
            loop {
                i = (i + 1) % self.cells[c].edges.len();
                if self.is_cut(c, i, mask) {
                    break;
                }
                let tw = self.cells[c].edges[i].twin;
                c = tw.0;
                i = tw.1;
            }
            cur = (c, i);
            if cur == start {
                break;
            }
            out.push(cur);
            assert!(out.len() <= 4 * self.cells.iter().map(|c| c.edges.len()).sum::<usize>(), "boundary walk does not close");
        }
        out
    }

    /// Surface point of chart position `p` in cell `c`.
    pub fn surface_point(&self, mesh: &PolyhedronMesh, c: usize, p: Vec2) -> SurfacePoint {
        mesh.from_chart(self.cells[c].tri, p)
    }

    /// Chart position of rvert `r` in triangle `t`.
    pub fn rvert_chart(&self, mesh: &PolyhedronMesh, t: usize, r: usize) -> Option<Vec2> {
        mesh.loc_chart(t, &self.rverts[r].loc)
    }
}

/// Motion from the chart of `t2` to the chart of `t` across mesh edge `e`.
pub fn hinge(mesh: &PolyhedronMesh, t: usize, t2: usize, e: usize) -> Motion2 {
    let k = (0..3).find(|&k| mesh.tri_edges(t)[k] == e).unwrap();
    let k2 = (0..3).find(|&k| mesh.tri_edges(t2)[k] == e).unwrap();
    let (c, c2) = (mesh.chart(t), mesh.chart(t2));
    Motion2::from_segments(c2[k2], c2[(k2 + 1) % 3], c[(k + 1) % 3], c[k])
}
