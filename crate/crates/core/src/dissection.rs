//! Dissection trees: embedded trees of straight polylines spanning every
//! vertex of the surface.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geodesic::{GeodesicPolyline, PathError, PathSeg};
use crate::geom::{self, Vec2};
use crate::mesh::{Loc, PolyhedronMesh, SurfacePoint};
use crate::unfold::Net;

/// Directions closer than this (radians) count as coincident.
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub point: SurfacePoint,
    /// Mesh vertex carried by this node; `None` for Steiner junctions.
    pub vertex: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub path: GeodesicPolyline,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DissectionTree {
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<TreeEdge>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TreeError {
    #[error("vertices {0} and {1} are not joined by a mesh edge")]
    NotAnEdge(usize, usize),
    #[error("tree has no edges")]
    Empty,
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("routing failed: {0}")]
    Routing(&'static str),
}

impl DissectionTree {
    /// Tree along mesh edges given as vertex pairs; node `i` is vertex `i`.
    pub fn from_vertex_edges(mesh: &PolyhedronMesh, pairs: &[(usize, usize)]) -> Result<Self, TreeError> {
        let nodes = (0..mesh.num_vertices()).map(|v| TreeNode { point: mesh.vertex_point(v), vertex: Some(v) }).collect();
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let e = mesh.edge_between(a, b, None).ok_or(TreeError::NotAnEdge(a, b))?;
            let t = mesh.edge(e).sides[0].0;
            let pa = mesh.surface_point_in(t, &Loc::Vertex(a)).unwrap();
            let pb = mesh.surface_point_in(t, &Loc::Vertex(b)).unwrap();
            edges.push(TreeEdge { a, b, path: GeodesicPolyline::new(mesh, vec![pa, pb])? });
        }
        Ok(DissectionTree { nodes, edges })
    }

    /// Star of skeleton edges around `v`, extended breadth-first over the skeleton.
    pub fn skeleton_bfs(mesh: &PolyhedronMesh, root: usize) -> Result<Self, TreeError> {
        let adj = skeleton_adjacency(mesh);
        let mut seen = vec![false; mesh.num_vertices()];
        seen[root] = true;
        let mut queue = alloc::collections::VecDeque::from([root]);
        let mut pairs = Vec::new();
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    pairs.push((v, w));
                    queue.push_back(w);
                }
            }
        }
        Self::from_vertex_edges(mesh, &pairs)
    }

    /// `(edge, other node)` lists per node.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.a < self.nodes.len() && e.b < self.nodes.len() {
                adj[e.a].push((i, e.b));
                adj[e.b].push((i, e.a));
            }
        }
        adj
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.a == node || e.b == node).count()
    }

    pub fn vertex_node(&self, v: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.vertex == Some(v))
    }

    /// Edge polyline oriented away from `node`.
    pub fn path_from(&self, edge: usize, node: usize) -> GeodesicPolyline {
        let e = &self.edges[edge];
        if e.a == node {
            e.path.clone()
        } else {
            e.path.reversed()
        }
    }
}

/// Total length of all tree edges.
pub fn tree_length(tree: &DissectionTree) -> Result<f64, TreeError> {
    if tree.edges.is_empty() {
        return Err(TreeError::Empty);
    }
    Ok(tree.edges.iter().map(|e| e.path.length).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    BadNode { node: usize },
    VertexUnspanned { vertex: usize },
    VertexRepeated { vertex: usize },
    VertexMismatch { node: usize },
    SteinerOnVertex { node: usize },
    SteinerDegree { node: usize, degree: usize },
    BadEdge { edge: usize },
    EndpointMismatch { edge: usize },
    HasCycle,
    NotConnected,
    EdgesIntersect { a: usize, b: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadNode { node } => write!(f, "node {node} is not a valid surface point"),
            Violation::VertexUnspanned { vertex } => write!(f, "vertex {vertex} unspanned"),
            Violation::VertexRepeated { vertex } => write!(f, "vertex {vertex} appears more than once"),
            Violation::VertexMismatch { node } => write!(f, "node {node} is not located at its vertex"),
            Violation::SteinerOnVertex { node } => write!(f, "Steiner node {node} sits on a mesh vertex"),
            Violation::SteinerDegree { node, degree } => write!(f, "Steiner node {node} has degree {degree} < 3"),
            Violation::BadEdge { edge } => write!(f, "edge {edge} is not a connected surface polyline"),
            Violation::EndpointMismatch { edge } => write!(f, "edge {edge} does not join its nodes"),
            Violation::HasCycle => write!(f, "contains a cycle"),
            Violation::NotConnected => write!(f, "not connected"),
            Violation::EdgesIntersect { a, b } => write!(f, "edges {a} and {b} intersect"),
        }
    }
}

/// Outcome of `validate_tree`; valid when no violations were found.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TreeReport {
    pub violations: Vec<Violation>,
}

impl TreeReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A tree segment, tagged with its edge and position along the edge.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TaggedSeg {
    pub edge: usize,
    pub index: usize,
    pub seg: PathSeg,
}

/// Segments of all tree edges, bucketed per triangle. Segments lying on a mesh
/// edge are listed in both incident triangles.
pub(crate) fn bucket_segments(mesh: &PolyhedronMesh, tree: &DissectionTree, skip: &[bool]) -> Vec<Vec<TaggedSeg>> {
    let mut buckets = vec![Vec::new(); mesh.num_triangles()];
    for (ei, e) in tree.edges.iter().enumerate() {
        if skip.get(ei).copied().unwrap_or(false) {
            continue;
        }
        for (index, seg) in e.path.segments(mesh).into_iter().enumerate() {
            buckets[seg.tri].push(TaggedSeg { edge: ei, index, seg });
            if let Some(me) = seg.along {
                let m = mesh.edge(me);
                let other = if m.sides[0].0 == seg.tri { m.sides[1].0 } else { m.sides[0].0 };
                let s2 = crate::geodesic::make_seg(mesh, other, seg.a, seg.b);
                buckets[other].push(TaggedSeg { edge: ei, index, seg: s2 });
            }
        }
    }
    buckets
}

fn node_loc(mesh: &PolyhedronMesh, tree: &DissectionTree, node: usize) -> Loc {
    mesh.locate(&tree.nodes[node].point)
}

fn point_valid(mesh: &PolyhedronMesh, p: &SurfacePoint) -> bool {
    p.face < mesh.num_triangles() && p.bary.iter().all(|&b| b.is_finite() && b >= -1e-12) && (p.bary.iter().sum::<f64>() - 1.0).abs() <= 1e-12
}

/// Checks every tree invariant and lists the violations.
pub fn validate_tree(mesh: &PolyhedronMesh, tree: &DissectionTree) -> TreeReport {
    let mut out = Vec::new();
    let nn = tree.nodes.len();
    let mut seen_vertex = vec![0usize; mesh.num_vertices()];
    let mut nodes_ok = true;
    for (i, n) in tree.nodes.iter().enumerate() {
        if !point_valid(mesh, &n.point) {
            out.push(Violation::BadNode { node: i });
            nodes_ok = false;
            continue;
        }
        let loc = mesh.locate(&n.point);
        match n.vertex {
            Some(v) if v < mesh.num_vertices() => {
                seen_vertex[v] += 1;
                if loc != Loc::Vertex(v) {
                    out.push(Violation::VertexMismatch { node: i });
                }
            }
            Some(_) => {
                out.push(Violation::BadNode { node: i });
                nodes_ok = false;
            }
            None => {
                if matches!(loc, Loc::Vertex(_)) {
                    out.push(Violation::SteinerOnVertex { node: i });
                }
            }
        }
    }
    for (v, &c) in seen_vertex.iter().enumerate() {
        if c == 0 {
            out.push(Violation::VertexUnspanned { vertex: v });
        } else if c > 1 {
            out.push(Violation::VertexRepeated { vertex: v });
        }
    }
    let mut edges_ok = true;
    for (i, e) in tree.edges.iter().enumerate() {
        if e.a >= nn || e.b >= nn || e.a == e.b || e.path.points.len() < 2 {
            out.push(Violation::BadEdge { edge: i });
            edges_ok = false;
            continue;
        }
        if !e.path.points.iter().all(|p| point_valid(mesh, p)) || GeodesicPolyline::new(mesh, e.path.points.clone()).is_err() {
            out.push(Violation::BadEdge { edge: i });
            edges_ok = false;
            continue;
        }
        if !nodes_ok {
            continue;
        }
        let s = mesh.locate(&e.path.start());
        let t = mesh.locate(&e.path.end());
        if !mesh.same_loc(&s, &node_loc(mesh, tree, e.a)) || !mesh.same_loc(&t, &node_loc(mesh, tree, e.b)) {
            out.push(Violation::EndpointMismatch { edge: i });
        }
    }
    for i in 0..nn {
        if tree.nodes[i].vertex.is_none() {
            let d = tree.degree(i);
            if d < 3 {
                out.push(Violation::SteinerDegree { node: i, degree: d });
            }
        }
    }
    // union-find for cycles and connectivity
    let mut parent: Vec<usize> = (0..nn).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut cycle = false;
    for e in &tree.edges {
        if e.a >= nn || e.b >= nn {
            continue;
        }
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        if ra == rb {
            cycle = true;
        } else {
            parent[ra] = rb;
        }
    }
    if cycle {
        out.push(Violation::HasCycle);
    }
    let roots = (0..nn).filter(|&x| find(&mut parent, x) == x).count();
    if roots > 1 {
        out.push(Violation::NotConnected);
    }
    if nodes_ok && edges_ok {
        if let Some((a, b)) = first_intersection(mesh, tree) {
            out.push(Violation::EdgesIntersect { a, b });
        }
    }
    TreeReport { violations: out }
}

fn seg_dir_from(s: &PathSeg, at_a: bool) -> Vec2 {
    if at_a {
        s.pb - s.pa
    } else {
        s.pa - s.pb
    }
}

/// Two segments in one triangle chart meet only at a shared endpoint with
/// distinct directions. Returns the shared endpoint if that is all they do.
fn segment_contact(mesh: &PolyhedronMesh, x: &PathSeg, y: &PathSeg) -> Contact {
    let eps = mesh.snap_eps();
    let ends = [(x.a, true), (x.b, false)];
    let others = [(y.a, true), (y.b, false)];
    for &(lx, ax) in &ends {
        for &(ly, ay) in &others {
            if mesh.same_loc(&lx, &ly) {
                let dx = seg_dir_from(x, ax);
                let dy = seg_dir_from(y, ay);
                let ang = dx.cross(dy).atan2(dx.dot(dy)).abs();
                if ang <= ANGLE_TOL {
                    return Contact::Overlap;
                }
                // the far ends must not touch the other segment
                let fx = if ax { x.pb } else { x.pa };
                let fy = if ay { y.pb } else { y.pa };
                if geom::dist_point_segment(fx, y.pa, y.pb) <= eps || geom::dist_point_segment(fy, x.pa, x.pb) <= eps {
                    return Contact::Overlap;
                }
                return Contact::Endpoint(lx);
            }
        }
    }
    if geom::segments_touch(x.pa, x.pb, y.pa, y.pb, eps) {
        Contact::Interior
    } else {
        Contact::None
    }
}

enum Contact {
    None,
    Endpoint(Loc),
    Interior,
    Overlap,
}

fn first_intersection(mesh: &PolyhedronMesh, tree: &DissectionTree) -> Option<(usize, usize)> {
    let buckets = bucket_segments(mesh, tree, &[]);
    let node_locs: Vec<Loc> = (0..tree.nodes.len()).map(|i| node_loc(mesh, tree, i)).collect();
    for bucket in &buckets {
        for i in 0..bucket.len() {
            for j in i + 1..bucket.len() {
                let (x, y) = (&bucket[i], &bucket[j]);
                if x.edge == y.edge && x.index == y.index {
                    continue;
                }
                match segment_contact(mesh, &x.seg, &y.seg) {
                    Contact::None => {}
                    Contact::Endpoint(p) => {
                        if x.edge == y.edge {
                            if x.index.abs_diff(y.index) != 1 {
                                return Some((x.edge, y.edge));
                            }
                        } else {
                            let (ex, ey) = (&tree.edges[x.edge], &tree.edges[y.edge]);
                            let common = [ex.a, ex.b].into_iter().any(|n| (n == ey.a || n == ey.b) && mesh.same_loc(&node_locs[n], &p));
                            if !common {
                                return Some((x.edge, y.edge));
                            }
                        }
                    }
                    Contact::Interior | Contact::Overlap => return Some((x.edge, y.edge)),
                }
            }
        }
    }
    None
}

/// Where two trees meet improperly.
#[derive(Clone, Debug, PartialEq)]
pub enum CrossingWitness {
    /// Interiors of edge `e1` of the first tree and `e2` of the second meet.
    Edges { e1: usize, e2: usize },
    /// The trees interleave around this mesh vertex.
    Interleave { vertex: usize },
}

impl fmt::Display for CrossingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossingWitness::Edges { e1, e2 } => write!(f, "edge {e1} of the first tree meets edge {e2} of the second"),
            CrossingWitness::Interleave { vertex } => write!(f, "trees interleave around vertex {vertex}"),
        }
    }
}

/// How the second tree sits against the first: edges present in both, and on
/// which side of each the second tree's copy lies.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Contacts {
    /// `(edge of D1, edge of D2, D2 copy lies left of the D1 edge direction)`.
    pub shared: Vec<(usize, usize, bool)>,
}

impl Contacts {
    pub fn shared_in_d2(&self, e2: usize) -> Option<(usize, bool)> {
        self.shared.iter().find(|s| s.1 == e2).map(|s| (s.0, s.2))
    }
}

/// True iff the trees properly cross.
pub fn crossing(mesh: &PolyhedronMesh, d1: &DissectionTree, d2: &DissectionTree) -> bool {
    contacts(mesh, d1, d2).is_err()
}

fn same_path(mesh: &PolyhedronMesh, p: &GeodesicPolyline, q: &GeodesicPolyline) -> bool {
    let eps = mesh.snap_eps() * 10.0;
    let on = |pt: &SurfacePoint, path: &GeodesicPolyline| {
        let loc = mesh.locate(pt);
        path.segments(mesh).iter().any(|s| {
            let tris = mesh.loc_tris(&loc);
            let mut ok = false;
            for t in tris {
                let s2 = if s.tri == t { Some(*s) } else if s.along.is_some() && mesh.loc_chart(t, &s.a).is_some() && mesh.loc_chart(t, &s.b).is_some() { Some(crate::geodesic::make_seg(mesh, t, s.a, s.b)) } else { None };
                if let Some(s2) = s2 {
                    let c = mesh.loc_chart(t, &loc).unwrap();
                    if geom::dist_point_segment(c, s2.pa, s2.pb) <= eps {
                        ok = true;
                    }
                }
            }
            ok
        })
    };
    p.points.iter().all(|x| on(x, q)) && q.points.iter().all(|x| on(x, p))
}

/// Classifies how `d2` meets `d1`, or returns a witness of proper crossing.
pub fn contacts(mesh: &PolyhedronMesh, d1: &DissectionTree, d2: &DissectionTree) -> Result<Contacts, CrossingWitness> {
    // edges present in both trees
    let mut shared = Vec::new();
    let mut skip2 = vec![false; d2.edges.len()];
    for (i2, e2) in d2.edges.iter().enumerate() {
        let (a2, b2) = (d2.nodes[e2.a].vertex, d2.nodes[e2.b].vertex);
        for (i1, e1) in d1.edges.iter().enumerate() {
            let (a1, b1) = (d1.nodes[e1.a].vertex, d1.nodes[e1.b].vertex);
            let same_ends = a1.is_some() && b1.is_some() && ((a1 == a2 && b1 == b2) || (a1 == b2 && b1 == a2));
            if same_ends && same_path(mesh, &e1.path, &e2.path) {
                shared.push((i1, i2));
                skip2[i2] = true;
                break;
            }
        }
    }

    let b1 = bucket_segments(mesh, d1, &[]);
    let b2 = bucket_segments(mesh, d2, &skip2);
    let vertex_node = |tree: &DissectionTree, loc: &Loc| match loc {
        Loc::Vertex(v) => tree.vertex_node(*v).is_some(),
        _ => false,
    };
    for t in 0..mesh.num_triangles() {
        for x in &b1[t] {
            for y in &b2[t] {
                match segment_contact(mesh, &x.seg, &y.seg) {
                    Contact::None => {}
                    Contact::Endpoint(p) => {
                        let ex = &d1.edges[x.edge];
                        let ey = &d2.edges[y.edge];
                        let is_end1 = x.index == 0 && mesh.same_loc(&p, &mesh.locate(&ex.path.start())) || mesh.same_loc(&p, &mesh.locate(&ex.path.end()));
                        let is_end2 = mesh.same_loc(&p, &mesh.locate(&ey.path.start())) || mesh.same_loc(&p, &mesh.locate(&ey.path.end()));
                        if !(is_end1 && is_end2 && vertex_node(d1, &p) && vertex_node(d2, &p)) {
                            return Err(CrossingWitness::Edges { e1: x.edge, e2: y.edge });
                        }
                    }
                    Contact::Interior | Contact::Overlap => return Err(CrossingWitness::Edges { e1: x.edge, e2: y.edge }),
                }
            }
        }
    }

    // angular separation at common vertices, choosing a side for shared edges
    let mut items: Vec<Vec<(f64, Item)>> = vec![Vec::new(); mesh.num_vertices()];
    let mut push_dirs = |tree: &DissectionTree, which: u8, skip: &dyn Fn(usize) -> Option<usize>| {
        for (ei, e) in tree.edges.iter().enumerate() {
            for (node, at_start) in [(e.a, true), (e.b, false)] {
                let Some(v) = tree.nodes[node].vertex else { continue };
                let segs = e.path.segments(mesh);
                let s = if at_start { segs[0] } else { *segs.last().unwrap() };
                let dir = seg_dir_from(&s, at_start);
                let ang = mesh.direction_angle(v, s.tri, dir).unwrap_or(0.0);
                let item = match skip(ei) {
                    Some(k) => Item::Shared { k, at_start },
                    None if which == 1 => Item::One,
                    None => Item::Two,
                };
                items[v].push((ang, item));
            }
        }
    };
    let shared_of1 = |e1: usize| shared.iter().position(|s| s.0 == e1);
    push_dirs(d1, 1, &shared_of1);
    let none = |e2: usize| if skip2[e2] { Some(usize::MAX) } else { None };
    push_dirs(d2, 2, &none);
    for list in items.iter_mut() {
        list.retain(|(_, it)| !matches!(it, Item::Shared { k: usize::MAX, .. }));
        list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    for (v, list) in items.iter().enumerate() {
        let total = mesh.angle_sum(v);
        for i in 0..list.len() {
            let j = (i + 1) % list.len();
            if i == j {
                continue;
            }
            let mut gap = list[j].0 - list[i].0;
            if j == 0 {
                gap += total;
            }
            if gap.abs() <= ANGLE_TOL && list[i].1.tag() != list[j].1.tag() {
                return Err(CrossingWitness::Interleave { vertex: v });
            }
        }
    }

    let n_shared = shared.len();
    let mut sides = vec![None; n_shared];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n_shared];
    for (v, list) in items.iter().enumerate() {
        for (_, it) in list {
            if let Item::Shared { k, .. } = it {
                if !incident[*k].contains(&v) {
                    incident[*k].push(v);
                }
            }
        }
    }
    let has_both = |list: &[(f64, Item)]| {
        let a = list.iter().any(|x| !matches!(x.1, Item::Two));
        let b = list.iter().any(|x| !matches!(x.1, Item::One));
        a && b
    };
    let check_vertex = |v: usize, sides: &[Option<bool>]| -> Option<bool> {
        let list = &items[v];
        if !has_both(list) {
            return Some(true);
        }
        let mut labels = Vec::with_capacity(list.len() + 4);
        for (_, it) in list {
            match *it {
                Item::One => labels.push(1u8),
                Item::Two => labels.push(2u8),
                Item::Shared { k, at_start } => {
                    let left = sides[k]?;
                    // the second tree's copy sits just counterclockwise when it
                    // is on the left at the start, or on the right at the end
                    if left == at_start {
                        labels.push(1);
                        labels.push(2);
                    } else {
                        labels.push(2);
                        labels.push(1);
                    }
                }
            }
        }
        let changes = (0..labels.len()).filter(|&i| labels[i] != labels[(i + 1) % labels.len()]).count();
        Some(changes <= 2)
    };
    fn search(k: usize, sides: &mut Vec<Option<bool>>, incident: &[Vec<usize>], check: &dyn Fn(usize, &[Option<bool>]) -> Option<bool>) -> bool {
        if k == sides.len() {
            return true;
        }
        for choice in [true, false] {
            sides[k] = Some(choice);
            let ok = incident[k].iter().all(|&v| check(v, sides).unwrap_or(true));
            if ok && search(k + 1, sides, incident, check) {
                return true;
            }
        }
        sides[k] = None;
        false
    }
    // vertices without shared edges are checked once
    for (v, list) in items.iter().enumerate() {
        if !list.iter().any(|x| matches!(x.1, Item::Shared { .. })) && check_vertex(v, &sides) == Some(false) {
            return Err(CrossingWitness::Interleave { vertex: v });
        }
    }
    if !search(0, &mut sides, &incident, &check_vertex) {
        let v = incident.iter().flatten().copied().next().unwrap_or(0);
        return Err(CrossingWitness::Interleave { vertex: v });
    }
    Ok(Contacts { shared: shared.iter().zip(&sides).map(|(&(a, b), s)| (a, b, s.unwrap())).collect() })
}

#[derive(Clone, Copy, Debug)]
enum Item {
    One,
    Two,
    Shared { k: usize, at_start: bool },
}

impl Item {
    fn tag(&self) -> u8 {
        match self {
            Item::One => 1,
            Item::Two => 2,
            Item::Shared { .. } => 3,
        }
    }
}

pub(crate) fn skeleton_adjacency(mesh: &PolyhedronMesh) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); mesh.num_vertices()];
    for (a, b) in mesh.skeleton_edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

/// Skeleton tree of `unit_cube` whose net is the cross-shaped hexomino.
pub fn cube_cross_tree(mesh: &PolyhedronMesh) -> DissectionTree {
    DissectionTree::from_vertex_edges(mesh, &[(0, 1), (1, 2), (2, 3), (0, 4), (1, 5), (2, 6), (3, 7)]).expect("cube skeleton edges")
}

type Waypoint = (usize, [f64; 3]);

const SWIRL: [(usize, usize, &[Waypoint]); 7] = [
    (2, 0, &[(0, [0.0, 0.0, 1.0]), (0, [1.0, 0.0, 0.0])]),
    (0, 3, &[(0, [1.0, 0.0, 0.0]), (0, [0.0, 1.0, 0.0])]),
    (3, 4, &[(0, [0.0, 1.0, 0.0]), (11, [0.31095253694033087, 0.2462901836797946, 0.4427572793798745]), (2, [1.0, 0.0, 0.0])]),
    (4, 7, &[(2, [1.0, 0.0, 0.0]), (3, [0.0, 0.0, 1.0])]),
    (7, 6, &[(3, [0.0, 0.0, 1.0]), (2, [0.0, 0.0, 1.0])]),
    (
        6,
        1,
        &[
            (2, [0.0, 0.0, 1.0]),
            (2, [0.08981009336891776, 0.631922042715687, 0.27826786391539526]),
            (2, [0.0, 0.7446638954726608, 0.2553361045273392]),
            (1, [0.0, 0.0, 1.0]),
        ],
    ),
    (
        1,
        5,
        &[
            (1, [0.0, 0.0, 1.0]),
            (4, [0.3332014104066538, 0.0, 0.6667985895933461]),
            (2, [0.4997032321406979, 0.5002967678593021, 0.0]),
            (2, [0.6664028208133076, 0.0, 0.3335971791866924]),
            (3, [0.12094874406319878, 0.061032014050342955, 0.8180192418864582]),
            (2, [0.5164785742175874, 0.0, 0.48352142578241264]),
            (2, [0.0, 1.0, 0.0]),
        ],
    ),
];

/// Hamiltonian path on `unit_cube` whose last edge swirls over the top
/// face; its net overlaps itself.
pub fn cube_swirl_tree(mesh: &PolyhedronMesh) -> DissectionTree {
    let nodes = (0..mesh.num_vertices()).map(|v| TreeNode { point: mesh.vertex_point(v), vertex: Some(v) }).collect();
    let edges = SWIRL
        .iter()
        .map(|&(a, b, pts)| {
            let points = pts.iter().map(|&(face, bary)| SurfacePoint { face, bary }).collect();
            TreeEdge { a, b, path: GeodesicPolyline::new(mesh, points).expect("swirl polyline") }
        })
        .collect();
    DissectionTree { nodes, edges }
}

/// Uniformly random spanning tree of the polygon skeleton (Wilson's
/// loop-erased random walk), deterministic per seed.
pub fn edge_spanning_tree(mesh: &PolyhedronMesh, seed: u64) -> DissectionTree {
    let adj = skeleton_adjacency(mesh);
    let n = mesh.num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    let root = rng.gen_range(0..n);
    in_tree[root] = true;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            next[u] = adj[u][rng.gen_range(0..adj[u].len())];
            u = next[u];
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u];
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..n).filter(|&v| v != root).map(|v| (v.min(next[v]), v.max(next[v]))).collect();
    pairs.sort_unstable();
    DissectionTree::from_vertex_edges(mesh, &pairs).expect("skeleton edges exist")
}

/// Fine triangulation of a net: every cell ear-clipped, with neighbors across
/// uncut edges.
pub(crate) struct FineTris {
    /// `(cell, placed corners, local corner indices in the cell)`.
    pub tris: Vec<(usize, [Vec2; 3], [usize; 3])>,
    pub nb: Vec<[Option<(usize, usize)>; 3]>,
    /// Fine triangle and local edge holding cell edge `(c, i)`.
    pub owner: BTreeMap<(usize, usize), (usize, usize)>,
}

pub(crate) fn fine_triangulation(net: &Net) -> Result<FineTris, TreeError> {
    let ov = &net.overlay;
    let mut tris = Vec::new();
    let mut owner = BTreeMap::new();
    let mut diag: BTreeMap<(usize, usize, usize), (usize, usize)> = BTreeMap::new();
    let mut nb: Vec<[Option<(usize, usize)>; 3]> = Vec::new();
    for (ci, c) in net.cells.iter().enumerate() {
        let n = c.polygon.len();
        let t = geom::triangulate(&c.polygon).ok_or(TreeError::Routing("cell cannot be triangulated"))?;
        for tri in t {
            let f = tris.len();
            tris.push((ci, [c.polygon[tri[0]], c.polygon[tri[1]], c.polygon[tri[2]]], tri));
            nb.push([None; 3]);
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                if v == (u + 1) % n {
                    owner.insert((ci, u), (f, k));
                } else if let Some(&(g, l)) = diag.get(&(ci, v, u)) {
                    nb[f][k] = Some((g, l));
                    nb[g][l] = Some((f, k));
                } else {
                    diag.insert((ci, u, v), (f, k));
                }
            }
        }
    }
    for (&(ci, i), &(f, k)) in &owner {
        if ov.is_cut(ci, i, net.cut_mask) {
            continue;
        }
        let tw = ov.cells[ci].edges[i].twin;
        if let Some(&(g, l)) = owner.get(&tw) {
            nb[f][k] = Some((g, l));
        }
    }
    Ok(FineTris { tris, nb, owner })
}

/// Draws a second dissection tree strictly inside `net` (touching its
/// boundary only at one chosen copy of each vertex) and folds it back onto
/// the surface. The result does not cross the net's tree.
pub fn tree_in_net(net: &Net, seed: u64) -> Result<DissectionTree, TreeError> {
    let mesh = &net.mesh;
    let n = mesh.num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fine = fine_triangulation(net)?;
    let nf = fine.tris.len();

    // representatives: the copy nearest the net centroid
    let centroid = net.centroid();
    let mut rep_seg = vec![usize::MAX; n];
    for v in 0..n {
        let mut best = (f64::INFINITY, usize::MAX);
        for &i in &net.vertex_images[v] {
            let d = net.boundary[i].a.dist(centroid);
            if d < best.0 - 1e-12 * (1.0 + d) || (d <= best.0 + 1e-12 * (1.0 + d) && i < best.1) {
                best = (d, i);
            }
        }
        rep_seg[v] = best.1;
    }
    // corner fan of each representative, pick the middle triangle
    let mut rep_tri = vec![0usize; n];
    let mut rep_corner = vec![0usize; n];
    for v in 0..n {
        let s = &net.boundary[rep_seg[v]];
        let (mut f, mut k) = fine.owner[&(s.cell, s.cell_edge)];
        let mut fan = vec![(f, k)];
        loop {
            match fine.nb[f][(k + 2) % 3] {
                Some((g, l)) => {
                    // the shared edge runs corner -> x in g
                    f = g;
                    k = l;
                    fan.push((f, k));
                    if fan.len() > nf {
                        return Err(TreeError::Routing("corner fan does not close"));
                    }
                }
                None => break,
            }
        }
        let (f, k) = fan[fan.len() / 2];
        rep_tri[v] = f;
        rep_corner[v] = k;
    }

    // minimal subtree of the dual tree spanning the representative triangles
    let mut is_rep = vec![false; nf];
    for &f in &rep_tri {
        is_rep[f] = true;
    }
    let root = rep_tri[0];
    let mut parent = vec![usize::MAX; nf];
    let mut order = vec![root];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let f = order[i];
        i += 1;
        for k in 0..3 {
            if let Some((g, _)) = fine.nb[f][k] {
                if parent[g] == usize::MAX {
                    parent[g] = f;
                    order.push(g);
                } else if g != parent[f] && parent[g] != f {
                    return Err(TreeError::Routing("net triangulation has a cycle"));
                }
            }
        }
    }
    if rep_tri.iter().any(|&f| parent[f] == usize::MAX) {
        return Err(TreeError::Routing("net is disconnected"));
    }
    let mut keep = is_rep.clone();
    for &f in order.iter().rev() {
        if keep[f] && f != root {
            keep[parent[f]] = true;
        }
    }

    // planar graph: reps, triangle nodes, portal points
    #[derive(Clone, Copy)]
    struct GNode {
        p: Vec2,
        /// fine triangle used to fold the point back
        ftri: usize,
        vertex: Option<usize>,
    }
    let mut gnodes: Vec<GNode> = Vec::new();
    let mut gadj: Vec<Vec<(usize, usize)>> = Vec::new(); // (other, fine triangle of the segment)
    let mut tri_node = vec![usize::MAX; nf];
    for v in 0..n {
        let s = &net.boundary[rep_seg[v]];
        gnodes.push(GNode { p: s.a, ftri: rep_tri[v], vertex: Some(v) });
        gadj.push(Vec::new());
    }
    for &f in &order {
        if !keep[f] {
            continue;
        }
        let w: [f64; 3] = [1.0 + rng.gen::<f64>(), 1.0 + rng.gen::<f64>(), 1.0 + rng.gen::<f64>()];
        let sw = w[0] + w[1] + w[2];
        let c = fine.tris[f].1;
        let p = c[0] * (w[0] / sw) + c[1] * (w[1] / sw) + c[2] * (w[2] / sw);
        tri_node[f] = gnodes.len();
        gnodes.push(GNode { p, ftri: f, vertex: None });
        gadj.push(Vec::new());
    }
    let link = |gadj: &mut Vec<Vec<(usize, usize)>>, a: usize, b: usize, f: usize| {
        gadj[a].push((b, f));
        gadj[b].push((a, f));
    };
    for &f in &order {
        if !keep[f] || f == root {
            continue;
        }
        let g = parent[f];
        let k = (0..3).find(|&k| fine.nb[f][k].map(|x| x.0) == Some(g)).unwrap();
        let c = fine.tris[f].1;
        let u = 0.3 + 0.4 * rng.gen::<f64>();
        let p = c[k].lerp(c[(k + 1) % 3], u);
        let pi = gnodes.len();
        gnodes.push(GNode { p, ftri: f, vertex: None });
        gadj.push(Vec::new());
        link(&mut gadj, tri_node[f], pi, f);
        link(&mut gadj, pi, tri_node[g], g);
    }
    for v in 0..n {
        link(&mut gadj, v, tri_node[rep_tri[v]], rep_tri[v]);
    }

    // fold a planar point back onto the surface inside fine triangle f
    let fold = |p: Vec2, f: usize| -> SurfacePoint {
        let cell = fine.tris[f].0;
        let pc = &net.cells[cell];
        let sp = mesh.from_chart(pc.tri, pc.motion.inverse().apply(p));
        let loc = mesh.locate(&sp);
        mesh.surface_point_in(pc.tri, &loc).unwrap_or(sp)
    };

    // contract degree-2 helper nodes into polylines
    let key = |i: usize| gnodes[i].vertex.is_some() || gadj[i].len() != 2;
    let mut node_id = vec![usize::MAX; gnodes.len()];
    let mut nodes = Vec::new();
    for v in 0..n {
        node_id[v] = nodes.len();
        nodes.push(TreeNode { point: mesh.surface_point_in(net.cells[fine.tris[rep_tri[v]].0].tri, &Loc::Vertex(v)).unwrap(), vertex: Some(v) });
    }
    for i in n..gnodes.len() {
        if key(i) {
            if gadj[i].len() < 3 {
                return Err(TreeError::Routing("junction of degree below 3"));
            }
            node_id[i] = nodes.len();
            nodes.push(TreeNode { point: fold(gnodes[i].p, gnodes[i].ftri), vertex: None });
        }
    }
    let mut edges = Vec::new();
    let mut used = BTreeMap::new();
    for a in 0..gnodes.len() {
        if !key(a) {
            continue;
        }
        for &(b0, f0) in &gadj[a] {
            if used.contains_key(&(a, b0)) {
                continue;
            }
            let mut pts = vec![fold(gnodes[a].p, f0)];
            let (mut prev, mut cur, mut f) = (a, b0, f0);
            used.insert((a, b0), ());
            loop {
                pts.push(fold(gnodes[cur].p, f));
                if key(cur) {
                    break;
                }
                let &(nx, nf2) = gadj[cur].iter().find(|x| x.0 != prev).unwrap();
                used.insert((cur, nx), ());
                prev = cur;
                cur = nx;
                f = nf2;
            }
            used.insert((cur, prev), ());
            let pts = dedup_points(mesh, pts);
            edges.push(TreeEdge { a: node_id[a], b: node_id[cur], path: GeodesicPolyline::new(mesh, pts)? });
        }
    }
    let tree = DissectionTree { nodes, edges };
    let report = validate_tree(mesh, &tree);
    if !report.is_valid() {
        return Err(TreeError::Routing("drawn tree failed validation"));
    }
    if crossing(mesh, &net.tree, &tree) {
        return Err(TreeError::Routing("drawn tree crosses the cut tree"));
    }
    Ok(tree)
}

/// Drops consecutive points at the same surface location, keeping the later
/// triangle hint.
fn dedup_points(mesh: &PolyhedronMesh, pts: Vec<SurfacePoint>) -> Vec<SurfacePoint> {
    let mut out: Vec<SurfacePoint> = Vec::with_capacity(pts.len());
    for p in pts {
        if let Some(last) = out.last() {
            if mesh.same_loc(&mesh.locate(last), &mesh.locate(&p)) {
                let keep_first = out.len() == 1;
                if !keep_first {
                    *out.last_mut().unwrap() = p;
                }
                continue;
            }
        }
        out.push(p);
    }
    out
}
