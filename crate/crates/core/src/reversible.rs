//! Pieces, double chains and reversibility certificates.
//!
//! The first net is cut along the image of the second tree. Consecutive
//! pieces along the net boundary meet at one copy of each mesh vertex; these
//! copies become the hinges. Gluing the pieces back along the first tree
//! yields the second net.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dissection::{contacts, validate_tree, Contacts, CrossingWitness, DissectionTree};
use crate::geom::{self, Motion2, Vec2};
use crate::mesh::{polygon_is_simple, PolyhedronMesh, SurfacePoint};
use crate::overlay::Overlay;
use crate::unfold::{self, align_nets, cut_and_unfold, describe, draw_tree_in_net, net_area, net_perimeter, Net, Side, UnfoldError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ReverseError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("trees cross: {0}")]
    Crossing(CrossingWitness),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error("net carries no second tree")]
    NoMarks,
    #[error("split failed: {0}")]
    Split(String),
    #[error("expected {expected} pieces, found {found}")]
    PieceCount { expected: usize, found: usize },
    #[error("pieces not chainable: {0}")]
    NotChainable(String),
    #[error("gluing piece {piece} is off by {gap:e}")]
    Gluing { piece: usize, gap: f64 },
}

/// Where a piece edge comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeLabel {
    /// A copy of a first-tree edge on the first net's boundary.
    FromD1 { tree_edge: usize, side: Side },
    /// A cut along a second-tree edge.
    FromD2 { tree_edge: usize, side: Side },
}

#[derive(Clone, Debug)]
pub struct Piece {
    /// Position in the chain.
    pub index: usize,
    /// Closed polygon in first-net coordinates; an open polyline for an
    /// empty piece.
    pub polygon: Vec<Vec2>,
    /// Overlay vertex at each polygon corner.
    pub rverts: Vec<usize>,
    /// `labels[i]` describes the edge leaving `polygon[i]`.
    pub labels: Vec<EdgeLabel>,
    /// The two vertex copies bounding the piece's stretch of the first net's
    /// boundary, in boundary order: `(mesh vertex, position)`.
    pub hinge_candidates: [(usize, Vec2); 2],
    /// For an empty piece, the side of the shared edge it stands for.
    pub empty: Option<Side>,
    /// Overlay cells covered.
    pub cells: Vec<usize>,
    pub area: f64,
}

impl Piece {
    pub fn is_empty(&self) -> bool {
        self.empty.is_some()
    }

    /// Edges as `(from, to, label)`.
    pub fn edges(&self) -> Vec<(Vec2, Vec2, EdgeLabel)> {
        let n = self.polygon.len();
        (0..self.labels.len()).map(|i| (self.polygon[i], self.polygon[(i + 1) % n], self.labels[i])).collect()
    }

    fn edge_rverts(&self, i: usize) -> (usize, usize) {
        (self.rverts[i], self.rverts[(i + 1) % self.rverts.len()])
    }
}

/// Pieces of a first net cut along a second tree, with the refined net they
/// were cut from.
#[derive(Clone, Debug)]
pub struct PieceSet {
    pub pieces: Vec<Piece>,
    /// First net developed over the two-tree overlay.
    pub refined: Net,
    pub d2: DissectionTree,
    pub contacts: Contacts,
}

#[derive(Clone, Debug)]
pub struct DoubleChain {
    pub pieces: Vec<Piece>,
    /// `hinges[k]` joins pieces `k` and `k + 1`, in first-net coordinates.
    pub hinges: Vec<Vec2>,
    pub hinge_vertices: Vec<usize>,
    pub placement_p: Vec<Motion2>,
    pub placement_q: Vec<Motion2>,
    pub refined: Net,
    pub d2: DissectionTree,
    /// Piece holding each overlay cell.
    pub piece_of_cell: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    P,
    Q,
}

/// Half of a tree edge walked along one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dart {
    pub tree_edge: usize,
    pub side: Side,
    pub from: usize,
    pub to: usize,
}

/// Degenerate Jordan curve hugging the second tree.
#[derive(Clone, Debug)]
pub struct SeparatingCycle {
    pub darts: Vec<Dart>,
    /// Closed walk of surface points, one per corner.
    pub points: Vec<SurfacePoint>,
    pub length: f64,
}

fn check_trees(mesh: &PolyhedronMesh, d1: &DissectionTree, d2: &DissectionTree) -> Result<Contacts, ReverseError> {
    for t in [d1, d2] {
        let r = validate_tree(mesh, t);
        if !r.is_valid() {
            return Err(ReverseError::InvalidTree(describe(&r.violations)));
        }
    }
    contacts(mesh, d1, d2).map_err(ReverseError::Crossing)
}

/// Boundary walk of a thin neighbourhood of `d2`.
pub fn separating_cycle(mesh: &PolyhedronMesh, d1: &DissectionTree, d2: &DissectionTree) -> Result<SeparatingCycle, ReverseError> {
    check_trees(mesh, d1, d2)?;
    let n2 = cut_and_unfold(mesh, d2)?;
    let mut darts = Vec::new();
    for (s, _) in n2.boundary_runs() {
        let b = &n2.boundary[s];
        let e = &d2.edges[b.tree_edge];
        let (from, to) = if b.side == Side::Left { (e.a, e.b) } else { (e.b, e.a) };
        darts.push(Dart { tree_edge: b.tree_edge, side: b.side, from, to });
    }
    // rotate so the walk starts at a dart leaving the lowest node
    if let Some(k) = (0..darts.len()).min_by_key(|&k| (darts[k].from, k)) {
        darts.rotate_left(k);
    }
    let points = n2.boundary.iter().map(|b| mesh.surface_point(&n2.overlay.rverts[b.ra].loc)).collect();
    Ok(SeparatingCycle { darts, points, length: net_perimeter(&n2) })
}

/// Does the corner of the net at boundary segment `i` hold a second-tree
/// edge that is not also a first-tree edge?
fn corner_has_d2(ov: &Overlay, start: (usize, usize)) -> bool {
    let (mut c, mut e) = start;
    for _ in 0..ov.cells.len() * 4 {
        let m = ov.cells[c].edges.len();
        let ce = &ov.cells[c].edges[(e + m - 1) % m];
        if ce.labels & 1 != 0 {
            return false;
        }
        if ce.labels & 2 != 0 {
            return true;
        }
        (c, e) = ce.twin;
    }
    false
}

/// Cuts a first net along the second tree drawn in it.
pub fn cut_net_along_tree(net: &Net) -> Result<PieceSet, ReverseError> {
    let mesh = &net.mesh;
    let d2 = net.marks_tree.clone().ok_or(ReverseError::NoMarks)?;
    let con = contacts(mesh, &net.tree, &d2).map_err(ReverseError::Crossing)?;
    let overlay = Overlay::new(mesh, &[&net.tree, &d2]).map_err(UnfoldError::from)?;
    let refined = Net::develop(mesh, &net.tree, overlay, 0, None);
    let ov = &refined.overlay;
    let bd = &refined.boundary;
    let n = bd.len();
    let nv = mesh.num_vertices();

    // chosen boundary copy of each shared edge
    let mut chosen: BTreeMap<(usize, Side), usize> = BTreeMap::new();
    for &(e1, e2, left) in &con.shared {
        chosen.insert((e1, if left { Side::Left } else { Side::Right }), e2);
    }

    let mut rep: Vec<Option<usize>> = vec![None; nv];
    let mut set_rep = |v: usize, i: usize| -> Result<(), ReverseError> {
        match rep[v] {
            None => rep[v] = Some(i),
            Some(j) if j == i => {}
            Some(_) => return Err(ReverseError::Crossing(CrossingWitness::Interleave { vertex: v })),
        }
        Ok(())
    };
    for v in 0..nv {
        for &i in &refined.vertex_images[v] {
            if corner_has_d2(ov, (bd[i].cell, bd[i].cell_edge)) {
                set_rep(v, i)?;
            }
        }
    }
    for &(e1, side) in chosen.keys() {
        let run: Vec<usize> = (0..n).filter(|&i| bd[i].tree_edge == e1 && bd[i].side == side).collect();
        let first = *run
            .iter()
            .find(|&&i| !run.contains(&((i + n - 1) % n)))
            .ok_or_else(|| ReverseError::Split(format!("copy of tree edge {e1} covers the whole boundary")))?;
        let last = (first + run.len() - 1) % n;
        if (0..run.len()).any(|k| !run.contains(&((first + k) % n))) {
            return Err(ReverseError::Split(format!("copy of tree edge {e1} is not contiguous")));
        }
        set_rep(bd[first].ra, first)?;
        set_rep(bd[last].rb, (last + 1) % n)?;
    }
    let mut reps: Vec<(usize, usize)> = Vec::with_capacity(nv);
    for (v, r) in rep.iter().enumerate() {
        let i = r.ok_or_else(|| ReverseError::Split(format!("vertex {v} has no corner holding the second tree")))?;
        reps.push((i, v));
    }
    let origin = reps[0].0;
    reps.sort_by_key(|&(i, _)| (i + n - origin) % n);
    for w in reps.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(ReverseError::Split(format!("vertices {} and {} share a boundary corner", w[0].1, w[1].1)));
        }
    }

    let comps = ov.components(3);
    let mut comp_of = vec![0; ov.cells.len()];
    for (k, cs) in comps.iter().enumerate() {
        for &c in cs {
            comp_of[c] = k;
        }
    }
    let mut used = vec![false; comps.len()];
    let mut pieces = Vec::with_capacity(nv);
    for k in 0..reps.len() {
        let (s, va) = reps[k];
        let (t, vb) = reps[(k + 1) % reps.len()];
        let len = if reps.len() == 1 { n } else { (t + n - s) % n };
        let arc: Vec<usize> = (0..len).map(|j| (s + j) % n).collect();
        let ends = [(va, bd[s].a), (vb, bd[t].a)];
        let key = (bd[s].tree_edge, bd[s].side);
        if chosen.contains_key(&key) && arc.iter().all(|&i| (bd[i].tree_edge, bd[i].side) == key) {
            let mut polygon: Vec<Vec2> = arc.iter().map(|&i| bd[i].a).collect();
            polygon.push(bd[*arc.last().unwrap()].b);
            let mut rverts: Vec<usize> = arc.iter().map(|&i| bd[i].ra).collect();
            rverts.push(bd[*arc.last().unwrap()].rb);
            pieces.push(Piece {
                index: k,
                polygon,
                rverts,
                labels: vec![EdgeLabel::FromD1 { tree_edge: key.0, side: key.1 }; arc.len()],
                hinge_candidates: ends,
                empty: Some(key.1),
                cells: Vec::new(),
                area: 0.0,
            });
            continue;
        }
        let comp = comp_of[bd[s].cell];
        if let Some(&i) = arc.iter().find(|&&i| comp_of[bd[i].cell] != comp || chosen.contains_key(&(bd[i].tree_edge, bd[i].side))) {
            return Err(ReverseError::Split(format!("boundary segment {i} between vertices {va} and {vb} borders two pieces")));
        }
        if used[comp] {
            return Err(ReverseError::Split(format!("piece at vertex {va} meets the boundary twice")));
        }
        used[comp] = true;
        let walk = ov.walk_from(3, (bd[s].cell, bd[s].cell_edge));
        if arc.iter().any(|&i| !walk.contains(&(bd[i].cell, bd[i].cell_edge))) {
            return Err(ReverseError::Split(format!("piece at vertex {va} has a disconnected outline")));
        }
        let mut polygon = Vec::with_capacity(walk.len());
        let mut rverts = Vec::with_capacity(walk.len());
        let mut labels = Vec::with_capacity(walk.len());
        for &(c, i) in &walk {
            let cell = &ov.cells[c];
            let ce = &cell.edges[i];
            polygon.push(refined.cells[c].polygon[i]);
            rverts.push(cell.rverts[i]);
            let side = |fwd: bool| if fwd { Side::Left } else { Side::Right };
            let label = if ce.labels & 1 != 0 {
                let (te, fwd) = ce.refs[0].unwrap();
                if chosen.contains_key(&(te, side(fwd))) {
                    let (e2, f2) = ce.refs[1].ok_or_else(|| ReverseError::Split(format!("shared edge {te} lost its second label")))?;
                    EdgeLabel::FromD2 { tree_edge: e2, side: side(f2) }
                } else {
                    EdgeLabel::FromD1 { tree_edge: te, side: side(fwd) }
                }
            } else {
                let (e2, f2) = ce.refs[1].unwrap();
                EdgeLabel::FromD2 { tree_edge: e2, side: side(f2) }
            };
            labels.push(label);
        }
        let area = geom::signed_area(&polygon);
        let cell_area: f64 = comps[comp].iter().map(|&c| geom::signed_area(&refined.cells[c].polygon)).sum();
        if (area - cell_area).abs() > 1e-9 * mesh.surface_area() || area <= 0.0 {
            return Err(ReverseError::Split(format!("piece at vertex {va} has outline area {area} but cell area {cell_area}")));
        }
        pieces.push(Piece { index: k, polygon, rverts, labels, hinge_candidates: ends, empty: None, cells: comps[comp].clone(), area });
    }
    let found = pieces.len() + used.iter().filter(|u| !**u).count();
    if found != nv {
        return Err(ReverseError::PieceCount { expected: nv, found });
    }
    Ok(PieceSet { pieces, refined, d2, contacts: con })
}

/// Orders the pieces into a hinged chain and computes both placements.
pub fn build_double_chain(set: PieceSet) -> Result<DoubleChain, ReverseError> {
    let PieceSet { pieces, refined, d2, .. } = set;
    let eps = refined.mesh.snap_eps();
    let n = pieces.len();
    let mut hinges = Vec::with_capacity(n.saturating_sub(1));
    let mut hinge_vertices = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let (v, p) = pieces[k].hinge_candidates[1];
        let (w, q) = pieces[k + 1].hinge_candidates[0];
        if v != w || p.dist(q) > eps {
            return Err(ReverseError::NotChainable(format!("pieces {k} and {} do not meet", k + 1)));
        }
        hinges.push(p);
        hinge_vertices.push(v);
    }
    let mut piece_of_cell = vec![usize::MAX; refined.cells.len()];
    for p in &pieces {
        for &c in &p.cells {
            piece_of_cell[c] = p.index;
        }
    }
    if let Some(c) = piece_of_cell.iter().position(|&p| p == usize::MAX) {
        return Err(ReverseError::NotChainable(format!("cell {c} belongs to no piece")));
    }
    let placement_q = glue(&pieces, refined.tree.edges.len(), eps)?;
    for (k, &h) in hinges.iter().enumerate() {
        let gap = placement_q[k].apply(h).dist(placement_q[k + 1].apply(h));
        if gap > eps {
            return Err(ReverseError::Gluing { piece: k + 1, gap });
        }
    }
    Ok(DoubleChain { placement_p: vec![Motion2::IDENTITY; n], placement_q, pieces, hinges, hinge_vertices, refined, d2, piece_of_cell })
}

/// Places every piece by matching first-tree copies with their partners,
/// spreading out from piece 0.
fn glue(pieces: &[Piece], n_edges: usize, eps: f64) -> Result<Vec<Motion2>, ReverseError> {
    // (piece, rvert -> position) per copy of each first-tree edge
    let mut copies: BTreeMap<(usize, Side), (usize, BTreeMap<usize, Vec2>)> = BTreeMap::new();
    for p in pieces {
        for (i, l) in p.labels.iter().enumerate() {
            if let EdgeLabel::FromD1 { tree_edge, side } = *l {
                let (ra, rb) = p.edge_rverts(i);
                let e = copies.entry((tree_edge, side)).or_insert((p.index, BTreeMap::new()));
                if e.0 != p.index {
                    return Err(ReverseError::NotChainable(format!("copy of tree edge {tree_edge} split between pieces")));
                }
                e.1.insert(ra, p.polygon[i]);
                e.1.insert(rb, p.polygon[(i + 1) % p.polygon.len()]);
            }
        }
    }
    // links (p, q, m) with q-frame = m(p-frame)
    let mut links = Vec::with_capacity(n_edges);
    for te in 0..n_edges {
        let (Some((p, lp)), Some((q, lq))) = (copies.get(&(te, Side::Left)), copies.get(&(te, Side::Right))) else {
            return Err(ReverseError::NotChainable(format!("tree edge {te} lacks a boundary copy")));
        };
        let (src, dst): (Vec<Vec2>, Vec<Vec2>) = lp.iter().filter_map(|(r, &a)| lq.get(r).map(|&b| (a, b))).unzip();
        if src.len() < 2 {
            return Err(ReverseError::NotChainable(format!("copies of tree edge {te} do not match")));
        }
        let m = Motion2::fit(&src, &dst);
        let res = src.iter().zip(&dst).map(|(&a, &b)| m.apply(a).dist(b)).fold(0.0, f64::max);
        if res > eps {
            return Err(ReverseError::Gluing { piece: *p, gap: res });
        }
        links.push((*p, *q, m, src));
    }
    let mut place: Vec<Option<Motion2>> = vec![None; pieces.len()];
    place[0] = Some(Motion2::IDENTITY);
    let mut queue = VecDeque::from([0usize]);
    let mut tree_link = vec![false; links.len()];
    while let Some(x) = queue.pop_front() {
        for (li, (p, q, m, _)) in links.iter().enumerate() {
            let (other, mo) = if *p == x {
                (*q, place[x].unwrap().compose(&m.inverse()))
            } else if *q == x {
                (*p, place[x].unwrap().compose(m))
            } else {
                continue;
            };
            if place[other].is_none() {
                place[other] = Some(mo.renormalized());
                tree_link[li] = true;
                queue.push_back(other);
            }
        }
    }
    let place: Vec<Motion2> = place
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| ReverseError::NotChainable(format!("piece {i} is not glued to the chain"))))
        .collect::<Result<_, _>>()?;
    for (li, (p, q, m, src)) in links.iter().enumerate() {
        if tree_link[li] {
            continue;
        }
        let gap = place[*p].distance_on(&place[*q].compose(m), src);
        if gap > eps {
            return Err(ReverseError::Gluing { piece: *p, gap });
        }
    }
    Ok(place)
}

/// Lays the chain out in configuration `dir` as a net.
pub fn reassemble(chain: &DoubleChain, dir: Direction) -> Net {
    let r = &chain.refined;
    let (placement, tree, layer) = match dir {
        Direction::P => (&chain.placement_p, &r.tree, 0),
        Direction::Q => (&chain.placement_q, &chain.d2, 1),
    };
    let motions: Vec<Motion2> = r.cells.iter().enumerate().map(|(c, pc)| placement[chain.piece_of_cell[c]].compose(&pc.motion)).collect();
    Net::from_motions(&r.mesh, tree, r.overlay.clone(), layer, &motions)
}

/// Placements for `frames` evenly spaced steps from P to Q. Piece 0 stays
/// fixed; each hinge's relative angle moves linearly along the shorter way.
pub fn animate_chain(chain: &DoubleChain, frames: usize) -> Vec<Vec<Motion2>> {
    let n = chain.pieces.len();
    let frames = frames.max(2);
    let rel = |pl: &[Motion2], k: usize| geom::wrap_angle(pl[k + 1].angle() - pl[k].angle());
    let base: Vec<f64> = (0..n.saturating_sub(1)).map(|k| rel(&chain.placement_p, k)).collect();
    let turn: Vec<f64> = (0..n.saturating_sub(1)).map(|k| geom::wrap_angle(rel(&chain.placement_q, k) - base[k])).collect();
    let (p0, q0) = (chain.placement_p[0], chain.placement_q[0]);
    let mut out = Vec::with_capacity(frames);
    for f in 0..frames {
        let s = f as f64 / (frames - 1) as f64;
        if f == frames - 1 {
            out.push(chain.placement_q.clone());
            continue;
        }
        let mut ms = Vec::with_capacity(n);
        let a0 = p0.angle() + s * geom::wrap_angle(q0.angle() - p0.angle());
        let t0 = p0.translation_part().lerp(q0.translation_part(), s);
        ms.push(Motion2::translation(t0).compose(&Motion2::rotation(a0)));
        let mut a = a0;
        for k in 0..n.saturating_sub(1) {
            a += base[k] + s * turn[k];
            let h = chain.hinges[k];
            let prev = ms[k].apply(h);
            let r = Motion2::rotation(a);
            let m = Motion2::translation(prev - r.apply(h)).compose(&r);
            ms.push(m);
        }
        out.push(ms);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub pass: bool,
    pub detail: String,
}

impl Condition {
    fn ok(detail: String) -> Condition {
        Condition { pass: true, detail }
    }

    fn fail(detail: String) -> Condition {
        Condition { pass: false, detail }
    }

    fn check(pass: bool, detail: String) -> Condition {
        Condition { pass, detail }
    }
}

#[derive(Clone, Debug)]
pub struct ReversibilityReport {
    /// Both trees valid and not crossing.
    pub precondition: Condition,
    /// Finite dissection; hinges on the perimeter; both nets reassembled;
    /// boundaries become the partner's interior marks.
    pub conditions: [Condition; 4],
    pub pieces: usize,
    pub empty_pieces: usize,
    pub hinges: usize,
    /// Vertex-wise distance between the reassembled and independent nets.
    pub reassembly_error: f64,
    /// Largest Hausdorff distance in the boundary duality checks.
    pub hausdorff: f64,
    /// Larger of the two net diameters.
    pub diameter: f64,
}

impl ReversibilityReport {
    pub fn is_reversible(&self) -> bool {
        self.precondition.pass && self.conditions.iter().all(|c| c.pass)
    }
}

type Segs = Vec<(Vec2, Vec2)>;

fn directed(a: &Segs, b: &Segs) -> f64 {
    let mut worst: f64 = 0.0;
    for &(p, q) in a {
        for k in 0..=4 {
            let x = p.lerp(q, k as f64 / 4.0);
            let d = b.iter().map(|&(c, e)| geom::dist_point_segment(x, c, e)).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    worst
}

/// Hausdorff distance between two segment sets.
pub fn hausdorff(a: &Segs, b: &Segs) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    directed(a, b).max(directed(b, a))
}

fn polyline_segs(pts: &[Vec2]) -> Segs {
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn moved(m: &Motion2, s: &Segs) -> Segs {
    s.iter().map(|&(a, b)| (m.apply(a), m.apply(b))).collect()
}

/// Certifies that the nets of `d1` and `d2` are reversible.
pub fn verify_reversibility(mesh: &PolyhedronMesh, d1: &DissectionTree, d2: &DissectionTree) -> ReversibilityReport {
    let mut report = ReversibilityReport {
        precondition: Condition::fail(String::new()),
        conditions: core::array::from_fn(|_| Condition::fail(String::from("not reached"))),
        pieces: 0,
        empty_pieces: 0,
        hinges: 0,
        reassembly_error: f64::INFINITY,
        hausdorff: f64::INFINITY,
        diameter: 0.0,
    };
    let con = match check_trees(mesh, d1, d2) {
        Ok(c) => c,
        Err(e) => {
            report.precondition.detail = format!("{e}");
            return report;
        }
    };
    report.precondition = Condition::ok(format!("{} shared edges", con.shared.len()));
    let stage = || -> Result<(Net, Net, DoubleChain), ReverseError> {
        let n1 = cut_and_unfold(mesh, d1)?;
        let n2 = cut_and_unfold(mesh, d2)?;
        let marked = draw_tree_in_net(&n1, d2)?;
        let set = cut_net_along_tree(&marked)?;
        Ok((marked, n2, build_double_chain(set)?))
    };
    let (n1, n2, chain) = match stage() {
        Ok(x) => x,
        Err(e) => {
            report.conditions[0] = Condition::fail(format!("{e}"));
            return report;
        }
    };
    let nv = mesh.num_vertices();
    let diam = n1.diameter().max(n2.diameter());
    let tol = 1e-6 * diam;
    let eps = mesh.snap_eps();
    report.diameter = diam;
    report.pieces = chain.pieces.len();
    report.empty_pieces = chain.pieces.iter().filter(|p| p.is_empty()).count();
    report.hinges = chain.hinges.len();

    // (1) dissection
    let area = net_area(&n1);
    let piece_area: f64 = chain.pieces.iter().map(|p| p.area).sum();
    let bad_piece = chain.pieces.iter().find(|p| !p.is_empty() && (p.area <= 0.0 || !polygon_is_simple(&p.polygon, eps * 1e-3)));
    let mut c1 = Vec::new();
    if chain.pieces.len() != nv {
        c1.push(format!("{} pieces for {nv} vertices", chain.pieces.len()));
    }
    if (piece_area - area).abs() > 1e-9 * area {
        c1.push(format!("piece area {piece_area} against net area {area}"));
    }
    if let Some(p) = bad_piece {
        c1.push(format!("piece {} is not a simple polygon", p.index));
    }
    report.conditions[0] = if c1.is_empty() {
        Condition::ok(format!("{} pieces ({} empty), total area {piece_area:.12}", chain.pieces.len(), report.empty_pieces))
    } else {
        Condition::fail(c1.join("; "))
    };

    // (2) hinges on the perimeter, shared in both placements
    let bpoly = n1.boundary_polygon();
    let off_perimeter = chain.hinges.iter().map(|&h| (0..bpoly.len()).map(|i| geom::dist_point_segment(h, bpoly[i], bpoly[(i + 1) % bpoly.len()])).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let gap = (0..chain.hinges.len())
        .map(|k| {
            let h = chain.hinges[k];
            let gp = chain.placement_p[k].apply(h).dist(chain.placement_p[k + 1].apply(h));
            let gq = chain.placement_q[k].apply(h).dist(chain.placement_q[k + 1].apply(h));
            gp.max(gq)
        })
        .fold(0.0, f64::max);
    report.conditions[1] = Condition::check(
        chain.hinges.len() + 1 == nv && off_perimeter <= eps && gap <= eps,
        format!("{} hinges, off perimeter {off_perimeter:.3e}, contact gap {gap:.3e}", chain.hinges.len()),
    );

    // (3) reassembly
    let p_net = reassemble(&chain, Direction::P);
    let q_net = reassemble(&chain, Direction::Q);
    let ep = align_nets(&p_net, &n1).map(|(_, e)| e);
    let aq = align_nets(&q_net, &n2);
    let eq = aq.map(|(_, e)| e);
    let mut c3 = Vec::new();
    match (ep, eq) {
        (Some(ep), Some(eq)) => {
            report.reassembly_error = ep.max(eq);
            if ep > tol || eq > tol {
                c3.push(format!("vertex error P {ep:.3e}, Q {eq:.3e}"));
            }
        }
        _ => c3.push(String::from("cells do not correspond")),
    }
    for (name, net) in [("P", &p_net), ("Q", &q_net)] {
        if let Err(e) = unfold::check_net(net) {
            c3.push(format!("{name}: {e}"));
        }
    }
    report.conditions[2] = if c3.is_empty() { Condition::ok(format!("vertex error {:.3e}", report.reassembly_error)) } else { Condition::fail(c3.join("; ")) };

    // (4) boundary of each net = interior marks of the other
    let Some((align, _)) = aq else {
        report.conditions[3] = Condition::fail(String::from("no alignment"));
        return report;
    };
    let marks1 = match draw_tree_in_net(&n2, d1) {
        Ok(m) => m.interior_marks,
        Err(e) => {
            report.conditions[3] = Condition::fail(format!("{e}"));
            return report;
        }
    };
    let mut worst: f64 = 0.0;
    let place = |label: &dyn Fn(&EdgeLabel) -> bool, with_empty: bool| -> Segs {
        let mut s = Segs::new();
        for (k, p) in chain.pieces.iter().enumerate() {
            for (a, b, l) in p.edges() {
                if label(&l) && (with_empty || !p.is_empty()) {
                    s.push((chain.placement_q[k].apply(a), chain.placement_q[k].apply(b)));
                }
            }
        }
        moved(&align, &s)
    };
    // first-tree copies land on the first tree drawn in the second net
    for e1 in 0..d1.edges.len() {
        let img = place(&|l| matches!(l, EdgeLabel::FromD1 { tree_edge, .. } if *tree_edge == e1), true);
        let mut d = hausdorff(&img, &polyline_segs(&marks1[e1]));
        if let Some(&(_, e2, _)) = con.shared.iter().find(|s| s.0 == e1) {
            for side in [Side::Left, Side::Right] {
                let copy: Segs = n2.boundary.iter().filter(|b| b.tree_edge == e2 && b.side == side).map(|b| (b.a, b.b)).collect();
                d = d.min(hausdorff(&img, &copy));
            }
        }
        worst = worst.max(d);
    }
    // second-tree cuts land on the second net's boundary, and are the
    // second tree drawn in the first net
    for e2 in 0..d2.edges.len() {
        let shared = con.shared.iter().find(|s| s.1 == e2).map(|s| s.0);
        let mut img = place(&|l| matches!(l, EdgeLabel::FromD2 { tree_edge, .. } if *tree_edge == e2), false);
        if let Some(e1) = shared {
            img.extend(place(&|l| matches!(l, EdgeLabel::FromD1 { tree_edge, .. } if *tree_edge == e1), true));
        }
        let bnd: Segs = n2.boundary.iter().filter(|b| b.tree_edge == e2).map(|b| (b.a, b.b)).collect();
        let mut dd = if shared.is_some() {
            // the first-tree copy sits on one side only
            directed(&img, &bnd)
        } else {
            hausdorff(&img, &bnd)
        };
        let cuts: Segs = chain
            .pieces
            .iter()
            .flat_map(|p| p.edges())
            .filter(|e| matches!(e.2, EdgeLabel::FromD2 { tree_edge, .. } if tree_edge == e2))
            .map(|e| (e.0, e.1))
            .collect();
        dd = dd.max(hausdorff(&cuts, &polyline_segs(&n1.interior_marks[e2])));
        worst = worst.max(dd);
    }
    // and the second net's boundary folds back onto the second tree
    let fold = fold_back_error(&n2);
    worst = worst.max(fold);
    report.hausdorff = worst;
    report.conditions[3] = Condition::check(worst <= tol, format!("Hausdorff {worst:.3e} against tolerance {tol:.3e}"));
    report
}

/// Largest 3D distance between a boundary point of `net`, folded back onto
/// the surface, and the tree edge it came from.
pub fn fold_back_error(net: &Net) -> f64 {
    let mesh = &net.mesh;
    let mut worst: f64 = 0.0;
    for b in &net.boundary {
        let cell = &net.overlay.cells[b.cell];
        let n = cell.chart.len();
        let (ca, cb) = (cell.chart[b.cell_edge], cell.chart[(b.cell_edge + 1) % n]);
        let pts = net.tree.edges[b.tree_edge].path.points.iter().map(|p| mesh.point3(p)).collect::<Vec<_>>();
        for k in 0..=2 {
            let x = mesh.point3(&mesh.from_chart(cell.tri, ca.lerp(cb, k as f64 / 2.0)));
            let d = pts.windows(2).map(|w| geom::dist_point_segment3(x, w[0], w[1])).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissection::{edge_spanning_tree, tree_in_net, tree_length};
    use crate::geom::v2;
    use crate::mesh::{regular_tetrahedron, unit_cube};

    fn tetra_pair() -> (PolyhedronMesh, DissectionTree, DissectionTree) {
        let m = regular_tetrahedron();
        let d1 = DissectionTree::from_vertex_edges(&m, &[(3, 0), (3, 1), (3, 2)]).unwrap();
        let d2 = DissectionTree::from_vertex_edges(&m, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        (m, d1, d2)
    }

    fn chain_of(m: &PolyhedronMesh, d1: &DissectionTree, d2: &DissectionTree) -> DoubleChain {
        let n1 = cut_and_unfold(m, d1).unwrap();
        let marked = draw_tree_in_net(&n1, d2).unwrap();
        build_double_chain(cut_net_along_tree(&marked).unwrap()).unwrap()
    }

    #[test]
    fn tetra_pieces_and_chain() {
        let (m, d1, d2) = tetra_pair();
        let chain = chain_of(&m, &d1, &d2);
        assert_eq!(chain.pieces.len(), 4);
        assert_eq!(chain.hinges.len(), 3);
        assert_eq!(chain.pieces.iter().filter(|p| p.is_empty()).count(), 1);
        let area: f64 = chain.pieces.iter().map(|p| p.area).sum();
        assert!((area - m.surface_area()).abs() < 1e-12);
        let q = reassemble(&chain, Direction::Q);
        let n2 = cut_and_unfold(&m, &d2).unwrap();
        let (_, err) = align_nets(&q, &n2).unwrap();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn tetra_report_passes() {
        let (m, d1, d2) = tetra_pair();
        let r = verify_reversibility(&m, &d1, &d2);
        assert!(r.is_reversible(), "{r:?}");
        let r = verify_reversibility(&m, &d2, &d1);
        assert!(r.is_reversible(), "{r:?}");
    }

    #[test]
    fn separating_cycle_of_path() {
        let (m, d1, d2) = tetra_pair();
        let c = separating_cycle(&m, &d1, &d2).unwrap();
        assert_eq!(c.darts.len(), 6);
        assert!((c.length - 2.0 * tree_length(&d2).unwrap()).abs() < 1e-12);
        for w in 0..c.darts.len() {
            assert_eq!(c.darts[w].to, c.darts[(w + 1) % c.darts.len()].from);
        }
    }

    fn octahedron() -> PolyhedronMesh {
        use crate::geom::v3;
        let pts = [v3(1.0, 0.0, 0.0), v3(0.0, 1.0, 0.0), v3(-1.0, 0.0, 0.0), v3(0.0, -1.0, 0.0), v3(0.0, 0.0, 1.0), v3(0.0, 0.0, -1.0)];
        crate::hull::convex_hull(&pts).unwrap()
    }

    #[test]
    fn crossing_pair_is_rejected() {
        let m = octahedron();
        let d1 = DissectionTree::from_vertex_edges(&m, &[(4, 0), (4, 2), (0, 1), (2, 3), (0, 5)]).unwrap();
        let d2 = DissectionTree::from_vertex_edges(&m, &[(4, 1), (4, 3), (1, 2), (3, 0), (1, 5)]).unwrap();
        let r = verify_reversibility(&m, &d1, &d2);
        assert!(!r.precondition.pass);
        assert!(!r.is_reversible());
        assert!(separating_cycle(&m, &d1, &d2).is_err());
    }

    #[test]
    fn random_hulls() {
        use rand::{Rng, SeedableRng};
        for seed in 0..30u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(6..=12);
            let pts: Vec<_> = (0..k)
                .map(|_| {
                    let z: f64 = rng.gen_range(-1.0..1.0);
                    let t: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
                    let r = (1.0 - z * z).sqrt();
                    crate::geom::v3(r * t.cos(), r * t.sin(), z)
                })
                .collect();
            let Ok(m) = crate::hull::convex_hull(&pts) else { continue };
            let d1 = edge_spanning_tree(&m, seed);
            let n1 = cut_and_unfold(&m, &d1).unwrap();
            let d2 = tree_in_net(&n1, seed).unwrap();
            let r = verify_reversibility(&m, &d1, &d2);
            assert!(r.is_reversible(), "seed {seed}: {r:?}");
            assert_eq!(r.pieces, m.num_vertices());
        }
    }

    #[test]
    fn cube_with_tree_in_net() {
        let m = unit_cube();
        for seed in 0..6 {
            let d1 = edge_spanning_tree(&m, seed);
            let n1 = cut_and_unfold(&m, &d1).unwrap();
            let d2 = tree_in_net(&n1, seed).unwrap();
            let r = verify_reversibility(&m, &d1, &d2);
            assert!(r.is_reversible(), "seed {seed}: {r:?}");
            assert_eq!(r.pieces, 8);
            assert_eq!(r.hinges, 7);
        }
    }

    #[test]
    fn square_dihedron() {
        let sq = [v2(0.0, 0.0), v2(1.0, 0.0), v2(1.0, 1.0), v2(0.0, 1.0)];
        let m = PolyhedronMesh::make_dihedron(&sq).unwrap();
        let d1 = DissectionTree::from_vertex_edges(&m, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let n1 = cut_and_unfold(&m, &d1).unwrap();
        let d2 = tree_in_net(&n1, 3).unwrap();
        let r = verify_reversibility(&m, &d1, &d2);
        assert!(r.is_reversible(), "{r:?}");
        assert_eq!(r.pieces, 4);
        let chain = chain_of(&m, &d1, &d2);
        let q = reassemble(&chain, Direction::Q);
        assert!((net_area(&q) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dihedron_with_shared_edges() {
        let sq = [v2(0.0, 0.0), v2(1.0, 0.0), v2(1.0, 1.0), v2(0.0, 1.0)];
        let m = PolyhedronMesh::make_dihedron(&sq).unwrap();
        let d1 = DissectionTree::from_vertex_edges(&m, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let d2 = DissectionTree::from_vertex_edges(&m, &[(3, 0), (0, 1), (1, 2)]).unwrap();
        let r = verify_reversibility(&m, &d1, &d2);
        assert!(r.is_reversible(), "{r:?}");
        assert!(r.empty_pieces >= 2);
    }

    #[test]
    fn animation_keeps_hinges() {
        let (m, d1, d2) = tetra_pair();
        let chain = chain_of(&m, &d1, &d2);
        let frames = animate_chain(&chain, 24);
        assert_eq!(frames.len(), 24);
        for (f, ms) in frames.iter().enumerate() {
            for (k, &h) in chain.hinges.iter().enumerate() {
                assert!(ms[k].apply(h).dist(ms[k + 1].apply(h)) < 1e-9, "frame {f} hinge {k}");
            }
        }
        for (a, b) in frames[0].iter().zip(&chain.placement_p) {
            assert!(a.distance_on(b, &[v2(0.0, 0.0), v2(1.0, 1.0)]) < 1e-12);
        }
    }
}
