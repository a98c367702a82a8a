//! Serializable mirrors of the core types.
//!
//! Floats go through `serde_json`'s shortest round-trip formatting, so every
//! value reads back bit-identical. Non-finite values become `null`.

use serde::{Deserialize, Serialize};

use revnet_core::dissection::{DissectionTree, TreeEdge, TreeNode};
use revnet_core::geodesic::GeodesicPolyline;
use revnet_core::isotess::{TilingPatch, TilingReport, Window};
use revnet_core::reversible::{Condition, DoubleChain, EdgeLabel, Piece, ReversibilityReport};
use revnet_core::unfold::{net_area, net_perimeter, Net, Side};
use revnet_core::{Motion2, PolyhedronMesh, SurfacePoint, Vec2};

pub type Matrix = [[f64; 3]; 2];
pub type Point = [f64; 2];

fn pt(p: Vec2) -> Point {
    [p.x, p.y]
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn motion_from_matrix(m: &Matrix) -> Motion2 {
    Motion2 { cos: m[0][0], sin: m[1][0], tx: m[0][2], ty: m[1][2] }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideDto {
    Left,
    Right,
}

impl From<Side> for SideDto {
    fn from(s: Side) -> Self {
        match s {
            Side::Left => SideDto::Left,
            Side::Right => SideDto::Right,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointDto {
    pub face: usize,
    pub bary: [f64; 3],
}

impl From<&SurfacePoint> for PointDto {
    fn from(p: &SurfacePoint) -> Self {
        PointDto { face: p.face, bary: p.bary }
    }
}

impl PointDto {
    pub fn surface_point(&self) -> SurfacePoint {
        SurfacePoint { face: self.face, bary: self.bary }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDto {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    pub face: usize,
    pub bary: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDto {
    pub a: usize,
    pub b: usize,
    pub polyline: Vec<PointDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeDto {
    pub nodes: Vec<NodeDto>,
    pub edges: Vec<EdgeDto>,
}

#[derive(Debug, thiserror::Error)]
pub enum TreeDtoError {
    #[error("node id {0} appears twice")]
    DuplicateId(usize),
    #[error("edge {edge} refers to unknown node {id}")]
    UnknownNode { edge: usize, id: usize },
    #[error("edge {edge}: {msg}")]
    Polyline { edge: usize, msg: String },
    #[error("face index {face} out of range ({count} triangles)")]
    FaceOutOfRange { face: usize, count: usize },
}

impl TreeDto {
    pub fn from_tree(t: &DissectionTree) -> Self {
        TreeDto {
            nodes: t
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeDto { id, vertex: n.vertex, face: n.point.face, bary: n.point.bary })
                .collect(),
            edges: t
                .edges
                .iter()
                .map(|e| EdgeDto { a: e.a, b: e.b, polyline: e.path.points.iter().map(PointDto::from).collect() })
                .collect(),
        }
    }

    /// Rebuilds the tree; node ids may be any distinct integers.
    pub fn to_tree(&self, mesh: &PolyhedronMesh) -> Result<DissectionTree, TreeDtoError> {
        let count = mesh.num_triangles();
        let check = |face: usize| if face < count { Ok(()) } else { Err(TreeDtoError::FaceOutOfRange { face, count }) };
        let mut index = std::collections::BTreeMap::new();
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            check(n.face)?;
            if index.insert(n.id, nodes.len()).is_some() {
                return Err(TreeDtoError::DuplicateId(n.id));
            }
            nodes.push(TreeNode { point: SurfacePoint { face: n.face, bary: n.bary }, vertex: n.vertex });
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let a = *index.get(&e.a).ok_or(TreeDtoError::UnknownNode { edge: k, id: e.a })?;
            let b = *index.get(&e.b).ok_or(TreeDtoError::UnknownNode { edge: k, id: e.b })?;
            for p in &e.polyline {
                check(p.face)?;
            }
            let pts = e.polyline.iter().map(PointDto::surface_point).collect();
            let path = GeodesicPolyline::new(mesh, pts).map_err(|err| TreeDtoError::Polyline { edge: k, msg: err.to_string() })?;
            edges.push(TreeEdge { a, b, path });
        }
        Ok(DissectionTree { nodes, edges })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDto {
    pub tri: usize,
    pub face: usize,
    pub motion: Matrix,
    pub polygon: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegDto {
    pub a: Point,
    pub b: Point,
    pub tree_edge: usize,
    pub side: SideDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetDto {
    pub area: f64,
    pub perimeter: f64,
    pub diameter: f64,
    pub cells: Vec<CellDto>,
    pub boundary: Vec<SegDto>,
    /// Planar copies of each mesh vertex.
    pub vertex_images: Vec<Vec<Point>>,
    pub tree: TreeDto,
}

impl NetDto {
    pub fn from_net(net: &Net) -> Self {
        NetDto {
            area: net_area(net),
            perimeter: net_perimeter(net),
            diameter: net.diameter(),
            cells: net
                .cells
                .iter()
                .map(|c| CellDto { tri: c.tri, face: c.face, motion: c.motion.matrix(), polygon: c.polygon.iter().map(|&p| pt(p)).collect() })
                .collect(),
            boundary: net.boundary.iter().map(|s| SegDto { a: pt(s.a), b: pt(s.b), tree_edge: s.tree_edge, side: s.side.into() }).collect(),
            vertex_images: (0..net.mesh.num_vertices()).map(|v| net.vertex_positions(v).into_iter().map(pt).collect()).collect(),
            tree: TreeDto::from_tree(&net.tree),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tree", rename_all = "lowercase")]
pub enum LabelDto {
    D1 { tree_edge: usize, side: SideDto },
    D2 { tree_edge: usize, side: SideDto },
}

impl From<&EdgeLabel> for LabelDto {
    fn from(l: &EdgeLabel) -> Self {
        match *l {
            EdgeLabel::FromD1 { tree_edge, side } => LabelDto::D1 { tree_edge, side: side.into() },
            EdgeLabel::FromD2 { tree_edge, side } => LabelDto::D2 { tree_edge, side: side.into() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceDto {
    pub index: usize,
    pub polygon: Vec<Point>,
    pub labels: Vec<LabelDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empty: Option<SideDto>,
    pub area: f64,
}

impl From<&Piece> for PieceDto {
    fn from(p: &Piece) -> Self {
        PieceDto {
            index: p.index,
            polygon: p.polygon.iter().map(|&q| pt(q)).collect(),
            labels: p.labels.iter().map(LabelDto::from).collect(),
            empty: p.empty.map(SideDto::from),
            area: p.area,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainDto {
    pub pieces: Vec<PieceDto>,
    /// `hinges[k]` joins pieces `k` and `k + 1`, in first-net coordinates.
    pub hinges: Vec<Point>,
    pub hinge_vertices: Vec<usize>,
    pub placement_p: Vec<Matrix>,
    pub placement_q: Vec<Matrix>,
}

impl From<&DoubleChain> for ChainDto {
    fn from(c: &DoubleChain) -> Self {
        ChainDto {
            pieces: c.pieces.iter().map(PieceDto::from).collect(),
            hinges: c.hinges.iter().map(|&h| pt(h)).collect(),
            hinge_vertices: c.hinge_vertices.clone(),
            placement_p: c.placement_p.iter().map(Motion2::matrix).collect(),
            placement_q: c.placement_q.iter().map(Motion2::matrix).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionDto {
    pub pass: bool,
    pub detail: String,
}

impl From<&Condition> for ConditionDto {
    fn from(c: &Condition) -> Self {
        ConditionDto { pass: c.pass, detail: c.detail.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDto {
    pub reversible: bool,
    pub precondition: ConditionDto,
    /// Verdicts of the four reversibility conditions, in order.
    pub conditions: Vec<ConditionDto>,
    pub pieces: usize,
    pub empty_pieces: usize,
    pub hinges: usize,
    pub reassembly_error: Option<f64>,
    pub hausdorff: Option<f64>,
    pub diameter: f64,
}

impl From<&ReversibilityReport> for ReportDto {
    fn from(r: &ReversibilityReport) -> Self {
        ReportDto {
            reversible: r.is_reversible(),
            precondition: (&r.precondition).into(),
            conditions: r.conditions.iter().map(ConditionDto::from).collect(),
            pieces: r.pieces,
            empty_pieces: r.empty_pieces,
            hinges: r.hinges,
            reassembly_error: finite(r.reassembly_error),
            hausdorff: finite(r.hausdorff),
            diameter: r.diameter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchDto {
    pub radius: usize,
    pub center: Point,
    pub guaranteed_radius: f64,
    pub generators: Vec<Point>,
    pub motions: Vec<Matrix>,
}

impl From<&TilingPatch> for PatchDto {
    fn from(p: &TilingPatch) -> Self {
        PatchDto {
            radius: p.radius,
            center: pt(p.center),
            guaranteed_radius: p.guaranteed_radius,
            generators: p.generators.iter().map(|&g| pt(g)).collect(),
            motions: p.motions.iter().map(Motion2::matrix).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageDto {
    pub window_min: Point,
    pub window_max: Point,
    pub window_area: f64,
    pub covered_area: f64,
    pub overlap_area: f64,
    pub gap_area: f64,
    pub overlap_fraction: f64,
    pub gap_fraction: f64,
    pub copies_used: usize,
}

impl CoverageDto {
    pub fn new(w: &Window, r: &TilingReport) -> Self {
        CoverageDto {
            window_min: pt(w.min),
            window_max: pt(w.max),
            window_area: r.window_area,
            covered_area: r.covered_area,
            overlap_area: r.overlap_area,
            gap_area: r.gap_area,
            overlap_fraction: r.overlap_fraction,
            gap_fraction: r.gap_fraction,
            copies_used: r.copies_used,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("DTOs serialize");
    s.push('\n');
    s
}
