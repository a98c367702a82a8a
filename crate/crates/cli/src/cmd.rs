//! Subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use revnet_core::dissection::{contacts, edge_spanning_tree, tree_in_net, tree_length, validate_tree, DissectionTree, TreeEdge, TreeNode};
use revnet_core::geodesic::{cut_locus, cut_locus_of, shortest_path, star_unfold, GeodesicError};
use revnet_core::isotess::{isotetra_from_triangle, tile_patch, verify_tiling, TileError, Window};
use revnet_core::reversible::{animate_chain, build_double_chain, cut_net_along_tree, verify_reversibility, DoubleChain};
use revnet_core::unfold::{cut_and_unfold, draw_tree_in_net, net_area, net_perimeter, self_overlaps, Net};
use revnet_core::{Loc, PolyhedronMesh, SurfacePoint};

use crate::dto::{to_json, ChainDto, CoverageDto, NetDto, PatchDto, ReportDto, TreeDto};
use crate::off::parse_off;
use crate::svg::{chain_svg, net_svg, tiling_svg, RenderStyle};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "revnet", version, about = "Unfold convex polyhedra into reversible pairs of nets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cut a mesh along a tree and develop the net.
    Unfold(UnfoldArgs),
    /// Build the hinged chain between the nets of two trees and verify it.
    Reverse(ReverseArgs),
    /// Source and star unfoldings from one surface point.
    SourceStar(SourceStarArgs),
    /// Tile the plane with a net of an isotetrahedron.
    Tile(TileArgs),
}

#[derive(Debug, Args)]
pub struct UnfoldArgs {
    /// OFF file.
    #[arg(long)]
    pub mesh: PathBuf,
    /// Tree JSON file, `star:<vertex>`, `random:<seed>` or `cutlocus:f=<face>,u=<u>,v=<v>`.
    #[arg(long)]
    pub tree: String,
    /// Test the net for self-overlap.
    #[arg(long)]
    pub check_overlap: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReverseArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// First tree, as for `unfold --tree`.
    #[arg(long)]
    pub tree1: String,
    /// Second tree: JSON file or `auto:<seed>`, drawn inside the first net.
    #[arg(long)]
    pub tree2: String,
    /// Number of animation frames to write.
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SourceStarArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// `f=<face>,u=<u>,v=<v>`: triangle index and two barycentric weights.
    #[arg(long)]
    pub source: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TileArgs {
    /// Side lengths `a,b,c` of an acute triangle.
    #[arg(long)]
    pub triangle: String,
    /// Tree on the isotetrahedron, as for `unfold --tree`, or `auto:<seed>`.
    #[arg(long)]
    pub tree: String,
    /// Longest word of half-turns.
    #[arg(long, default_value_t = 4)]
    pub radius: usize,
    /// Window `w,h` centred on the net.
    #[arg(long)]
    pub window: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Writes through a temporary file and a rename.
pub fn write_atomic(path: &Path, data: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, data).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn load_mesh(path: &Path) -> Result<PolyhedronMesh, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_off(&text).map_err(|e| match e {
        crate::off::OffError::Mesh(m) => CliError::Invalid(format!("{}: {m}", path.display())),
        other => CliError::Parse(format!("{}: {other}", path.display())),
    })
}

/// Parses `f=<face>,u=<u>,v=<v>`.
pub fn parse_surface_point(mesh: &PolyhedronMesh, s: &str) -> Result<SurfacePoint, CliError> {
    let (mut f, mut u, mut v) = (None, None, None);
    for part in s.split(',') {
        let (k, val) = part.split_once('=').ok_or_else(|| CliError::Parse(format!("expected key=value in `{part}`")))?;
        let bad = || CliError::Parse(format!("bad value `{val}` for `{k}`"));
        match k.trim() {
            "f" => f = Some(val.trim().parse::<usize>().map_err(|_| bad())?),
            "u" => u = Some(val.trim().parse::<f64>().map_err(|_| bad())?),
            "v" => v = Some(val.trim().parse::<f64>().map_err(|_| bad())?),
            other => return Err(CliError::Parse(format!("unknown key `{other}`"))),
        }
    }
    let (Some(f), Some(u), Some(v)) = (f, u, v) else {
        return Err(CliError::Parse(format!("`{s}` needs f=, u= and v=")));
    };
    if f >= mesh.num_triangles() {
        return Err(CliError::Invalid(format!("face {f} out of range ({} triangles)", mesh.num_triangles())));
    }
    if !(u >= 0.0 && v >= 0.0 && u + v <= 1.0) {
        return Err(CliError::Invalid(format!("barycentric weights u={u}, v={v} leave the triangle")));
    }
    Ok(SurfacePoint { face: f, bary: [1.0 - u - v, u, v] })
}

/// Shortest paths from vertex `v` to every other vertex.
pub fn star_tree(mesh: &PolyhedronMesh, v: usize) -> Result<DissectionTree, CliError> {
    if v >= mesh.num_vertices() {
        return Err(CliError::Invalid(format!("vertex {v} out of range ({} vertices)", mesh.num_vertices())));
    }
    let nodes = (0..mesh.num_vertices()).map(|w| TreeNode { point: mesh.vertex_point(w), vertex: Some(w) }).collect();
    let mut edges = Vec::new();
    for w in (0..mesh.num_vertices()).filter(|&w| w != v) {
        let path = shortest_path(mesh, &mesh.vertex_point(v), &mesh.vertex_point(w)).map_err(geodesic_err)?;
        edges.push(TreeEdge { a: v, b: w, path });
    }
    Ok(DissectionTree { nodes, edges })
}

fn geodesic_err(e: GeodesicError) -> CliError {
    CliError::Invalid(e.to_string())
}

fn parse_seed(s: &str) -> Result<u64, CliError> {
    s.parse().map_err(|_| CliError::Parse(format!("bad seed `{s}`")))
}

/// Resolves a tree spec. `auto:<seed>` draws a tree inside `base`, or inside
/// the net of `random:<seed>` when no base is given.
pub fn resolve_tree(mesh: &PolyhedronMesh, spec: &str, base: Option<&Net>) -> Result<DissectionTree, CliError> {
    let tree = if let Some(v) = spec.strip_prefix("star:") {
        star_tree(mesh, v.parse().map_err(|_| CliError::Parse(format!("bad vertex `{v}`")))?)?
    } else if let Some(s) = spec.strip_prefix("random:") {
        edge_spanning_tree(mesh, parse_seed(s)?)
    } else if let Some(sp) = spec.strip_prefix("cutlocus:") {
        cut_locus(mesh, &parse_surface_point(mesh, sp)?).map_err(geodesic_err)?
    } else if let Some(s) = spec.strip_prefix("auto:") {
        let seed = parse_seed(s)?;
        let owned;
        let net = match base {
            Some(n) => n,
            None => {
                owned = cut_and_unfold(mesh, &edge_spanning_tree(mesh, seed)).map_err(|e| CliError::Invalid(e.to_string()))?;
                &owned
            }
        };
        tree_in_net(net, seed).map_err(|e| CliError::Invalid(e.to_string()))?
    } else {
        let path = Path::new(spec);
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        let dto: TreeDto = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{spec}: {e}")))?;
        dto.to_tree(mesh).map_err(|e| CliError::Invalid(format!("{spec}: {e}")))?
    };
    let report = validate_tree(mesh, &tree);
    if !report.is_valid() {
        return Err(CliError::Invalid(format!("tree `{spec}`: {}", report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))));
    }
    Ok(tree)
}

fn unfold_net(mesh: &PolyhedronMesh, tree: &DissectionTree) -> Result<Net, CliError> {
    cut_and_unfold(mesh, tree).map_err(|e| CliError::Invalid(e.to_string()))
}

fn line(out: &mut dyn Write, v: serde_json::Value) -> Result<(), CliError> {
    writeln!(out, "{v}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

pub fn unfold(a: &UnfoldArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mesh = load_mesh(&a.mesh)?;
    let tree = resolve_tree(&mesh, &a.tree, None)?;
    let net = unfold_net(&mesh, &tree)?;
    let overlaps = a.check_overlap.then(|| self_overlaps(&net).overlaps);
    write_atomic(&a.out_dir.join("net.svg"), &net_svg(&net, &RenderStyle::default()))?;
    write_atomic(&a.out_dir.join("net.json"), &to_json(&NetDto::from_net(&net)))?;
    line(
        out,
        json!({
            "area": net_area(&net),
            "perimeter": net_perimeter(&net),
            "tree_length": tree_length(&tree).unwrap_or(f64::NAN),
            "cells": net.cells.len(),
            "overlaps": overlaps,
        }),
    )
}

fn build_chain(n1: &Net, d2: &DissectionTree) -> Result<DoubleChain, CliError> {
    let marked = draw_tree_in_net(n1, d2).map_err(|e| CliError::Invalid(e.to_string()))?;
    let set = cut_net_along_tree(&marked).map_err(|e| CliError::Invalid(e.to_string()))?;
    build_double_chain(set).map_err(|e| CliError::Invalid(e.to_string()))
}

pub fn reverse(a: &ReverseArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mesh = load_mesh(&a.mesh)?;
    let d1 = resolve_tree(&mesh, &a.tree1, None)?;
    let n1 = unfold_net(&mesh, &d1)?;
    if !a.tree2.starts_with("auto:") && a.tree2.contains(':') {
        return Err(CliError::Parse(format!("--tree2 takes a JSON file or auto:<seed>, not `{}`", a.tree2)));
    }
    let d2 = resolve_tree(&mesh, &a.tree2, Some(&n1))?;
    if let Err(w) = contacts(&mesh, &d1, &d2) {
        return Err(CliError::Crossing(w.to_string()));
    }
    let report = verify_reversibility(&mesh, &d1, &d2);
    let chain = build_chain(&n1, &d2)?;
    let style = RenderStyle::default();
    write_atomic(&a.out_dir.join("n1.svg"), &chain_svg(&chain, &chain.placement_p, &style))?;
    write_atomic(&a.out_dir.join("n2.svg"), &chain_svg(&chain, &chain.placement_q, &style))?;
    write_atomic(&a.out_dir.join("chain.json"), &to_json(&ChainDto::from(&chain)))?;
    write_atomic(&a.out_dir.join("tree2.json"), &to_json(&TreeDto::from_tree(&d2)))?;
    write_atomic(&a.out_dir.join("report.json"), &to_json(&ReportDto::from(&report)))?;
    if let Some(n) = a.frames {
        for (k, motions) in animate_chain(&chain, n).iter().enumerate() {
            write_atomic(&a.out_dir.join("frames").join(format!("frame_{k:03}.svg")), &chain_svg(&chain, motions, &style))?;
        }
    }
    line(
        out,
        json!({
            "reversible": report.is_reversible(),
            "pieces": report.pieces,
            "empty_pieces": report.empty_pieces,
            "hinges": report.hinges,
            "reassembly_error": report.reassembly_error,
        }),
    )?;
    if report.is_reversible() {
        Ok(())
    } else {
        Err(CliError::Invalid("reversibility check failed; see report.json".into()))
    }
}

pub fn source_star(a: &SourceStarArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mesh = load_mesh(&a.mesh)?;
    let s = parse_surface_point(&mesh, &a.source)?;
    if let Loc::Vertex(v) = mesh.locate(&s) {
        return Err(CliError::Invalid(format!("source lies on vertex {v}")));
    }
    let star = star_unfold(&mesh, &s).map_err(geodesic_err)?;
    let locus = cut_locus_of(&star).map_err(geodesic_err)?;
    let source_net = unfold_net(&mesh, &locus)?;
    let source_overlaps = self_overlaps(&source_net).overlaps;
    let star_overlaps = self_overlaps(&star.net).overlaps;
    let report = verify_reversibility(&mesh, &locus, &star.star);
    let style = RenderStyle::default();
    write_atomic(&a.out_dir.join("source.svg"), &net_svg(&source_net, &style))?;
    write_atomic(&a.out_dir.join("star.svg"), &net_svg(&star.net, &style))?;
    write_atomic(&a.out_dir.join("report.json"), &to_json(&ReportDto::from(&report)))?;
    line(
        out,
        json!({
            "source_overlaps": source_overlaps,
            "star_overlaps": star_overlaps,
            "displacement": star.displacement,
            "reversible": report.is_reversible(),
        }),
    )?;
    if source_overlaps || star_overlaps {
        return Err(CliError::Invalid("an unfolding overlaps itself".into()));
    }
    if !report.is_reversible() {
        return Err(CliError::Invalid("reversibility check failed; see report.json".into()));
    }
    Ok(())
}

fn parse_floats<const N: usize>(s: &str, what: &str) -> Result<[f64; N], CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Parse(format!("bad number `{x}` in {what}"))))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| CliError::Parse(format!("{what} needs {N} comma-separated numbers")))
}

pub fn tile(a: &TileArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let [x, y, z] = parse_floats::<3>(&a.triangle, "--triangle")?;
    let [w, h] = parse_floats::<2>(&a.window, "--window")?;
    if !(w > 0.0 && h > 0.0) {
        return Err(CliError::Invalid("window sides must be positive".into()));
    }
    let iso = isotetra_from_triangle(x, y, z).map_err(tile_err)?;
    let tree = resolve_tree(&iso.mesh, &a.tree, None)?;
    let net = unfold_net(&iso.mesh, &tree)?;
    let patch = tile_patch(&net, a.radius).map_err(tile_err)?;
    let window = Window::centered(patch.center, w, h);
    let report = verify_tiling(&net, &patch, &window).map_err(tile_err)?;
    write_atomic(&a.out_dir.join("tiling.svg"), &tiling_svg(&net, &patch, &window, &RenderStyle::default()))?;
    write_atomic(&a.out_dir.join("patch.json"), &to_json(&PatchDto::from(&patch)))?;
    write_atomic(&a.out_dir.join("coverage.json"), &to_json(&CoverageDto::new(&window, &report)))?;
    line(
        out,
        json!({
            "copies": patch.motions.len(),
            "guaranteed_radius": patch.guaranteed_radius,
            "overlap_fraction": report.overlap_fraction,
            "gap_fraction": report.gap_fraction,
        }),
    )?;
    if report.passes(1e-6) {
        Ok(())
    } else {
        Err(CliError::Invalid("window is not tiled; see coverage.json".into()))
    }
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Unfold(a) => unfold(a, out),
        Command::Reverse(a) => reverse(a, out),
        Command::SourceStar(a) => source_star(a, out),
        Command::Tile(a) => tile(a, out),
    }
}

fn tile_err(e: TileError) -> CliError {
    CliError::Invalid(e.to_string())
}
