use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use revnet::dto::{to_json, ChainDto, NetDto, PatchDto, ReportDto, TreeDto};
use revnet::off::write_off;
use revnet_core::dissection::DissectionTree;
use revnet_core::geom::v3;
use revnet_core::hull::convex_hull;
use revnet_core::mesh::{regular_tetrahedron, unit_cube};
use revnet_core::PolyhedronMesh;
use tempfile::TempDir;

fn revnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revnet")).args(args).output().unwrap()
}

fn mesh_file(dir: &Path, name: &str, m: &PolyhedronMesh) -> String {
    let p = dir.join(name);
    fs::write(&p, write_off(m)).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(text.trim()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unfold_tetra_star() {
    let dir = TempDir::new().unwrap();
    let mesh = mesh_file(dir.path(), "tetra.off", &regular_tetrahedron());
    let out = dir.path().join("out");
    let o = revnet(&["unfold", "--mesh", &mesh, "--tree", "star:3", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!((v["perimeter"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert!((v["area"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-12);
    assert!(v["overlaps"].is_null());
    let svg = fs::read_to_string(out.join("net.svg")).unwrap();
    assert!(svg.contains("<svg"));
    let text = fs::read_to_string(out.join("net.json")).unwrap();
    let net: NetDto = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&net), text);
    assert_eq!(net.vertex_images[3].len(), 3);
}

#[test]
fn unfold_cube_overlap_flag() {
    let dir = TempDir::new().unwrap();
    let mesh = mesh_file(dir.path(), "cube.off", &unit_cube());
    let o = revnet(&["unfold", "--mesh", &mesh, "--tree", "random:42", "--check-overlap", "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    // no edge unfolding of the cube overlaps
    assert_eq!(stdout_json(&o)["overlaps"], serde_json::json!(false));
}

#[test]
fn swirl_tree_from_json_overlaps() {
    let dir = TempDir::new().unwrap();
    let m = unit_cube();
    let mesh = mesh_file(dir.path(), "cube.off", &m);
    let tree = dir.path().join("swirl.json");
    fs::write(&tree, to_json(&TreeDto::from_tree(&revnet_core::dissection::cube_swirl_tree(&m)))).unwrap();
    let o = revnet(&["unfold", "--mesh", &mesh, "--tree", s(&tree), "--check-overlap", "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["overlaps"], serde_json::json!(true));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.off");
    assert_eq!(revnet(&["unfold", "--mesh", s(&missing), "--tree", "star:0"]).status.code(), Some(3));
    let bad = dir.path().join("bad.off");
    fs::write(&bad, "OFF\n8 1 0\n0 0 0\n").unwrap();
    let o = revnet(&["unfold", "--mesh", s(&bad), "--tree", "star:0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing vertex"));
    let mesh = mesh_file(dir.path(), "cube.off", &unit_cube());
    assert_eq!(revnet(&["unfold", "--mesh", &mesh, "--tree", "star:99"]).status.code(), Some(2));
    assert_eq!(revnet(&["unfold", "--mesh", &mesh, "--tree", "random:x"]).status.code(), Some(3));
    assert_eq!(revnet(&["unfold", "--mesh", &mesh]).status.code(), Some(3));
    assert_eq!(revnet(&["--help"]).status.code(), Some(0));
}

#[test]
fn reverse_tetra_with_frames() {
    let dir = TempDir::new().unwrap();
    let mesh = mesh_file(dir.path(), "tetra.off", &regular_tetrahedron());
    let out = dir.path().join("rev");
    let o = revnet(&["reverse", "--mesh", &mesh, "--tree1", "star:3", "--tree2", "auto:7", "--frames", "24", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["reversible"], serde_json::json!(true));
    let report: ReportDto = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report.reversible && report.conditions.iter().all(|c| c.pass));
    assert_eq!(report.conditions.len(), 4);
    let chain: ChainDto = serde_json::from_str(&fs::read_to_string(out.join("chain.json")).unwrap()).unwrap();
    assert_eq!(chain.hinges.len(), 3);
    let frames: Vec<PathBuf> = fs::read_dir(out.join("frames")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(frames.len(), 24);
    assert_eq!(fs::read(out.join("frames/frame_000.svg")).unwrap(), fs::read(out.join("n1.svg")).unwrap());
    assert_eq!(fs::read(out.join("frames/frame_023.svg")).unwrap(), fs::read(out.join("n2.svg")).unwrap());
    assert!(!fs::read_dir(&out).unwrap().any(|e| e.unwrap().path().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn reverse_crossing_pair() {
    let dir = TempDir::new().unwrap();
    let pts = [v3(1.0, 0.0, 0.0), v3(0.0, 1.0, 0.0), v3(-1.0, 0.0, 0.0), v3(0.0, -1.0, 0.0), v3(0.0, 0.0, 1.0), v3(0.0, 0.0, -1.0)];
    let m = convex_hull(&pts).unwrap();
    let mesh = mesh_file(dir.path(), "octa.off", &m);
    let write = |name: &str, pairs: &[(usize, usize)]| {
        let p = dir.path().join(name);
        fs::write(&p, to_json(&TreeDto::from_tree(&DissectionTree::from_vertex_edges(&m, pairs).unwrap()))).unwrap();
        p.to_str().unwrap().to_string()
    };
    let t1 = write("t1.json", &[(4, 0), (4, 2), (0, 1), (2, 3), (0, 5)]);
    let t2 = write("t2.json", &[(4, 1), (4, 3), (1, 2), (3, 0), (1, 5)]);
    let o = revnet(&["reverse", "--mesh", &mesh, "--tree1", &t1, "--tree2", &t2, "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trees cross"));
}

#[test]
fn source_star_cube() {
    let dir = TempDir::new().unwrap();
    let mesh = mesh_file(dir.path(), "cube.off", &unit_cube());
    let o = revnet(&["source-star", "--mesh", &mesh, "--source", "f=0,u=0.3,v=0.2", "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["source_overlaps"], serde_json::json!(false));
    assert_eq!(v["star_overlaps"], serde_json::json!(false));
    assert!(dir.path().join("source.svg").exists() && dir.path().join("star.svg").exists());
    let o = revnet(&["source-star", "--mesh", &mesh, "--source", "f=0,u=1,v=0", "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let o = revnet(&["source-star", "--mesh", &mesh, "--source", "f=0,u=0.3", "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tile_regular_and_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("tile");
    let o = revnet(&["tile", "--triangle", "1,1,1", "--tree", "star:3", "--radius", "3", "--window", "2,2", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!(v["gap_fraction"].as_f64().unwrap() < 1e-6 && v["overlap_fraction"].as_f64().unwrap() < 1e-6);
    let patch: PatchDto = serde_json::from_str(&fs::read_to_string(out.join("patch.json")).unwrap()).unwrap();
    assert_eq!(patch.radius, 3);
    assert_eq!(revnet(&["tile", "--triangle", "3,4,5", "--tree", "random:1", "--window", "1,1"]).status.code(), Some(2));
    let o = revnet(&["tile", "--triangle", "1,1,1", "--tree", "star:3", "--radius", "1", "--window", "50,50", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("covered radius"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let mesh = mesh_file(dir.path(), "cube.off", &unit_cube());
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let a = revnet(&["reverse", "--mesh", &mesh, "--tree1", "random:11", "--tree2", "auto:5", "--frames", "4", "--out-dir", s(&out.join("r"))]);
        let b = revnet(&["tile", "--triangle", "4,5,6", "--tree", "auto:3", "--radius", "6", "--window", "3,3", "--out-dir", s(&out.join("t"))]);
        assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stderr));
        (a.stdout, b.stdout, out)
    };
    let (a1, b1, o1) = run("one");
    let (a2, b2, o2) = run("two");
    assert_eq!(a1, a2);
    assert_eq!(b1, b2);
    let mut files = Vec::new();
    for sub in ["r", "r/frames", "t"] {
        for e in fs::read_dir(o1.join(sub)).unwrap() {
            let p = e.unwrap().path();
            if p.is_file() {
                files.push(p.strip_prefix(&o1).unwrap().to_path_buf());
            }
        }
    }
    assert!(files.len() >= 12);
    for f in files {
        assert_eq!(fs::read(o1.join(&f)).unwrap(), fs::read(o2.join(&f)).unwrap(), "{}", f.display());
    }
}
