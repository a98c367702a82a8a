//! ASCII OFF reader and writer.

use std::fmt::Write as _;

use revnet_core::geom::Vec3;
use revnet_core::{MeshError, PolyhedronMesh};

#[derive(Debug, thiserror::Error)]
pub enum OffError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: vertex index {index} out of range ({count} vertices)")]
    IndexOutOfRange { line: usize, index: usize, count: usize },
    #[error("invalid mesh: {0}")]
    Mesh(#[from] MeshError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> OffError {
    OffError::Parse { line, msg: msg.into() }
}

/// Parses OFF text. Comments start with `#`; blank lines are skipped.
pub fn parse_off(text: &str) -> Result<PolyhedronMesh, OffError> {
    let mut rows = text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    });
    let (hline, header) = rows.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens[0] != "OFF" {
        return Err(parse_err(hline, format!("expected `OFF`, found `{}`", tokens[0])));
    }
    tokens.remove(0);
    let (cline, counts) = if tokens.is_empty() {
        let (l, r) = rows.next().ok_or_else(|| parse_err(hline, "missing counts"))?;
        (l, r.split_whitespace().collect::<Vec<_>>())
    } else {
        (hline, tokens)
    };
    if counts.len() < 2 {
        return Err(parse_err(cline, "expected `V F E` counts"));
    }
    let count = |s: &str| s.parse::<usize>().map_err(|_| parse_err(cline, format!("bad count `{s}`")));
    let (nv, nf) = (count(counts[0])?, count(counts[1])?);

    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let (l, row) = rows.next().ok_or_else(|| parse_err(cline, format!("missing vertex {k}")))?;
        let xs: Vec<f64> = row
            .split_whitespace()
            .take(3)
            .map(|s| s.parse::<f64>().map_err(|_| parse_err(l, format!("bad coordinate `{s}`"))))
            .collect::<Result<_, _>>()?;
        if xs.len() < 3 {
            return Err(parse_err(l, "vertex needs 3 coordinates"));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(l, "non-finite coordinate"));
        }
        vertices.push(Vec3 { x: xs[0], y: xs[1], z: xs[2] });
    }

    let mut faces = Vec::with_capacity(nf);
    for k in 0..nf {
        let (l, row) = rows.next().ok_or_else(|| parse_err(cline, format!("missing face {k}")))?;
        let mut it = row.split_whitespace();
        let n: usize = it.next().unwrap().parse().map_err(|_| parse_err(l, "bad face size"))?;
        let mut face = Vec::with_capacity(n);
        for _ in 0..n {
            let s = it.next().ok_or_else(|| parse_err(l, format!("face lists fewer than {n} vertices")))?;
            let index: usize = s.parse().map_err(|_| parse_err(l, format!("bad vertex index `{s}`")))?;
            if index >= nv {
                return Err(OffError::IndexOutOfRange { line: l, index, count: nv });
            }
            face.push(index);
        }
        faces.push(face);
    }
    Ok(PolyhedronMesh::new(vertices, faces)?)
}

/// Shortest text that parses back to exactly `x`, at most 17 significant digits.
pub fn num(x: f64) -> String {
    let s = format!("{x:?}");
    if s.ends_with(".0") {
        s[..s.len() - 2].to_string()
    } else {
        s
    }
}

pub fn write_off(mesh: &PolyhedronMesh) -> String {
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "{} {} {}", mesh.num_vertices(), mesh.faces().len(), mesh.num_edges());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{} {} {}", num(v.x), num(v.y), num(v.z));
    }
    for f in mesh.faces() {
        let idx: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{} {}", f.len(), idx.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use revnet_core::mesh::{regular_tetrahedron, unit_cube};

    const CUBE: &str = "OFF\n# unit cube\n8 6 12\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n4 0 3 2 1\n4 4 5 6 7\n4 0 1 5 4\n4 1 2 6 5\n4 2 3 7 6\n4 3 0 4 7\n";

    #[test]
    fn cube_counts() {
        let m = parse_off(CUBE).unwrap();
        assert_eq!(m.num_vertices(), 8);
        assert_eq!(m.num_edges(), 12);
        assert_eq!(m.faces().len(), 6);
        assert_eq!(m.num_vertices() + m.faces().len() - m.num_edges(), 2);
    }

    #[test]
    fn out_of_range_index() {
        let bad = CUBE.replace("4 2 3 7 6", "4 2 3 99 6");
        match parse_off(&bad) {
            Err(OffError::IndexOutOfRange { line, index: 99, count: 8 }) => assert_eq!(line, 16),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn header_with_counts_and_errors() {
        let m = parse_off("OFF 4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 1 2 3\n3 0 3 2\n").unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert!(matches!(parse_off("PLY\n"), Err(OffError::Parse { line: 1, .. })));
        assert!(matches!(parse_off("OFF\n1 0 0\n0 zero 0\n"), Err(OffError::Parse { line: 3, .. })));
        let open = "OFF\n4 3 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 1 2 3\n";
        assert!(matches!(parse_off(open), Err(OffError::Mesh(_))));
    }

    #[test]
    fn round_trip_is_exact() {
        for m in [unit_cube(), regular_tetrahedron()] {
            let back = parse_off(&write_off(&m)).unwrap();
            assert_eq!(back.vertices(), m.vertices());
            assert_eq!(back.faces(), m.faces());
        }
        let t = regular_tetrahedron();
        assert!((parse_off(&write_off(&t)).unwrap().surface_area() - 3f64.sqrt()).abs() < 1e-12);
    }
}
