//! Branch-and-bound shortest paths against brute-force edge-sequence
//! enumeration, unfolding triangles from 3D distances alone.

use std::collections::BTreeMap;

use proptest::prelude::*;
use revnet_core::geodesic::shortest_path;
use revnet_core::geom::{v2, Vec2, Vec3};
use revnet_core::hull::{convex_hull, random_sphere_hull};
use revnet_core::mesh::{regular_tetrahedron, unit_cube, PolyhedronMesh, SurfacePoint};

const DEPTH: usize = 6;

fn p3(m: &PolyhedronMesh, sp: &SurfacePoint) -> Vec3 {
    let t = m.triangles()[sp.face];
    let mut p = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    for k in 0..3 {
        let v = m.vertex(t[k]);
        p = Vec3 { x: p.x + sp.bary[k] * v.x, y: p.y + sp.bary[k] * v.y, z: p.z + sp.bary[k] * v.z };
    }
    p
}

/// Point at distances `da` from `a` and `db` from `b`, on the side opposite `away`.
fn apex(a: Vec2, b: Vec2, da: f64, db: f64, away: Vec2) -> Vec2 {
    let ab = b - a;
    let l = ab.norm();
    let x = (da * da - db * db + l * l) / (2.0 * l);
    let h = (da * da - x * x).max(0.0).sqrt();
    let e = ab * (1.0 / l);
    let n = v2(-e.y, e.x);
    let side = if (away - a).dot(n) > 0.0 { -1.0 } else { 1.0 };
    a + e * x + n * (h * side)
}

struct Oracle<'a> {
    m: &'a PolyhedronMesh,
    adj: Vec<Vec<(usize, usize, usize)>>,
}

impl<'a> Oracle<'a> {
    fn new(m: &'a PolyhedronMesh) -> Self {
        let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tri) in m.triangles().iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                by_edge.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        let mut adj = vec![Vec::new(); m.num_triangles()];
        for (&(a, b), ts) in &by_edge {
            assert_eq!(ts.len(), 2);
            adj[ts[0]].push((ts[1], a, b));
            adj[ts[1]].push((ts[0], a, b));
        }
        Oracle { m, adj }
    }

    fn shortest(&self, s: &SurfacePoint, t: &SurfacePoint) -> f64 {
        let m = self.m;
        let tri = m.triangles()[s.face];
        let (a, b, c) = (m.vertex(tri[0]), m.vertex(tri[1]), m.vertex(tri[2]));
        let pa = v2(0.0, 0.0);
        let pb = v2(a.dist(b), 0.0);
        let pc = apex(pa, pb, a.dist(c), b.dist(c), v2(0.0, -1.0));
        let mut pos = BTreeMap::new();
        pos.insert(tri[0], pa);
        pos.insert(tri[1], pb);
        pos.insert(tri[2], pc);
        let s2 = pa * s.bary[0] + pb * s.bary[1] + pc * s.bary[2];
        if s.face == t.face {
            return p3(m, s).dist(p3(m, t));
        }
        let mut best = f64::INFINITY;
        let mut visited = vec![false; m.num_triangles()];
        visited[s.face] = true;
        self.dfs(s.face, s2, t, &pos, &mut Vec::new(), &mut visited, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        cur: usize,
        s2: Vec2,
        t: &SurfacePoint,
        pos: &BTreeMap<usize, Vec2>,
        edges: &mut Vec<(Vec2, Vec2)>,
        visited: &mut [bool],
        best: &mut f64,
    ) {
        if edges.len() == DEPTH {
            return;
        }
        let m = self.m;
        let tri = m.triangles()[cur];
        for &(next, a, b) in &self.adj[cur] {
            if visited[next] {
                continue;
            }
            let other_cur = tri.iter().copied().find(|&v| v != a && v != b).unwrap();
            let ntri = m.triangles()[next];
            let far = ntri.iter().copied().find(|&v| v != a && v != b).unwrap();
            let (qa, qb) = (pos[&a], pos[&b]);
            let qf = apex(qa, qb, m.vertex(a).dist(m.vertex(far)), m.vertex(b).dist(m.vertex(far)), pos[&other_cur]);
            let mut npos = pos.clone();
            npos.insert(far, qf);
            edges.push((qa, qb));
            visited[next] = true;
            if next == t.face {
                let t2 = npos[&ntri[0]] * t.bary[0] + npos[&ntri[1]] * t.bary[1] + npos[&ntri[2]] * t.bary[2];
                if crosses_all(s2, t2, edges) {
                    *best = best.min(s2.dist(t2));
                }
            } else {
                self.dfs(next, s2, t, &npos, edges, visited, best);
            }
            visited[next] = false;
            edges.pop();
        }
    }
}

fn crosses_all(s: Vec2, t: Vec2, edges: &[(Vec2, Vec2)]) -> bool {
    edges.iter().all(|&(a, b)| {
        let d = t - s;
        let e = b - a;
        let den = d.x * e.y - d.y * e.x;
        if den.abs() < 1e-300 {
            return false;
        }
        let w = a - s;
        let u = (w.x * e.y - w.y * e.x) / den;
        let v = (w.x * d.y - w.y * d.x) / den;
        (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)
    })
}

fn interior_point(t: usize, u: f64, v: f64) -> SurfacePoint {
    let a = 0.05 + 0.85 * u;
    let b = (0.95 - a) * (0.05 + 0.9 * v);
    SurfacePoint { face: t, bary: [1.0 - a - b, a, b] }
}

fn check_pair(m: &PolyhedronMesh, s: &SurfacePoint, t: &SurfacePoint) -> bool {
    let oracle = Oracle::new(m);
    let want = oracle.shortest(s, t);
    let got = shortest_path(m, s, t).unwrap();
    let diam = m.diameter();
    assert!(got.length <= want + 1e-9 * diam, "branch and bound {} longer than enumeration {want}", got.length);
    if got.crossed_edges.len() <= DEPTH {
        assert!((got.length - want).abs() <= 1e-9 * want.max(diam * 1e-3), "{} vs {want}", got.length);
        true
    } else {
        false
    }
}

#[test]
fn tetra_and_cube_pairs() {
    let mut compared = 0;
    for m in [regular_tetrahedron(), unit_cube()] {
        let n = m.num_triangles();
        for i in 0..n {
            for j in 0..n {
                let s = interior_point(i, 0.3, 0.2);
                let t = interior_point(j, 0.15, 0.6);
                compared += check_pair(&m, &s, &t) as usize;
            }
        }
    }
    assert!(compared > 100);
}

#[test]
fn cube_known_lengths() {
    let m = unit_cube();
    let pt = |x: f64, y: f64, z: f64| {
        let target = Vec3 { x, y, z };
        (0..m.num_triangles())
            .find_map(|t| {
                let tri = m.triangles()[t];
                let [a, b, c] = [m.vertex(tri[0]), m.vertex(tri[1]), m.vertex(tri[2])];
                let sub = |p: Vec3, q: Vec3| Vec3 { x: p.x - q.x, y: p.y - q.y, z: p.z - q.z };
                let (e1, e2, w) = (sub(b, a), sub(c, a), sub(target, a));
                let n = e1.cross(e2);
                if w.dot(n).abs() > 1e-12 {
                    return None;
                }
                let nn = n.norm2();
                let u = w.cross(e2).dot(n) / nn;
                let v = e1.cross(w).dot(n) / nn;
                (u >= -1e-12 && v >= -1e-12 && u + v <= 1.0 + 1e-12).then_some(SurfacePoint { face: t, bary: [1.0 - u - v, u, v] })
            })
            .unwrap()
    };
    let d = shortest_path(&m, &pt(0.0, 0.0, 0.0), &pt(1.0, 1.0, 1.0)).unwrap().length;
    assert!((d - 5f64.sqrt()).abs() < 1e-9);
    let d = shortest_path(&m, &pt(0.5, 0.5, 0.0), &pt(0.5, 0.5, 1.0)).unwrap().length;
    assert!((d - 2.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn random_hulls_match_enumeration(seed in 0u64..10_000, k in 5usize..=8, i in 0usize..64, j in 0usize..64, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let m = random_sphere_hull(seed, k);
        prop_assume!(m.num_triangles() <= 20);
        let n = m.num_triangles();
        let s = interior_point(i % n, u, v);
        let t = interior_point(j % n, v, 1.0 - u);
        check_pair(&m, &s, &t);
    }
}

#[test]
fn flat_octahedron_pairs() {
    let pts = [
        Vec3 { x: 2.0, y: 0.0, z: 0.0 },
        Vec3 { x: 0.0, y: 1.0, z: 0.0 },
        Vec3 { x: -2.0, y: 0.0, z: 0.0 },
        Vec3 { x: 0.0, y: -1.0, z: 0.0 },
        Vec3 { x: 0.0, y: 0.0, z: 0.4 },
        Vec3 { x: 0.0, y: 0.0, z: -0.4 },
    ];
    let m = convex_hull(&pts).unwrap();
    for i in 0..m.num_triangles() {
        let s = interior_point(i, 0.5, 0.1);
        let t = interior_point((i * 5 + 3) % m.num_triangles(), 0.2, 0.7);
        check_pair(&m, &s, &t);
    }
}
