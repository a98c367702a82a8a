//! Incremental 3D convex hull for small point sets.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geom::Vec3;
use crate::mesh::{MeshError, PolyhedronMesh};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HullError {
    #[error("points are coplanar or too few")]
    Degenerate,
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Hull of `k` points drawn uniformly on the unit sphere, deterministic per
/// seed. Redraws until the hull keeps every point.
pub fn random_sphere_hull(seed: u64, k: usize) -> PolyhedronMesh {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pts: Vec<Vec3> = (0..k.max(4))
            .map(|_| {
                let z: f64 = rng.gen_range(-1.0..1.0);
                let t: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
                let r = (1.0 - z * z).sqrt();
                crate::geom::v3(r * t.cos(), r * t.sin(), z)
            })
            .collect();
        if let Ok(m) = convex_hull(&pts) {
            if m.num_vertices() == pts.len() {
                return m;
            }
        }
    }
}

/// Convex hull as a triangle mesh. Points strictly inside are dropped.
pub fn convex_hull(points: &[Vec3]) -> Result<PolyhedronMesh, HullError> {
    let n = points.len();
    if n < 4 {
        return Err(HullError::Degenerate);
    }
    let mut scale: f64 = 0.0;
    for p in points {
        scale = scale.max(p.dist(points[0]));
    }
    let eps = 1e-10 * scale;

    // initial tetrahedron
    let i0 = 0;
    let i1 = (1..n).max_by(|&a, &b| points[a].dist(points[i0]).partial_cmp(&points[b].dist(points[i0])).unwrap()).unwrap();
    let line = points[i1] - points[i0];
    let i2 = (0..n)
        .max_by(|&a, &b| {
            let da = line.cross(points[a] - points[i0]).norm();
            let db = line.cross(points[b] - points[i0]).norm();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let normal = line.cross(points[i2] - points[i0]);
    if normal.norm() <= eps * scale {
        return Err(HullError::Degenerate);
    }
    let i3 = (0..n)
        .max_by(|&a, &b| {
            let da = normal.dot(points[a] - points[i0]).abs();
            let db = normal.dot(points[b] - points[i0]).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let h = normal.dot(points[i3] - points[i0]);
    if h.abs() <= eps * normal.norm() {
        return Err(HullError::Degenerate);
    }
    let mut faces: Vec<[usize; 3]> = if h < 0.0 {
        vec![[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i2, i3, i0]]
    } else {
        vec![[i0, i2, i1], [i0, i1, i3], [i1, i2, i3], [i2, i0, i3]]
    };

    let above = |f: &[usize; 3], p: Vec3| {
        let (a, b, c) = (points[f[0]], points[f[1]], points[f[2]]);
        let nn = (b - a).cross(c - a);
        nn.dot(p - a) / nn.norm()
    };

    for (i, &p) in points.iter().enumerate() {
        if [i0, i1, i2, i3].contains(&i) {
            continue;
        }
        let visible: Vec<bool> = faces.iter().map(|f| above(f, p) > eps).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut owner: BTreeMap<(usize, usize), bool> = BTreeMap::new();
        for (f, &vis) in faces.iter().zip(&visible) {
            for k in 0..3 {
                owner.insert((f[k], f[(k + 1) % 3]), vis);
            }
        }
        let mut next = Vec::new();
        for (f, &vis) in faces.iter().zip(&visible) {
            if !vis {
                next.push(*f);
                continue;
            }
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                if owner.get(&(b, a)) == Some(&false) {
                    next.push([a, b, i]);
                }
            }
        }
        faces = next;
    }

    let mut remap = vec![usize::MAX; n];
    let mut verts = Vec::new();
    for f in &faces {
        for &v in f {
            if remap[v] == usize::MAX {
                remap[v] = verts.len();
                verts.push(points[v]);
            }
        }
    }
    // keep vertex order stable with respect to the input
    let mut order: Vec<usize> = (0..n).filter(|&v| remap[v] != usize::MAX).collect();
    order.sort_unstable();
    let mut rank = vec![usize::MAX; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let verts: Vec<Vec3> = order.iter().map(|&v| points[v]).collect();
    let faces: Vec<Vec<usize>> = faces.iter().map(|f| f.iter().map(|&v| rank[v]).collect()).collect();
    Ok(PolyhedronMesh::new(verts, faces)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v3;

    #[test]
    fn hull_of_cube_corners_plus_center() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(v3((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        pts.push(v3(0.5, 0.5, 0.5));
        let m = convex_hull(&pts).unwrap();
        assert_eq!(m.num_vertices(), 8);
        assert!((m.surface_area() - 6.0).abs() < 1e-12);
        assert!(m.is_convex());
    }

    #[test]
    fn coplanar_rejected() {
        let pts = [v3(0.0, 0.0, 0.0), v3(1.0, 0.0, 0.0), v3(0.0, 1.0, 0.0), v3(1.0, 1.0, 0.0)];
        assert_eq!(convex_hull(&pts).unwrap_err(), HullError::Degenerate);
    }
}
