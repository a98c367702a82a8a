use proptest::prelude::*;
use revnet_core::dissection::{cube_cross_tree, cube_swirl_tree, edge_spanning_tree, tree_in_net, tree_length, validate_tree, DissectionTree};
use revnet_core::geodesic::shortest_path;
use revnet_core::geom::{self, v2, Containment, Vec2};
use revnet_core::hull::random_sphere_hull;
use revnet_core::isotess::{isotetra_from_triangle, tile_patch, verify_tiling, Window};
use revnet_core::mesh::{unit_cube, PolyhedronMesh, SurfacePoint};
use revnet_core::overlay::Overlay;
use revnet_core::reversible::{build_double_chain, cut_net_along_tree, reassemble, verify_reversibility, Direction};
use revnet_core::unfold::{align_nets, check_net, cut_and_unfold, draw_tree_in_net, net_area, net_perimeter, self_overlaps, Net};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn assert_laws(m: &PolyhedronMesh, t: &DissectionTree, net: &Net) {
    check_net(net).unwrap();
    assert!(rel(net_area(net), m.surface_area()) < 1e-9);
    assert!(rel(net_perimeter(net), 2.0 * tree_length(t).unwrap()) < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn gauss_bonnet(seed in any::<u64>(), k in 4usize..=14) {
        let m = random_sphere_hull(seed, k);
        let total: f64 = (0..m.num_vertices()).map(|v| 2.0 * std::f64::consts::PI - m.angle_sum(v)).sum();
        prop_assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn conservation_on_both_trees(seed in any::<u64>(), k in 6usize..=12) {
        let m = random_sphere_hull(seed, k);
        let d1 = edge_spanning_tree(&m, seed);
        prop_assert!(validate_tree(&m, &d1).is_valid());
        let n1 = cut_and_unfold(&m, &d1).unwrap();
        assert_laws(&m, &d1, &n1);
        let d2 = tree_in_net(&n1, seed).unwrap();
        prop_assert!(validate_tree(&m, &d2).is_valid());
        let n2 = cut_and_unfold(&m, &d2).unwrap();
        assert_laws(&m, &d2, &n2);
    }

    #[test]
    fn development_root_is_irrelevant(seed in any::<u64>(), k in 5usize..=10, r in any::<prop::sample::Index>()) {
        let m = random_sphere_hull(seed, k);
        let d = edge_spanning_tree(&m, seed ^ 1);
        let a = cut_and_unfold(&m, &d).unwrap();
        let ov = Overlay::new(&m, &[&d]).unwrap();
        let root = r.index(ov.cells.len());
        let b = Net::develop(&m, &d, ov, 0, Some(root));
        let (_, err) = align_nets(&a, &b).unwrap();
        prop_assert!(err < 1e-9 * a.diameter());
        prop_assert!(rel(net_area(&a), net_area(&b)) < 1e-12);
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>(), k in 5usize..=9, f in prop::array::uniform3(any::<prop::sample::Index>()), w in prop::array::uniform6(0.05f64..0.3)) {
        let m = random_sphere_hull(seed, k);
        let n = m.num_triangles();
        let pt = |i: usize, a: f64, b: f64| SurfacePoint { face: f[i].index(n), bary: [1.0 - a - b, a, b] };
        let (p, q, r) = (pt(0, w[0], w[1]), pt(1, w[2], w[3]), pt(2, w[4], w[5]));
        let d = |x: &SurfacePoint, y: &SurfacePoint| shortest_path(&m, x, y).unwrap().length;
        let tol = 1e-9 * m.diameter();
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + tol);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() <= tol);
        prop_assert!(d(&p, &q) >= m.point3(&p).dist(m.point3(&q)) - tol);
    }

    #[test]
    fn reverse_chain_rebuilds_first_net(seed in any::<u64>(), k in 6usize..=10) {
        let m = random_sphere_hull(seed, k);
        let d1 = edge_spanning_tree(&m, seed);
        let n1 = cut_and_unfold(&m, &d1).unwrap();
        let d2 = tree_in_net(&n1, seed).unwrap();
        let n2 = cut_and_unfold(&m, &d2).unwrap();
        // chain cut from N2 along D1 folds back into N1
        let chain = build_double_chain(cut_net_along_tree(&draw_tree_in_net(&n2, &d1).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(chain.hinges.len(), m.num_vertices() - 1);
        let back = reassemble(&chain, Direction::Q);
        let (_, err) = align_nets(&back, &n1).unwrap();
        prop_assert!(err < 1e-6 * n1.diameter(), "{}", err);
        let same = reassemble(&chain, Direction::P);
        let (_, err) = align_nets(&same, &n2).unwrap();
        prop_assert!(err < 1e-9 * n2.diameter());
    }
}

fn regular_polygon(n: usize) -> Vec<Vec2> {
    (0..n).map(|k| {
        let a = std::f64::consts::TAU * k as f64 / n as f64;
        v2(a.cos(), a.sin())
    }).collect()
}

#[test]
fn polygon_dihedra_reverse() {
    for n in [4usize, 5, 6] {
        let poly = regular_polygon(n);
        let m = PolyhedronMesh::make_dihedron(&poly).unwrap();
        let area = geom::signed_area(&poly);
        let path: Vec<(usize, usize)> = (0..n - 1).map(|k| (k, k + 1)).collect();
        let d1 = DissectionTree::from_vertex_edges(&m, &path).unwrap();
        let n1 = cut_and_unfold(&m, &d1).unwrap();
        assert!(rel(net_area(&n1), 2.0 * area) < 1e-9);
        for seed in 0..4 {
            let d2 = tree_in_net(&n1, seed).unwrap();
            let r = verify_reversibility(&m, &d1, &d2);
            assert!(r.is_reversible(), "n={n} seed={seed}: {r:?}");
            let n2 = cut_and_unfold(&m, &d2).unwrap();
            assert!(rel(net_area(&n2), 2.0 * area) < 1e-9);
        }
        // shared boundary edges give empty pieces
        let shifted: Vec<(usize, usize)> = (1..n).map(|k| (k, (k + 1) % n)).collect();
        let d2 = DissectionTree::from_vertex_edges(&m, &shifted).unwrap();
        let r = verify_reversibility(&m, &d1, &d2);
        assert!(r.is_reversible(), "n={n}: {r:?}");
        assert!(r.empty_pieces > 0);
    }
}

/// Counts, on a grid, the placed cells covering each sample point.
fn sampled_overlap(net: &Net, step: f64) -> f64 {
    let (lo, hi) = geom::bbox(&net.boundary_polygon());
    let mut hits = 0usize;
    let mut y = lo.y + step / 2.0;
    while y < hi.y {
        let mut x = lo.x + step / 2.0;
        while x < hi.x {
            let p = v2(x, y);
            let c = net.cells.iter().filter(|c| geom::point_in_polygon(p, &c.polygon, 0.0) == Containment::Inside).count();
            if c >= 2 {
                hits += 1;
            }
            x += step;
        }
        y += step;
    }
    hits as f64 * step * step
}

#[test]
fn swirl_cube_net_overlaps() {
    let m = unit_cube();
    let swirl = cut_and_unfold(&m, &cube_swirl_tree(&m)).unwrap();
    let cross = cut_and_unfold(&m, &cube_cross_tree(&m)).unwrap();
    let o = self_overlaps(&swirl);
    assert!(o.overlaps);
    let sampled = sampled_overlap(&swirl, 0.005);
    assert!(sampled > 0.5 * o.total_area && sampled < 1.5 * o.total_area, "{sampled} vs {}", o.total_area);
    assert!(!self_overlaps(&cross).overlaps);
    assert_eq!(sampled_overlap(&cross, 0.01), 0.0);
    assert!(rel(net_area(&cross), 6.0) < 1e-12 && rel(net_perimeter(&cross), 14.0) < 1e-12);
}

#[test]
fn isotetra_nets_reverse_and_tile() {
    for (a, b, c) in [(1.0, 1.0, 1.0), (4.0, 5.0, 6.0), (1.0, 1.1, 1.3)] {
        let iso = isotetra_from_triangle(a, b, c).unwrap();
        let m = &iso.mesh;
        for seed in 0..3 {
            let d1 = edge_spanning_tree(m, seed);
            let n1 = cut_and_unfold(m, &d1).unwrap();
            let d2 = tree_in_net(&n1, seed).unwrap();
            assert!(verify_reversibility(m, &d1, &d2).is_reversible());
            let n2 = cut_and_unfold(m, &d2).unwrap();
            for net in [&n1, &n2] {
                let patch = tile_patch(net, 6).unwrap();
                let d = net.diameter();
                let w = Window::centered(patch.center, d, d);
                let r = verify_tiling(net, &patch, &w).unwrap();
                assert!(r.passes(1e-6), "{r:?}");
            }
        }
    }
}
